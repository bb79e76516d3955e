"""
URL configuration for the evolved LSM project.

Only the experiment API is routed; the engine itself is driven from the
management commands (`manage.py evolve|run|ablate|baseline`).
"""
from django.urls import path, include

urlpatterns = [
    path('api/', include('lsm_app.urls')),
]
