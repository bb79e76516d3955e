from django.urls import path

from . import views

urlpatterns = [
    path('runs/', views.create_run, name='create_run'),
    path('baselines/', views.create_baseline, name='create_baseline'),
]
