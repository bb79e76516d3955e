"""
WSGI entry point serving the experiment API (`/api/runs/`, `/api/baselines/`).

Long ablations belong on the command line; the API is meant for single
cells at a scale that finishes within a request.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'project.settings')

application = get_wsgi_application()
