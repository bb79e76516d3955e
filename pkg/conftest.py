"""Configure Django before pytest collects the lsm_app test modules."""
import os
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent / 'backend'))
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'project.settings')

import django  # noqa: E402

django.setup()

# Mirror `manage.py test`: the Django test runner sets up the test
# environment (test client host, in-memory email, ...) before running.
from django.test.utils import setup_test_environment  # noqa: E402

setup_test_environment()
