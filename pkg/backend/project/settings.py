"""
Django settings for the evolved liquid state machine project.

Every simulation constant is read through python-decouple so it can be
overridden from the environment, a `.env`/`settings.ini` file next to the
project, or (per CLI invocation) a flat `KEY=value` file passed with --config.

For the full list of Django settings, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path

from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# The HTTP API is a local experiment launcher; override the key for any deployment.
SECRET_KEY = config('SECRET_KEY', default='lsm-local-development-key')
DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config(
    'ALLOWED_HOSTS',
    default='localhost,127.0.0.1',
    cast=lambda v: [host.strip() for host in v.split(',') if host.strip()],
)


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'lsm_app',
]

REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'UNAUTHENTICATED_USER': None,
}

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'project.urls'

WSGI_APPLICATION = 'project.wsgi.application'


# Database
# Nothing is persisted in a database; runs write CSV artifacts instead.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'lsm_app': {
            'handlers': ['console'],
            'level': config('LSM_LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
    },
}


# ===============================================================
# Engine parameters
# ---------------------------------------------------------------
# Flat KEY -> value map; lsm_app.conf turns it into typed parameter
# objects. A --config file on the command line overrides any key.
# ===============================================================
LSM = {
    # LIF neurons
    'TAU_M': config('TAU_M', default=2.0, cast=float),
    'V_TH': config('V_TH', default=1.0, cast=float),
    'V_RESET': config('V_RESET', default=0.0, cast=float),
    'TICKS_PER_STEP': config('TICKS_PER_STEP', default=20, cast=int),

    # Liquid layout and wiring
    'GRID_WIDTH': config('GRID_WIDTH', default=10, cast=int),
    'GRID_HEIGHT': config('GRID_HEIGHT', default=10, cast=int),
    'LAMBDA': config('LAMBDA', default=2.0, cast=float),
    'ALPHA': config('ALPHA', default=4.0, cast=float),
    'D_TH': config('D_TH', default=3.0, cast=float),
    'SPARSITY': config('SPARSITY', default=0.01, cast=float),
    'BETA': config('BETA', default=4.0, cast=float),
    'INPUT_FAN_OUT': config('INPUT_FAN_OUT', default=4, cast=int),
    'DENSITY_CAP': config('DENSITY_CAP', default=0.02, cast=float),

    # Structure evolution
    'N_INI': config('N_INI', default=100, cast=int),
    'N_OPT': config('N_OPT', default=20, cast=int),
    'OFFSPRING': config('OFFSPRING', default=10, cast=int),
    'G_TH': config('G_TH', default=20, cast=int),
    'GENERATIONS': config('GENERATIONS', default=30, cast=int),
    'RATE': config('RATE', default=0.2, cast=float),
    'PROBE_WINDOW': config('PROBE_WINDOW', default=100, cast=int),

    # Plasticity
    'TAU_BCM': config('TAU_BCM', default=0.9, cast=float),
    'THETA_WINDOW': config('THETA_WINDOW', default=50.0, cast=float),
    'EPSILON': config('EPSILON', default=0.001, cast=float),
    'LEARNING_RATE': config('LEARNING_RATE', default=0.05, cast=float),
    'BCM_HEADROOM': config('BCM_HEADROOM', default=2.0, cast=float),
    'W_MIN': config('W_MIN', default=0.0, cast=float),
    'W_MAX': config('W_MAX', default=8.0, cast=float),
    'STDP_A_PLUS': config('STDP_A_PLUS', default=0.01, cast=float),
    'STDP_A_MINUS': config('STDP_A_MINUS', default=0.012, cast=float),
    'STDP_TAU_PLUS': config('STDP_TAU_PLUS', default=5.0, cast=float),
    'STDP_TAU_MINUS': config('STDP_TAU_MINUS', default=5.0, cast=float),

    # T-maze
    'TMAZE_ENERGY': config('TMAZE_ENERGY', default=30, cast=int),
    'REVERSAL_PROBABILITY': config('REVERSAL_PROBABILITY', default=0.25, cast=float),
    'REVERSAL_STREAK': config('REVERSAL_STREAK', default=3, cast=int),
    'TMAZE_HORIZON': config('TMAZE_HORIZON', default=500, cast=int),

    # Flappy Bird
    'FLAPPY_HORIZON': config('FLAPPY_HORIZON', default=2000, cast=int),
    'FLAPPY_HEIGHT': config('FLAPPY_HEIGHT', default=20, cast=int),
    'FLAPPY_GAP': config('FLAPPY_GAP', default=6, cast=int),
    'FLAPPY_PIPE_SPACING': config('FLAPPY_PIPE_SPACING', default=12, cast=int),
    'FLAPPY_PIPE_WIDTH': config('FLAPPY_PIPE_WIDTH', default=2, cast=int),
    'FLAPPY_FLAP': config('FLAPPY_FLAP', default=2, cast=int),
    'FLAPPY_GRAVITY': config('FLAPPY_GRAVITY', default=1, cast=int),
    'FLAPPY_MAX_FALL': config('FLAPPY_MAX_FALL', default=3, cast=int),

    # Tabular Q-learning baseline
    'Q_ALPHA': config('Q_ALPHA', default=0.1, cast=float),
    'Q_GREEDY': config('Q_GREEDY', default=0.8, cast=float),
    'Q_GAMMA_TMAZE': config('Q_GAMMA_TMAZE', default=0.9, cast=float),
    'Q_GAMMA_FLAPPY': config('Q_GAMMA_FLAPPY', default=0.99, cast=float),

    # Harness
    'SMOOTHING_SIGMA': config('SMOOTHING_SIGMA', default=5.0, cast=float),
    'WORKERS': config('WORKERS', default=1, cast=int),
    'SEEDS': config('SEEDS', default=10, cast=int),
}
