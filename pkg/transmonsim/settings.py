from pathlib import Path
import os

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('SECRET_KEY', 'transmonsim-local-only-key')

DEBUG = os.environ.get('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'circuits',
    'simulations',
]

# No persistence beyond flat files: runs never touch a database.
DATABASES = {}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}

# Numerical defaults. Every value can be overridden per run from the CLI or a
# scenario file; these only fill what neither of them sets.
SIMULATION = {
    'RTOL': float(os.environ.get('SIM_RTOL', '1e-10')),
    'ATOL': float(os.environ.get('SIM_ATOL', '1e-10')),
    'T_MAX': float(os.environ.get('SIM_T_MAX', '10.0')),
    'GRID_POINTS': int(os.environ.get('SIM_GRID_POINTS', '1001')),
    'METHOD': os.environ.get('SIM_METHOD', 'DOP853'),
    'N_JOBS': int(os.environ.get('SIM_N_JOBS', '1')),
    'OUTPUT_DIR': Path(os.environ.get('SIM_OUTPUT_DIR', BASE_DIR / 'output')),
    'ENTANGLEMENT_THRESHOLD': float(os.environ.get('SIM_ENTANGLEMENT_THRESHOLD', '0.9')),
    'DEFAULT_SEED': int(os.environ.get('SIM_DEFAULT_SEED', '20240601')),
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name}: {message}',
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
        'circuits': {
            'handlers': ['console'],
            'level': os.environ.get('SIM_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
        'simulations': {
            'handlers': ['console'],
            'level': os.environ.get('SIM_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
