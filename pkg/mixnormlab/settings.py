"""
Django settings for mixnormlab project.
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='unsafe-development-key-only')
DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'rest_framework',
    'taggit',
    'mixnorm',
    'reports',
]

# Database
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': config('MIXNORM_DB_PATH', default=str(BASE_DIR / 'db.sqlite3')),
        'OPTIONS': {
            'timeout': 20,
        }
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# Reports are emitted by the management commands, never served.
REST_FRAMEWORK = {
    "STRICT_JSON": True,
    "COERCE_DECIMAL_TO_STRING": False,
}

# ===== NUMERICAL DEFAULTS =====
MIXNORM = {
    'BISECTION_RTOL': config('MIXNORM_BISECTION_RTOL', default=1e-12, cast=float),
    'TAIL_THRESHOLD': config('MIXNORM_TAIL_THRESHOLD', default=0.05, cast=float),
    'J_AUDIT': config('MIXNORM_J_AUDIT', default=6, cast=int),
    'FD_STEP': config('MIXNORM_FD_STEP', default=1e-4, cast=float),
    'AUDIT_POINTS': config('MIXNORM_AUDIT_POINTS', default=128, cast=int),
    'PROFILE_POINTS': config('MIXNORM_PROFILE_POINTS', default=2048, cast=int),
    'REPORT_SCHEMA': config('MIXNORM_REPORT_SCHEMA', default=1, cast=int),
}

# ===== LOGGING =====
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'mixnorm': {
            'handlers': ['console'],
            'level': config('MIXNORM_LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
        'reports': {
            'handlers': ['console'],
            'level': config('MIXNORM_LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
    },
}
