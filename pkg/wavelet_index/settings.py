"""
Django settings for wavelet_index project.
"""

from pathlib import Path
from decouple import config

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='django-insecure-change-this-in-production')

DEBUG = config('DEBUG', default=True, cast=bool)

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    # Third party apps
    'rest_framework',

    # Local apps
    'wavelet',
]

# Indexes are plain files written by the `wt` command; no database.
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# REST Framework settings (serializers/renderers only)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'COERCE_DECIMAL_TO_STRING': False,
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
}

# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'wavelet': {
            'handlers': ['console'],
            'level': config('WT_LOG_LEVEL', default='WARNING'),
            'propagate': False,
        },
    },
}

# Wavelet Trie tunables
WAVELET_TRIE = {
    # Append-only bitvector (sealed RRR blocks + explicit tail)
    'ABV_BLOCK_LENGTH': config('WT_ABV_BLOCK_LENGTH', default=4096, cast=int),
    'ABV_MAX_BLOCK_LENGTH': config('WT_ABV_MAX_BLOCK_LENGTH', default=65536, cast=int),
    'ABV_REBUILD_BUDGET': config('WT_ABV_REBUILD_BUDGET', default=2, cast=int),

    # Logarithmic-method segment stack
    'SEGMENT_MIN_R': config('WT_SEGMENT_MIN_R', default=64, cast=int),
    'SEGMENT_R_FACTOR': config('WT_SEGMENT_R_FACTOR', default=4, cast=int),

    # "blocked" (AppendFID) or "logarithmic" (SegmentStack)
    'APPEND_BITVECTOR': config('WT_APPEND_BITVECTOR', default='blocked'),

    # Fully dynamic RLE+gamma bitvector
    'DBV_CHUNK_TARGET': config('WT_DBV_CHUNK_TARGET', default=256, cast=int),

    # Hashed wavelet tree multiplier seed (None draws a fresh one)
    'HASHWT_SEED': config('WT_HASHWT_SEED', default=None, cast=lambda v: None if v in (None, '') else int(v)),

    'SELFCHECK_SAMPLE': config('WT_SELFCHECK_SAMPLE', default=1000, cast=int),
}
