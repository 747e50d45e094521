"""
Django settings for the activity_editor project.
Pipeline defaults are read from ACTIVITY_EDITOR_* environment variables.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load .env from the project directory explicitly
load_dotenv(BASE_DIR / '.env')

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'django-insecure-change-this-in-production-key')

DEBUG = os.getenv('DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'django.contrib.contenttypes',

    # Third-party apps
    'django_celery_results',

    # Local apps
    'core',
]

# Database - PostgreSQL for production, SQLite for development
DATABASE_URL = os.getenv('DATABASE_URL', '')
if DATABASE_URL:
    import dj_database_url
    DATABASES = {
        'default': dj_database_url.parse(DATABASE_URL)
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.sqlite3',
            'NAME': BASE_DIR / 'db.sqlite3',
        }
    }

# Internationalization
LANGUAGE_CODE = 'en'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# =============================================================================
# LOGGING
# =============================================================================
LOG_LEVEL = os.getenv('ACTIVITY_EDITOR_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'standard': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'standard',
        },
    },
    'loggers': {
        'core': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

# =============================================================================
# CHAT ENDPOINT
# =============================================================================
# Provider: 'openai' (any OpenAI-compatible endpoint), 'groq', or 'mock'
# (deterministic offline client).
ENDPOINT_PROVIDER = os.getenv('ACTIVITY_EDITOR_PROVIDER', 'openai')
ENDPOINT_BASE_URL = os.getenv('ACTIVITY_EDITOR_BASE_URL', '')
ENDPOINT_MODEL = os.getenv('ACTIVITY_EDITOR_MODEL', 'gpt-4o-mini')

# Keys are only taken from the environment or a key file, never from flags.
ENDPOINT_API_KEY = (
    os.getenv('ACTIVITY_EDITOR_API_KEY', '')
    or os.getenv('OPENAI_API_KEY', '')
    or os.getenv('GROQ_API_KEY', '')
)
ENDPOINT_API_KEY_FILE = os.getenv('ACTIVITY_EDITOR_API_KEY_FILE', '')

ENDPOINT_TEMPERATURE = float(os.getenv('ACTIVITY_EDITOR_TEMPERATURE', 0.7))
ENDPOINT_TIMEOUT = float(os.getenv('ACTIVITY_EDITOR_TIMEOUT', 60))
ENDPOINT_MAX_RETRIES = int(os.getenv('ACTIVITY_EDITOR_MAX_RETRIES', 3))
ENDPOINT_RETRY_BACKOFF = float(os.getenv('ACTIVITY_EDITOR_RETRY_BACKOFF', 1.0))

# =============================================================================
# PIPELINE SETTINGS
# =============================================================================
EDITOR_MAX_ROUNDS = int(os.getenv('ACTIVITY_EDITOR_MAX_ROUNDS', 3))
GENERATION_CONCURRENCY = int(os.getenv('ACTIVITY_EDITOR_CONCURRENCY', 4))
RANDOM_SEED = int(os.getenv('ACTIVITY_EDITOR_SEED', 0))
ROLLOUTS_PER_PROMPT = int(os.getenv('ACTIVITY_EDITOR_ROLLOUTS_PER_PROMPT', 8))

# Optional JSON documents overriding the defaults in core/constraint_rules.py
DURATION_BOUNDS_PATH = os.getenv('ACTIVITY_EDITOR_DURATION_BOUNDS', '')
COMMONSENSE_RULES_PATH = os.getenv('ACTIVITY_EDITOR_COMMONSENSE_RULES', '')

# Gaps shorter than this are absorbed by the preceding activity during repair;
# longer gaps become home.
REPAIR_GAP_EXTEND_MINUTES = int(os.getenv('ACTIVITY_EDITOR_REPAIR_GAP_EXTEND', 30))

# Coherence: more segments than COHERENCE_MAX_EPISODES is fragmentation; an
# A -> B -> A detour shorter than COHERENCE_MIN_DETOUR_MINUTES is flagged.
COHERENCE_MAX_EPISODES = int(os.getenv('ACTIVITY_EDITOR_MAX_EPISODES', 12))
COHERENCE_MIN_DETOUR_MINUTES = int(os.getenv('ACTIVITY_EDITOR_MIN_DETOUR_MINUTES', 15))

# Celery Configuration
CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL', 'redis://127.0.0.1:6379/0')
CELERY_RESULT_BACKEND = 'django-db'
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'UTC'
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 30 * 60  # 30 minutes
