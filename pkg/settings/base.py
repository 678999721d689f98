"""
Base settings for the noise cleaner.
"""
import os

from django.core.exceptions import ImproperlyConfigured


def env_count(name, default):
    """
    Read a positive integer from the environment variable `name`.

    Raises:
        ImproperlyConfigured: The variable is set but is not a positive integer.

    """
    value = os.environ.get(name)
    if value is None or not value.strip():
        return default
    try:
        count = int(value)
    except ValueError:
        count = 0
    if count < 1:
        raise ImproperlyConfigured(u"{} must be a positive integer, got '{}'".format(name, value))
    return count


DEBUG = True

# The package keeps no database state.
DATABASES = {}

TIME_ZONE = 'UTC'

LANGUAGE_CODE = 'en-us'

USE_I18N = False

USE_TZ = True

# Make this unique, and don't share it with anybody.
SECRET_KEY = 'noisecleaner-not-a-secret'

INSTALLED_APPS = (
    'noisecleaner',
)

BASE_DIR = os.path.abspath(os.path.dirname(os.path.dirname(__file__)))

# Upper bound on worker threads, used when every anomalous video gets its own cleaner.
NCK_THREADS = env_count('NCK_THREADS', 1)

# Run directories default to <NCK_DEFAULT_OUTPUT_DIR>/<command>-seed<seed>.
NCK_DEFAULT_OUTPUT_DIR = os.environ.get('NCK_DEFAULT_OUTPUT_DIR', os.path.join(BASE_DIR, 'runs'))

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
        'noisecleaner': {
            'handlers': ['console'],
            'level': os.environ.get('NCK_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}

TEST_RUNNER = 'django.test.runner.DiscoverRunner'
