"""
Settings for the test run.
"""
import os

from settings.base import *  # pylint: disable=wildcard-import,unused-wildcard-import

NCK_THREADS = 1

# Test runs write only to temporary directories.
NCK_DEFAULT_OUTPUT_DIR = os.path.join(BASE_DIR, 'runs', 'test')

LOGGING['loggers']['noisecleaner']['level'] = os.environ.get('NCK_LOG_LEVEL', 'WARNING')
