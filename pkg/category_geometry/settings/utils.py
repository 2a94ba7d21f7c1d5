import sys
from os import environ

from django.core.exceptions import ImproperlyConfigured


def get_env_setting(setting):
    """ Get the environment setting or raise exception """
    try:
        return environ[setting]
    except KeyError:
        raise ImproperlyConfigured('Set the [{}] env variable!'.format(setting))


def get_logger_config(debug=False):
    """
    Return the logging config dictionary for the LOGGING setting.

    Everything goes through one stderr console handler; stdout stays free for command output.
    The ``category_geometry`` logger propagates to the root handler so that ``assertLogs`` sees it.
    """
    level = 'DEBUG' if debug else 'INFO'
    return {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'standard': {
                'format': '%(asctime)s %(levelname)s %(process)d '
                          '[%(name)s] %(filename)s:%(lineno)d - %(message)s',
            },
        },
        'handlers': {
            'console': {
                'level': level,
                'class': 'logging.StreamHandler',
                'formatter': 'standard',
                'stream': sys.stderr,
            },
        },
        'loggers': {
            'django': {
                'handlers': ['console'],
                'propagate': False,
                'level': 'INFO',
            },
            'factory': {
                'propagate': True,
                'level': 'WARNING',
            },
            'category_geometry': {
                'propagate': True,
                'level': level,
            },
            '': {
                'handlers': ['console'],
                'level': 'WARNING',
            },
        },
    }
