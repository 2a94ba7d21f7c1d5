import os
from os.path import abspath, dirname, join

from category_geometry.settings.utils import get_logger_config

# PATH vars
here = lambda *x: join(abspath(dirname(__file__)), *x)
PROJECT_ROOT = here("..")
root = lambda *x: join(abspath(PROJECT_ROOT), *x)


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('CATEGORY_GEOMETRY_SECRET_KEY', 'insecure-secret-key')

DEBUG = False

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = ()

PROJECT_APPS = (
    'category_geometry.apps.core',
    'category_geometry.apps.categories',
    'category_geometry.apps.catfisher',
    'category_geometry.apps.neurocode',
    'category_geometry.apps.infomeasure',
    'category_geometry.apps.allocate',
    'category_geometry.apps.nettrain',
    'category_geometry.apps.scenarios',
)

INSTALLED_APPS += PROJECT_APPS

# No database: every result is written as a CSV/JSON artifact.
DATABASES = {}

# INTERNATIONALIZATION CONFIGURATION
# See: https://docs.djangoproject.com/en/dev/ref/settings/#language-code
LANGUAGE_CODE = 'en-us'

# See: https://docs.djangoproject.com/en/dev/ref/settings/#time-zone
TIME_ZONE = 'UTC'

# See: https://docs.djangoproject.com/en/dev/ref/settings/#use-tz
USE_TZ = True
# END INTERNATIONALIZATION CONFIGURATION

# SCENARIO CONFIGURATION
# Defaults used by the scenario runner; production overrides them from YAML.
CATEGORY_GEOMETRY = {
    'SCENARIO_OUTPUT_ROOT': root('..', 'scenario_output'),
    'DEFAULT_THREADS': 1,
    'DEFAULT_SEED': 0,
    'FLOAT_FORMAT': '%.17g',
    'DEFAULT_CHUNK_SIZE': 4096,
    'DEFAULT_QUADRATURE_NODES': 201,
    'MI_UNITS': 'nats',
}
# END SCENARIO CONFIGURATION

LOGGING = get_logger_config(debug=DEBUG)
