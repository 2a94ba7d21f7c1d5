"""
Sphinx configuration for the Category Geometry docs.
"""
import os
import sys

import edx_theme

sys.path.insert(0, os.path.abspath('..'))

extensions = ['edx_theme', 'sphinx.ext.autodoc']
templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'Category Geometry'
copyright = edx_theme.COPYRIGHT  # pylint: disable=redefined-builtin
author = 'Category Geometry developers'
version = '0.1'
release = version

exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'edx_theme'
html_theme_path = [edx_theme.get_html_theme_path()]
html_favicon = os.path.join(html_theme_path[0], 'edx_theme', 'static', 'css', 'favicon.ico')
htmlhelp_basename = 'category_geometrydoc'

# autodoc imports the apps, which needs configured settings
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'category_geometry.settings.test')
