import tempfile

from category_geometry.settings.base import *


output_dir = tempfile.TemporaryDirectory()
CATEGORY_GEOMETRY['SCENARIO_OUTPUT_ROOT'] = output_dir.name

# Make some loggers less noisy (useful during test failure)
import logging

for logger_to_silence in ['faker', 'factory']:
    logging.getLogger(logger_to_silence).setLevel(logging.WARNING)
