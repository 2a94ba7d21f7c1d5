"""
Run a resolved scenario and record what it wrote.
"""
import logging
import os

import django
import numpy
import pandas
import scipy
from django.utils import timezone

import category_geometry
from category_geometry.apps.scenarios.artifacts import ArtifactWriter, write_json_file
from category_geometry.apps.scenarios.constants import ERROR_FILE, MANIFEST_FILE, SUMMARY_FILE
from category_geometry.apps.scenarios.runners import RUNNERS


logger = logging.getLogger(__name__)


def package_versions():
    return {
        'category_geometry': category_geometry.__version__,
        'django': django.get_version(),
        'numpy': numpy.__version__,
        'pandas': pandas.__version__,
        'scipy': scipy.__version__,
    }


def build_manifest(scenario, artifacts):
    """
    Everything needed to reproduce a run: its resolved config, seed, input and artifact digests and the
    package versions. Only ``created`` differs between two identical runs.
    """
    return {
        'scenario': scenario.name,
        'config': scenario.config,
        'config_digest': scenario.config_digest,
        'seed': scenario.seed,
        'units': scenario.units,
        'inputs': {
            key: {'path': scenario.input_files[key], 'digest': digest}
            for key, digest in scenario.input_digests().items()
        },
        'artifacts': dict(sorted(artifacts.items())),
        'versions': package_versions(),
        'created': timezone.now().isoformat(),
    }


def run_scenario(scenario):
    """
    Run ``scenario`` into its output directory and return the manifest.

    The manifest is written last, so a directory without one holds an interrupted run.
    """
    logger.info('Running scenario {} with seed {} into {}'.format(scenario.name, scenario.seed, scenario.out_dir))
    writer = ArtifactWriter(scenario.out_dir)
    summary = RUNNERS[scenario.name](scenario, writer)
    writer.write_json(SUMMARY_FILE, summary)
    manifest = build_manifest(scenario, writer.digests)
    write_json_file(writer.path(MANIFEST_FILE), manifest)
    return manifest


def error_record(name, error, exit_code, digest=None):
    return {
        'scenario': name,
        'error_type': type(error).__name__,
        'exit_code': exit_code,
        'message': str(error),
        'config_digest': digest,
    }


def write_error_record(out_dir, record):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, ERROR_FILE)
    write_json_file(path, record)
    return path
