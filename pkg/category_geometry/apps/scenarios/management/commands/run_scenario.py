import logging
import os

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from category_geometry.apps.core.exceptions import CategoryGeometryError
from category_geometry.apps.infomeasure.constants import UNITS
from category_geometry.apps.scenarios.api import error_record, run_scenario, write_error_record
from category_geometry.apps.scenarios.config import load_scenario
from category_geometry.apps.scenarios.constants import SCENARIO_NAMES


logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = (
        'Runs one of the named scenarios and writes its CSV and JSON artifacts, a summary and a manifest to the '
        'output directory. On a configuration or numerical failure an error.json is written instead and the '
        'command exits with code 2 or 3.'
    )

    def add_arguments(self, parser):
        parser.add_argument(
            'scenario',
            choices=SCENARIO_NAMES,
            help='The scenario to run',
        )
        parser.add_argument(
            '--config',
            action='store',
            dest='config',
            help='JSON file with values overriding the scenario defaults',
            default=None,
        )
        parser.add_argument(
            '--seed',
            action='store',
            dest='seed',
            type=int,
            help='Seed of every random draw of the run; overrides the config',
            default=None,
        )
        parser.add_argument(
            '--out',
            action='store',
            dest='out',
            help='Output directory, by default <SCENARIO_OUTPUT_ROOT>/<scenario>',
            default=None,
        )
        parser.add_argument(
            '--threads',
            action='store',
            dest='threads',
            type=int,
            help='Worker threads; results do not depend on it',
            default=None,
        )
        parser.add_argument(
            '--units',
            action='store',
            dest='units',
            choices=UNITS,
            help='Units of every reported information value',
            default=None,
        )

    def handle(self, *args, **options):
        name = options['scenario']
        out_dir = options['out'] or os.path.join(settings.CATEGORY_GEOMETRY['SCENARIO_OUTPUT_ROOT'], name)
        scenario = None
        try:
            scenario = load_scenario(
                name,
                config_path=options['config'],
                seed=options['seed'],
                out_dir=out_dir,
                threads=options['threads'],
                units=options['units'],
            )
            manifest = run_scenario(scenario)
        except CategoryGeometryError as error:
            digest = scenario.config_digest if scenario is not None else None
            record = error_record(name, error, error.exit_code, digest)
            path = write_error_record(out_dir, record)
            logger.error('Scenario {} failed, see {}: {}'.format(name, path, error), exc_info=True)
            raise CommandError(str(error), returncode=error.exit_code)

        message = 'Scenario {} wrote {} artifacts to {} (config digest {})'.format(
            name, len(manifest['artifacts']), out_dir, manifest['config_digest'],
        )
        logger.info(message)
