"""
Scenario configs: one JSON document per run, merged over the defaults of its scenario.
"""
import json
import os
from copy import deepcopy
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from category_geometry.apps.core.montecarlo import MCConfig
from category_geometry.apps.core.utils import config_digest, file_digest
from category_geometry.apps.infomeasure.constants import UNITS
from category_geometry.apps.scenarios.constants import (
    ALLOCATE,
    BIASVAR,
    CONTINUUM,
    FCAT_FIELD,
    FCODE_FIELD,
    FILE_KEYS,
    GAUSS1D,
    MAX_SEED,
    MI_VALIDATE,
    PDC2D,
    SCENARIO_NAMES,
    SEED_KEY,
    TRAIN2D,
    TRIPLE_EXCLUSION,
)
from category_geometry.apps.scenarios.exceptions import InvalidScenarioConfig


def _network(hidden_dims, noise_sigma=0.3):
    return {'hidden_dims': hidden_dims, 'activations': 'sigmoid', 'noise_sigma': noise_sigma, 'link': 'f'}


def _builder(name, **params):
    return {'builder': name, 'params': params}


DEFAULTS = {
    GAUSS1D: {
        'a_values': [1.0, 1.5, 2.0],
        'sigma_values': [0.6, 1.0],
        'c': 1.0,
        'x_range': [-4.0, 4.0],
        'n_points': 401,
    },
    PDC2D: {
        'model': _builder('diagonal_pair', a=1.2, sigma=1.3, c=[1.0, 0.0]),
        'model_file': None,
        'n_curves': 12,
        'start_radius': 0.5,
        'step': None,
        'max_arc': None,
        'margin': None,
    },
    FCAT_FIELD: {
        'model': _builder('three_gaussians'),
        'model_file': None,
        'nodes_per_dim': 41,
        'bounds': None,
    },
    FCODE_FIELD: {
        'model': _builder('three_gaussians'),
        'model_file': None,
        'code': _builder('radial_grid', span=[-3.0, 3.0], per_dim=7),
        'code_file': None,
        'network_file': None,
        'nodes_per_dim': 41,
        'bounds': None,
    },
    TRAIN2D: {
        'model': _builder('three_gaussians'),
        'model_file': None,
        'n_train': 3000,
        'n_test': 3000,
        'network': _network([32, 32]),
        'epochs': 200,
        'batch_size': 64,
        'learning_rate': 0.5,
        'noise_during_training': True,
        'n_probes': 50,
        'triple_exclusion': TRIPLE_EXCLUSION,
        'nodes_per_dim': None,
    },
    CONTINUUM: {
        'model': _builder('gauss_pair_1d', a=1.0, sigma=0.5, c=1.0),
        'model_file': None,
        'ambient_dim': 20,
        'squash': True,
        'embedding_scale': 1.0,
        'n_train': 3000,
        'network': _network([32]),
        'epochs': 200,
        'batch_size': 64,
        'learning_rate': 0.5,
        'noise_during_training': True,
        'path_start': [-2.0],
        'path_end': [2.0],
        'n_points': 33,
        'transition_threshold': 0.9,
    },
    MI_VALIDATE: {
        'model': _builder('gauss_pair_1d', a=1.0, sigma=1.0, c=1.0),
        'model_file': None,
        'ns': [64, 128, 256, 512],
        'population': {
            'span': [-4.0, 4.0],
            'width': 0.25,
            'max_rate': 1.0,
            'noise': {'family': 'gaussian_iid', 'sigma': 0.5},
        },
        'outer_samples': 100000,
        'inner_samples': 1,
        'chunk_size': None,
        'antithetic': True,
        'nodes_per_dim': None,
    },
    ALLOCATE: {
        'model': _builder('gauss_pair_1d', a=1.5, sigma=1.0, c=1.0),
        'model_file': None,
        'constraint': {'type': 'power_law', 'alpha': 1.0},
        'multiplier': None,
        'budget': None,
        'ratio': False,
        'nodes_per_dim': None,
        'compare_grid': True,
    },
    BIASVAR: {
        'model': _builder('gauss_pair_1d', a=1.0, sigma=1.0, c=1.0),
        'model_file': None,
        'network_file': None,
        'network': _network([8]),
        'n_train': 2000,
        'epochs': 30,
        'batch_size': 64,
        'learning_rate': 0.5,
        'noise_during_training': True,
        'outer_samples': 4000,
        'inner_samples': 8,
        'chunk_size': None,
        'projection_axes': None,
        'nodes_per_dim': None,
    },
}

# Keys whose default is None, with the type a given value must have
NULLABLE = {
    SEED_KEY: int,
    'model_file': str,
    'code_file': str,
    'network_file': str,
    'step': float,
    'max_arc': float,
    'margin': float,
    'bounds': list,
    'multiplier': float,
    'budget': float,
    'projection_axes': list,
    'nodes_per_dim': int,
    'chunk_size': int,
}

# Dict-valued keys merged key by key over their defaults; other dicts are replaced whole
MERGED = ('network', 'population')


def _type_matches(value, expected):
    if expected is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if expected is int:
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, expected)


def resolve_config(name, data):
    """
    The defaults of scenario ``name`` updated with ``data``; unknown keys and wrong types are errors.
    """
    if name not in SCENARIO_NAMES:
        raise InvalidScenarioConfig(
            'scenario', 'unknown scenario {!r}; expected one of {}'.format(name, SCENARIO_NAMES),
        )
    if not isinstance(data, dict):
        raise InvalidScenarioConfig('config', 'must be a JSON object, got {}'.format(type(data).__name__))
    defaults = DEFAULTS[name]
    config = deepcopy(defaults)
    config[SEED_KEY] = None
    for key, value in data.items():
        if key not in config:
            raise InvalidScenarioConfig(key, 'unknown key for scenario {}'.format(name))
        default = config[key]
        if value is None:
            if default is not None:
                raise InvalidScenarioConfig(key, 'may not be null')
            continue
        expected = NULLABLE[key] if default is None else type(default)
        if not _type_matches(value, expected):
            raise InvalidScenarioConfig(key, 'expected {}, got {!r}'.format(expected.__name__, value))
        if key in MERGED:
            unknown = set(value) - set(default)
            if unknown:
                raise InvalidScenarioConfig(key, 'unknown fields {}'.format(sorted(unknown)))
            config[key].update(deepcopy(value))
        else:
            config[key] = deepcopy(value)
    return config


def read_config_file(path):
    if not os.path.isfile(path):
        raise InvalidScenarioConfig('config', 'file {} does not exist'.format(path))
    with open(path, encoding='utf-8') as stream:
        try:
            return json.load(stream)
        except json.JSONDecodeError as error:
            raise InvalidScenarioConfig('config', 'file {} is not valid JSON: {}'.format(path, error))


@dataclass(frozen=True)
class Scenario:
    """
    A fully resolved scenario run. ``threads`` only sets the worker count and never enters a digest.
    """
    name: str
    config: dict
    seed: int
    out_dir: str
    units: str
    threads: int = 1
    input_files: dict = field(default_factory=dict)

    def input_digests(self):
        return {key: file_digest(path) for key, path in sorted(self.input_files.items())}

    @property
    def config_digest(self):
        return config_digest({
            'scenario': self.name,
            'config': self.config,
            'seed': self.seed,
            'units': self.units,
            'inputs': self.input_digests(),
        })

    @property
    def nodes_per_dim(self):
        value = self.config.get('nodes_per_dim')
        return value if value is not None else settings.CATEGORY_GEOMETRY['DEFAULT_QUADRATURE_NODES']

    def mc(self):
        chunk_size = self.config.get('chunk_size') or settings.CATEGORY_GEOMETRY['DEFAULT_CHUNK_SIZE']
        try:
            return MCConfig(
                outer_samples=self.config['outer_samples'],
                inner_samples=self.config['inner_samples'],
                seed=self.seed,
                chunk_size=chunk_size,
                threads=self.threads,
            )
        except ValueError as error:
            raise InvalidScenarioConfig('outer_samples/inner_samples/chunk_size', str(error))

    def derived_seeds(self, count):
        """
        ``count`` independent integer seeds drawn from the scenario seed.
        """
        return [int(value) for value in np.random.SeedSequence(self.seed).generate_state(count)]


def load_scenario(name, config_path=None, seed=None, out_dir=None, threads=None, units=None):
    """
    Resolve a scenario from its config file and command-line overrides.
    """
    data = read_config_file(config_path) if config_path else {}
    config = resolve_config(name, data)
    base_dir = os.path.dirname(os.path.abspath(config_path)) if config_path else os.getcwd()

    defaults = settings.CATEGORY_GEOMETRY
    seed = seed if seed is not None else config[SEED_KEY]
    seed = seed if seed is not None else defaults['DEFAULT_SEED']
    if not 0 <= seed <= MAX_SEED:
        raise InvalidScenarioConfig(SEED_KEY, 'must lie in 0..2^64-1, got {}'.format(seed))
    config[SEED_KEY] = seed
    threads = threads if threads is not None else defaults['DEFAULT_THREADS']
    if threads < 1:
        raise InvalidScenarioConfig('threads', 'must be >= 1, got {}'.format(threads))
    units = units or defaults['MI_UNITS']
    if units not in UNITS:
        raise InvalidScenarioConfig('units', 'expected one of {}, got {!r}'.format(UNITS, units))

    input_files = {}
    for key in FILE_KEYS:
        value = config.get(key)
        if not value:
            continue
        path = value if os.path.isabs(value) else os.path.join(base_dir, value)
        if not os.path.isfile(path):
            raise InvalidScenarioConfig(key, 'file {} does not exist'.format(path))
        input_files[key] = path

    return Scenario(
        name=name,
        config=config,
        seed=seed,
        out_dir=out_dir or os.path.join(defaults['SCENARIO_OUTPUT_ROOT'], name),
        units=units,
        threads=threads,
        input_files=input_files,
    )
