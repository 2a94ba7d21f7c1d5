"""
JSON population-code files: {"units": [...], "noise": {...}}.
"""
import json

import numpy as np

from category_geometry.apps.neurocode.codes import NoiseSpec, PopulationCode
from category_geometry.apps.neurocode.constants import Q_GAUSSIAN, SIGMOID_RAMP
from category_geometry.apps.neurocode.exceptions import InvalidCode, InvalidNoise


NOISE_FIELDS = ('family', 'sigma', 'correlation', 'density', 'nu', 'link', 't', 'fisher_mode')


def noise_spec_from_dict(data):
    unknown = set(data) - set(NOISE_FIELDS)
    if unknown:
        raise InvalidNoise('Unknown noise fields {}'.format(sorted(unknown)))
    kwargs = dict(data)
    kwargs.setdefault('density', Q_GAUSSIAN)
    return NoiseSpec(**kwargs)


def population_code_from_dict(data):
    units = data.get('units')
    if not units:
        raise InvalidCode('A code file needs a non-empty "units" list')
    try:
        centers = [np.atleast_1d(unit['center']).tolist() for unit in units]
        widths = [unit['width'] for unit in units]
        max_rates = [unit['max_rate'] for unit in units]
        families = [unit.get('family', SIGMOID_RAMP) for unit in units]
    except KeyError as error:
        raise InvalidCode('Unit is missing field {}'.format(error))
    dim = len(centers[0])
    if any(len(center) != dim for center in centers):
        raise InvalidCode('Units disagree on the stimulus dimension')
    directions = []
    for unit in units:
        direction = unit.get('direction')
        if direction is None:
            direction = [1.0] + [0.0] * (dim - 1)
        directions.append(direction)
    noise = noise_spec_from_dict(data.get('noise', {}))
    return PopulationCode(centers, widths, max_rates, families, noise, directions=directions)


def load_population_code(path):
    with open(path, encoding='utf-8') as stream:
        try:
            data = json.load(stream)
        except json.JSONDecodeError as error:
            raise InvalidCode('Code file {} is not valid JSON: {}'.format(path, error))
    return population_code_from_dict(data)


def dump_population_code(code, path=None):
    data = code.to_dict()
    if path is not None:
        with open(path, 'w', encoding='utf-8') as stream:
            json.dump(data, stream, indent=2, sort_keys=True)
    return data
