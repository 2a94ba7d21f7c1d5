"""
JSON model files and CSV datasets.
"""
import json

import numpy as np
import pandas as pd

from category_geometry.apps.categories.constants import EXP_GAUSS, GAUSSIAN
from category_geometry.apps.categories.distributions import (
    CategoryModel,
    ExpGaussComponent,
    GaussianComponent,
)
from category_geometry.apps.categories.exceptions import InvalidModel


def component_from_dict(data):
    kind = data.get('type')
    try:
        if kind == GAUSSIAN:
            return GaussianComponent(data['mean'], data['cov'])
        if kind == EXP_GAUSS:
            kwargs = {'domain': data['domain']} if 'domain' in data else {}
            return ExpGaussComponent(data['c1'], data['tau'], data['sigma2_sq'], **kwargs)
    except KeyError as error:
        raise InvalidModel('Component of type {} is missing field {}'.format(kind, error))
    raise InvalidModel('Unknown component type: {}'.format(kind))


def category_model_from_dict(data):
    components = [component_from_dict(item) for item in data.get('components', [])]
    model = CategoryModel(components, priors=data.get('priors'))
    if 'dim' in data and int(data['dim']) != model.dim:
        raise InvalidModel('Model file declares dim={} but components have dim={}'.format(data['dim'], model.dim))
    return model


def load_category_model(path):
    with open(path, encoding='utf-8') as stream:
        try:
            data = json.load(stream)
        except json.JSONDecodeError as error:
            raise InvalidModel('Model file {} is not valid JSON: {}'.format(path, error))
    return category_model_from_dict(data)


def dump_category_model(model, path=None):
    data = model.to_dict()
    if path is not None:
        with open(path, 'w', encoding='utf-8') as stream:
            json.dump(data, stream, indent=2, sort_keys=True)
    return data


def dataset_frame(features, labels):
    features = np.atleast_2d(features)
    columns = ['x_{}'.format(axis + 1) for axis in range(features.shape[1])]
    frame = pd.DataFrame(features, columns=columns)
    frame['y'] = np.asarray(labels, dtype=int)
    return frame


def write_dataset(path, features, labels, float_format='%.17g'):
    dataset_frame(features, labels).to_csv(path, index=False, float_format=float_format)


def read_dataset(path):
    frame = pd.read_csv(path, float_precision='round_trip')
    feature_columns = [column for column in frame.columns if column.startswith('x_')]
    return frame[feature_columns].to_numpy(dtype=float), frame['y'].to_numpy(dtype=int)
