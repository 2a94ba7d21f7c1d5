"""
Category models, population codes and networks named by a scenario config.
"""
import logging

from category_geometry.apps.categories import builders
from category_geometry.apps.categories.serializers import load_category_model
from category_geometry.apps.nettrain import api as nettrain_api
from category_geometry.apps.nettrain.networks import MLPModel
from category_geometry.apps.nettrain.serializers import load_network
from category_geometry.apps.neurocode import api as neurocode_api
from category_geometry.apps.neurocode.serializers import load_population_code, noise_spec_from_dict
from category_geometry.apps.scenarios.exceptions import InvalidScenarioConfig


logger = logging.getLogger(__name__)


def _with_noise(factory):
    def build(*args, noise=None, **kwargs):
        return factory(*args, noise=noise_spec_from_dict(noise) if noise is not None else None, **kwargs)
    return build


MODEL_BUILDERS = {
    'gauss_pair_1d': builders.gauss_pair_1d,
    'diagonal_pair': builders.diagonal_pair,
    'gauss_pair': builders.gauss_pair,
    'equal_covariance_pair': builders.equal_covariance_pair,
    'elliptic_pair': builders.elliptic_pair,
    'hyperbolic_pair': builders.hyperbolic_pair,
    'expgauss_pair': builders.expgauss_pair,
    'three_gaussians': builders.three_gaussians,
}

CODE_BUILDERS = {
    'dense_sigmoid': _with_noise(neurocode_api.dense_sigmoid_population),
    'radial': _with_noise(neurocode_api.radial_population),
    'radial_grid': _with_noise(neurocode_api.radial_grid_population),
}


def build_from_spec(key, spec, registry):
    """
    Call the builder ``spec['builder']`` of ``registry`` with keyword arguments ``spec['params']``.
    """
    if not isinstance(spec, dict) or set(spec) - {'builder', 'params'}:
        raise InvalidScenarioConfig(key, 'expected {{"builder": ..., "params": {{...}}}}, got {!r}'.format(spec))
    builder = registry.get(spec.get('builder'))
    if builder is None:
        raise InvalidScenarioConfig(key, 'unknown builder {!r}; expected one of {}'.format(
            spec.get('builder'), sorted(registry),
        ))
    params = spec.get('params', {})
    if not isinstance(params, dict):
        raise InvalidScenarioConfig(key, 'params must be an object')
    try:
        return builder(**params)
    except TypeError as error:
        raise InvalidScenarioConfig(key, 'bad parameters for {}: {}'.format(spec['builder'], error))


def resolve_model(scenario):
    path = scenario.input_files.get('model_file')
    if path:
        logger.info('Loading the category model from {}'.format(path))
        return load_category_model(path)
    return build_from_spec('model', scenario.config['model'], MODEL_BUILDERS)


def resolve_code(scenario):
    path = scenario.input_files.get('code_file')
    if path:
        return load_population_code(path)
    return build_from_spec('code', scenario.config['code'], CODE_BUILDERS)


def resolve_network(scenario):
    path = scenario.input_files.get('network_file')
    if path:
        logger.info('Loading the network from {}'.format(path))
        return load_network(path)
    return None


def network_from_config(scenario, input_dim, n_classes, seed):
    """
    An untrained network with the config's hidden layers between ``input_dim`` inputs and ``n_classes`` outputs.
    """
    network = scenario.config['network']
    hidden = network['hidden_dims']
    if not isinstance(hidden, list) or not hidden:
        raise InvalidScenarioConfig('network.hidden_dims', 'expected a non-empty list, got {!r}'.format(hidden))
    return MLPModel(
        [input_dim] + list(hidden) + [n_classes],
        activations=network['activations'],
        noise_sigma=network['noise_sigma'],
        link=network['link'],
        seed=seed,
    )


def train_config(scenario, seed):
    config = scenario.config
    return nettrain_api.TrainConfig(
        epochs=config['epochs'],
        batch_size=config['batch_size'],
        learning_rate=config['learning_rate'],
        seed=seed,
        noise_during_training=config['noise_during_training'],
    )


def check_dimension(key, expected, actual):
    if expected != actual:
        raise InvalidScenarioConfig(key, 'has dimension {}, the model needs {}'.format(actual, expected))
