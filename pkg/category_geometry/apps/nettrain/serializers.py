"""
JSON weight dumps of networks, stamped with a digest of their architecture and weights.
"""
import json

from category_geometry.apps.core.utils import config_digest
from category_geometry.apps.nettrain.constants import NETWORK_FORMAT_VERSION
from category_geometry.apps.nettrain.exceptions import InvalidNetwork
from category_geometry.apps.nettrain.networks import MLPModel


def network_digest(net):
    return config_digest(net.to_dict())


def network_from_dict(data):
    try:
        net = MLPModel(
            data['layer_dims'],
            activations=data['activations'],
            noise_sigma=data['noise_sigma'],
            link=data['link'],
            noise_layer=data['noise_layer'],
            weights=data['weights'],
            biases=data['biases'],
            seed=data.get('seed', 0),
        )
    except KeyError as error:
        raise InvalidNetwork('Network dump is missing field {}'.format(error))
    expected = data.get('digest')
    if expected is not None and expected != network_digest(net):
        raise InvalidNetwork('Network dump digest {} does not match its contents'.format(expected))
    return net


def dump_network(net, path=None, metadata=None):
    data = net.to_dict()
    data['format_version'] = NETWORK_FORMAT_VERSION
    data['digest'] = network_digest(net)
    if metadata:
        data['metadata'] = metadata
    if path is not None:
        with open(path, 'w', encoding='utf-8') as stream:
            json.dump(data, stream, indent=2, sort_keys=True)
    return data


def load_network(path):
    with open(path, encoding='utf-8') as stream:
        try:
            data = json.load(stream)
        except json.JSONDecodeError as error:
            raise InvalidNetwork('Network file {} is not valid JSON: {}'.format(path, error))
    return network_from_dict(data)
