""" Utility functions for the core app. """
import hashlib
import json

import numpy as np


def chunks(a_list, chunk_size):
    """
    Helper to break a list up into chunks. Returns a list of lists
    """
    for i in range(0, len(a_list), chunk_size):
        yield a_list[i:i + chunk_size]


def to_jsonable(value):
    """
    Convert numpy containers and scalars into plain JSON types.
    """
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def canonical_json(value):
    return json.dumps(to_jsonable(value), sort_keys=True, separators=(',', ':'))


def config_digest(value):
    """
    sha256 of the canonical JSON form of ``value``.
    """
    return hashlib.sha256(canonical_json(value).encode('utf-8')).hexdigest()


def file_digest(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as stream:
        for block in iter(lambda: stream.read(65536), b''):
            digest.update(block)
    return digest.hexdigest()


def as_points(x, dim):
    """
    View ``x`` as an (n, dim) array of points; returns the array and whether a single point was given.
    """
    array = np.asarray(x, dtype=float)
    if array.ndim <= 1:
        if array.size != dim:
            raise ValueError('expected a point of dimension {}, got {} values'.format(dim, array.size))
        return array.reshape(1, dim), True
    if array.ndim != 2 or array.shape[1] != dim:
        raise ValueError('expected points of dimension {}, got shape {}'.format(dim, array.shape))
    return array, False
