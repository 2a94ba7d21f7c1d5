"""
CSV and JSON artifacts of a scenario run, each fingerprinted for the manifest.
"""
import json
import logging
import os

import numpy as np
import pandas as pd
from django.conf import settings

from category_geometry.apps.core.utils import file_digest, to_jsonable


logger = logging.getLogger(__name__)


def write_json_file(path, data):
    with open(path, 'w', encoding='utf-8') as stream:
        stream.write(json.dumps(to_jsonable(data), indent=2, sort_keys=True) + '\n')


class ArtifactWriter:
    """
    Writes artifacts into ``out_dir`` and keeps the sha256 of every file it wrote.

    Floats in CSV files are formatted with ``float_format`` (17 significant digits by default),
    which reproduces every double exactly when read back.
    """

    def __init__(self, out_dir, float_format=None):
        os.makedirs(out_dir, exist_ok=True)
        self.out_dir = out_dir
        self.float_format = float_format or settings.CATEGORY_GEOMETRY['FLOAT_FORMAT']
        self.digests = {}

    def path(self, name):
        return os.path.join(self.out_dir, name)

    def record(self, name):
        self.digests[name] = file_digest(self.path(name))
        logger.debug('Wrote {}'.format(self.path(name)))
        return self.path(name)

    def write_frame(self, name, frame):
        frame.to_csv(self.path(name), index=False, float_format=self.float_format)
        return self.record(name)

    def write_json(self, name, data):
        write_json_file(self.path(name), data)
        return self.record(name)


def field_frame(points, fishers, prefix='f'):
    """
    One row per point: coordinates x_i, upper-triangle entries {prefix}_ij, the trace, the top eigenvalue
    and its eigenvector, signed so that its largest component is positive.
    """
    points = np.atleast_2d(points)
    dim = points.shape[1]
    columns = {'x_{}'.format(axis + 1): points[:, axis] for axis in range(dim)}
    for i in range(dim):
        for j in range(i, dim):
            columns['{}_{}{}'.format(prefix, i + 1, j + 1)] = [fisher.entries[i, j] for fisher in fishers]
    columns['{}_trace'.format(prefix)] = [fisher.trace for fisher in fishers]
    columns['{}_lambda_1'.format(prefix)] = [fisher.top_eigenvalue for fisher in fishers]
    vectors = np.array([fisher.top_eigenvector for fisher in fishers]).reshape(len(points), dim)
    signs = np.sign(vectors[np.arange(len(vectors)), np.argmax(np.abs(vectors), axis=1)])
    vectors = vectors * np.where(signs == 0, 1.0, signs)[:, None]
    for axis in range(dim):
        columns['{}_v_{}'.format(prefix, axis + 1)] = vectors[:, axis]
    return pd.DataFrame(columns)
