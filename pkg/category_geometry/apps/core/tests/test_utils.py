import numpy as np
from django.test import SimpleTestCase

from category_geometry.apps.core import utils


class UtilsTests(SimpleTestCase):
    """
    Tests for the core utils.
    """

    def test_chunks(self):
        assert list(utils.chunks([1, 2, 3, 4, 5], 2)) == [[1, 2], [3, 4], [5]]

    def test_config_digest_ignores_key_order(self):
        assert utils.config_digest({'a': 1, 'b': [1.5]}) == utils.config_digest({'b': [1.5], 'a': 1})
        assert utils.config_digest({'a': 1}) != utils.config_digest({'a': 2})

    def test_to_jsonable(self):
        value = utils.to_jsonable({'x': np.arange(2), 'y': np.float64(0.5), 'z': (np.bool_(True),)})
        assert value == {'x': [0, 1], 'y': 0.5, 'z': [True]}

    def test_as_points(self):
        points, single = utils.as_points([1.0, 2.0], 2)
        assert points.shape == (1, 2)
        assert single
        points, single = utils.as_points(np.zeros((5, 2)), 2)
        assert points.shape == (5, 2)
        assert not single

    def test_as_points_dimension_mismatch(self):
        with self.assertRaises(ValueError):
            utils.as_points([1.0, 2.0, 3.0], 2)
        with self.assertRaises(ValueError):
            utils.as_points(np.zeros((4, 3)), 2)
