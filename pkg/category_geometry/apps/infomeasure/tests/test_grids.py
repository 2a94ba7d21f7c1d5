"""
Tests for quadrature grids.
"""
from unittest import mock

import numpy as np
import pytest
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from category_geometry.apps.categories import builders
from category_geometry.apps.categories.tests.factories import random_gaussian_model
from category_geometry.apps.infomeasure.grids import QuadratureGrid, default_grid


class QuadratureGridTests(SimpleTestCase):

    def test_polynomials_are_integrated_exactly(self):
        grid = QuadratureGrid.from_box([0.0, -1.0], [1.0, 2.0], 5)
        values = grid.nodes[:, 0] ** 2 * grid.nodes[:, 1] ** 3
        assert np.dot(grid.weights, values) == pytest.approx((1.0 / 3.0) * (16.0 - 1.0) / 4.0, rel=1e-12)

    def test_weights_are_positive(self):
        grid = QuadratureGrid.from_box([-2.0], [3.0], 31)
        assert np.all(grid.weights > 0)
        assert grid.size == 31
        assert grid.dim == 1

    def test_invalid_box(self):
        with self.assertRaises(ValueError):
            QuadratureGrid.from_box([1.0], [0.0], 11)
        with self.assertRaises(ValueError):
            QuadratureGrid.from_box([0.0, 0.0], [1.0], 11)

    def test_large_grids_are_logged(self):
        with mock.patch('category_geometry.apps.infomeasure.grids.LARGE_GRID_NODES', 10):
            with self.assertLogs('category_geometry.apps.infomeasure.grids', level='WARNING'):
                QuadratureGrid.from_box([0.0, 0.0], [1.0, 1.0], 4)


class DefaultGridTests(SimpleTestCase):

    def test_captures_the_gaussian_mass(self):
        model = builders.gauss_pair_1d(1.0, 1.0, 1.0)
        grid = default_grid(model)
        assert grid.check_normalization(model) == pytest.approx(1.0, abs=1e-6)
        np.testing.assert_allclose(grid.class_masses(model), 1.0, atol=1e-6)
        assert grid.lows == (-7.0,)
        assert grid.highs == (7.0,)

    def test_random_two_dimensional_models(self):
        for seed in range(5):
            model = random_gaussian_model(seed, n_classes=3)
            grid = default_grid(model, 61)
            np.testing.assert_allclose(grid.class_masses(model), 1.0, atol=1e-3)

    def test_expgauss_box_is_the_domain(self):
        model = builders.expgauss_pair()
        grid = default_grid(model, 101)
        assert grid.lows[0] == -1.0
        assert grid.highs[0] == 1.0
        np.testing.assert_allclose(grid.class_masses(model), 1.0, atol=1e-3)

    def test_node_count_comes_from_settings(self):
        model = builders.gauss_pair_1d(1.0, 1.0, 1.0)
        with override_settings(CATEGORY_GEOMETRY=dict(settings.CATEGORY_GEOMETRY, DEFAULT_QUADRATURE_NODES=11)):
            assert default_grid(model).size == 11

    def test_to_dict(self):
        grid = QuadratureGrid.from_box([0.0], [1.0], 7)
        assert grid.to_dict() == {'lows': [0.0], 'highs': [1.0], 'nodes_per_dim': 7}
