"""
Tests for the catfisher app api.
"""
import ddt
import numpy as np
import pytest
from django.test import SimpleTestCase
from scipy import optimize

from category_geometry.apps.categories import api as categories_api
from category_geometry.apps.categories import builders
from category_geometry.apps.categories.tests.factories import random_covariance, random_gaussian_model
from category_geometry.apps.catfisher import api
from category_geometry.apps.catfisher.exceptions import (
    InvalidGeometry,
    NoInteriorMax,
    NoSignChange,
    ZeroGradient,
)
from category_geometry.apps.catfisher.geometry import Polyline
from category_geometry.apps.core.constants import FLAG_DEGENERATE_POSTERIOR


def lateral_deviation(points, origin, direction):
    """
    Largest distance of ``points`` from the line through ``origin`` along ``direction``.
    """
    direction = direction / np.linalg.norm(direction)
    offsets = points - origin
    return np.max(np.linalg.norm(offsets - np.outer(offsets @ direction, direction), axis=1))


@ddt.ddt
class FisherCatTests(SimpleTestCase):
    """
    Tests for ``fisher_cat`` and its invariants.
    """

    def test_equal_covariance_pair_at_origin(self):
        model = builders.gauss_pair_1d(1.0, 1.0, 1.0)
        fisher = api.fisher_cat(model, [0.0])
        assert fisher.entries[0, 0] == pytest.approx(1.0, rel=1e-12)

    @ddt.data(-40.0, 40.0)
    def test_vanishes_far_away(self, x):
        model = builders.gauss_pair_1d(1.0, 1.0, 1.0)
        assert api.fisher_cat(model, [x]).top_eigenvalue < 1e-30

    def test_degenerate_posterior_is_flagged(self):
        model = builders.gauss_pair_1d(1.0, 1.0, 1.0)
        fisher = api.fisher_cat(model, [400.0])
        assert FLAG_DEGENERATE_POSTERIOR in fisher.flags
        assert fisher.entries[0, 0] == 0.0

    def test_deep_inside_a_category(self):
        model = builders.three_gaussians()
        boundary_point = 0.5 * (model.components[0].mean + model.components[1].mean)
        deep_point = model.components[0].mean + np.array([0.0, 2.0])
        assert api.fisher_cat(model, deep_point).trace < 1e-3 * api.fisher_cat(model, boundary_point).trace

    def test_psd_and_rank_bound(self):
        rng = np.random.default_rng(0)
        for draw in range(200):
            n_classes = 2 + draw % 3
            dim = 2 + draw % 2
            model = random_gaussian_model(seed=draw, n_classes=n_classes, dim=dim)
            point = rng.normal(scale=1.5, size=dim)
            fisher = api.fisher_cat(model, point)
            scale = max(1.0, fisher.top_eigenvalue)
            assert np.linalg.eigvalsh(fisher.entries).min() >= -1e-10 * scale
            assert api.rank_fcat(model, point) <= min(n_classes - 1, dim)
            np.testing.assert_allclose(fisher.reconstruct(), fisher.entries, atol=1e-8 * scale)

    @ddt.data(1, 2, 3, 4)
    def test_outer_product_matches_expected_hessian(self, seed):
        model = random_gaussian_model(seed=seed, n_classes=3)
        point = np.random.default_rng(seed).normal(scale=0.5, size=2)
        outer = api.fisher_cat(model, point).entries
        hessian_form = api.fisher_cat_expected_hessian(model, point).entries
        assert np.linalg.norm(outer - hessian_form) <= 1e-6 * np.linalg.norm(outer)

    @ddt.data(5, 6, 7)
    def test_linear_reparameterization(self, seed):
        rng = np.random.default_rng(seed)
        model = random_gaussian_model(seed=seed, n_classes=3)
        while True:
            matrix = rng.normal(size=(2, 2))
            if np.linalg.cond(matrix) < 10:
                break
        transformed = model.transformed(matrix)
        point = rng.normal(size=2)
        in_x = api.fisher_cat(model, point).entries
        in_z = api.fisher_cat(transformed, matrix @ point).entries
        np.testing.assert_allclose(matrix.T @ in_z @ matrix, in_x, atol=1e-8 * max(1.0, np.abs(in_x).max()))

    def test_field_matches_pointwise_evaluation(self):
        model = builders.three_gaussians()
        points = np.random.default_rng(8).normal(size=(7, 2))
        field = api.fisher_cat_field(model, points, threads=2)
        for point, entries in zip(points, field):
            np.testing.assert_allclose(entries, api.fisher_cat(model, point).entries, rtol=1e-12, atol=1e-15)


@ddt.ddt
class PrincipalDirectionTests(SimpleTestCase):
    """
    Tests for ``pdd`` and ``rank_fcat``.
    """

    def test_equal_covariance_direction_is_constant(self):
        cov = random_covariance(np.random.default_rng(1), 2)
        c = np.array([0.7, -0.2])
        model = builders.equal_covariance_pair(cov, c)
        c_tilde = np.linalg.solve(cov, c)
        for point in np.random.default_rng(2).normal(size=(10, 2)):
            np.testing.assert_allclose(api.pdd(model, point).direction, c_tilde / np.linalg.norm(c_tilde), atol=1e-12)

    def test_circular_case_is_radial(self):
        a, sigma = 1.2, 1.3
        model = builders.diagonal_pair(a, sigma, [1.0, 0.0])
        _, rho, _, _ = api.diagonal_case_parameters(a, sigma, dim=2)
        center = np.array([-rho, 0.0])
        for point in np.random.default_rng(3).normal(scale=3.0, size=(10, 2)):
            radial = (point - center) / np.linalg.norm(point - center)
            np.testing.assert_allclose(api.pdd(model, point).direction, radial, atol=1e-10)

    def test_scalar_fisher_equals_top_eigenpair(self):
        rng = np.random.default_rng(4)
        for draw in range(100):
            model = random_gaussian_model(seed=100 + draw)
            point = rng.normal(size=2)
            direction, value = api.pdd(model, point)
            fisher = api.fisher_cat(model, point)
            assert abs(value - fisher.top_eigenvalue) <= 1e-8 * fisher.top_eigenvalue
            assert abs(abs(direction @ fisher.top_eigenvector) - 1.0) < 1e-8

    def test_zero_gradient(self):
        model = builders.diagonal_pair(1.2, 1.3, [1.0, 0.0])
        _, rho, _, _ = api.diagonal_case_parameters(1.2, 1.3, dim=2)
        with self.assertRaises(ZeroGradient):
            api.pdd(model, [-rho, 0.0])

    def test_direction_orthogonal_to_boundary(self):
        model = builders.hyperbolic_pair()
        pdc = api.trace_pdc(model, [-0.6, 0.3])
        boundary = api.find_boundary_on_pdc(model, pdc)
        epsilon = 1e-4
        normal = api.pdd(model, boundary).direction
        guess = np.array([-normal[1], normal[0]])

        def boundary_near(offset):
            base = boundary + offset * guess
            shift = optimize.brentq(
                lambda s: categories_api.log_odds(model, base + s * normal), -0.1, 0.1, xtol=1e-15,
            )
            return base + shift * normal

        left = boundary_near(-epsilon)
        right = boundary_near(epsilon)
        tangent = (right - left) / np.linalg.norm(right - left)
        assert abs(api.pdd(model, boundary).direction @ tangent) < 1e-6
        assert abs(api.boundary_tangent(model, boundary) @ tangent) == pytest.approx(1.0, abs=1e-6)

    def test_rank_binary_generic_point(self):
        assert api.rank_fcat(builders.hyperbolic_pair(), [0.1, 0.2]) == 1

    def test_rank_near_triple_point(self):
        model = builders.three_gaussians()
        assert api.rank_fcat(model, builders.triple_point(model)) == 2

    def test_rank_deep_inside_a_category(self):
        model = builders.three_gaussians()
        assert api.rank_fcat(model, [0.0, 8.0]) == 0


class TracePdcTests(SimpleTestCase):
    """
    Tests for ``trace_pdc``.
    """

    def test_equal_covariance_curve_is_straight(self):
        cov = np.array([[1.0, 0.3], [0.3, 0.5]])
        c = np.array([1.0, 0.5])
        model = builders.equal_covariance_pair(cov, c)
        x0 = np.array([-1.5, 0.7])
        pdc = api.trace_pdc(model, x0)
        assert lateral_deviation(pdc.points, x0, np.linalg.solve(cov, c)) < 1e-6

    def test_circular_case_curves_are_rays(self):
        a, sigma = 1.2, 1.3
        model = builders.diagonal_pair(a, sigma, [1.0, 0.0])
        _, rho, _, _ = api.diagonal_case_parameters(a, sigma, dim=2)
        center = np.array([-rho, 0.0])
        x0 = np.array([-4.0, 2.0])
        pdc = api.trace_pdc(model, x0)
        assert lateral_deviation(pdc.points, center, x0 - center) < 1e-5

    def test_tangents_follow_the_gradient(self):
        model = builders.hyperbolic_pair()
        pdc = api.trace_pdc(model, [-0.8, 0.3])
        tangents = pdc.tangents()[1:-1]
        gradients = categories_api.grad_log_odds(model, pdc.points[1:-1])
        cosines = np.abs(np.sum(tangents * gradients, axis=1)) / np.linalg.norm(gradients, axis=1)
        assert np.min(cosines) > 1 - 1e-6

    def test_heads_toward_the_boundary(self):
        model = builders.gauss_pair_1d(1.5, 0.6)
        for x0 in (-1.0, 2.0):
            pdc = api.trace_pdc(model, [x0])
            start = abs(categories_api.log_odds(model, pdc.points[0]))
            assert abs(categories_api.log_odds(model, pdc.points[1])) < start

    def test_zero_gradient_at_start(self):
        model = builders.diagonal_pair(1.2, 1.3, [1.0, 0.0])
        _, rho, _, _ = api.diagonal_case_parameters(1.2, 1.3, dim=2)
        with self.assertRaises(ZeroGradient):
            api.trace_pdc(model, [-rho, 0.0])

    def test_arc_lengths_increase(self):
        pdc = api.trace_pdc(builders.elliptic_pair(), [-1.0, -0.2])
        assert np.all(np.diff(pdc.arc_lengths) > 0)


@ddt.ddt
class BoundaryAndMaximumTests(SimpleTestCase):
    """
    Tests for ``find_boundary_on_pdc``, ``find_fcat_max_on_pdc`` and ``gauss1d_summary``.
    """

    @ddt.data(0.5, 1.0, 2.5)
    def test_symmetric_boundary_at_origin(self, sigma):
        model = builders.gauss_pair_1d(1.0, sigma)
        pdc = api.trace_pdc(model, [-1.5])
        assert abs(api.find_boundary_on_pdc(model, pdc)[0]) < 1e-10
        assert abs(api.find_fcat_max_on_pdc(model, pdc)[0]) < 1e-8

    def test_narrow_category_pulls_the_boundary(self):
        model = builders.gauss_pair_1d(1.5, 0.6)
        pdc = api.trace_pdc(model, [-1.0])
        boundary = api.find_boundary_on_pdc(model, pdc)[0]
        assert boundary == pytest.approx(-0.0929, abs=1e-4)
        assert abs(api.posterior_plus(model, [boundary]) - 0.5) < 1e-8
        maximum = api.find_fcat_max_on_pdc(model, pdc)[0]
        assert maximum > boundary

    @ddt.data((1.5, 0.6), (1.5, 1.0), (2.0, 0.6), (2.0, 1.0))
    @ddt.unpack
    def test_summary_matches_independent_roots(self, a, sigma):
        model = builders.gauss_pair_1d(a, sigma)
        summary = api.gauss1d_summary(a, sigma)
        x_b = optimize.brentq(lambda x: categories_api.log_odds(model, [x]), -1.0, 1.0, xtol=1e-15)
        x_cat = optimize.brentq(lambda x: api.extremum_residual(model, [x]), x_b + 1e-9, x_b + 5.0, xtol=1e-15)
        assert abs(summary.x_b_plus - x_b) < 1e-8
        assert abs(summary.x_cat_plus - x_cat) < 1e-8
        assert summary.x_cat_plus > summary.x_b_plus
        assert summary.density_at_x_b_plus > summary.density_at_x_b_minus

    def test_summary_matches_pdc_pipeline(self):
        model = builders.gauss_pair_1d(2.0, 1.0)
        summary = api.gauss1d_summary(2.0, 1.0)
        pdc = api.trace_pdc(model, [-0.5])
        assert abs(api.find_boundary_on_pdc(model, pdc)[0] - summary.x_b_plus) < 1e-8
        assert abs(api.find_fcat_max_on_pdc(model, pdc)[0] - summary.x_cat_plus) < 1e-8

    def test_equal_widths_sit_at_zero(self):
        summary = api.gauss1d_summary(1.0, 0.8)
        assert summary.x_b_plus == 0.0
        assert summary.x_cat_plus == 0.0

    @ddt.data(1e-10, 1e-8, 1e-6, 1e-4)
    def test_boundary_is_stable_as_widths_equalize(self, excess):
        a = 1.0 + excess
        model = builders.gauss_pair_1d(a, 1.0)
        summary = api.gauss1d_summary(a, 1.0)
        assert abs(api.posterior_plus(model, [summary.x_b_plus]) - 0.5) < 1e-12
        assert abs(summary.x_b_plus) < 2.0 * excess

    def test_displacement_shrinks_as_widths_equalize(self):
        gaps = []
        for a in (1.3, 1.2, 1.1, 1.05, 1.02):
            summary = api.gauss1d_summary(a, 1.0)
            gaps.append(summary.z - summary.z_b)
        assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
        assert gaps[-1] > 0

    def test_near_boundary_displacement_estimate(self):
        a, sigma = 1.05, 1.0
        model = builders.gauss_pair_1d(a, sigma)
        summary = api.gauss1d_summary(a, sigma)
        estimate = api.max_displacement_estimate(model, [summary.x_b_plus])
        assert estimate == pytest.approx(summary.x_cat_plus - summary.x_b_plus, rel=0.1)

    def test_circular_case_loci(self):
        a, sigma = 1.2, 1.3
        model = builders.diagonal_pair(a, sigma, [1.0, 0.0])
        eta, rho, gamma, z_b = api.diagonal_case_parameters(a, sigma, dim=2)
        assert z_b == pytest.approx(np.sqrt(rho ** 2 - 1 + 2 * gamma), rel=1e-14)
        z = api.maxima_radius(eta, z_b)
        center = np.array([-rho, 0.0])
        for x0 in ([-4.0, 2.0], [-6.0, -1.0], [-5.0, 0.5]):
            pdc = api.trace_pdc(model, x0)
            boundary = api.find_boundary_on_pdc(model, pdc)
            maximum = api.find_fcat_max_on_pdc(model, pdc)
            assert abs(np.linalg.norm(boundary - center) - z_b) < 1e-8
            assert abs(np.linalg.norm(maximum - center) - z) < 1e-6
            assert z > z_b

    def test_equal_covariance_maximum_on_boundary(self):
        model = builders.equal_covariance_pair(np.array([[1.0, 0.2], [0.2, 0.6]]), [0.8, 0.1])
        pdc = api.trace_pdc(model, [-1.0, 0.4])
        boundary = api.find_boundary_on_pdc(model, pdc)
        maximum = api.find_fcat_max_on_pdc(model, pdc)
        np.testing.assert_allclose(maximum, boundary, atol=1e-8)

    def test_no_sign_change(self):
        model = builders.gauss_pair_1d(1.0, 1.0)
        pdc = Polyline.from_points(np.linspace(-5.0, -4.0, 11))
        with self.assertRaises(NoSignChange):
            api.find_boundary_on_pdc(model, pdc)

    def test_monotone_fisher(self):
        model = builders.gauss_pair_1d(1.0, 1.0)
        pdc = Polyline.from_points(np.linspace(-5.0, -4.0, 11))
        with self.assertRaises(NoInteriorMax):
            api.find_fcat_max_on_pdc(model, pdc)

    def test_invalid_summary_parameters(self):
        with self.assertRaises(InvalidGeometry):
            api.gauss1d_summary(0.5, 1.0)
