"""
Tests for the nettrain probes.
"""
import ddt
import numpy as np
import pytest
from django.test import SimpleTestCase
from scipy.stats import special_ortho_group

from category_geometry.apps.categories import api as categories_api
from category_geometry.apps.categories import builders
from category_geometry.apps.categories.embedding import LatentEmbedding
from category_geometry.apps.core.constants import FLAG_RATE_UNDERFLOW, FLAG_RELU_KINK
from category_geometry.apps.core.matrices import FisherMatrix
from category_geometry.apps.nettrain import api
from category_geometry.apps.nettrain.constants import LINEAR, RELU
from category_geometry.apps.nettrain.exceptions import InvalidProbe, NoInteriorPoints, ZeroActivity
from category_geometry.apps.nettrain.networks import MLPModel, coding_means
from category_geometry.apps.nettrain.tests.factories import MLPModelFactory, identity_coding_net
from category_geometry.apps.neurocode import api as neurocode_api
from category_geometry.apps.neurocode.codes import NoiseSpec, PopulationCode
from category_geometry.apps.neurocode.constants import (
    FISHER_LEADING,
    LINK_CONSTANT,
    LINK_RATE,
    MULTIPLICATIVE,
    SIGMOID_RAMP,
)


def numeric_jacobian(func, point, step=1e-6):
    columns = []
    for axis in range(point.size):
        offset = np.zeros_like(point)
        offset[axis] = step
        columns.append((func(point + offset) - func(point - offset)) / (2.0 * step))
    return np.column_stack(columns)


def linear_net(weights, sigma=0.5, biases=None):
    """
    One linear coding layer with the given (in, out) weights and a fixed two-class readout.
    """
    n_in, n_out = weights.shape
    return MLPModel(
        [n_in, n_out, 2],
        activations=LINEAR,
        noise_sigma=sigma,
        link=LINK_CONSTANT,
        weights=[weights, np.ones((n_out, 2))],
        biases=[np.zeros(n_out) if biases is None else biases, np.zeros(2)],
    )


def sigmoid_population_and_net(seed, sigma=0.4):
    """
    A sigmoid-ramp population code and a one-hidden-layer network whose coding layer reproduces it.
    """
    rng = np.random.default_rng(seed)
    n_units = 6
    centers = rng.normal(size=(n_units, 2))
    widths = rng.uniform(0.5, 1.5, size=n_units)
    directions = rng.normal(size=(n_units, 2))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    noise = NoiseSpec(family=MULTIPLICATIVE, sigma=sigma, link=LINK_RATE)
    code = PopulationCode(centers, widths, 1.0, SIGMOID_RAMP, noise, directions)
    weights = (directions / widths[:, None]).T
    biases = -np.sum(directions * centers, axis=1) / widths
    net = MLPModel(
        [2, n_units, 2],
        noise_sigma=sigma,
        link=LINK_RATE,
        weights=[weights, rng.normal(size=(n_units, 2))],
        biases=[biases, np.zeros(2)],
    )
    return code, net


class CodingJacobianTests(SimpleTestCase):
    """
    Tests for ``coding_jacobian``.
    """

    def test_single_linear_layer(self):
        weights = np.random.default_rng(0).normal(size=(3, 4))
        jacobian = api.coding_jacobian(linear_net(weights), [0.2, -0.4, 1.0])
        np.testing.assert_array_equal(jacobian.matrix, weights.T)
        assert jacobian.flags == ()

    def test_sigmoid_chain_matches_finite_differences(self):
        net = MLPModelFactory(layer_dims=[2, 6, 5, 3], seed=4)
        rng = np.random.default_rng(1)
        for point in rng.uniform(-2.0, 2.0, size=(50, 2)):
            numeric = numeric_jacobian(lambda x: coding_means(net, x)[0], point)
            np.testing.assert_allclose(api.coding_jacobian(net, point).matrix, numeric, rtol=1e-5, atol=1e-9)

    def test_dead_relu_unit_has_a_zero_row(self):
        net = MLPModelFactory(layer_dims=[2, 3, 2], activations=RELU)
        net.biases[0][1] = -100.0
        jacobian = api.coding_jacobian(net, [0.3, 0.1])
        np.testing.assert_array_equal(jacobian.matrix[1], 0.0)
        assert not jacobian.kink_rows[1]

    def test_relu_kinks_are_flagged(self):
        net = MLPModelFactory(layer_dims=[2, 3, 4, 2], activations=RELU)
        net.biases = [np.zeros_like(bias) for bias in net.biases]
        jacobian = api.coding_jacobian(net, [0.0, 0.0])
        assert jacobian.kink_rows.all()
        assert jacobian.flags == (FLAG_RELU_KINK,)
        assert FLAG_RELU_KINK in api.fisher_code_net(net.with_noise(link=LINK_CONSTANT), [0.0, 0.0]).flags

    def test_jacobian_through_an_embedding(self):
        embedding = LatentEmbedding(2, 5, seed=3)
        net = MLPModelFactory(layer_dims=[5, 8, 6, 2], seed=5)
        point = np.array([0.3, -0.2])
        numeric = numeric_jacobian(lambda x: coding_means(net, embedding(x))[0], point)
        np.testing.assert_allclose(api.coding_jacobian(net, point, input_map=embedding).matrix, numeric,
                                   rtol=1e-5, atol=1e-9)

    def test_single_points_only(self):
        with self.assertRaises(InvalidProbe):
            api.coding_jacobian(MLPModelFactory(), np.zeros((3, 2)))


@ddt.ddt
class FisherCodeNetTests(SimpleTestCase):
    """
    Tests for ``fisher_code_net``.
    """

    @ddt.data(0, 1, 2)
    def test_network_mimicking_a_sigmoid_population(self, seed):
        code, net = sigmoid_population_and_net(seed)
        for point in np.random.default_rng(seed).normal(size=(10, 2)):
            expected = neurocode_api.fisher_code(code, point)
            np.testing.assert_allclose(api.fisher_code_net(net, point).entries, expected.entries,
                                       rtol=1e-10, atol=1e-12)
            leading = neurocode_api.fisher_code(code, point, mode=FISHER_LEADING)
            np.testing.assert_allclose(api.fisher_code_net(net, point, mode=FISHER_LEADING).entries,
                                       leading.entries, rtol=1e-10, atol=1e-12)

    def test_doubling_additive_noise_quarters_the_fisher(self):
        net = MLPModelFactory(link=LINK_CONSTANT, noise_sigma=0.2)
        point = [0.4, 0.9]
        narrow = api.fisher_code_net(net, point).entries
        wide = api.fisher_code_net(net.with_noise(sigma=0.4), point).entries
        np.testing.assert_allclose(wide, narrow / 4.0, rtol=1e-12)

    def test_fisher_is_psd_with_rank_at_most_the_input_dimension(self):
        net = MLPModelFactory(layer_dims=[2, 32, 32, 3])
        for fisher in api.fisher_code_net_field(net, np.random.default_rng(2).normal(size=(20, 2))):
            assert fisher.dim == 2
            assert fisher.eigenvalues[-1] >= 0.0

    def test_field_does_not_depend_on_threads(self):
        net = MLPModelFactory()
        points = np.random.default_rng(3).normal(size=(16, 2))
        single = api.fisher_code_net_field(net, points, threads=1)
        pooled = api.fisher_code_net_field(net, points, threads=4)
        for left, right in zip(single, pooled):
            np.testing.assert_array_equal(left.entries, right.entries)

    def test_silent_units_are_dropped(self):
        net = MLPModelFactory(layer_dims=[2, 4, 2], activations=RELU)
        net.biases[0][0] = -100.0
        with self.assertLogs('category_geometry.apps.nettrain.api', level='WARNING'):
            fisher, = api.fisher_code_net_field(net, [[0.1, 0.2]])
        assert FLAG_RATE_UNDERFLOW in fisher.flags
        assert np.all(np.isfinite(fisher.entries))

    def test_isotropic_linear_code(self):
        net = linear_net(3.0 * np.eye(2), sigma=0.5)
        np.testing.assert_allclose(api.fisher_code_net(net, [1.0, -2.0]).entries, 36.0 * np.eye(2), rtol=1e-14)


class PathProbeTests(SimpleTestCase):

    def test_too_short(self):
        with self.assertRaises(InvalidProbe):
            api.PathProbe([[0.0, 0.0], [1.0, 0.0]])

    def test_repeated_points(self):
        with self.assertRaises(InvalidProbe):
            api.PathProbe([[0.0], [1.0], [1.0], [2.0]])

    def test_one_dimensional_points(self):
        probe = api.PathProbe([0.0, 0.5, 1.5])
        assert probe.points.shape == (3, 1)
        np.testing.assert_allclose(probe.arc_length, [0.0, 0.5, 1.5])
        np.testing.assert_allclose(probe.tangents[:, 0], [0.5, 0.75, 1.0])

    def test_linear_path(self):
        probe = api.PathProbe.linear([0.0, 0.0], [3.0, 4.0], 11, labels=(0, 1))
        assert len(probe) == 11
        assert probe.labels == (0, 1)
        assert probe.arc_length[-1] == pytest.approx(5.0)


class FisherAlongPathTests(SimpleTestCase):
    """
    Tests for ``fisher_along_path``.
    """

    def test_zero_jacobian_region(self):
        net = MLPModelFactory(layer_dims=[2, 4, 3, 2], activations=RELU, link=LINK_CONSTANT)
        net.biases[0][:] = -100.0
        profile = api.fisher_along_path(net, api.PathProbe.linear([-1.0, 0.0], [1.0, 0.0], 9))
        np.testing.assert_array_equal(profile.per_arc, 0.0)

    def test_isotropic_field_gives_its_eigenvalue(self):
        net = linear_net(3.0 * np.eye(2), sigma=0.5)
        probe = api.PathProbe.linear([-1.0, 2.0], [2.0, -2.0], 21)
        profile = api.fisher_along_path(net, probe)
        np.testing.assert_allclose(profile.per_arc, 36.0, rtol=1e-12)
        np.testing.assert_allclose(profile.per_index, 36.0 * 0.25 ** 2, rtol=1e-12)

    def test_rotated_linear_code(self):
        rotation = special_ortho_group.rvs(2, random_state=4)
        net = linear_net(rotation.T @ np.diag([2.0, 1.0]), sigma=1.0)
        direction = rotation.T[:, 0]
        profile = api.fisher_along_path(net, api.PathProbe.linear(-direction, direction, 5))
        np.testing.assert_allclose(profile.per_arc, 4.0, rtol=1e-10)


class CosineProxyTests(SimpleTestCase):
    """
    Tests for ``cosine_proxy`` and ``fit_affine_l1``.
    """

    def test_constant_activity(self):
        net = MLPModelFactory(layer_dims=[2, 5, 2])
        net.weights[0][:] = 0.0
        profile = api.cosine_proxy(net, api.PathProbe.linear([-1.0, 0.0], [1.0, 0.0], 7))
        np.testing.assert_allclose(profile.distances, 0.0, atol=1e-15)

    def test_scale_invariance(self):
        rng = np.random.default_rng(6)
        weights, biases = rng.normal(size=(2, 4)), rng.normal(size=4)
        probe = api.PathProbe.linear([-1.0, 0.5], [1.0, -0.5], 15)
        base = api.cosine_proxy(linear_net(weights, biases=biases), probe).distances
        scaled = api.cosine_proxy(linear_net(10.0 * weights, biases=10.0 * biases), probe).distances
        np.testing.assert_allclose(scaled, base, rtol=1e-8, atol=1e-15)

    def test_zero_activity(self):
        net = linear_net(np.zeros((2, 3)))
        with self.assertRaises(ZeroActivity) as context:
            api.cosine_proxy(net, api.PathProbe.linear([-1.0, 0.0], [1.0, 0.0], 5))
        assert context.exception.index == 0

    def test_exact_affine_relation(self):
        predictor = np.linspace(0.0, 1.0, 20)
        fit = api.fit_affine_l1(predictor, 2.0 * predictor + 1.0)
        assert fit.slope == pytest.approx(2.0, abs=1e-8)
        assert fit.intercept == pytest.approx(1.0, abs=1e-8)
        assert fit.mean_absolute_error == pytest.approx(0.0, abs=1e-8)
        assert fit.pearson == pytest.approx(1.0)

    def test_least_absolute_deviations_ignore_an_outlier(self):
        predictor = np.arange(10.0)
        target = 3.0 * predictor - 1.0
        target[4] += 100.0
        fit = api.fit_affine_l1(predictor, target)
        assert fit.slope == pytest.approx(3.0, abs=1e-8)
        assert fit.intercept == pytest.approx(-1.0, abs=1e-7)
        assert fit.mean_absolute_error == pytest.approx(10.0, abs=1e-7)

    def test_constant_profiles_have_no_correlation(self):
        assert np.isnan(api.fit_affine_l1(np.zeros(5), np.arange(5.0)).pearson)


class TuningCurveTests(SimpleTestCase):
    """
    Tests for ``tuning_curves`` and ``transition_fraction``.
    """

    def test_unit_ids_are_checked(self):
        with self.assertRaises(InvalidProbe):
            api.tuning_curves(MLPModelFactory(), api.PathProbe.linear([0, 0], [1, 1], 5), unit_ids=[0, 6])

    def test_path_the_network_ignores_gives_flat_curves(self):
        net = MLPModelFactory(layer_dims=[2, 5, 4, 2])
        net.weights[0][1, :] = 0.0
        curves = api.tuning_curves(net, api.PathProbe.linear([0.3, -2.0], [0.3, 2.0], 9))
        np.testing.assert_allclose(np.ptp(curves.responses, axis=0), 0.0, atol=1e-15)
        np.testing.assert_array_equal(curves.steepest(), -1)

    def test_dead_unit_has_a_zero_curve(self):
        net = MLPModelFactory(layer_dims=[2, 4, 2], activations=RELU)
        net.biases[0][2] = -100.0
        curves = api.tuning_curves(net, api.PathProbe.linear([-1, 0], [1, 0], 9), unit_ids=[2])
        np.testing.assert_array_equal(curves.responses, 0.0)

    def test_transition_fraction(self):
        t = np.arange(5.0)
        responses = np.array([
            [0.0, 0.0, 0.0],
            [0.1, 0.0, 0.0],
            [0.9, 0.0, 0.1],
            [1.0, 0.9, 0.15],
            [1.0, 1.0, 0.2],
        ])
        curves = api.TuningCurves(t=t, unit_ids=(0, 1, 2), responses=responses, fisher_argmax=2)
        posteriors = np.array([[0.99, 0.01], [0.95, 0.05], [0.6, 0.4], [0.3, 0.7], [0.02, 0.98]])
        # steepest steps: unit 0 at 1->2, unit 1 at 2->3, unit 2 at 1->2
        assert api.transition_fraction(curves, posteriors) == pytest.approx(1.0)
        narrow = np.array([[0.99, 0.01], [0.95, 0.05], [0.95, 0.05], [0.3, 0.7], [0.02, 0.98]])
        assert api.transition_fraction(curves, narrow) == pytest.approx(1.0 / 3.0)


class EigenAlignmentTests(SimpleTestCase):

    def test_angle_and_ratio(self):
        angle = np.radians(30.0)
        rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
        fcat = FisherMatrix.from_entries(np.diag([2.0, 1.0]))
        fcode = FisherMatrix.from_entries(rotation @ np.diag([4.0, 1.0]) @ rotation.T)
        alignment = api.eigen_alignment(fcat, fcode)
        assert alignment.angle == pytest.approx(30.0, abs=1e-8)
        assert alignment.ratio == pytest.approx(0.25)

    def test_sign_of_the_eigenvector_does_not_matter(self):
        fisher = FisherMatrix.from_entries([[1.0, 0.3], [0.3, 2.0]])
        assert api.eigen_alignment(fisher, fisher).angle == pytest.approx(0.0, abs=1e-6)


class BoundaryProbeTests(SimpleTestCase):
    """
    Tests for ``boundary_probes``.
    """

    def test_three_category_boundaries(self):
        model = builders.three_gaussians()
        probes = api.boundary_probes(model, 30, seed=0)
        assert probes.points.shape == (30, 2)
        posterior = categories_api.posterior(model, probes.points)
        for row, (first, second) in zip(posterior, probes.pairs):
            assert row[first] == pytest.approx(row[second], rel=1e-8)
            assert row[first] >= np.delete(row, [first, second]).max()
        np.testing.assert_allclose(
            probes.triple_distance, np.linalg.norm(probes.points - builders.triple_point(model), axis=1),
        )

    def test_binary_boundary(self):
        probes = api.boundary_probes(builders.gauss_pair_1d(1.0, 1.0, 1.0), 10, seed=1)
        np.testing.assert_allclose(probes.points, 0.0, atol=1e-9)
        assert np.all(np.isnan(probes.triple_distance))
        np.testing.assert_array_equal(probes.pairs, [[0, 1]] * 10)

    def test_reproducible(self):
        model = builders.three_gaussians()
        np.testing.assert_array_equal(api.boundary_probes(model, 5, seed=4).points,
                                      api.boundary_probes(model, 5, seed=4).points)


class InteriorProbeTests(SimpleTestCase):

    def test_points_are_confidently_categorized(self):
        model = builders.three_gaussians()
        points = api.interior_probes(model, 40, confidence=0.99, seed=2)
        assert points.shape == (40, 2)
        assert np.all(np.max(categories_api.posterior(model, points), axis=1) >= 0.99)

    def test_identical_classes_have_no_interior(self):
        with self.assertRaises(NoInteriorPoints) as context:
            api.interior_probes(builders.gauss_pair_1d(1.0, 1.0, 0.0), 5, seed=0)
        assert context.exception.found == 0

    def test_uniform_fisher_has_no_contrast(self):
        model = builders.three_gaussians()
        net = identity_coding_net(dim=2, n_classes=3, sigma=0.5)
        contrast = api.eigenvalue_contrast(
            net, api.boundary_probes(model, 10, seed=0).points, api.interior_probes(model, 10, seed=1),
        )
        assert contrast == pytest.approx(1.0, rel=1e-12)
