"""
Tests for the network model, its forward pass and its JSON dumps.
"""
import json
import os
import tempfile

import ddt
import numpy as np
from django.test import SimpleTestCase

from category_geometry.apps.nettrain.constants import RELU, SOFTMAX_TOLERANCE
from category_geometry.apps.nettrain.exceptions import InvalidNetwork
from category_geometry.apps.nettrain.networks import MLPModel, forward, readout
from category_geometry.apps.nettrain.serializers import dump_network, load_network, network_from_dict
from category_geometry.apps.nettrain.tests.factories import MLPModelFactory
from category_geometry.apps.neurocode.constants import GAUSSIAN_IID, LINK_CONSTANT, MULTIPLICATIVE


@ddt.ddt
class NetworkTests(SimpleTestCase):
    """
    Tests for ``MLPModel`` construction.
    """

    def test_default_coding_layer_is_the_last_hidden_layer(self):
        net = MLPModelFactory()
        assert net.noise_layer == 1
        assert net.coding_dim == 6
        assert net.n_classes == 3

    def test_initial_weights_respect_the_fan_in_bound(self):
        net = MLPModelFactory(layer_dims=[4, 32, 32, 3])
        for matrix in net.weights:
            assert np.max(np.abs(matrix)) <= 1.0 / np.sqrt(matrix.shape[0])

    def test_same_seed_same_weights(self):
        first = MLPModelFactory(seed=7)
        second = MLPModelFactory(seed=7)
        for left, right in zip(first.weights, second.weights):
            np.testing.assert_array_equal(left, right)

    @ddt.data(
        {'layer_dims': [2, 3]},
        {'layer_dims': [2, 3, 1]},
        {'activations': 'tanh'},
        {'activations': ['sigmoid']},
        {'noise_layer': 2},
        {'noise_sigma': 0.0},
        {'weights': [np.zeros((2, 8))], 'biases': [np.zeros(8)]},
    )
    def test_invalid_networks(self, overrides):
        with self.assertRaises(InvalidNetwork):
            MLPModelFactory(**overrides)

    def test_noise_specs(self):
        assert MLPModelFactory().noise_spec.family == MULTIPLICATIVE
        additive = MLPModelFactory(link=LINK_CONSTANT).noise_spec
        assert additive.family == GAUSSIAN_IID
        assert additive.sigma == 0.3

    def test_copies_do_not_share_weights(self):
        net = MLPModelFactory()
        clone = net.copy()
        clone.weights[0][0, 0] += 1.0
        assert clone.weights[0][0, 0] != net.weights[0][0, 0]


class ForwardTests(SimpleTestCase):
    """
    Tests for ``forward`` and ``readout``.
    """

    def test_zero_network_outputs_uniform_probabilities(self):
        net = MLPModel.zeros([2, 4, 3])
        np.testing.assert_allclose(forward(net, [0.3, -1.2]).output, np.full((1, 3), 1.0 / 3.0), atol=1e-15)

    def test_outputs_are_distributions(self):
        net = MLPModelFactory()
        points = 100.0 * np.random.default_rng(0).standard_normal((200, 2))
        sums = forward(net, points).output.sum(axis=1)
        assert np.max(np.abs(sums - 1.0)) < SOFTMAX_TOLERANCE

    def test_vanishing_noise_gives_the_noiseless_output(self):
        net = MLPModelFactory().with_noise(sigma=1e-12)
        points = np.random.default_rng(1).standard_normal((50, 2))
        np.testing.assert_allclose(forward(net, points, noisy=True, seed=3).output, forward(net, points).output,
                                   atol=1e-9)

    def test_noisy_pass_is_reproducible(self):
        net = MLPModelFactory()
        points = np.random.default_rng(2).standard_normal((20, 2))
        first = forward(net, points, noisy=True, seed=5)
        second = forward(net, points, noisy=True, seed=5)
        np.testing.assert_array_equal(first.coding, second.coding)
        assert not np.array_equal(first.coding, first.coding_mean)

    def test_relu_pattern_survives_rescaling_without_biases(self):
        net = MLPModelFactory(layer_dims=[2, 10, 10, 2], activations=RELU)
        net.biases = [np.zeros_like(bias) for bias in net.biases]
        point = np.array([0.4, -0.9])
        base = forward(net, point).coding_mean
        scaled = forward(net, 1.01 * point).coding_mean
        np.testing.assert_array_equal(base > 0, scaled > 0)
        np.testing.assert_allclose(scaled, 1.01 * base, rtol=1e-12)

    def test_readout_continues_from_the_coding_layer(self):
        net = MLPModelFactory(layer_dims=[2, 5, 4, 4, 3], noise_layer=1)
        state = forward(net, np.random.default_rng(4).standard_normal((10, 2)), noisy=True, seed=1)
        np.testing.assert_allclose(readout(net, state.coding), state.log_output, rtol=1e-12)

    def test_input_dimension_is_checked(self):
        with self.assertRaises(InvalidNetwork):
            forward(MLPModelFactory(), [1.0, 2.0, 3.0])


class SerializerTests(SimpleTestCase):

    def test_dump_and_load(self):
        net = MLPModelFactory()
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'net.json')
            data = dump_network(net, path, metadata={'epoch': 3})
            loaded = load_network(path)
        assert data['metadata'] == {'epoch': 3}
        assert loaded.architecture() == net.architecture()
        for left, right in zip(loaded.weights, net.weights):
            np.testing.assert_array_equal(left, right)

    def test_tampered_weights_are_rejected(self):
        data = dump_network(MLPModelFactory())
        data['biases'][0][0] += 1e-3
        with self.assertRaises(InvalidNetwork):
            network_from_dict(data)

    def test_missing_fields(self):
        data = dump_network(MLPModelFactory())
        del data['weights']
        with self.assertRaises(InvalidNetwork):
            network_from_dict(data)

    def test_invalid_json(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'net.json')
            with open(path, 'w', encoding='utf-8') as stream:
                stream.write('{"layer_dims": ')
            with self.assertRaises(InvalidNetwork):
                load_network(path)

    def test_dump_is_plain_json(self):
        text = json.dumps(dump_network(MLPModelFactory()))
        assert '"digest"' in text
