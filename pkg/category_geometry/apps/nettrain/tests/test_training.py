"""
Tests for SGD training and its gradients.
"""
from unittest import mock

import ddt
import numpy as np
import pytest
from django.test import SimpleTestCase

from category_geometry.apps.categories import api as categories_api
from category_geometry.apps.nettrain.exceptions import Diverged, InvalidTrainConfig
from category_geometry.apps.nettrain.tests.factories import MLPModelFactory, TrainConfigFactory, separable_blobs
from category_geometry.apps.nettrain.training import (
    TrainConfig,
    accuracy,
    cross_entropy,
    loss_and_gradients,
    train_sgd,
)
from category_geometry.apps.neurocode.constants import LINK_CONSTANT


def batch(seed, n=12, n_classes=3):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, 2)), rng.integers(0, n_classes, size=n)


@ddt.ddt
class GradientTests(SimpleTestCase):
    """
    Backprop against central finite differences of the batch loss.
    """

    def _check(self, net, features, labels, noise):
        _, (weight_gradients, bias_gradients) = loss_and_gradients(net, features, labels, noise)
        rng = np.random.default_rng(99)
        step = 1e-6
        for _ in range(20):
            layer = int(rng.integers(net.n_layers))
            use_bias = bool(rng.integers(2))
            target = net.biases if use_bias else net.weights
            index = tuple(int(rng.integers(size)) for size in target[layer].shape)
            analytic = (bias_gradients if use_bias else weight_gradients)[layer][index]

            values = []
            for sign in (1.0, -1.0):
                shifted = net.copy()
                (shifted.biases if use_bias else shifted.weights)[layer][index] += sign * step
                values.append(loss_and_gradients(shifted, features, labels, noise)[0])
            numeric = (values[0] - values[1]) / (2.0 * step)
            assert analytic == pytest.approx(numeric, rel=1e-4, abs=1e-9)

    @ddt.data('sigmoid', 'relu')
    def test_noiseless_gradients(self, activation):
        net = MLPModelFactory(layer_dims=[2, 5, 4, 3], activations=activation, seed=1)
        features, labels = batch(0)
        self._check(net, features, labels, None)

    def test_gradients_with_fixed_additive_noise(self):
        net = MLPModelFactory(layer_dims=[2, 5, 4, 3], link=LINK_CONSTANT, seed=2)
        features, labels = batch(1)
        noise = np.random.default_rng(5).standard_normal((len(features), net.coding_dim))
        self._check(net, features, labels, noise)

    def test_loss_is_the_cross_entropy(self):
        net = MLPModelFactory()
        features, labels = batch(2)
        loss, _ = loss_and_gradients(net, features, labels)
        assert loss == pytest.approx(cross_entropy(net, features, labels), rel=1e-14)


class TrainConfigTests(SimpleTestCase):

    def test_invalid_configs(self):
        for kwargs in ({'epochs': 0}, {'batch_size': 0}, {'learning_rate': -0.1},
                       {'learning_rate': float('inf')}, {'epochs': 5, 'checkpoint_epochs': (6,)}):
            with self.assertRaises(InvalidTrainConfig):
                TrainConfig(**kwargs)

    def test_checkpoints_are_sorted_and_unique(self):
        assert TrainConfig(epochs=5, checkpoint_epochs=[3, 1, 3]).checkpoint_epochs == (1, 3)


class TrainSGDTests(SimpleTestCase):
    """
    Tests for ``train_sgd``.
    """

    def setUp(self):
        super().setUp()
        sample = categories_api.sample(separable_blobs(), 1000, seed=1)
        self.features, self.labels = sample.features, sample.labels

    def test_separable_blobs_are_learned(self):
        net = MLPModelFactory(layer_dims=[2, 8, 2], noise_sigma=0.1)
        result = train_sgd(net, self.features, self.labels, TrainConfigFactory(epochs=50, batch_size=64))
        assert accuracy(result.net, self.features, self.labels) > 0.99
        assert result.final_loss < result.initial_loss
        assert len(result.losses) == 50

    def test_zero_learning_rate_keeps_the_weights(self):
        net = MLPModelFactory(layer_dims=[2, 8, 2])
        result = train_sgd(net, self.features, self.labels, TrainConfigFactory(epochs=2, learning_rate=0.0))
        for before, after in zip(net.weights + net.biases, result.net.weights + result.net.biases):
            np.testing.assert_array_equal(before, after)
        assert result.final_loss == result.initial_loss

    def test_training_does_not_touch_the_input_network(self):
        net = MLPModelFactory(layer_dims=[2, 8, 2])
        before = [matrix.copy() for matrix in net.weights]
        train_sgd(net, self.features, self.labels, TrainConfigFactory(epochs=1))
        for original, current in zip(before, net.weights):
            np.testing.assert_array_equal(original, current)

    def test_identical_configs_give_identical_trajectories(self):
        net = MLPModelFactory(layer_dims=[2, 8, 2])
        config = TrainConfigFactory(epochs=3, seed=11)
        first = train_sgd(net, self.features, self.labels, config)
        second = train_sgd(net, self.features, self.labels, config)
        assert first.losses == second.losses
        for left, right in zip(first.net.weights, second.net.weights):
            np.testing.assert_array_equal(left, right)

    def test_seed_changes_the_trajectory(self):
        net = MLPModelFactory(layer_dims=[2, 8, 2])
        first = train_sgd(net, self.features, self.labels, TrainConfigFactory(epochs=1, seed=1))
        second = train_sgd(net, self.features, self.labels, TrainConfigFactory(epochs=1, seed=2))
        assert first.losses != second.losses

    def test_checkpoints(self):
        net = MLPModelFactory(layer_dims=[2, 8, 2])
        result = train_sgd(net, self.features, self.labels, TrainConfigFactory(epochs=3, checkpoint_epochs=(1, 3)))
        assert sorted(result.checkpoints) == [1, 3]
        np.testing.assert_array_equal(result.checkpoints[3].weights[0], result.net.weights[0])
        assert not np.array_equal(result.checkpoints[1].weights[0], result.net.weights[0])

    def test_noise_can_be_switched_off(self):
        net = MLPModelFactory(layer_dims=[2, 8, 2])
        config = TrainConfigFactory(epochs=1, noise_during_training=False)
        with mock.patch('category_geometry.apps.nettrain.training.loss_and_gradients',
                        wraps=loss_and_gradients) as wrapped:
            train_sgd(net, self.features, self.labels, config)
        assert all(call.args[3] is None for call in wrapped.call_args_list)

    def test_non_finite_loss_raises(self):
        net = MLPModelFactory(layer_dims=[2, 8, 2])
        with mock.patch('category_geometry.apps.nettrain.training.loss_and_gradients',
                        return_value=(float('nan'), None)):
            with self.assertRaises(Diverged) as context:
                train_sgd(net, self.features, self.labels, TrainConfigFactory(epochs=2))
        assert context.exception.epoch == 1

    def test_labels_must_match_the_outputs(self):
        net = MLPModelFactory(layer_dims=[2, 8, 2])
        with self.assertRaises(InvalidTrainConfig):
            train_sgd(net, self.features, self.labels + 1, TrainConfigFactory(epochs=1))

    def test_epochs_are_logged(self):
        net = MLPModelFactory(layer_dims=[2, 8, 2])
        with self.assertLogs('category_geometry.apps.nettrain.training', level='INFO') as logs:
            train_sgd(net, self.features, self.labels, TrainConfigFactory(epochs=2))
        assert any('Epoch 2 loss' in line for line in logs.output)
