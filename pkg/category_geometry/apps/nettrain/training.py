"""
Mini-batch stochastic gradient descent on the cross-entropy of a noisy-coding network.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from category_geometry.apps.nettrain.constants import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_LEARNING_RATE,
)
from category_geometry.apps.nettrain.exceptions import Diverged, InvalidTrainConfig
from category_geometry.apps.nettrain.networks import activation_slope, network_points, propagate


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = DEFAULT_BATCH_SIZE
    learning_rate: float = DEFAULT_LEARNING_RATE
    seed: int = 0
    noise_during_training: bool = True
    checkpoint_epochs: tuple = field(default=())

    def __post_init__(self):
        if int(self.epochs) < 1 or int(self.batch_size) < 1:
            raise InvalidTrainConfig('epochs and batch_size must be >= 1, got {} and {}'.format(
                self.epochs, self.batch_size,
            ))
        if not self.learning_rate >= 0 or not np.isfinite(self.learning_rate):
            raise InvalidTrainConfig('learning_rate must be finite and >= 0, got {}'.format(self.learning_rate))
        checkpoints = tuple(sorted({int(epoch) for epoch in self.checkpoint_epochs}))
        if checkpoints and not 1 <= checkpoints[0] <= checkpoints[-1] <= self.epochs:
            raise InvalidTrainConfig('checkpoint_epochs must lie in 1..{}, got {}'.format(self.epochs, checkpoints))
        object.__setattr__(self, 'checkpoint_epochs', checkpoints)

    def to_dict(self):
        return {
            'epochs': self.epochs,
            'batch_size': self.batch_size,
            'learning_rate': self.learning_rate,
            'seed': self.seed,
            'noise_during_training': self.noise_during_training,
            'checkpoint_epochs': list(self.checkpoint_epochs),
        }


@dataclass(frozen=True)
class TrainingResult:
    """
    The trained network, the mean training loss of every epoch and snapshots at the checkpoint epochs.

    ``initial_loss`` and ``final_loss`` are noiseless cross-entropies on the whole training set.
    """
    net: object
    losses: tuple
    initial_loss: float
    final_loss: float
    checkpoints: dict = field(default_factory=dict)


def _labels(net, features, labels):
    points, _ = network_points(net, features)
    labels = np.asarray(labels)
    if labels.shape != (len(points),):
        raise InvalidTrainConfig('Expected {} labels, got shape {}'.format(len(points), labels.shape))
    if labels.size and (labels.min() < 0 or labels.max() >= net.n_classes):
        raise InvalidTrainConfig('Labels must lie in 0..{}'.format(net.n_classes - 1))
    return points, labels.astype(int)


def cross_entropy(net, features, labels):
    points, labels = _labels(net, features, labels)
    log_output = propagate(net, points).log_output
    return float(-np.mean(log_output[np.arange(len(labels)), labels]))


def loss_and_gradients(net, features, labels, noise=None):
    """
    Mean cross-entropy of a batch and its gradients with respect to every weight matrix and bias.

    ``noise`` is the coding layer's standard-normal draw per sample; it is held fixed, so the
    coding noise passes gradients straight through to f.
    """
    points, labels = _labels(net, features, labels)
    n = len(points)
    state = propagate(net, points, noise)
    delta = np.exp(state.log_output)
    delta[np.arange(n), labels] -= 1.0
    delta /= n

    weight_gradients = [None] * net.n_layers
    bias_gradients = [None] * net.n_layers
    for layer in reversed(range(net.n_layers)):
        weight_gradients[layer] = state.inputs[layer].T @ delta
        bias_gradients[layer] = delta.sum(axis=0)
        if layer == 0:
            break
        below = layer - 1
        delta = (delta @ net.weights[layer].T) * activation_slope(
            net.activations[below], state.preactivations[below],
        )

    loss = float(-np.mean(state.log_output[np.arange(n), labels]))
    return loss, (weight_gradients, bias_gradients)


def _step(net, gradients, learning_rate):
    weight_gradients, bias_gradients = gradients
    for layer in range(net.n_layers):
        net.weights[layer] -= learning_rate * weight_gradients[layer]
        net.biases[layer] -= learning_rate * bias_gradients[layer]


def train_sgd(net, features, labels, config=None):
    """
    Train a copy of ``net``; shuffling, noise draws and therefore the weight trajectory are fixed by
    ``config.seed``.
    """
    config = config or TrainConfig()
    points, labels = _labels(net, features, labels)
    net = net.copy()
    rng = np.random.default_rng(config.seed)
    n = len(points)
    initial_loss = cross_entropy(net, points, labels)
    logger.info('Training {} on {} samples for {} epochs, initial loss {:.6g}'.format(
        net, n, config.epochs, initial_loss,
    ))

    losses = []
    checkpoints = {}
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start:start + config.batch_size]
            noise = rng.standard_normal((batch.size, net.coding_dim)) if config.noise_during_training else None
            loss, gradients = loss_and_gradients(net, points[batch], labels[batch], noise)
            if not np.isfinite(loss):
                raise Diverged(epoch, loss)
            _step(net, gradients, config.learning_rate)
            total += loss * batch.size
        losses.append(total / n)
        logger.info('Epoch {} loss {:.6g}'.format(epoch, losses[-1]))
        if epoch in config.checkpoint_epochs:
            checkpoints[epoch] = net.copy()

    final_loss = cross_entropy(net, points, labels)
    if not np.isfinite(final_loss):
        raise Diverged(config.epochs, final_loss)
    return TrainingResult(
        net=net,
        losses=tuple(losses),
        initial_loss=initial_loss,
        final_loss=final_loss,
        checkpoints=checkpoints,
    )


def accuracy(net, features, labels):
    points, labels = _labels(net, features, labels)
    predictions = np.argmax(propagate(net, points).log_output, axis=1)
    return float(np.mean(predictions == labels))
