"""
Feedforward classifiers with a noisy coding layer.

Layer ``l`` maps its input through ``x @ weights[l] + biases[l]``; every layer but the last applies its
hidden activation, the last one a softmax. The hidden layer ``noise_layer`` is the coding layer: its
mean activity f is the population code and, in noisy passes, emits f + sigma sqrt(g(f)) z.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_softmax

from category_geometry.apps.core.utils import as_points
from category_geometry.apps.nettrain.constants import (
    ACTIVATIONS,
    DEFAULT_NOISE_SIGMA,
    RELU,
    SIGMOID,
)
from category_geometry.apps.nettrain.exceptions import InvalidNetwork
from category_geometry.apps.neurocode.codes import NoiseSpec, noise_variance, variance_link
from category_geometry.apps.neurocode.constants import GAUSSIAN_IID, LINK_CONSTANT, LINK_RATE, MULTIPLICATIVE


def activate(name, preactivation):
    if name == SIGMOID:
        return expit(preactivation)
    if name == RELU:
        return np.maximum(preactivation, 0.0)
    return preactivation


def activation_slope(name, preactivation):
    """
    Derivative of the activation; the ReLU subgradient at exactly 0 is 0.
    """
    if name == SIGMOID:
        value = expit(preactivation)
        return value * (1.0 - value)
    if name == RELU:
        return (preactivation > 0).astype(float)
    return np.ones_like(preactivation)


class MLPModel:
    """
    Multilayer perceptron with layer sizes ``layer_dims`` = (input, hidden..., output).

    Weights are stored as (fan_in, fan_out) matrices and initialized uniformly in +-1/sqrt(fan_in)
    from ``seed`` unless given.
    """

    def __init__(self, layer_dims, activations=SIGMOID, noise_sigma=DEFAULT_NOISE_SIGMA, link=LINK_RATE,
                 noise_layer=None, weights=None, biases=None, seed=0):
        layer_dims = [int(size) for size in layer_dims]
        if len(layer_dims) < 3 or min(layer_dims) < 1:
            raise InvalidNetwork('Networks need an input, at least one hidden layer and an output, got {}'.format(
                layer_dims,
            ))
        if layer_dims[-1] < 2:
            raise InvalidNetwork('The softmax output needs at least two classes')
        n_hidden = len(layer_dims) - 2
        if isinstance(activations, str):
            activations = [activations] * n_hidden
        activations = list(activations)
        if len(activations) != n_hidden or any(name not in ACTIVATIONS for name in activations):
            raise InvalidNetwork('Expected {} activations from {}, got {}'.format(n_hidden, ACTIVATIONS, activations))
        noise_layer = n_hidden - 1 if noise_layer is None else int(noise_layer)
        if not 0 <= noise_layer < n_hidden:
            raise InvalidNetwork('noise_layer must index a hidden layer, got {}'.format(noise_layer))
        if not noise_sigma > 0:
            raise InvalidNetwork('noise_sigma must be positive, got {}'.format(noise_sigma))
        variance_link(link, 1.0)

        self.layer_dims = layer_dims
        self.activations = activations
        self.noise_layer = noise_layer
        self.noise_sigma = float(noise_sigma)
        self.link = link
        self.seed = seed

        shapes = list(zip(layer_dims[:-1], layer_dims[1:]))
        if weights is None or biases is None:
            rng = np.random.default_rng(seed)
            weights, biases = [], []
            for fan_in, fan_out in shapes:
                bound = 1.0 / np.sqrt(fan_in)
                weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
                biases.append(rng.uniform(-bound, bound, size=fan_out))
        self.weights = [np.array(matrix, dtype=float) for matrix in weights]
        self.biases = [np.array(vector, dtype=float) for vector in biases]
        if len(self.weights) != len(shapes) or len(self.biases) != len(shapes):
            raise InvalidNetwork('Expected {} weight matrices and bias vectors'.format(len(shapes)))
        for layer, (fan_in, fan_out) in enumerate(shapes):
            if self.weights[layer].shape != (fan_in, fan_out) or self.biases[layer].shape != (fan_out,):
                raise InvalidNetwork('Layer {} needs weights {} and biases ({},), got {} and {}'.format(
                    layer, (fan_in, fan_out), fan_out, self.weights[layer].shape, self.biases[layer].shape,
                ))

    @classmethod
    def zeros(cls, layer_dims, **kwargs):
        shapes = list(zip(layer_dims[:-1], layer_dims[1:]))
        return cls(
            layer_dims,
            weights=[np.zeros(shape) for shape in shapes],
            biases=[np.zeros(shape[1]) for shape in shapes],
            **kwargs,
        )

    @property
    def input_dim(self):
        return self.layer_dims[0]

    @property
    def n_classes(self):
        return self.layer_dims[-1]

    @property
    def n_layers(self):
        return len(self.weights)

    @property
    def coding_dim(self):
        return self.layer_dims[self.noise_layer + 1]

    @property
    def noise_spec(self):
        """
        The coding-layer noise as a ``NoiseSpec``: additive for the constant link, multiplicative otherwise.
        """
        if self.link == LINK_CONSTANT:
            return NoiseSpec(family=GAUSSIAN_IID, sigma=self.noise_sigma)
        return NoiseSpec(family=MULTIPLICATIVE, sigma=self.noise_sigma, link=self.link)

    def with_noise(self, sigma=None, link=None):
        return MLPModel(
            self.layer_dims, self.activations,
            noise_sigma=self.noise_sigma if sigma is None else sigma,
            link=self.link if link is None else link,
            noise_layer=self.noise_layer, weights=self.weights, biases=self.biases, seed=self.seed,
        )

    def copy(self):
        return self.with_noise()

    def architecture(self):
        return {
            'layer_dims': self.layer_dims,
            'activations': self.activations,
            'noise_layer': self.noise_layer,
            'noise_sigma': self.noise_sigma,
            'link': self.link,
            'seed': self.seed,
        }

    def to_dict(self):
        data = self.architecture()
        data['weights'] = [matrix.tolist() for matrix in self.weights]
        data['biases'] = [vector.tolist() for vector in self.biases]
        return data

    def __str__(self):
        return 'MLPModel({}, {}, sigma={}, link={})'.format(
            self.layer_dims, self.activations, self.noise_sigma, self.link,
        )


@dataclass(frozen=True)
class ForwardPass:
    """
    One pass through a network.

    ``preactivations[l]`` and ``inputs[l]`` are the affine output and the input of layer ``l``;
    ``coding_mean`` is f before noise and ``coding`` the (possibly noisy) values passed on.
    """
    inputs: list
    preactivations: list
    coding_mean: np.ndarray
    coding: np.ndarray
    log_output: np.ndarray

    @property
    def output(self):
        return np.exp(self.log_output)


def network_points(net, x):
    try:
        return as_points(x, net.input_dim)
    except ValueError:
        raise InvalidNetwork('Network input has dimension {}, got shape {}'.format(net.input_dim, np.shape(x)))


def coding_noise(net, means, standard_normal):
    """
    sigma sqrt(g(f)) z for coding-layer means f, with g evaluated at max(f, RATE_FLOOR) as in every
    likelihood of the code.
    """
    return net.noise_sigma * np.sqrt(noise_variance(net.link, means)) * standard_normal


def propagate(net, points, noise=None):
    """
    Forward pass over rows of ``points``; ``noise`` holds one standard-normal row per point for the
    coding layer, or None for the noiseless pass.
    """
    inputs, preactivations = [], []
    activity = points
    coding_mean = coding = None
    for layer in range(net.n_layers):
        inputs.append(activity)
        preactivation = activity @ net.weights[layer] + net.biases[layer]
        preactivations.append(preactivation)
        if layer == net.n_layers - 1:
            break
        activity = activate(net.activations[layer], preactivation)
        if layer == net.noise_layer:
            coding_mean = activity
            if noise is not None:
                activity = activity + coding_noise(net, activity, noise)
            coding = activity
    return ForwardPass(
        inputs=inputs,
        preactivations=preactivations,
        coding_mean=coding_mean,
        coding=coding,
        log_output=log_softmax(preactivations[-1], axis=1),
    )


def readout(net, coding):
    """
    ln g_y(r): the layers above the coding layer applied to coding-layer responses, shape (n, M).
    """
    activity = np.atleast_2d(np.asarray(coding, dtype=float))
    for layer in range(net.noise_layer + 1, net.n_layers):
        preactivation = activity @ net.weights[layer] + net.biases[layer]
        if layer == net.n_layers - 1:
            return log_softmax(preactivation, axis=1)
        activity = activate(net.activations[layer], preactivation)


def coding_means(net, x):
    points, _ = network_points(net, x)
    return propagate(net, points).coding_mean


def forward(net, x, noisy=False, seed=None):
    """
    Run the network on one point or on rows of points.

    With ``noisy`` the coding layer draws its noise from ``seed`` (an int or a ``Generator``) and the
    layers above consume the noisy values; otherwise the pass is deterministic.
    """
    points, _ = network_points(net, x)
    noise = None
    if noisy:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        noise = rng.standard_normal((len(points), net.coding_dim))
    return propagate(net, points, noise)
