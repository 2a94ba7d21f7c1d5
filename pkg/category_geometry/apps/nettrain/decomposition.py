"""
Splits of a network's mean Bayes cost E_x KL(P(Y|x) || g(Y|r)).

``decompose_cost`` separates the coding cost I[Y,X] - I[Y,R] from the decoding cost;
``bias_variance`` separates the cost of the noise-averaged output from the Jensen gap of the noise.
"""
import logging
from typing import NamedTuple

import numpy as np
from scipy.special import rel_entr

from category_geometry.apps.categories import api as categories_api
from category_geometry.apps.core.exceptions import ConfigurationError
from category_geometry.apps.core.montecarlo import MCConfig, mean_and_std_err, run_chunked
from category_geometry.apps.infomeasure.api import check_grid, conditional_entropies
from category_geometry.apps.infomeasure.decoders import grid_log_posterior
from category_geometry.apps.infomeasure.grids import default_grid
from category_geometry.apps.infomeasure.responses import ResponseModel
from category_geometry.apps.nettrain.constants import (
    DECOMPOSITION_ABSOLUTE_SLACK,
    DECOMPOSITION_STANDARD_ERRORS,
)
from category_geometry.apps.nettrain.exceptions import InconsistentDecomposition
from category_geometry.apps.nettrain.networks import coding_means, coding_noise, readout


logger = logging.getLogger(__name__)


class NetworkResponses(ResponseModel):
    """
    Coding-layer responses of a network to stimuli of the category model's feature space.

    The network reads the feature coordinates ``projection_axes`` (all of them by default), embedded
    by ``input_map`` when given.
    """

    def __init__(self, net, input_map=None, projection_axes=None):
        self.net = net
        self.input_map = input_map
        self.projection_axes = None if projection_axes is None else [int(axis) for axis in projection_axes]
        self.noise = net.noise_spec

    def mean(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.projection_axes is not None:
            points = points[:, self.projection_axes]
        if self.input_map is not None:
            points = self.input_map(points)
        return coding_means(self.net, points)

    def sample(self, points, rng, antithetic=False):
        """
        Coding-layer responses drawn exactly as during training; linear units may go negative.
        """
        means = self.mean(points)
        deviation = coding_noise(self.net, means, rng.standard_normal(means.shape))
        if antithetic:
            return means + deviation, means - deviation
        return means + deviation


class Term(NamedTuple):
    estimate: float
    std_err: float


class CostDecomposition(NamedTuple):
    """
    total = coding + decoding; ``decoding_direct`` is the decoding cost estimated on its own.
    """
    total: Term
    coding: Term
    decoding: Term
    decoding_direct: Term

    def to_dict(self):
        return {name: term._asdict() for name, term in self._asdict().items()}


class JensenBand(NamedTuple):
    """
    Bounds on the variance term from E[Var(U)] of the relative output fluctuations U and their largest size.
    """
    epsilon: float
    mean_variance: float
    lower: float
    upper: float


class BiasVariance(NamedTuple):
    total: Term
    manifold: Term
    bias: Term
    variance: Term
    band: JensenBand

    def to_dict(self):
        data = {name: getattr(self, name)._asdict() for name in ('total', 'manifold', 'bias', 'variance')}
        data['band'] = self.band._asdict()
        return data


def _check_nonnegative(name, term):
    if term.estimate < -(DECOMPOSITION_STANDARD_ERRORS * term.std_err + DECOMPOSITION_ABSOLUTE_SLACK):
        raise InconsistentDecomposition(name, term.estimate, term.std_err)


def _check_zero(name, term):
    if abs(term.estimate) > DECOMPOSITION_STANDARD_ERRORS * term.std_err + DECOMPOSITION_ABSOLUTE_SLACK:
        raise InconsistentDecomposition(name, term.estimate, term.std_err)


def _term(values):
    return Term(*mean_and_std_err(values))


def _setup(model, net, mc, input_map, decoder, projection_axes=None):
    if model.dim > 2:
        raise ConfigurationError('Cost decompositions integrate over the feature space and need K <= 2, got {}'.format(
            model.dim,
        ))
    if net.n_classes != model.n_classes:
        raise ConfigurationError('The network has {} outputs for {} categories'.format(net.n_classes, model.n_classes))
    responses = NetworkResponses(net, input_map, projection_axes)
    decoder = decoder if decoder is not None else (lambda coding: readout(net, coding))
    return responses, mc if mc is not None else MCConfig(), decoder


def _draw(model, responses, rng, n, repeats):
    features = categories_api.sample(model, n, rng).features
    log_posterior = model.log_posterior(features)
    stimuli = np.repeat(features, repeats, axis=0)
    return features, log_posterior, responses.sample(stimuli, rng)


def decompose_cost(model, net, mc=None, grid=None, input_map=None, decoder=None, projection_axes=None):
    """
    Mean Bayes cost split into coding and decoding terms.

    Each sampled x gets ``mc.inner_samples`` responses r. Per response, the total is
    sum_y P(y|x) ln(P(y|x) / g_y(r)), the coding term H[Y|r] - H[Y|x] with P(y|r) from the grid
    decoder, and the direct decoding term KL(P(Y|r) || g(Y|r)). ``decoder`` replaces the network's
    readout by any map from coding responses to ln g, shape (n, M).
    """
    responses, mc, decoder = _setup(model, net, mc, input_map, decoder, projection_axes)
    grid = grid if grid is not None else default_grid(model)
    check_grid(model, grid)
    node_means = responses.mean(grid.nodes)
    repeats = mc.inner_samples

    def chunk(rng, n):
        _, log_posterior, coding = _draw(model, responses, rng, n, repeats)
        stimulus_posterior = np.repeat(np.exp(log_posterior), repeats, axis=0)
        log_output = decoder(coding)
        log_response_posterior = grid_log_posterior(model, responses, coding, grid, node_means)
        response_posterior = np.exp(log_response_posterior)

        total = np.sum(rel_entr(stimulus_posterior, 1.0), axis=1) - np.sum(stimulus_posterior * log_output, axis=1)
        coding_term = conditional_entropies(log_response_posterior) - np.repeat(
            conditional_entropies(log_posterior), repeats,
        )
        direct = np.sum(rel_entr(response_posterior, 1.0), axis=1) - np.sum(response_posterior * log_output, axis=1)
        per_stimulus = np.stack([total, coding_term, direct], axis=1).reshape(n, repeats, 3).mean(axis=1)
        return per_stimulus

    values = np.concatenate(run_chunked(mc, chunk))
    total, coding, direct = values.T
    result = CostDecomposition(
        total=_term(total),
        coding=_term(coding),
        decoding=_term(total - coding),
        decoding_direct=_term(direct),
    )
    for name in ('total', 'coding', 'decoding', 'decoding_direct'):
        _check_nonnegative(name, getattr(result, name))
    _check_zero('decoding_residual', _term(total - coding - direct))
    logger.info('Cost {:.6g} = coding {:.6g} + decoding {:.6g}'.format(
        result.total.estimate, result.coding.estimate, result.decoding.estimate,
    ))
    return result


def jensen_band(epsilon, mean_variance):
    """
    For |u| <= epsilon < 1, u - ln(1 + u) lies between (1/2 - epsilon/3) u^2 and
    ((-epsilon - ln(1 - epsilon)) / epsilon^2) u^2; the upper factor is 1/2 + epsilon/3 + epsilon^2/4 + ...
    """
    lower = 0.5 * (1.0 - 2.0 * epsilon / 3.0) * mean_variance
    if epsilon >= 1.0:
        return JensenBand(epsilon, mean_variance, lower, float('inf'))
    if epsilon == 0.0:
        upper_factor = 0.5
    else:
        upper_factor = (-epsilon - np.log1p(-epsilon)) / epsilon ** 2
    return JensenBand(epsilon, mean_variance, lower, upper_factor * mean_variance)


def bias_variance(model, net, mc=None, input_map=None, decoder=None, projection_axes=None):
    """
    Mean Bayes cost split into manifold, bias and variance terms.

    The network sees the projection x of the features x* onto ``projection_axes`` (identity by default).
    For each sampled x* the ``mc.inner_samples`` responses give the noise-averaged output g_bar(y|x).
    Per sample, the bias term is KL(P(Y|x) || g_bar(Y|x)), the variance term the Jensen gap
    sum_y P(y|x) (ln g_bar_y - mean ln g_y) and the manifold term the rest of the total; its mean is
    E KL(P(Y|x*) || P(Y|x)), zero without a projection.
    """
    responses, mc, decoder = _setup(model, net, mc, input_map, decoder, projection_axes)
    projected = model if projection_axes is None else model.marginal(projection_axes)
    repeats = mc.inner_samples
    if repeats < 2:
        raise ConfigurationError('bias_variance needs mc.inner_samples >= 2 to average over the noise')

    def chunk(rng, n):
        features, log_posterior, coding = _draw(model, responses, rng, n, repeats)
        posterior = np.exp(log_posterior)
        if projection_axes is None:
            projected_posterior = posterior
        else:
            projected_posterior = np.exp(projected.log_posterior(features[:, responses.projection_axes]))
        log_output = decoder(coding).reshape(n, repeats, -1)
        output = np.exp(log_output)
        mean_output = output.mean(axis=1)
        log_mean_output = np.log(mean_output)
        mean_log_output = log_output.mean(axis=1)

        total = np.sum(rel_entr(posterior, 1.0), axis=1) - np.sum(posterior * mean_log_output, axis=1)
        bias = np.sum(rel_entr(projected_posterior, mean_output), axis=1)
        variance = np.sum(projected_posterior * (log_mean_output - mean_log_output), axis=1)
        fluctuation = output / mean_output[:, None, :] - 1.0
        spread = np.sum(projected_posterior * np.mean(fluctuation ** 2, axis=1), axis=1)
        return np.stack([total, bias, variance, spread], axis=1), float(np.max(np.abs(fluctuation)))

    results = run_chunked(mc, chunk)
    values = np.concatenate([values for values, _ in results])
    epsilon = max(epsilon for _, epsilon in results)
    total, bias, variance, spread = values.T
    result = BiasVariance(
        total=_term(total),
        manifold=_term(total - bias - variance),
        bias=_term(bias),
        variance=_term(variance),
        band=jensen_band(epsilon, float(np.mean(spread))),
    )
    for name in ('total', 'manifold', 'bias', 'variance'):
        _check_nonnegative(name, getattr(result, name))
    logger.info('Cost {:.6g} = manifold {:.6g} + bias {:.6g} + variance {:.6g}'.format(
        result.total.estimate, result.manifold.estimate, result.bias.estimate, result.variance.estimate,
    ))
    return result
