"""
Responses, likelihoods and the neural Fisher information of population codes.
"""
import logging

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from category_geometry.apps.categories.exceptions import DimMismatch
from category_geometry.apps.core.constants import FLAG_RATE_UNDERFLOW, FLAG_SINGULAR_FISHER
from category_geometry.apps.core.matrices import FisherMatrix
from category_geometry.apps.core.montecarlo import ordered_map, run_chunked
from category_geometry.apps.core.utils import as_points
from category_geometry.apps.neurocode.codes import (
    NoiseSpec,
    PopulationCode,
    multiplicative_weights,
    noise_variance,
    variance_link,
)
from category_geometry.apps.neurocode.constants import (
    GAUSSIAN_CORRELATED,
    LINK_CONSTANT,
    ML_GRID_POINTS,
    MULTIPLICATIVE,
    POISSON,
    RADIAL_BUMP,
    RATE_FLOOR,
    SIGMOID_RAMP,
)
from category_geometry.apps.neurocode.densities import NoiseDensity
from category_geometry.apps.neurocode.exceptions import InvalidCode, InvalidNoise, NegativeRate


logger = logging.getLogger(__name__)


def _points(code, x):
    try:
        return as_points(x, code.dim)
    except ValueError:
        raise DimMismatch(code.dim, np.shape(x))


def _single_point(code, x):
    points, single = _points(code, x)
    if not single:
        raise DimMismatch(code.dim, np.shape(x))
    return points[0]


def _can_underflow(noise):
    return noise.family == POISSON or (noise.family == MULTIPLICATIVE and noise.link != LINK_CONSTANT)


def _active_units(code, rates):
    """
    Units that take part in the Fisher information; rates below the floor are dropped for
    Poisson and rate-dependent multiplicative noise.
    """
    if not _can_underflow(code.noise):
        return np.ones(rates.shape, dtype=bool), ()
    active = rates >= RATE_FLOOR
    if active.all():
        return active, ()
    logger.warning('Dropped {} of {} units with rates below {:.0e}'.format(
        int(np.count_nonzero(~active)), active.size, RATE_FLOOR,
    ))
    return active, (FLAG_RATE_UNDERFLOW,)


def _whiten(noise, values):
    """
    Apply L^-1 to each row, where L L^T is the correlation matrix.
    """
    if noise.family != GAUSSIAN_CORRELATED:
        return values
    return linalg.solve_triangular(noise.correlation_cholesky, values.T, lower=True).T


def mean_response(code, x):
    points, single = _points(code, x)
    rates = code.rates(points)
    return rates[0] if single else rates


def response_jacobian(code, x):
    """
    df_i/dx_j at one point, shape (N, K).
    """
    return code.jacobian(_single_point(code, x))


def draw_responses(noise, rates, rng):
    """
    One noisy response per row of mean rates.
    """
    if noise.family == POISSON:
        return rng.poisson(noise.t * rates).astype(float)
    if noise.family == MULTIPLICATIVE:
        negative = np.flatnonzero(np.any(rates < 0, axis=0))
        if negative.size:
            raise NegativeRate(negative.tolist())
        return rates + noise.sigma * np.sqrt(noise_variance(noise.link, rates)) * rng.standard_normal(rates.shape)
    noise_values = noise.noise_density.sample(rng, rates.shape)
    if noise.family == GAUSSIAN_CORRELATED:
        noise_values = noise_values @ noise.correlation_cholesky.T
    return rates + noise.sigma * noise_values


def draw_antithetic(noise, rates, rng):
    """
    Mirrored response pairs f + e and f - e sharing one noise draw e; needs a symmetric noise family.
    """
    if noise.family == POISSON:
        raise InvalidNoise('Poisson counts have no antithetic mirror')
    deviation = draw_responses(noise, rates, rng) - rates
    return rates + deviation, rates - deviation


def sample_response(code, x, seed, n=None):
    """
    Noisy responses at x: one vector of N values, or an (n, N) array when ``n`` is given.
    """
    point = _single_point(code, x)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rates = code.rates(point[None, :])
    if n is None:
        return draw_responses(code.noise, rates, rng)[0]
    return draw_responses(code.noise, np.repeat(rates, n, axis=0), rng)


def score(code, x, responses):
    """
    grad_x ln P(r|x) for each row of ``responses``, shape (n, K).
    """
    point = _single_point(code, x)
    responses = np.atleast_2d(np.asarray(responses, dtype=float))
    noise = code.noise
    rates = code.rates(point[None, :])[0]
    jacobian = code.jacobian(point)
    active, _ = _active_units(code, rates)
    safe_rates = np.where(active, rates, 1.0)
    residuals = responses - rates

    if noise.is_additive:
        psi = noise.noise_density.score(_whiten(noise, residuals / noise.sigma))
        if noise.family == GAUSSIAN_CORRELATED:
            psi = linalg.solve_triangular(noise.correlation_cholesky.T, psi.T, lower=False).T
        return -(psi @ jacobian) / noise.sigma

    if noise.family == POISSON:
        coefficients = responses / safe_rates - noise.t
    else:
        g, dg = variance_link(noise.link, safe_rates)
        variance = noise.sigma ** 2 * g
        d_variance = noise.sigma ** 2 * dg
        coefficients = (
            -d_variance / (2.0 * variance)
            + residuals / variance
            + residuals ** 2 * d_variance / (2.0 * variance ** 2)
        )
    return np.where(active, coefficients, 0.0) @ jacobian


def fisher_weights(code, rates, mode=None):
    """
    Per-unit weights w_i of F = sum_i w_i grad f_i grad f_i^T for the independent-unit families.
    """
    noise = code.noise
    active, flags = _active_units(code, rates)
    safe_rates = np.where(active, rates, 1.0)
    if noise.family == POISSON:
        weights = noise.t / safe_rates
    elif noise.family == MULTIPLICATIVE:
        weights = multiplicative_weights(safe_rates, noise.sigma, noise.link, mode or noise.fisher_mode)
    else:
        weights = np.full(rates.shape, noise.noise_density.fisher() / noise.sigma ** 2)
    return np.where(active, weights, 0.0), flags


def fisher_code(code, x, mode=None):
    """
    Neural Fisher information F_code(x), shape (K, K).

    Additive noise: (F_Q / sigma^2) J^T C^-1 J. Multiplicative and Poisson: sum of per-unit terms.
    """
    point = _single_point(code, x)
    noise = code.noise
    jacobian = code.jacobian(point)
    if noise.family == GAUSSIAN_CORRELATED:
        whitened = linalg.solve_triangular(noise.correlation_cholesky, jacobian, lower=True)
        entries = noise.noise_density.fisher() / noise.sigma ** 2 * whitened.T @ whitened
        flags = ()
    else:
        weights, flags = fisher_weights(code, code.rates(point[None, :])[0], mode)
        entries = (jacobian * weights[:, None]).T @ jacobian
    return _flag_singular(FisherMatrix.from_entries(entries, flags=flags), point)


def _flag_singular(fisher, point):
    if fisher.is_singular:
        logger.debug('Neural Fisher information is singular at x = {}'.format(point.tolist()))
        return fisher.with_flags(FLAG_SINGULAR_FISHER)
    return fisher


def fisher_code_field(code, points, threads=1):
    points, _ = _points(code, points)
    return ordered_map(lambda point: fisher_code(code, point), points, threads)


def fisher_code_numeric(code, x, mc):
    """
    Monte-Carlo estimate E[s s^T] of the score second moment over ``mc.outer_samples`` draws at x.
    """
    point = _single_point(code, x)
    rates = code.rates(point[None, :])
    _, flags = _active_units(code, rates[0])

    def chunk(rng, n):
        scores = score(code, point, draw_responses(code.noise, np.repeat(rates, n, axis=0), rng))
        return scores.T @ scores

    total = np.zeros((code.dim, code.dim))
    for partial in run_chunked(mc, chunk):
        total += partial
    fisher = FisherMatrix.from_entries(total / mc.outer_samples, flags=flags)
    return _flag_singular(fisher, point)


def fq_of_density(tag, nu=None):
    """
    Fisher information F_Q of a unit-variance noise density; at least 1, with equality for the Gaussian.
    """
    return NoiseDensity(tag, nu).fisher()


def stam_gap(tag, nu=None):
    """
    1/2 ln F_Q + H_Q - 1/2 ln(2 pi e); nonnegative, zero for the Gaussian.
    """
    density = NoiseDensity(tag, nu)
    return 0.5 * np.log(density.fisher()) + density.entropy() - 0.5 * np.log(2 * np.pi * np.e)


def pushforward_fisher(fisher, jacobian):
    """
    J^T F J for a K×N_s Jacobian dx/ds; the result lives on the N_s-dimensional space.
    """
    if not isinstance(fisher, FisherMatrix):
        fisher = FisherMatrix.from_entries(fisher)
    jacobian = np.atleast_2d(np.asarray(jacobian, dtype=float))
    if jacobian.shape[0] != fisher.dim:
        raise DimMismatch(fisher.dim, jacobian.shape)
    return FisherMatrix.from_entries(jacobian.T @ fisher.entries @ jacobian, flags=fisher.flags)


def log_likelihood_matrix(code, responses, stimuli):
    """
    ln P(r_a | x_b) for every response row a and stimulus row b, shape (n, m).
    """
    stimuli, _ = _points(code, stimuli)
    return log_likelihood_from_rates(code.noise, responses, code.rates(stimuli))


def log_likelihood_from_rates(noise, responses, rates):
    """
    ln P(r_a | f_b) for response rows a and mean-rate rows b under ``noise``, shape (n, m).
    """
    responses = np.atleast_2d(np.asarray(responses, dtype=float))
    rates = np.atleast_2d(rates)
    n_units = rates.shape[1]

    if noise.family == POISSON:
        expected = noise.t * np.maximum(rates, RATE_FLOOR)
        log_factorials = gammaln(responses + 1).sum(axis=1)[:, None]
        return responses @ np.log(expected).T - expected.sum(axis=1)[None, :] - log_factorials

    if noise.family == MULTIPLICATIVE:
        inverse = 1.0 / (noise.sigma ** 2 * noise_variance(noise.link, rates))
        quadratic = (
            (responses ** 2) @ inverse.T
            - 2.0 * responses @ (rates * inverse).T
            + np.sum(rates ** 2 * inverse, axis=1)[None, :]
        )
        return -0.5 * np.sum(np.log(2 * np.pi / inverse), axis=1)[None, :] - 0.5 * quadratic

    log_det = np.sum(np.log(np.diag(noise.correlation_cholesky))) if noise.family == GAUSSIAN_CORRELATED else 0.0
    offset = -n_units * np.log(noise.sigma) - log_det
    whitened_responses = _whiten(noise, responses) / noise.sigma
    whitened_rates = _whiten(noise, rates) / noise.sigma
    if noise.noise_density.is_gaussian:
        squared = (
            np.sum(whitened_responses ** 2, axis=1)[:, None]
            - 2.0 * whitened_responses @ whitened_rates.T
            + np.sum(whitened_rates ** 2, axis=1)[None, :]
        )
        return offset - 0.5 * n_units * np.log(2 * np.pi) - 0.5 * squared
    columns = [
        noise.noise_density.logpdf(whitened_responses - whitened_rate).sum(axis=1)
        for whitened_rate in whitened_rates
    ]
    return offset + np.column_stack(columns)


def ml_decode(code, responses, bounds, grid_points=ML_GRID_POINTS):
    """
    Maximum-likelihood stimulus for each response of a 1-D code: grid search over ``bounds``
    refined by a parabola through the best grid point and its neighbours.
    """
    if code.dim != 1:
        raise InvalidCode('Maximum-likelihood decoding is implemented for 1-D stimuli only')
    responses = np.asarray(responses, dtype=float)
    single = responses.ndim == 1
    grid = np.linspace(bounds[0], bounds[1], grid_points)
    spacing = grid[1] - grid[0]
    log_likelihood = log_likelihood_matrix(code, np.atleast_2d(responses), grid[:, None])
    best = np.clip(np.argmax(log_likelihood, axis=1), 1, grid_points - 2)
    rows = np.arange(len(best))
    left, middle, right = (log_likelihood[rows, best + shift] for shift in (-1, 0, 1))
    curvature = left - 2.0 * middle + right
    with np.errstate(divide='ignore', invalid='ignore'):
        offset = np.where(curvature < 0, 0.5 * (left - right) / curvature, 0.0)
    estimates = grid[best] + np.clip(offset, -0.5, 0.5) * spacing
    return float(estimates[0]) if single else estimates


def dense_sigmoid_population(n_units, span=(-1.0, 1.0), width=0.1, max_rate=1.0, noise=None):
    """
    1-D population of sigmoid ramps with centers evenly spread over ``span``.
    """
    centers = np.linspace(span[0], span[1], n_units)[:, None]
    return PopulationCode(centers, width, max_rate, SIGMOID_RAMP, noise or NoiseSpec())


def radial_population(centers, width=0.5, max_rate=1.0, noise=None):
    return PopulationCode(centers, width, max_rate, RADIAL_BUMP, noise or NoiseSpec())


def radial_grid_population(span, per_dim, dim=2, width=None, max_rate=1.0, noise=None):
    """
    Radial bumps on a regular grid over [span[0], span[1]]^dim; the width defaults to the grid spacing.
    """
    axis = np.linspace(span[0], span[1], per_dim)
    centers = np.stack(np.meshgrid(*([axis] * dim), indexing='ij'), axis=-1).reshape(-1, dim)
    width = (axis[1] - axis[0]) if width is None else width
    return radial_population(centers, width, max_rate, noise)
