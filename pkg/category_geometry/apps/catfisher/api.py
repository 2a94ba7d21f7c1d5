"""
Categorical Fisher information, principal discriminant directions and curves, boundaries and Fisher maxima.
"""
import logging
from collections import namedtuple
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import optimize
from scipy.special import expit

from category_geometry.apps.categories import api as categories_api
from category_geometry.apps.categories.builders import gauss_pair_1d
from category_geometry.apps.categories.constants import EXP_GAUSS, MINUS, PLUS
from category_geometry.apps.catfisher.constants import (
    BOUNDARY_TOLERANCE,
    DEFAULT_MARGIN_SCALES,
    DEFAULT_MAX_ARC_SCALES,
    DEFAULT_STEP_FRACTION,
    DEGENERATE_POSTERIOR,
    EXTREMUM_RESIDUAL_TOLERANCE,
    FIELD_CHUNK_SIZE,
    MAX_LOG_ODDS_STEP,
    PDC_STOP_GRADIENT,
    POLISH_ITERATIONS,
    RANK_ABSOLUTE_FLOOR,
    RANK_RELATIVE_THRESHOLD,
    ROOT_XTOL,
    ZERO_GRADIENT,
)
from category_geometry.apps.catfisher.exceptions import (
    InvalidGeometry,
    NoInteriorMax,
    NoSignChange,
    StepTooLarge,
    ZeroGradient,
)
from category_geometry.apps.catfisher.geometry import Polyline
from category_geometry.apps.core.constants import FLAG_DEGENERATE_POSTERIOR
from category_geometry.apps.core.matrices import FisherMatrix
from category_geometry.apps.core.montecarlo import ordered_map
from category_geometry.apps.core.utils import chunks


logger = logging.getLogger(__name__)

PrincipalDirection = namedtuple('PrincipalDirection', ['direction', 'f_cat'])


def _fisher_cat_entries(model, points):
    """
    Outer-product form sum_y P(y|x) s_y s_y^T with s_y = grad ln P(y|x), shape (n, K, K).
    Terms with P(y|x) below the degeneracy threshold are dropped.
    """
    probabilities = np.exp(model.log_posterior(points))
    degenerate = probabilities < DEGENERATE_POSTERIOR
    scores = categories_api.grad_log_posterior(model, points)
    scores = np.where(degenerate[:, :, None], 0.0, scores)
    weights = np.where(degenerate, 0.0, probabilities)
    return np.einsum('nm,nmk,nml->nkl', weights, scores, scores), degenerate.any(axis=1)


def fisher_cat(model, x):
    """
    F_cat(x) = sum_y grad P(y|x) grad P(y|x)^T / P(y|x).
    """
    point = np.atleast_1d(np.asarray(x, dtype=float))
    entries, degenerate = _fisher_cat_entries(model, point[None, :] if point.ndim == 1 else point)
    flags = list(categories_api.nondifferentiable_flags(model, point))
    if degenerate[0]:
        logger.warning('Dropped a degenerate posterior term of F_cat at x = {}'.format(point.tolist()))
        flags.append(FLAG_DEGENERATE_POSTERIOR)
    return FisherMatrix.from_entries(entries[0], flags=flags)


def fisher_cat_field(model, points, threads=1):
    """
    F_cat entries over many points, shape (n, K, K), evaluated chunk by chunk.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    index_chunks = list(chunks(np.arange(len(points)), FIELD_CHUNK_SIZE))
    results = ordered_map(lambda idx: _fisher_cat_entries(model, points[idx])[0], index_chunks, threads)
    return np.concatenate(results, axis=0)


def fisher_cat_expected_hessian(model, x, step=1e-4):
    """
    Second-derivative form F_ij = -sum_y P(y|x) d_i d_j ln P(y|x), by central differences.
    """
    point = np.atleast_1d(np.asarray(x, dtype=float))
    dim = point.size
    steps = step * (1.0 + np.abs(point))
    probabilities = categories_api.posterior(model, point)

    def log_posterior(shift):
        return categories_api.log_posterior(model, point + shift)

    entries = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            e_i = np.zeros(dim)
            e_j = np.zeros(dim)
            e_i[i] = steps[i]
            e_j[j] = steps[j]
            second = (
                log_posterior(e_i + e_j) - log_posterior(e_i - e_j)
                - log_posterior(-e_i + e_j) + log_posterior(-e_i - e_j)
            ) / (4.0 * steps[i] * steps[j])
            entries[i, j] = entries[j, i] = -np.dot(probabilities, second)
    return FisherMatrix.from_entries(entries)


def f_cat(model, x):
    """
    Scalar f_cat = P(+|x) P(-|x) |grad L|^2, the single nonzero eigenvalue for binary models.
    """
    probabilities = categories_api.posterior(model, x)
    gradient = categories_api.grad_log_odds(model, x)
    return probabilities[..., PLUS] * probabilities[..., MINUS] * np.sum(np.square(gradient), axis=-1)


def pdd(model, x):
    gradient = categories_api.grad_log_odds(model, x)
    norm = float(np.linalg.norm(gradient))
    if norm < ZERO_GRADIENT:
        raise ZeroGradient(np.atleast_1d(x).tolist(), norm)
    return PrincipalDirection(direction=gradient / norm, f_cat=float(f_cat(model, x)))


def rank_fcat(model, x):
    return fisher_cat(model, x).rank(RANK_RELATIVE_THRESHOLD, RANK_ABSOLUTE_FLOOR)


def boundary_tangent(model, x):
    """
    Unit vector orthogonal to grad L in a 2-D feature space.
    """
    direction = pdd(model, x).direction
    if direction.size != 2:
        raise InvalidGeometry('Boundary tangents are defined for 2-D feature spaces only')
    return np.array([-direction[1], direction[0]])


def feature_scale(model):
    """
    Characteristic length of the model: the widest component standard deviation.
    """
    scales = []
    for component in model.components:
        if component.kind == EXP_GAUSS:
            scales.append(max(component.tau, np.sqrt(component.sigma2_sq)))
        else:
            scales.append(np.sqrt(np.max(np.linalg.eigvalsh(component.cov))))
    return float(max(scales))


def trace_pdc(model, x0, step=None, max_arc=None, margin=None):
    """
    Integral curve of grad L through x0, heading toward the boundary.

    The curve is integrated at unit speed (dx/ds = ±grad L / |grad L|) with fixed-step classic
    Runge-Kutta, so ``step`` is a length. Tracing stops after ``max_arc``, ``margin`` past the first
    boundary crossing, or where the gradient vanishes.
    """
    scale = feature_scale(model)
    step = DEFAULT_STEP_FRACTION * scale if step is None else float(step)
    max_arc = DEFAULT_MAX_ARC_SCALES * scale if max_arc is None else float(max_arc)
    margin = DEFAULT_MARGIN_SCALES * scale if margin is None else float(margin)

    x = np.atleast_1d(np.asarray(x0, dtype=float))
    start_norm = float(np.linalg.norm(categories_api.grad_log_odds(model, x)))
    if start_norm < ZERO_GRADIENT:
        raise ZeroGradient(x.tolist(), start_norm)

    log_odds = float(categories_api.log_odds(model, x))
    sign = -np.sign(log_odds) if log_odds != 0 else 1.0

    def velocity(point):
        gradient = categories_api.grad_log_odds(model, point)
        norm = np.linalg.norm(gradient)
        if norm < PDC_STOP_GRADIENT:
            return None
        return sign * gradient / norm

    points = [x]
    arc = 0.0
    crossed_at = 0.0 if log_odds == 0 else None
    while arc < max_arc:
        k1 = velocity(x)
        k2 = None if k1 is None else velocity(x + 0.5 * step * k1)
        k3 = None if k2 is None else velocity(x + 0.5 * step * k2)
        k4 = None if k3 is None else velocity(x + step * k3)
        if k4 is None:
            logger.info('PDC stopped at a vanishing gradient near x = {}'.format(x.tolist()))
            break
        x_next = x + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        next_log_odds = float(categories_api.log_odds(model, x_next))
        if abs(next_log_odds - log_odds) > MAX_LOG_ODDS_STEP:
            raise StepTooLarge(x.tolist(), next_log_odds - log_odds)
        arc += float(np.linalg.norm(x_next - x))
        if crossed_at is None and np.sign(next_log_odds) != np.sign(log_odds):
            crossed_at = arc
        points.append(x_next)
        x, log_odds = x_next, next_log_odds
        if crossed_at is not None and arc - crossed_at >= margin:
            break
    return Polyline.from_points(points)


def find_boundary_on_pdc(model, pdc):
    """
    Zero of L along the polyline, refined by bisection on arc length.
    """
    values = categories_api.log_odds(model, pdc.points)
    exact = np.flatnonzero(values == 0)
    if exact.size:
        return pdc.points[exact[0]].copy()
    changes = np.flatnonzero(np.sign(values[:-1]) != np.sign(values[1:]))
    if not changes.size:
        raise NoSignChange()
    index = changes[0]

    def along(s):
        return float(categories_api.log_odds(model, pdc.point_at(s)))

    root = optimize.bisect(along, pdc.arc_lengths[index], pdc.arc_lengths[index + 1], xtol=ROOT_XTOL, maxiter=200)
    boundary = pdc.point_at(root)
    residual = abs(along(root))
    if residual > BOUNDARY_TOLERANCE:
        logger.warning('Boundary residual |L| = {:.3e} above {:.1e}'.format(residual, BOUNDARY_TOLERANCE))
    return boundary


def extremum_residual(model, x):
    """
    ((1 - e^L)/(1 + e^L)) |grad L|^4 + 2 grad L^T H grad L; zero where f_cat is stationary along the PDC.
    """
    log_odds = categories_api.log_odds(model, x)
    gradient = categories_api.grad_log_odds(model, x)
    hessian = categories_api.hessian_log_odds(model, x)
    squared_norm = float(gradient @ gradient)
    return float(-np.tanh(log_odds / 2.0) * squared_norm ** 2 + 2.0 * gradient @ hessian @ gradient)


def _polish_extremum(model, x, reach):
    """
    Fixed-point refinement: zero the residual along the local gradient direction until the point settles.
    """
    for _ in range(POLISH_ITERATIONS):
        direction = pdd(model, x).direction

        def along(t):
            return extremum_residual(model, x + t * direction)

        low, high = -reach, reach
        for _ in range(20):
            if along(low) * along(high) < 0:
                break
            low, high = 2 * low, 2 * high
        else:
            logger.warning('Could not bracket the f_cat extremum near x = {}'.format(x.tolist()))
            return x
        t = optimize.brentq(along, low, high, xtol=ROOT_XTOL, maxiter=200)
        x_next = x + t * direction
        if np.linalg.norm(x_next - x) <= 1e-13 * (1.0 + np.linalg.norm(x)):
            return x_next
        x = x_next
        reach = max(abs(t), 1e-9)
    return x


def find_fcat_max_on_pdc(model, pdc):
    """
    Maximum of f_cat along the polyline: golden-section search on arc length around the best vertex,
    then refined until the extremum residual vanishes.
    """
    values = f_cat(model, pdc.points)
    best = int(np.argmax(values))
    if best == 0 or best == len(pdc) - 1:
        raise NoInteriorMax(best, len(pdc))

    def objective(s):
        return -float(f_cat(model, pdc.point_at(s)))

    bracket = tuple(pdc.arc_lengths[best - 1:best + 2])
    try:
        result = optimize.minimize_scalar(objective, bracket=bracket, method='golden')
    except ValueError:
        # flat top: the vertex values do not strictly bracket
        result = optimize.minimize_scalar(objective, bounds=(bracket[0], bracket[2]), method='bounded')
    x = _polish_extremum(model, pdc.point_at(result.x), reach=bracket[2] - bracket[0])

    gradient_norm = np.linalg.norm(categories_api.grad_log_odds(model, x))
    residual = abs(extremum_residual(model, x))
    if residual > EXTREMUM_RESIDUAL_TOLERANCE * gradient_norm ** 4:
        logger.warning('f_cat maximum residual {:.3e} above tolerance at x = {}'.format(residual, x.tolist()))
    return x


def max_displacement_estimate(model, x_b):
    """
    Near-boundary estimate 4 v^T H v / |grad L|^3 of the offset of the f_cat maximum along the PDD.
    """
    direction = pdd(model, x_b).direction
    gradient_norm = np.linalg.norm(categories_api.grad_log_odds(model, x_b))
    hessian = categories_api.hessian_log_odds(model, x_b)
    return float(4.0 * direction @ hessian @ direction / gradient_norm ** 3)


def diagonal_case_parameters(a, sigma, c_norm=1.0, dim=1):
    """
    eta, rho, gamma and the boundary radius z_B for Sigma_- = sigma^2 I, Sigma_+ = a^2 sigma^2 I, a > 1.
    """
    # a - 1 is exact for a near 1, a^2 - 1 is not
    excess = (a - 1.0) * (a + 1.0)
    eta = excess / (a ** 2 * sigma ** 2)
    rho = (a ** 2 + 1.0) / excess
    gamma = 2.0 * np.log1p(a - 1.0) / eta
    z_b = np.sqrt(c_norm ** 2 * (rho ** 2 - 1.0) + dim * gamma)
    return eta, rho, gamma, z_b


def maxima_radius(eta, z_b):
    """
    Radius z > z_B solving z^2 = (2/eta) (e^l + 1)/(e^l - 1) with l = (eta/2)(z^2 - z_B^2).
    """
    def balance(z):
        return z ** 2 * np.tanh(eta * (z ** 2 - z_b ** 2) / 4.0) - 2.0 / eta

    high = z_b + np.sqrt(2.0 / eta) + 1.0
    while balance(high) <= 0:
        high *= 2.0
    return optimize.brentq(balance, z_b, high, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)


@dataclass(frozen=True)
class Gauss1DSummary:
    a: float
    sigma: float
    c: float
    eta: float
    rho: Optional[float]
    gamma: float
    z_b: Optional[float]
    z: Optional[float]
    x_b_plus: float
    x_b_minus: Optional[float]
    x_cat_plus: float
    x_cat_minus: Optional[float]
    density_at_x_b_plus: float
    density_at_x_b_minus: Optional[float]

    def to_dict(self):
        return asdict(self)


def gauss1d_summary(a, sigma, c=1.0):
    """
    Boundaries and Fisher maxima of the 1-D pair N(-c, sigma^2), N(c, a^2 sigma^2).

    Both roots are returned with the data density attached; for a = 1 the single boundary and
    maximum sit at 0.
    """
    if a < 1 or sigma <= 0 or c <= 0:
        raise InvalidGeometry('gauss1d needs a >= 1, sigma > 0, c > 0; got a={} sigma={} c={}'.format(a, sigma, c))
    model = gauss_pair_1d(a, sigma, c)
    if a == 1:
        density = float(model.density([[0.0]])[0])
        return Gauss1DSummary(
            a=a, sigma=sigma, c=c, eta=0.0, rho=None, gamma=sigma ** 2, z_b=None, z=None,
            x_b_plus=0.0, x_b_minus=None, x_cat_plus=0.0, x_cat_minus=None,
            density_at_x_b_plus=density, density_at_x_b_minus=None,
        )

    eta, rho, gamma, z_b = diagonal_case_parameters(a, sigma, c_norm=c, dim=1)
    z = maxima_radius(eta, z_b)
    center = -rho * c
    # z_B - rho c in conjugate form: z_B^2 - rho^2 c^2 = gamma - c^2
    x_b_plus, x_b_minus = (gamma - c ** 2) / (z_b + rho * c), center - z_b
    densities = model.density([[x_b_plus], [x_b_minus]])
    logger.debug('gauss1d a={} sigma={}: x_b={} x_cat={}'.format(a, sigma, x_b_plus, center + z))
    return Gauss1DSummary(
        a=a, sigma=sigma, c=c, eta=eta, rho=rho, gamma=gamma, z_b=z_b, z=z,
        x_b_plus=x_b_plus, x_b_minus=x_b_minus, x_cat_plus=center + z, x_cat_minus=center - z,
        density_at_x_b_plus=float(densities[0]), density_at_x_b_minus=float(densities[1]),
    )


def posterior_plus(model, x):
    return expit(categories_api.log_odds(model, x))
