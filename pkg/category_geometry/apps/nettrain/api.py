"""
Probes of a trained network's coding layer: its Jacobian and Fisher information, scalar Fisher
and cosine-distance profiles along paths, tuning curves and Fisher-matching statistics.
"""
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import optimize, stats

from category_geometry.apps.categories import api as categories_api
from category_geometry.apps.categories import builders
from category_geometry.apps.core.constants import FLAG_RATE_UNDERFLOW, FLAG_RELU_KINK
from category_geometry.apps.core.matrices import FisherMatrix
from category_geometry.apps.core.montecarlo import ordered_map
from category_geometry.apps.nettrain.constants import (
    ACTIVE_UNIT_RANGE,
    BOUNDARY_INITIAL_STEP,
    BOUNDARY_MAX_ROUNDS,
    BOUNDARY_MAX_STEP,
    BOUNDARY_OVERSAMPLING,
    BOUNDARY_XTOL,
    GRADIENT_FLOOR,
    INTERIOR_CONFIDENCE,
    KINK_TOLERANCE,
    RELU,
    TRANSITION_THRESHOLD,
    ZERO_ACTIVITY_NORM,
)
from category_geometry.apps.nettrain.exceptions import InvalidProbe, NoBoundaryPoints, NoInteriorPoints, ZeroActivity
from category_geometry.apps.nettrain.networks import (
    ForwardPass,
    MLPModel,
    activate,
    activation_slope,
    coding_means,
    forward,
    network_points,
)
from category_geometry.apps.nettrain.training import TrainConfig, TrainingResult, accuracy, train_sgd
from category_geometry.apps.neurocode.codes import multiplicative_weights
from category_geometry.apps.neurocode.constants import LINK_CONSTANT, RATE_FLOOR


logger = logging.getLogger(__name__)

__all__ = [
    'MLPModel',
    'ForwardPass',
    'TrainConfig',
    'TrainingResult',
    'PathProbe',
    'forward',
    'train_sgd',
    'accuracy',
    'coding_jacobian',
    'fisher_code_net',
    'fisher_code_net_field',
    'fisher_along_path',
    'cosine_proxy',
    'tuning_curves',
    'transition_fraction',
    'eigen_alignment',
    'boundary_probes',
    'interior_probes',
    'eigenvalue_contrast',
]


class CodingJacobian(NamedTuple):
    """
    df_i/dx_j at the coding layer, shape (N, K), and the rows that depend on a ReLU kink.
    """
    matrix: np.ndarray
    kink_rows: np.ndarray

    @property
    def flags(self):
        return (FLAG_RELU_KINK,) if self.kink_rows.any() else ()


def _network_input(input_map, x):
    if input_map is None:
        return x
    return input_map(np.asarray(x, dtype=float))


def _map_jacobian(input_map, x):
    """
    ds/dx of the map into the network input, or None for the identity.
    """
    if input_map is None:
        return None
    if not hasattr(input_map, 'jacobian'):
        raise InvalidProbe('input_map {!r} has no jacobian'.format(input_map))
    return np.atleast_2d(input_map.jacobian(x))


def coding_jacobian(net, x, input_map=None):
    """
    Forward accumulation of layer Jacobians from the input to the coding layer.

    With ``input_map`` (an embedding with ``jacobian``) the derivative is taken with respect to the
    coordinates ``x`` that map into the network input.
    """
    points, single = network_points(net, _network_input(input_map, x))
    if not single:
        raise InvalidProbe('coding_jacobian takes a single point, got shape {}'.format(np.shape(x)))
    activity = points[0]
    jacobian = np.eye(net.input_dim)
    kinks = np.zeros(net.input_dim, dtype=bool)
    for layer in range(net.noise_layer + 1):
        weights = net.weights[layer]
        name = net.activations[layer]
        preactivation = activity @ weights + net.biases[layer]
        slope = activation_slope(name, preactivation)
        jacobian = slope[:, None] * (weights.T @ jacobian)
        # a unit inherits the kink of any upstream unit it listens to
        inherited = (np.abs(weights.T) @ kinks.astype(float) > 0) & (slope != 0)
        own = (np.abs(preactivation) <= KINK_TOLERANCE) if name == RELU else np.zeros(slope.shape, dtype=bool)
        kinks = own | inherited
        activity = activate(name, preactivation)

    latent = _map_jacobian(input_map, x)
    if latent is not None:
        jacobian = jacobian @ latent
    return CodingJacobian(matrix=jacobian, kink_rows=kinks)


def fisher_code_net(net, x, mode=None, input_map=None):
    """
    F_code(x) = sum_i w_i grad f_i grad f_i^T of the coding layer, with the per-unit weights of the
    coding noise (exact or leading order, see ``multiplicative_weights``).

    Units below the rate floor are dropped for rate-dependent links.
    """
    jacobian = coding_jacobian(net, x, input_map)
    rates = coding_means(net, _network_input(input_map, x))[0]
    flags = list(jacobian.flags)
    active = np.ones(rates.shape, dtype=bool)
    if net.link != LINK_CONSTANT:
        active = rates >= RATE_FLOOR
        if not active.all():
            logger.debug('Dropped {} coding units below the rate floor'.format(int(np.count_nonzero(~active))))
            flags.append(FLAG_RATE_UNDERFLOW)
    weights = np.zeros(rates.shape)
    noise = net.noise_spec
    weights[active] = multiplicative_weights(rates[active], net.noise_sigma, net.link, mode or noise.fisher_mode)
    matrix = jacobian.matrix
    return FisherMatrix.from_entries(matrix.T @ (weights[:, None] * matrix), flags=flags)


def fisher_code_net_field(net, points, threads=1, mode=None, input_map=None):
    """
    ``fisher_code_net`` at every row of ``points``, in order.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    field_values = ordered_map(lambda point: fisher_code_net(net, point, mode, input_map), points, threads)
    dropped = sum(1 for fisher in field_values if FLAG_RATE_UNDERFLOW in fisher.flags)
    if dropped:
        logger.warning('Coding units fell below the rate floor at {} of {} points'.format(dropped, len(points)))
    return field_values


@dataclass(frozen=True, eq=False)
class PathProbe:
    """
    An ordered continuum of input points, optionally labelled with the classes of its endpoints.
    """
    points: np.ndarray
    labels: tuple = field(default=())

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or len(points) < 3:
            raise InvalidProbe('A path needs at least 3 points, got shape {}'.format(np.shape(self.points)))
        steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
        if np.any(steps == 0):
            raise InvalidProbe('Consecutive path points must differ; repeated at {}'.format(
                np.flatnonzero(steps == 0).tolist(),
            ))
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'labels', tuple(self.labels))

    @classmethod
    def linear(cls, start, end, n_points, labels=()):
        return cls(categories_api.linear_path(start, end, n_points), labels)

    def __len__(self):
        return len(self.points)

    @property
    def index(self):
        return np.arange(len(self.points), dtype=float)

    @property
    def tangents(self):
        """
        dx/dt per index step: central differences inside, one-sided at the ends.
        """
        return np.gradient(self.points, axis=0)

    @property
    def arc_length(self):
        steps = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(steps)])


class PathFisher(NamedTuple):
    """
    Scalar Fisher information along a path, per unit arc length and per index step.
    """
    t: np.ndarray
    arc_length: np.ndarray
    per_arc: np.ndarray
    per_index: np.ndarray
    flags: tuple

    @property
    def argmax(self):
        return int(np.argmax(self.per_index))


def fisher_along_path(net, probe, input_map=None, threads=1, mode=None):
    """
    F(t) = v^T F_code v for the unit tangent v; ``per_index`` rescales it by |dx/dt|^2.
    """
    fields = fisher_code_net_field(net, probe.points, threads, mode, input_map)
    tangents = probe.tangents
    speeds = np.linalg.norm(tangents, axis=1)
    directions = tangents / speeds[:, None]
    per_arc = np.array([fisher.quadratic_form(direction) for fisher, direction in zip(fields, directions)])
    flags = tuple(sorted({flag for fisher in fields for flag in fisher.flags}))
    return PathFisher(
        t=probe.index,
        arc_length=probe.arc_length,
        per_arc=per_arc,
        per_index=per_arc * speeds ** 2,
        flags=flags,
    )


class AffineFit(NamedTuple):
    """
    a d + b fitted to a Fisher profile by least absolute deviations, with the Pearson correlation.
    """
    slope: float
    intercept: float
    mean_absolute_error: float
    pearson: float


class CosineProfile(NamedTuple):
    distances: np.ndarray
    fisher: np.ndarray
    fit: AffineFit


def cosine_distances(activities):
    activities = np.atleast_2d(activities)
    norms = np.linalg.norm(activities, axis=1)
    silent = np.flatnonzero(norms < ZERO_ACTIVITY_NORM)
    if silent.size:
        raise ZeroActivity(int(silent[0]))
    cosines = np.sum(activities[:-1] * activities[1:], axis=1) / (norms[:-1] * norms[1:])
    return np.clip(1.0 - cosines, 0.0, 2.0)


def fit_affine_l1(predictor, target):
    """
    Minimize mean |a predictor + b - target| as a linear program.
    """
    predictor = np.asarray(predictor, dtype=float)
    target = np.asarray(target, dtype=float)
    n = predictor.size
    # variables: a, b, then one residual bound e_i per point
    costs = np.concatenate([[0.0, 0.0], np.full(n, 1.0 / n)])
    identity = np.eye(n)
    design = np.column_stack([predictor, np.ones(n)])
    constraints = np.vstack([np.hstack([design, -identity]), np.hstack([-design, -identity])])
    bounds = [(None, None), (None, None)] + [(0, None)] * n
    solution = optimize.linprog(costs, A_ub=constraints, b_ub=np.concatenate([target, -target]),
                                bounds=bounds, method='highs')
    slope, intercept = solution.x[:2]
    if np.ptp(predictor) > 0 and np.ptp(target) > 0:
        pearson = float(stats.pearsonr(predictor, target)[0])
    else:
        pearson = float('nan')
    return AffineFit(float(slope), float(intercept), float(solution.fun), pearson)


def cosine_proxy(net, probe, input_map=None, fisher=None, threads=1):
    """
    d(t) = 1 - cos(f(x_t), f(x_t+1)) between consecutive mean activities, aligned with the per-index
    scalar Fisher averaged onto the same midpoints.
    """
    activities = coding_means(net, _network_input(input_map, probe.points))
    distances = cosine_distances(activities)
    if fisher is None:
        fisher = fisher_along_path(net, probe, input_map, threads)
    midpoints = 0.5 * (fisher.per_index[:-1] + fisher.per_index[1:])
    return CosineProfile(distances=distances, fisher=midpoints, fit=fit_affine_l1(distances, midpoints))


class TuningCurves(NamedTuple):
    """
    Noiseless coding-layer responses along a path, one column per unit in ``unit_ids``.
    """
    t: np.ndarray
    unit_ids: tuple
    responses: np.ndarray
    fisher_argmax: int

    def steepest(self):
        """
        Midpoint index of the largest |df_i/dt| of each unit, or -1 for units that stay flat.
        """
        slopes = np.abs(np.diff(self.responses, axis=0))
        steepest = np.argmax(slopes, axis=0)
        flat = np.ptp(self.responses, axis=0) < ACTIVE_UNIT_RANGE
        return np.where(flat, -1, steepest)


def tuning_curves(net, probe, unit_ids=None, input_map=None, threads=1):
    unit_ids = tuple(range(net.coding_dim)) if unit_ids is None else tuple(int(unit) for unit in unit_ids)
    invalid = [unit for unit in unit_ids if not 0 <= unit < net.coding_dim]
    if invalid:
        raise InvalidProbe('Units {} are not in the coding layer of size {}'.format(invalid, net.coding_dim))
    activities = coding_means(net, _network_input(input_map, probe.points))
    fisher = fisher_along_path(net, probe, input_map, threads)
    return TuningCurves(
        t=probe.index,
        unit_ids=unit_ids,
        responses=activities[:, list(unit_ids)],
        fisher_argmax=fisher.argmax,
    )


def transition_fraction(curves, posteriors, threshold=TRANSITION_THRESHOLD):
    """
    Share of active units whose steepest step touches the posterior-transition region,
    the path points where max_y P(y|x) < ``threshold``.
    """
    transition = np.max(np.atleast_2d(posteriors), axis=1) < threshold
    steepest = curves.steepest()
    active = steepest >= 0
    if not active.any():
        return float('nan')
    hits = transition[steepest[active]] | transition[steepest[active] + 1]
    return float(np.mean(hits))


class EigenAlignment(NamedTuple):
    angle: float
    ratio: float


def eigen_alignment(fcat, fcode):
    """
    Angle in degrees between the top eigenvectors of two Fisher matrices, and lambda_2 / lambda_1 of ``fcode``.
    """
    cosine = min(1.0, abs(float(fcat.top_eigenvector @ fcode.top_eigenvector)))
    top = fcode.top_eigenvalue
    ratio = float(fcode.eigenvalues[1] / top) if fcode.dim > 1 and top > 0 else float('nan')
    return EigenAlignment(angle=float(np.degrees(np.arccos(cosine))), ratio=ratio)


class BoundaryProbes(NamedTuple):
    """
    Points on the decision boundary between classes ``pairs[i]``, and their distance to the triple point
    (NaN for models with fewer than three classes).
    """
    points: np.ndarray
    pairs: np.ndarray
    triple_distance: np.ndarray


def _pairwise_log_odds(model, first, second):
    def log_odds(point):
        log_posterior = model.log_posterior(point[None, :])[0]
        return float(log_posterior[first] - log_posterior[second])
    return log_odds


def _boundary_point(model, start):
    """
    Slide from ``start`` down the gradient of ln P_i - ln P_j, i and j its two most likely classes,
    until the two posteriors meet. None when the crossing is not on the decision boundary.
    """
    log_posterior = model.log_posterior(start[None, :])[0]
    second, first = np.argsort(log_posterior)[-2:]
    gradients = categories_api.grad_log_posterior(model, start)
    direction = gradients[second] - gradients[first]
    norm = np.linalg.norm(direction)
    if norm < GRADIENT_FLOOR:
        return None
    direction = direction / norm
    log_odds = _pairwise_log_odds(model, first, second)
    step = BOUNDARY_INITIAL_STEP
    while log_odds(start + step * direction) > 0:
        step *= 2.0
        if step > BOUNDARY_MAX_STEP:
            return None
    distance = optimize.brentq(lambda t: log_odds(start + t * direction), 0.0, step, xtol=BOUNDARY_XTOL)
    point = start + distance * direction
    posterior = np.exp(model.log_posterior(point[None, :])[0])
    others = np.delete(posterior, [first, second])
    if others.size and others.max() >= posterior[first]:
        return None
    return point, (min(first, second), max(first, second))


def boundary_probes(model, n, seed=0):
    """
    ``n`` points on the pairwise decision boundaries, found by sliding samples of the model onto them.
    """
    rng = np.random.default_rng(seed)
    points, pairs = [], []
    for _ in range(BOUNDARY_MAX_ROUNDS):
        candidates = categories_api.sample(model, BOUNDARY_OVERSAMPLING * n, rng).features
        for candidate in candidates:
            found = _boundary_point(model, candidate)
            if found is not None:
                points.append(found[0])
                pairs.append(found[1])
            if len(points) == n:
                break
        if len(points) == n:
            break
    else:
        raise NoBoundaryPoints(n, len(points))

    points = np.array(points)
    if model.n_classes >= 3:
        triple_distance = np.linalg.norm(points - builders.triple_point(model), axis=1)
    else:
        triple_distance = np.full(n, np.nan)
    return BoundaryProbes(points=points, pairs=np.array(pairs, dtype=int), triple_distance=triple_distance)


def interior_probes(model, n, confidence=INTERIOR_CONFIDENCE, seed=0):
    """
    ``n`` samples of the model that it categorizes with max_y P(y|x) >= ``confidence``.
    """
    rng = np.random.default_rng(seed)
    found = []
    for _ in range(BOUNDARY_MAX_ROUNDS):
        candidates = categories_api.sample(model, BOUNDARY_OVERSAMPLING * n, rng).features
        confident = np.max(categories_api.posterior(model, candidates), axis=1) >= confidence
        found.extend(candidates[confident][:n - len(found)])
        if len(found) == n:
            return np.array(found)
    raise NoInteriorPoints(n, len(found), confidence)


def eigenvalue_contrast(net, boundary_points, interior_points, input_map=None, threads=1):
    """
    Median top eigenvalue of F_code at ``boundary_points`` over its median at ``interior_points``.
    """
    boundary = np.median([
        fisher.top_eigenvalue for fisher in fisher_code_net_field(net, boundary_points, threads, input_map=input_map)
    ])
    interior = np.median([
        fisher.top_eigenvalue for fisher in fisher_code_net_field(net, interior_points, threads, input_map=input_map)
    ])
    return float(boundary / interior) if interior > 0 else float('inf')
