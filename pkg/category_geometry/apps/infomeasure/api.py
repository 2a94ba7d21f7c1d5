"""
Mutual-information estimators, the large-N coding cost and its diagnostics.

All information quantities are in nats; ``MIResult.to_dict`` converts on request.
"""
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import optimize, stats
from scipy.special import entr

from category_geometry.apps.categories import api as categories_api
from category_geometry.apps.catfisher import api as catfisher_api
from category_geometry.apps.core.constants import (
    FLAG_CLIPPED,
    FLAG_RANK_MATCHED,
    FLAG_SINGULAR_FISHER,
    SINGULAR_RELATIVE_TOLERANCE,
)
from category_geometry.apps.core.matrices import FisherMatrix
from category_geometry.apps.core.montecarlo import (
    MCConfig,
    jackknife_std_err,
    mean_and_std_err,
    ordered_map,
    run_chunked,
)
from category_geometry.apps.core.utils import config_digest
from category_geometry.apps.infomeasure.constants import (
    BITS,
    BOUNDARY_SCAN_POINTS,
    BOUNDARY_XTOL,
    GRID_MASS_TOLERANCE,
    INEQUALITY_STANDARD_ERRORS,
    MAX_TRANSFORM_CONDITION,
    MONTE_CARLO,
    NATS,
    QUADRATURE,
    RANGE_TOLERANCE,
    UNITS,
)
from category_geometry.apps.infomeasure.decoders import grid_log_posterior
from category_geometry.apps.infomeasure.exceptions import (
    AllSingular,
    GridTooCoarse,
    IllConditionedTransform,
    InequalityViolated,
    InvalidResponseModel,
)
from category_geometry.apps.infomeasure.grids import QuadratureGrid, default_grid
from category_geometry.apps.infomeasure.responses import as_response_model
from category_geometry.apps.neurocode import api as neurocode_api
from category_geometry.apps.neurocode.codes import PopulationCode


logger = logging.getLogger(__name__)

__all__ = [
    'MCConfig',
    'MIResult',
    'CodingCost',
    'GapResult',
    'DataProcessing',
    'PowerLawFit',
    'mi_yx',
    'mi_yr',
    'coding_cost',
    'asymptotic_gap',
    'invariance_check',
    'data_processing_check',
    'fit_power_law',
    'bayes_rate',
]


@dataclass(frozen=True)
class MIResult:
    """
    A mutual-information estimate in nats. ``raw_estimate`` is the value before clipping at zero.
    """
    estimate: float
    std_err: float
    method: str
    raw_estimate: float
    flags: tuple = field(default=())
    config_digest: str = ''

    @property
    def nats(self):
        return self.estimate

    @property
    def bits(self):
        return self.estimate / np.log(2.0)

    def to_dict(self, units=NATS):
        if units not in UNITS:
            raise ValueError('Unknown information units {!r}'.format(units))
        scale = 1.0 / np.log(2.0) if units == BITS else 1.0
        return {
            'estimate': self.estimate * scale,
            'std_err': self.std_err * scale,
            'units': units,
            'nats': self.estimate,
            'method': self.method,
            'flags': list(self.flags),
            'config_digest': self.config_digest,
        }


@dataclass(frozen=True)
class CodingCost:
    """
    Paired estimate of I[Y,X] - I[Y,R]: both terms are computed on the same stimulus draws.
    """
    estimate: float
    std_err: float
    i_yx: float
    i_yr: float
    config_digest: str = ''

    def to_dict(self):
        return {
            'estimate': self.estimate,
            'std_err': self.std_err,
            'i_yx': self.i_yx,
            'i_yr': self.i_yr,
            'config_digest': self.config_digest,
        }


@dataclass(frozen=True)
class GapResult:
    estimate: float
    excluded_mass: float
    excluded_nodes: int
    rank_matched_nodes: int
    flags: tuple = field(default=())

    def to_dict(self):
        return {
            'estimate': self.estimate,
            'excluded_mass': self.excluded_mass,
            'excluded_nodes': self.excluded_nodes,
            'rank_matched_nodes': self.rank_matched_nodes,
            'flags': list(self.flags),
        }


class DataProcessing(NamedTuple):
    i_yr: float
    i_yx: float
    margin: float
    std_err: float


class PowerLawFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    coefficient: float


def prior_entropy(model):
    return float(np.sum(entr(model.priors)))


def conditional_entropies(log_posterior):
    """
    H[Y | .] for every row of a log-posterior array.
    """
    return np.sum(entr(np.exp(log_posterior)), axis=1)


def _clipped_result(raw, std_err, method, digest):
    if raw < 0.0:
        logger.warning('Clipped a negative mutual-information estimate {:.3g} to 0'.format(raw))
        return MIResult(0.0, std_err, method, raw, flags=(FLAG_CLIPPED,), config_digest=digest)
    return MIResult(raw, std_err, method, raw, config_digest=digest)


def check_grid(model, grid):
    masses = grid.class_masses(model)
    deviation = float(np.max(np.abs(masses - 1.0)))
    if deviation > GRID_MASS_TOLERANCE:
        raise GridTooCoarse('class masses {} deviate from 1 by {:.3g}'.format(masses.tolist(), deviation))
    if grid.dim != model.dim:
        raise GridTooCoarse('grid dimension {} does not match the model dimension {}'.format(grid.dim, model.dim))


def mi_yx(model, grid=None, mc=None):
    """
    I[Y,X] = H[Y] - E_x H[Y|x], by quadrature over ``grid`` or by Monte Carlo when only ``mc`` is given.
    """
    if mc is not None and grid is None:
        def chunk(rng, n):
            features = categories_api.sample(model, n, rng).features
            return conditional_entropies(model.log_posterior(features))

        values = np.concatenate(run_chunked(mc, chunk))
        mean, std_err = mean_and_std_err(values)
        digest = config_digest({'operation': 'mi_yx', 'model': model.to_dict(), 'mc': mc.digest_fields()})
        return _clipped_result(prior_entropy(model) - mean, std_err, MONTE_CARLO, digest)

    grid = grid if grid is not None else default_grid(model)
    weights = grid.probability_weights(model)
    mass = float(weights.sum())
    if abs(mass - 1.0) > GRID_MASS_TOLERANCE:
        raise GridTooCoarse('the grid captures a probability mass of {:.6g}'.format(mass))
    conditional = float(weights @ conditional_entropies(model.log_posterior(grid.nodes))) / mass
    digest = config_digest({'operation': 'mi_yx', 'model': model.to_dict(), 'grid': grid.to_dict()})
    return _clipped_result(prior_entropy(model) - conditional, 0.0, QUADRATURE, digest)


def _paired_entropies(model, response_model, grid, mc, antithetic):
    """
    Per-stimulus H[Y|x] and H[Y|r] over the Monte-Carlo draws of ``mc``.

    Each of the ``mc.outer_samples`` stimuli gets ``mc.inner_samples`` responses (antithetic pairs
    when asked); their conditional entropies are averaged into one value per stimulus.
    """
    node_means = response_model.mean(grid.nodes)
    repeats = mc.inner_samples

    def chunk(rng, n):
        features = categories_api.sample(model, n, rng).features
        h_x = conditional_entropies(model.log_posterior(features))
        stimuli = np.repeat(features, repeats, axis=0)
        if antithetic:
            upper, lower = response_model.sample(stimuli, rng, antithetic=True)
            h_r = 0.5 * (
                conditional_entropies(grid_log_posterior(model, response_model, upper, grid, node_means))
                + conditional_entropies(grid_log_posterior(model, response_model, lower, grid, node_means))
            )
        else:
            responses = response_model.sample(stimuli, rng)
            h_r = conditional_entropies(grid_log_posterior(model, response_model, responses, grid, node_means))
        return h_x, h_r.reshape(n, repeats).mean(axis=1)

    results = run_chunked(mc, chunk)
    return np.concatenate([h_x for h_x, _ in results]), np.concatenate([h_r for _, h_r in results])


def _response_digest(operation, model, response_model, grid, mc, antithetic):
    code = getattr(response_model, 'code', None)
    return config_digest({
        'operation': operation,
        'model': model.to_dict(),
        'code': code.to_dict() if hasattr(code, 'to_dict') else repr(response_model),
        'grid': grid.to_dict(),
        'mc': mc.digest_fields(),
        'antithetic': antithetic,
    })


def _prepare(model, response_source, mc, grid):
    response_model = as_response_model(response_source)
    mc = mc if mc is not None else MCConfig()
    grid = grid if grid is not None else default_grid(model)
    check_grid(model, grid)
    return response_model, mc, grid


def mi_yr(model, response_source, mc=None, grid=None, antithetic=False):
    """
    I[Y,R] = H[Y] - E_r H[Y|r], with P(y|r) from quadrature over the stimulus grid and the outer
    expectation by Monte Carlo over (y, x, r). The standard error is a delete-one jackknife.
    """
    response_model, mc, grid = _prepare(model, response_source, mc, grid)
    _, h_r = _paired_entropies(model, response_model, grid, mc, antithetic)
    digest = _response_digest('mi_yr', model, response_model, grid, mc, antithetic)
    return _clipped_result(prior_entropy(model) - float(h_r.mean()), jackknife_std_err(h_r), MONTE_CARLO, digest)


def coding_cost(model, response_source, mc=None, grid=None, antithetic=False):
    """
    I[Y,X] - I[Y,R] estimated as E[H[Y|r] - H[Y|x]] over shared stimulus draws.
    """
    response_model, mc, grid = _prepare(model, response_source, mc, grid)
    h_x, h_r = _paired_entropies(model, response_model, grid, mc, antithetic)
    differences = h_r - h_x
    entropy = prior_entropy(model)
    return CodingCost(
        estimate=float(differences.mean()),
        std_err=jackknife_std_err(differences),
        i_yx=entropy - float(h_x.mean()),
        i_yr=entropy - float(h_r.mean()),
        config_digest=_response_digest('coding_cost', model, response_model, grid, mc, antithetic),
    )


def _as_fisher(value):
    return value if isinstance(value, FisherMatrix) else FisherMatrix.from_entries(value)


def fisher_code_source(source):
    """
    A point -> FisherMatrix callable from a code, an object with ``fisher_code``, or a callable.
    """
    if isinstance(source, PopulationCode):
        return lambda point: neurocode_api.fisher_code(source, point)
    if hasattr(source, 'fisher_code'):
        return lambda point: _as_fisher(source.fisher_code(point))
    if callable(source):
        return lambda point: _as_fisher(source(point))
    raise InvalidResponseModel('Cannot evaluate F_code from {!r}'.format(source))


def _fisher_code_field(source, nodes, threads):
    if isinstance(source, (np.ndarray, list, tuple)):
        entries = np.asarray(source, dtype=float)
        if entries.shape != (len(nodes), nodes.shape[1], nodes.shape[1]):
            raise InvalidResponseModel('F_code field has shape {}, expected {}'.format(
                entries.shape, (len(nodes), nodes.shape[1], nodes.shape[1]),
            ))
        return [FisherMatrix.from_entries(entry) for entry in entries]
    return ordered_map(fisher_code_source(source), nodes, threads)


def _trace_term(f_cat, f_code):
    """
    tr(F_cat F_code^-1) at one node and whether F_code had to be pseudo-inverted.
    Returns None when F_cat leaves the range of a singular F_code.
    """
    if not f_code.is_singular:
        return float(np.trace(np.linalg.solve(f_code.entries, f_cat))), False
    inverse = np.linalg.pinv(f_code.entries, rcond=SINGULAR_RELATIVE_TOLERANCE, hermitian=True)
    projector = f_code.entries @ inverse
    residual = np.linalg.norm(f_cat - projector @ f_cat @ projector)
    if residual <= RANGE_TOLERANCE * np.linalg.norm(f_cat):
        return float(np.trace(inverse @ f_cat)), True
    return None, False


def asymptotic_gap(model, fisher_source, grid=None, threads=1):
    """
    Large-N coding cost 1/2 E_x tr(F_cat(x) F_code(x)^-1).

    Where F_code is singular but F_cat lies in its range the pseudo-inverse is used; other singular
    nodes are excluded and their probability mass is reported.
    """
    grid = grid if grid is not None else default_grid(model)
    cat_entries = catfisher_api.fisher_cat_field(model, grid.nodes, threads)
    code_fishers = _fisher_code_field(fisher_source, grid.nodes, threads)
    weights = grid.probability_weights(model)

    integrand = np.zeros(grid.size)
    excluded = np.zeros(grid.size, dtype=bool)
    matched = np.zeros(grid.size, dtype=bool)
    for node, (f_cat, f_code) in enumerate(zip(cat_entries, code_fishers)):
        value, pseudo = _trace_term(f_cat, f_code)
        if value is None:
            excluded[node] = True
        else:
            integrand[node] = value
            matched[node] = pseudo

    if excluded.all():
        raise AllSingular(grid.size)
    flags = []
    excluded_mass = float(weights[excluded].sum())
    if excluded.any():
        logger.warning('Excluded {} singular F_code nodes carrying probability mass {:.3g}'.format(
            int(excluded.sum()), excluded_mass,
        ))
        flags.append(FLAG_SINGULAR_FISHER)
    if matched.any():
        flags.append(FLAG_RANK_MATCHED)
    return GapResult(
        estimate=0.5 * float(weights @ integrand),
        excluded_mass=excluded_mass,
        excluded_nodes=int(excluded.sum()),
        rank_matched_nodes=int(matched.sum()),
        flags=tuple(sorted(flags)),
    )


def invariance_check(model, fisher_source, matrix, nodes_per_dim=None, threads=1):
    """
    Relative change of the asymptotic gap when everything is re-expressed in z = matrix @ x.

    The model is mapped to z-coordinates and F_code is pushed forward through x = matrix^-1 z;
    F_cat is recomputed from the transformed model. The matrix must have a condition number below
    MAX_TRANSFORM_CONDITION.
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    condition = float(np.linalg.cond(matrix))
    if not condition < MAX_TRANSFORM_CONDITION:
        raise IllConditionedTransform(condition, MAX_TRANSFORM_CONDITION)
    inverse = np.linalg.inv(matrix)
    code_x = fisher_code_source(fisher_source)
    gap_x = asymptotic_gap(model, code_x, default_grid(model, nodes_per_dim), threads)

    model_z = model.transformed(matrix)

    def code_z(point):
        return neurocode_api.pushforward_fisher(code_x(inverse @ point), inverse)

    gap_z = asymptotic_gap(model_z, code_z, default_grid(model_z, nodes_per_dim), threads)
    return abs(gap_z.estimate - gap_x.estimate) / gap_x.estimate


def data_processing_check(model, response_source, mc=None, grid=None, antithetic=False):
    """
    I[Y,R] <= I[Y,X] up to INEQUALITY_STANDARD_ERRORS standard errors of the paired difference.
    """
    cost = coding_cost(model, response_source, mc, grid, antithetic)
    if cost.estimate < -INEQUALITY_STANDARD_ERRORS * cost.std_err:
        raise InequalityViolated(cost.i_yr, cost.i_yx, cost.std_err)
    return DataProcessing(i_yr=cost.i_yr, i_yx=cost.i_yx, margin=cost.estimate, std_err=cost.std_err)


def fit_power_law(ns, gaps):
    """
    Least squares of ln gap on ln n: gap ~ coefficient * n ** slope.
    """
    ns = np.asarray(ns, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    if ns.size < 2 or ns.shape != gaps.shape:
        raise ValueError('Need at least two matching (n, gap) pairs')
    if np.any(gaps <= 0.0) or np.any(ns <= 0.0):
        raise ValueError('Power-law fits need positive values, got gaps {}'.format(gaps.tolist()))
    fit = stats.linregress(np.log(ns), np.log(gaps))
    return PowerLawFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue ** 2),
        coefficient=float(np.exp(fit.intercept)),
    )


def _decision_boundaries(model, low, high):
    """
    Points of [low, high] where the most probable class of a 1-D model changes.
    """
    scan = np.linspace(low, high, BOUNDARY_SCAN_POINTS)
    winners = np.argmax(model.log_posterior(scan[:, None]), axis=1)
    boundaries = []
    for index in np.flatnonzero(winners[1:] != winners[:-1]):
        first, second = winners[index], winners[index + 1]

        def margin(x, first=first, second=second):
            log_posterior = model.log_posterior(np.array([[x]]))[0]
            return log_posterior[first] - log_posterior[second]

        try:
            boundaries.append(optimize.brentq(margin, scan[index], scan[index + 1], xtol=BOUNDARY_XTOL))
        except ValueError:
            # a third class wins in between; the scan resolution is the best we have
            boundaries.append(0.5 * (scan[index] + scan[index + 1]))
    return boundaries


def _max_posterior_integral(model, grid):
    weights = grid.probability_weights(model)
    best = np.exp(np.max(model.log_posterior(grid.nodes), axis=1))
    return float(weights @ best), float(weights.sum())


def bayes_rate(model, grid=None):
    """
    Accuracy of the Bayes classifier on x, E_x max_y P(y|x).

    max_y P(y|x) has a kink on every decision boundary. For 1-D models the box is cut there and each
    piece gets its own Gauss-Legendre rule; higher dimensions use the tensor grid as is.
    """
    grid = grid if grid is not None else default_grid(model)
    if grid.dim != 1:
        rate, mass = _max_posterior_integral(model, grid)
        return rate / mass
    edges = [grid.lows[0], *_decision_boundaries(model, grid.lows[0], grid.highs[0]), grid.highs[0]]
    rate, mass = 0.0, 0.0
    for low, high in zip(edges[:-1], edges[1:]):
        if high <= low:
            continue
        piece_rate, piece_mass = _max_posterior_integral(model, QuadratureGrid.from_box(low, high, grid.nodes_per_dim))
        rate += piece_rate
        mass += piece_mass
    return rate / mass
