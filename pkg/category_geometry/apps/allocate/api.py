"""
Optimal F_code profiles under a resource constraint, and a brute-force oracle for them.
"""
import logging

import numpy as np
from scipy import optimize

from category_geometry.apps.allocate.constants import (
    BUDGET_XTOL,
    CLOSED_FORM,
    EXPANSION_FACTOR,
    GRID_MINIMIZE,
    INACTIVE_BRANCH,
    MAX_EXPANSIONS,
    MINIMIZE_FLOOR,
    MINIMIZE_SCAN_POINTS,
    MINIMIZE_XATOL,
    ROOT_SOLVE,
    TIE_TOLERANCE,
)
from category_geometry.apps.allocate.constraints import Entropic, GeneralConstraint, PowerLaw
from category_geometry.apps.allocate.exceptions import BudgetInfeasible, InvalidProblem
from category_geometry.apps.allocate.problems import Allocation
from category_geometry.apps.core.montecarlo import ordered_map


logger = logging.getLogger(__name__)


def _require(problem, kinds, operation):
    if not isinstance(problem.constraint, kinds):
        raise InvalidProblem('{} does not handle {} constraints'.format(operation, problem.constraint.kind))


def _targets(problem):
    """
    Right-hand side F_cat / (2 lambda r) of the stationarity condition on t = u / r, active nodes only.
    """
    active = problem.active
    return active, problem.fcat[active] / (2.0 * problem.lam * problem.scale[active])


def _closed_form(problem):
    allocation = Allocation.inactive(problem, CLOSED_FORM)
    active, targets = _targets(problem)
    allocation.fcode[active] = problem.scale[active] * problem.constraint.solve(targets)
    allocation.branch[active] = 0
    return allocation


def solve_power_law(problem):
    """
    F_code = (F_cat / (2 alpha lambda))^(1 / (1 + alpha)); zero where F_cat vanishes.
    """
    _require(problem, PowerLaw, 'solve_power_law')
    if problem.budget is not None:
        return solve_budget(problem, solve_power_law)
    return _closed_form(problem)


def solve_entropic(problem):
    """
    F_code = beta F_cat, with beta = 1 / (2 lambda) when a multiplier or budget overrides the constraint's beta.
    """
    _require(problem, Entropic, 'solve_entropic')
    if problem.budget is not None:
        return solve_budget(problem, solve_entropic)
    return _closed_form(problem)


def node_contribution(problem, index, ratio):
    """
    Objective of one node divided by its probability weight, at t = u / r.
    """
    scale = problem.scale[index]
    return problem.fcat[index] / (2.0 * scale * ratio) + problem.lam * float(problem.constraint.psi(ratio))


def _best_root(problem, index, target):
    best_ratio, best_branch, best_value = None, None, np.inf
    for ratio, branch in problem.constraint.stable_roots(target):
        value = node_contribution(problem, index, ratio)
        if value < best_value - TIE_TOLERANCE * abs(best_value if np.isfinite(best_value) else value):
            best_ratio, best_branch, best_value = ratio, branch, value
    return best_ratio, best_branch


def _jumps(problem, active, branches):
    """
    F_cat midpoints where the selected branch changes, in order of increasing stationarity target.
    """
    _, targets = _targets(problem)
    order = np.argsort(targets, kind='stable')
    fcat = problem.fcat[active][order]
    chosen = branches[order]
    changes = np.flatnonzero(chosen[1:] != chosen[:-1])
    return tuple(float(0.5 * (fcat[change] + fcat[change + 1])) for change in changes)


def solve_general(problem, threads=1):
    """
    Per-node root of u^2 Psi'(u) = F_cat / (2 lambda); among several stable roots the one with the
    smallest node contribution wins, ties going to the smaller u.
    """
    _require(problem, GeneralConstraint, 'solve_general')
    if problem.budget is not None:
        return solve_budget(problem, lambda candidate: solve_general(candidate, threads))

    allocation = Allocation.inactive(problem, ROOT_SOLVE)
    active, targets = _targets(problem)
    indices = np.flatnonzero(active)
    solutions = ordered_map(lambda job: _best_root(problem, *job), zip(indices, targets), threads)
    ratios = np.array([ratio for ratio, _ in solutions])
    branches = np.array([branch for _, branch in solutions], dtype=int)
    allocation.fcode[active] = problem.scale[active] * ratios
    allocation.branch[active] = branches
    jumps = _jumps(problem, active, branches)
    if jumps:
        logger.info('Optimal profile jumps between branches at F_cat = {}'.format(list(jumps)))
    return Allocation(allocation.fcode, allocation.branch, allocation.multiplier, ROOT_SOLVE, jumps)


SOLVERS = (
    (PowerLaw, solve_power_law),
    (Entropic, solve_entropic),
    (GeneralConstraint, solve_general),
)


def solver_for(constraint):
    for kind, solver in SOLVERS:
        if isinstance(constraint, kind):
            return solver
    raise InvalidProblem('No solver for constraint {!r}'.format(constraint))


def solve(problem, threads=1):
    solver = solver_for(problem.constraint)
    if solver is solve_general:
        return solve_general(problem, threads)
    return solver(problem)


def solve_budget(problem, solver=None):
    """
    Choose lambda so that sum w P Psi(F_code / r) equals the budget, by bracketing ln(lambda).
    """
    if problem.budget is None:
        raise InvalidProblem('solve_budget needs a budget')
    solver = solver or solver_for(problem.constraint)
    budget = float(problem.budget)

    def excess(log_multiplier):
        candidate = problem.with_multiplier(np.exp(log_multiplier))
        return candidate.resource(solver(candidate).fcode) - budget

    start = np.log(problem.multiplier) if problem.multiplier is not None else 0.0
    step = np.log(EXPANSION_FACTOR)
    low, high = start, start
    for _ in range(MAX_EXPANSIONS):
        if excess(low) >= 0:
            break
        low -= step
    else:
        raise BudgetInfeasible(budget)
    for _ in range(MAX_EXPANSIONS):
        if excess(high) <= 0:
            break
        high += step
    else:
        raise BudgetInfeasible(budget)

    log_multiplier = optimize.brentq(excess, low, high, xtol=BUDGET_XTOL) if low != high else low
    logger.debug('Budget {} met at lambda = {}'.format(budget, np.exp(log_multiplier)))
    return solver(problem.with_multiplier(np.exp(log_multiplier)))


def _minimize_node(problem, index):
    """
    Brute-force minimum over ln t of one node's contribution: a log-spaced scan whose upper end grows
    until the best sample is interior, then a bounded Brent refinement around it.
    """
    low, high = problem.constraint.domain
    bounded = np.isfinite(high)
    scale = problem.scale[index]
    floor = MINIMIZE_FLOOR / scale
    if problem.fcat[index] > 0:
        # the scan starts below the node's own scale F_cat / (2 lambda r), however small
        floor *= min(1.0, problem.fcat[index] / (2.0 * problem.lam * scale))
    low = max(low, floor, np.finfo(float).tiny)
    if not bounded:
        high = max(1.0, EXPANSION_FACTOR * low)

    def contribution(log_ratio):
        return node_contribution(problem, index, np.exp(log_ratio))

    for _ in range(MAX_EXPANSIONS):
        grid = np.linspace(np.log(low), np.log(high), MINIMIZE_SCAN_POINTS)
        values = np.array([contribution(point) for point in grid])
        best = int(np.argmin(values))
        if bounded or best < grid.size - 1:
            break
        high *= EXPANSION_FACTOR
    refined = optimize.minimize_scalar(
        contribution,
        bounds=(grid[max(best - 1, 0)], grid[min(best + 1, grid.size - 1)]),
        method='bounded',
        options={'xatol': MINIMIZE_XATOL},
    )
    log_ratio = refined.x if refined.fun <= values[best] else grid[best]
    return float(np.exp(log_ratio))


def grid_minimize(problem, threads=1):
    """
    Independent oracle: minimize every node's contribution directly over u.

    The scan for a node starts at 1e-8, or 1e-8 times F_cat / (2 lambda r) when that is smaller, so tiny optima
    stay reachable. Nodes with F_cat = 0 but positive mass go to 1e-8.
    """
    if problem.multiplier is None and problem.budget is not None:
        raise InvalidProblem('grid_minimize needs a multiplier')
    allocation = Allocation.inactive(problem, GRID_MINIMIZE)
    usable = (problem.mass > 0) & (problem.scale > 0)
    indices = np.flatnonzero(usable)
    ratios = ordered_map(lambda index: _minimize_node(problem, index), indices, threads)
    allocation.fcode[usable] = problem.scale[usable] * np.asarray(ratios)
    allocation.branch[usable] = 0
    return allocation


def objective(problem, fcode):
    """
    1/2 sum w P F_cat / F_code + lambda (sum w P Psi(F_code / r) - c) over the active nodes.
    """
    active = problem.active
    fcode = np.asarray(fcode, dtype=float)
    if np.any(fcode[active] <= 0):
        return np.inf
    mass = problem.mass[active]
    coding = 0.5 * np.dot(mass, problem.fcat[active] / fcode[active])
    budget = problem.budget if problem.budget is not None else 0.0
    return float(coding + problem.lam * (problem.resource(fcode) - budget))


def ib_cost(problem, fcode, beta):
    """
    Information-bottleneck cost 1/2 sum w P ln F_code + beta/2 sum w P F_cat / F_code; minimized by beta F_cat.
    """
    active = problem.active
    fcode = np.asarray(fcode, dtype=float)[active]
    mass = problem.mass[active]
    return float(0.5 * np.dot(mass, np.log(fcode)) + 0.5 * beta * np.dot(mass, problem.fcat[active] / fcode))


def coding_gap(problem, fcode):
    """
    The asymptotic coding cost 1/2 sum w P F_cat / F_code of a profile, over nodes with F_cat > 0.
    """
    active = problem.active
    return float(0.5 * np.dot(problem.mass[active], problem.fcat[active] / np.asarray(fcode, dtype=float)[active]))


def branch_summary(allocation):
    branches = allocation.branch[allocation.branch != INACTIVE_BRANCH]
    return {int(branch): int(np.count_nonzero(branches == branch)) for branch in np.unique(branches)}
