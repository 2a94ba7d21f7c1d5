"""
Allocation problems on a 1-D stimulus grid and their solutions.
"""
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd

from category_geometry.apps.allocate.constants import INACTIVE_BRANCH, MASS_TOLERANCE
from category_geometry.apps.allocate.constraints import Entropic
from category_geometry.apps.allocate.exceptions import InvalidProblem
from category_geometry.apps.catfisher import api as catfisher_api
from category_geometry.apps.infomeasure.grids import default_grid


def _vector(values, name):
    array = np.asarray(values, dtype=float)
    if array.ndim != 1:
        raise InvalidProblem('{} must be one value per node, got shape {}'.format(name, array.shape))
    return array


@dataclass(frozen=True, eq=False)
class AllocationProblem:
    """
    Minimize 1/2 sum_g w_g P_g F_cat_g / u_g + lambda (sum_g w_g P_g Psi(u_g / r_g) - c) over the profile u.

    ``reference`` r defaults to 1; setting it to F_cat makes the constraint act on the ratio F_code / F_cat.
    Either ``multiplier`` (lambda) or ``budget`` (c) fixes the trade-off; an entropic constraint carries
    its own multiplier 1 / (2 beta).
    """
    nodes: np.ndarray
    weights: np.ndarray
    p: np.ndarray
    fcat: np.ndarray
    constraint: object
    multiplier: Optional[float] = None
    budget: Optional[float] = None
    reference: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        nodes = _vector(self.nodes, 'nodes')
        arrays = {
            'weights': _vector(self.weights, 'weights'),
            'p': _vector(self.p, 'p'),
            'fcat': _vector(self.fcat, 'fcat'),
        }
        if self.reference is not None:
            arrays['reference'] = _vector(self.reference, 'reference')
        for name, array in arrays.items():
            if array.shape != nodes.shape:
                raise InvalidProblem('{} has {} values for {} nodes'.format(name, array.size, nodes.size))
            if np.any(array < 0) or not np.all(np.isfinite(array)):
                raise InvalidProblem('{} must be finite and nonnegative'.format(name))
        mass = float(np.sum(arrays['weights'] * arrays['p']))
        if abs(mass - 1.0) > MASS_TOLERANCE:
            raise InvalidProblem('Probability weights sum to {:.6g}, expected 1'.format(mass))
        if self.multiplier is not None and not self.multiplier > 0:
            raise InvalidProblem('The multiplier must be positive, got {}'.format(self.multiplier))
        if self.multiplier is None and self.budget is None and not isinstance(self.constraint, Entropic):
            raise InvalidProblem('Give either a multiplier or a budget')

        object.__setattr__(self, 'nodes', nodes)
        for name, array in arrays.items():
            object.__setattr__(self, name, array)

    @classmethod
    def from_model(cls, model, constraint, multiplier=None, budget=None, nodes_per_dim=None, ratio=False):
        """
        Problem on the default quadrature grid of a 1-D category model.
        """
        if model.dim != 1:
            raise InvalidProblem('Allocation is defined for 1-D stimuli, got dimension {}'.format(model.dim))
        grid = default_grid(model, nodes_per_dim)
        fcat = catfisher_api.fisher_cat_field(model, grid.nodes)[:, 0, 0]
        return cls(
            nodes=grid.nodes[:, 0],
            weights=grid.weights,
            p=model.density(grid.nodes),
            fcat=fcat,
            constraint=constraint,
            multiplier=multiplier,
            budget=budget,
            reference=fcat if ratio else None,
        )

    @property
    def lam(self):
        if self.multiplier is not None:
            return float(self.multiplier)
        if isinstance(self.constraint, Entropic):
            return self.constraint.multiplier
        raise InvalidProblem('The problem has a budget but no multiplier yet')

    @property
    def mass(self):
        return self.weights * self.p

    @property
    def scale(self):
        return np.ones_like(self.fcat) if self.reference is None else self.reference

    @property
    def active(self):
        """
        Nodes entering the objective: F_cat > 0, positive probability mass and a positive reference.
        """
        return (self.fcat > 0) & (self.mass > 0) & (self.scale > 0)

    def with_multiplier(self, multiplier):
        return replace(self, multiplier=float(multiplier), budget=None)

    def resource(self, fcode):
        """
        sum_g w_g P_g Psi(u_g / r_g) over the active nodes.
        """
        active = self.active
        ratios = np.asarray(fcode, dtype=float)[active] / self.scale[active]
        return float(np.dot(self.mass[active], self.constraint.psi(ratios)))


@dataclass(frozen=True, eq=False)
class Allocation:
    """
    An F_code profile with the branch of each node (-1 where the node is inactive).
    """
    fcode: np.ndarray
    branch: np.ndarray
    multiplier: float
    method: str
    jumps: tuple = field(default=())

    @classmethod
    def inactive(cls, problem, method):
        return cls(
            fcode=np.zeros_like(problem.fcat),
            branch=np.full(problem.fcat.shape, INACTIVE_BRANCH),
            multiplier=problem.lam,
            method=method,
        )

    def to_frame(self, problem):
        return pd.DataFrame({
            'x': problem.nodes,
            'p': problem.p,
            'fcat': problem.fcat,
            'fcode': self.fcode,
            'branch_id': self.branch,
        })

    def to_dict(self):
        return {
            'multiplier': self.multiplier,
            'method': self.method,
            'jumps': list(self.jumps),
            'n_branches': int(np.unique(self.branch[self.branch != INACTIVE_BRANCH]).size),
        }
