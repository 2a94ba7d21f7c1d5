"""
Resource constraints Psi(F_code) on the neural Fisher information.

The per-node optimum of F_cat / (2u) + lambda Psi(u) solves u^2 Psi'(u) = F_cat / (2 lambda);
every constraint exposes that curve as ``curve(u)``.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import optimize
from scipy.interpolate import PchipInterpolator

from category_geometry.apps.allocate.constants import (
    ENTROPIC,
    GENERAL,
    POWER_LAW,
    RESPONSE_CURVE,
    ROOT_RTOL,
    ROOT_XTOL,
    SCAN_POINTS,
    TABULATED,
)
from category_geometry.apps.allocate.exceptions import InvalidConstraint, NoRoot


@dataclass(frozen=True)
class PowerLaw:
    """
    Psi(u) = u ** alpha.
    """
    alpha: float
    kind = POWER_LAW
    domain = (0.0, np.inf)

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidConstraint('Power-law constraints need alpha > 0, got {}'.format(self.alpha))

    def psi(self, u):
        return np.power(u, self.alpha)

    def dpsi(self, u):
        return self.alpha * np.power(u, self.alpha - 1.0)

    def curve(self, u):
        return self.alpha * np.power(u, self.alpha + 1.0)

    def solve(self, target):
        return np.power(np.asarray(target, dtype=float) / self.alpha, 1.0 / (1.0 + self.alpha))

    def to_dict(self):
        return {'type': self.kind, 'alpha': self.alpha}


@dataclass(frozen=True)
class Entropic:
    """
    Psi(u) = ln u, the Gaussian-channel cost of the information bottleneck; its multiplier is 1 / (2 beta).
    """
    beta: float
    kind = ENTROPIC
    domain = (0.0, np.inf)

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidConstraint('Entropic constraints need beta > 0, got {}'.format(self.beta))

    @classmethod
    def from_noise(cls, beta0, sigma):
        """
        beta = beta0 / sigma^2: the trade-off rescales with the noise variance.
        """
        return cls(beta0 / sigma ** 2)

    @property
    def multiplier(self):
        return 1.0 / (2.0 * self.beta)

    def psi(self, u):
        return np.log(u)

    def dpsi(self, u):
        return 1.0 / np.asarray(u, dtype=float)

    def curve(self, u):
        return np.asarray(u, dtype=float)

    def solve(self, target):
        return np.asarray(target, dtype=float)

    def to_dict(self):
        return {'type': self.kind, 'beta': self.beta}


class GeneralConstraint:
    """
    Psi given by callables over a bounded domain [low, high], low > 0.

    ``curve`` may be non-monotone; each maximal increasing run of it is a branch of stable solutions.
    """
    kind = GENERAL

    def __init__(self, psi, dpsi, domain):
        low, high = (float(value) for value in domain)
        if not 0 < low < high < np.inf:
            raise InvalidConstraint('Constraint domain must satisfy 0 < low < high < inf, got {}'.format(domain))
        self._psi = psi
        self._dpsi = dpsi
        self.domain = (low, high)

    @classmethod
    def from_response_curve(cls, u_knots, g_knots):
        """
        Psi whose u^2 Psi'(u) is the piecewise-linear interpolant of (u_knots, g_knots), with Psi(u_knots[0]) = 0.
        """
        return ResponseCurveConstraint(u_knots, g_knots)

    def psi(self, u):
        return self._psi(np.asarray(u, dtype=float))

    def dpsi(self, u):
        return self._dpsi(np.asarray(u, dtype=float))

    def curve(self, u):
        u = np.asarray(u, dtype=float)
        return u ** 2 * self.dpsi(u)

    @cached_property
    def _scan(self):
        grid = np.geomspace(self.domain[0], self.domain[1], SCAN_POINTS)
        values = self.curve(grid)
        increasing = values[1:] > values[:-1]
        starts = increasing & ~np.concatenate([[False], increasing[:-1]])
        return grid, values, np.cumsum(starts) - 1

    @property
    def curve_range(self):
        _, values, _ = self._scan
        return float(values.min()), float(values.max())

    def stable_roots(self, target):
        """
        Roots of curve(u) = target where the curve crosses upward, as (u, branch id) pairs in increasing u.
        """
        grid, values, branches = self._scan
        residual = values - target
        roots = []
        for index in np.flatnonzero((residual[:-1] < 0) & (residual[1:] >= 0)):
            if residual[index + 1] == 0:
                root = grid[index + 1]
            else:
                root = optimize.brentq(
                    lambda u: float(self.curve(u)) - target, grid[index], grid[index + 1],
                    xtol=ROOT_XTOL, rtol=ROOT_RTOL,
                )
            roots.append((float(root), int(branches[index])))
        if not roots:
            raise NoRoot(target, *self.curve_range)
        return roots

    def to_dict(self):
        return {'type': self.kind, 'domain': list(self.domain)}


class ResponseCurveConstraint(GeneralConstraint):
    """
    Two or more stable branches from a piecewise-linear u^2 Psi'(u).
    """
    kind = RESPONSE_CURVE

    def __init__(self, u_knots, g_knots):
        u_knots = np.asarray(u_knots, dtype=float)
        g_knots = np.asarray(g_knots, dtype=float)
        if u_knots.ndim != 1 or u_knots.shape != g_knots.shape or u_knots.size < 2:
            raise InvalidConstraint('Response curves need matching 1-D knot arrays')
        if np.any(np.diff(u_knots) <= 0) or u_knots[0] <= 0:
            raise InvalidConstraint('Response-curve knots must be positive and strictly increasing')
        if np.any(g_knots <= 0):
            raise InvalidConstraint('u^2 Psi\'(u) must be positive for an increasing Psi')
        self.u_knots = u_knots
        self.g_knots = g_knots
        self._slopes = np.diff(g_knots) / np.diff(u_knots)
        self._intercepts = g_knots[:-1] - self._slopes * u_knots[:-1]
        # integral of (a + b s) / s^2 on each segment: -a/s + b ln s
        antiderivative_left = -self._intercepts / u_knots[:-1] + self._slopes * np.log(u_knots[:-1])
        antiderivative_right = -self._intercepts / u_knots[1:] + self._slopes * np.log(u_knots[1:])
        self._offsets = np.concatenate([[0.0], np.cumsum(antiderivative_right - antiderivative_left)])
        self._antiderivative_left = antiderivative_left
        super().__init__(self._response_psi, self._response_dpsi, (u_knots[0], u_knots[-1]))

    def _segments(self, u):
        return np.clip(np.searchsorted(self.u_knots, u, side='right') - 1, 0, self.u_knots.size - 2)

    def _response_psi(self, u):
        segment = self._segments(u)
        intercept = self._intercepts[segment]
        slope = self._slopes[segment]
        return self._offsets[segment] + (-intercept / u + slope * np.log(u)) - self._antiderivative_left[segment]

    def _response_dpsi(self, u):
        return np.interp(u, self.u_knots, self.g_knots) / u ** 2

    def to_dict(self):
        return {'type': self.kind, 'u': self.u_knots.tolist(), 'g': self.g_knots.tolist()}


class Tabulated(GeneralConstraint):
    """
    Psi sampled at knots and interpolated by a monotone cubic in ln u; Psi' is the interpolant's derivative.
    """
    kind = TABULATED

    def __init__(self, u_knots, psi_knots):
        u_knots = np.asarray(u_knots, dtype=float)
        psi_knots = np.asarray(psi_knots, dtype=float)
        if u_knots.ndim != 1 or u_knots.shape != psi_knots.shape or u_knots.size < 2:
            raise InvalidConstraint('Tabulated constraints need matching 1-D knot arrays')
        if u_knots[0] <= 0 or np.any(np.diff(u_knots) <= 0):
            raise InvalidConstraint('Tabulated knots must be positive and strictly increasing')
        if np.any(np.diff(psi_knots) < 0):
            raise InvalidConstraint('Tabulated Psi must be nondecreasing')
        self.u_knots = u_knots
        self.psi_knots = psi_knots
        self._log_knots = np.log(u_knots)
        self._interpolant = PchipInterpolator(self._log_knots, psi_knots)
        self._slope = self._interpolant.derivative()
        super().__init__(self._tabulated_psi, self._tabulated_dpsi, (u_knots[0], u_knots[-1]))

    def _log_u(self, u):
        return np.clip(np.log(u), self._log_knots[0], self._log_knots[-1])

    def _tabulated_psi(self, u):
        return self._interpolant(self._log_u(u))

    def _tabulated_dpsi(self, u):
        return self._slope(self._log_u(u)) / u

    def to_dict(self):
        return {'type': self.kind, 'u': self.u_knots.tolist(), 'psi': self.psi_knots.tolist()}


def constraint_from_dict(data):
    kind = data.get('type')
    try:
        if kind == POWER_LAW:
            return PowerLaw(float(data['alpha']))
        if kind == ENTROPIC:
            if 'beta0' in data:
                return Entropic.from_noise(float(data['beta0']), float(data['sigma']))
            return Entropic(float(data['beta']))
        if kind == TABULATED:
            return Tabulated(data['u'], data['psi'])
        if kind == RESPONSE_CURVE:
            return GeneralConstraint.from_response_curve(data['u'], data['g'])
    except KeyError as error:
        raise InvalidConstraint('Constraint {} is missing field {}'.format(kind, error))
    raise InvalidConstraint('Unknown constraint type {!r}'.format(kind))
