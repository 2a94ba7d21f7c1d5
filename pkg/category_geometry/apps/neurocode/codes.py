"""
Population codes: tuning curves plus a noise specification.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.special import expit

from category_geometry.apps.neurocode.constants import (
    ADDITIVE_FAMILIES,
    CORRELATION_TOLERANCE,
    CURVE_FAMILIES,
    FISHER_EXACT,
    FISHER_MODES,
    GAUSSIAN_CORRELATED,
    GAUSSIAN_IID,
    LINK_CONSTANT,
    LINK_RATE,
    LINK_SQUARED,
    MULTIPLICATIVE,
    NOISE_FAMILIES,
    POISSON,
    Q_GAUSSIAN,
    RADIAL_BUMP,
    RATE_FLOOR,
    SIGMOID_RAMP,
    VARIANCE_LINKS,
)
from category_geometry.apps.neurocode.densities import NoiseDensity
from category_geometry.apps.neurocode.exceptions import InvalidCode, InvalidNoise


def variance_link(link, rates):
    """
    g(f) and g'(f) for a variance link.
    """
    rates = np.asarray(rates, dtype=float)
    if link == LINK_RATE:
        return rates, np.ones_like(rates)
    if link == LINK_SQUARED:
        return rates ** 2, 2.0 * rates
    if link == LINK_CONSTANT:
        return np.ones_like(rates), np.zeros_like(rates)
    raise InvalidNoise('Unknown variance link {}; expected one of {}'.format(link, VARIANCE_LINKS))


def noise_variance(link, rates):
    """
    g(max(f, RATE_FLOOR)), the variance factor of multiplicative noise wherever it is sampled or scored.
    """
    g, _ = variance_link(link, np.maximum(rates, RATE_FLOOR))
    return g


def multiplicative_weights(rates, sigma, link, mode=FISHER_EXACT):
    """
    Per-unit Fisher weights w_i with F = sum_i w_i grad f_i grad f_i^T for r_i = f_i + sigma sqrt(g(f_i)) z_i.

    The exact weight is 1/(sigma^2 g) + g'^2/(2 g^2); the leading one keeps 1/(sigma^2 g) only.
    """
    g, dg = variance_link(link, rates)
    weights = 1.0 / (sigma ** 2 * g)
    if mode == FISHER_EXACT:
        weights = weights + dg ** 2 / (2.0 * g ** 2)
    return weights


@dataclass(frozen=True, eq=False)
class NoiseSpec:
    """
    How responses scatter around the tuning curves.

    ``sigma`` scales additive and multiplicative noise, ``t`` is the Poisson counting window,
    ``correlation`` the unit-diagonal correlation matrix of correlated additive noise.
    """
    family: str = GAUSSIAN_IID
    sigma: float = 1.0
    correlation: Optional[np.ndarray] = None
    density: str = Q_GAUSSIAN
    nu: Optional[float] = None
    link: str = LINK_RATE
    t: float = 1.0
    fisher_mode: str = FISHER_EXACT
    noise_density: NoiseDensity = field(init=False, repr=False, compare=False)
    correlation_cholesky: Optional[np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in NOISE_FAMILIES:
            raise InvalidNoise('Unknown noise family {}; expected one of {}'.format(self.family, NOISE_FAMILIES))
        if self.family == POISSON:
            if not self.t > 0:
                raise InvalidNoise('Poisson noise needs t > 0, got {}'.format(self.t))
        elif not self.sigma > 0:
            raise InvalidNoise('Noise needs sigma > 0, got {}'.format(self.sigma))
        if self.fisher_mode not in FISHER_MODES:
            raise InvalidNoise('Unknown Fisher mode {}'.format(self.fisher_mode))
        if self.family == MULTIPLICATIVE:
            variance_link(self.link, 1.0)
            if self.density != Q_GAUSSIAN:
                raise InvalidNoise('Multiplicative noise is Gaussian; got density {}'.format(self.density))
        object.__setattr__(self, 'noise_density', NoiseDensity(self.density, self.nu))

        cholesky = None
        if self.family == GAUSSIAN_CORRELATED:
            if self.correlation is None:
                raise InvalidNoise('Correlated noise needs a correlation matrix')
            correlation = np.atleast_2d(np.asarray(self.correlation, dtype=float))
            if correlation.shape[0] != correlation.shape[1]:
                raise InvalidNoise('Correlation matrix must be square, got {}'.format(correlation.shape))
            if np.max(np.abs(correlation - correlation.T)) > CORRELATION_TOLERANCE:
                raise InvalidNoise('Correlation matrix is not symmetric')
            if np.max(np.abs(np.diag(correlation) - 1.0)) > CORRELATION_TOLERANCE:
                raise InvalidNoise('Correlation matrix must have a unit diagonal')
            try:
                cholesky = linalg.cholesky(correlation, lower=True)
            except linalg.LinAlgError:
                raise InvalidNoise('Correlation matrix is not positive definite')
            correlation.setflags(write=False)
            object.__setattr__(self, 'correlation', correlation)
        elif self.correlation is not None:
            raise InvalidNoise('Only {} noise takes a correlation matrix'.format(GAUSSIAN_CORRELATED))
        object.__setattr__(self, 'correlation_cholesky', cholesky)

    @property
    def is_additive(self):
        return self.family in ADDITIVE_FAMILIES

    def to_dict(self):
        data = {'family': self.family}
        if self.family == POISSON:
            data['t'] = self.t
            return data
        data['sigma'] = self.sigma
        data.update(self.noise_density.to_dict())
        if self.family == GAUSSIAN_CORRELATED:
            data['correlation'] = self.correlation.tolist()
        if self.family == MULTIPLICATIVE:
            data['link'] = self.link
            data['fisher_mode'] = self.fisher_mode
        return data


class PopulationCode:
    """
    N tuning-curve units over a K-dimensional stimulus space.

    radial bump:  f_i(x) = R_i exp(-|x - c_i|^2 / (2 a_i^2))
    sigmoid ramp: f_i(x) = R_i expit(d_i . (x - c_i) / a_i), d_i a unit direction
    """

    def __init__(self, centers, widths, max_rates, families, noise, directions=None):
        centers = np.asarray(centers, dtype=float)
        if centers.ndim == 1:
            centers = centers[:, None]
        n_units, dim = centers.shape
        if n_units < 1:
            raise InvalidCode('A population code needs at least one unit')
        widths = np.broadcast_to(np.asarray(widths, dtype=float), (n_units,)).copy()
        max_rates = np.broadcast_to(np.asarray(max_rates, dtype=float), (n_units,)).copy()
        if isinstance(families, str):
            families = [families] * n_units
        families = np.asarray(families)
        if families.shape != (n_units,):
            raise InvalidCode('Got {} curve families for {} units'.format(families.size, n_units))
        unknown = set(families.tolist()) - set(CURVE_FAMILIES)
        if unknown:
            raise InvalidCode('Unknown curve families {}'.format(sorted(unknown)))
        if np.any(widths <= 0) or np.any(max_rates <= 0):
            raise InvalidCode('Tuning widths and max rates must be strictly positive')

        if directions is None:
            directions = np.zeros((n_units, dim))
            directions[:, 0] = 1.0
        directions = np.asarray(directions, dtype=float).reshape(n_units, dim)
        norms = np.linalg.norm(directions, axis=1)
        if np.any(norms == 0):
            raise InvalidCode('Sigmoid directions must be nonzero')
        directions = directions / norms[:, None]

        if noise.family == GAUSSIAN_CORRELATED and noise.correlation.shape[0] != n_units:
            raise InvalidNoise('Correlation matrix is {}x{} for {} units'.format(
                noise.correlation.shape[0], noise.correlation.shape[0], n_units,
            ))

        self.centers = centers
        self.widths = widths
        self.max_rates = max_rates
        self.families = families
        self.directions = directions
        self.noise = noise
        self._radial = families == RADIAL_BUMP
        self._sigmoid = families == SIGMOID_RAMP
        for array in (self.centers, self.widths, self.max_rates, self.directions):
            array.setflags(write=False)

    @property
    def n_units(self):
        return self.centers.shape[0]

    @property
    def dim(self):
        return self.centers.shape[1]

    def rates(self, points):
        """
        Mean responses, shape (n, N).
        """
        offsets = points[:, None, :] - self.centers[None, :, :]
        rates = np.empty((points.shape[0], self.n_units))
        if self._radial.any():
            squared = np.sum(offsets[:, self._radial] ** 2, axis=-1)
            rates[:, self._radial] = self.max_rates[self._radial] * np.exp(
                -squared / (2.0 * self.widths[self._radial] ** 2)
            )
        if self._sigmoid.any():
            rates[:, self._sigmoid] = self.max_rates[self._sigmoid] * expit(self._ramp_argument(offsets))
        return rates

    def _ramp_argument(self, offsets):
        projected = np.einsum('nik,ik->ni', offsets[:, self._sigmoid], self.directions[self._sigmoid])
        return projected / self.widths[self._sigmoid]

    def jacobian(self, point):
        """
        df_i/dx_j at a single point, shape (N, K).
        """
        offsets = point[None, :] - self.centers
        jacobian = np.empty((self.n_units, self.dim))
        if self._radial.any():
            widths = self.widths[self._radial]
            rates = self.max_rates[self._radial] * np.exp(
                -np.sum(offsets[self._radial] ** 2, axis=1) / (2.0 * widths ** 2)
            )
            jacobian[self._radial] = -(rates / widths ** 2)[:, None] * offsets[self._radial]
        if self._sigmoid.any():
            activation = expit(self._ramp_argument(offsets[None])[0])
            slope = self.max_rates[self._sigmoid] * activation * (1.0 - activation) / self.widths[self._sigmoid]
            jacobian[self._sigmoid] = slope[:, None] * self.directions[self._sigmoid]
        return jacobian

    def with_noise(self, noise):
        return PopulationCode(self.centers, self.widths, self.max_rates, self.families, noise, self.directions)

    def to_dict(self):
        units = []
        for index in range(self.n_units):
            unit = {
                'center': self.centers[index].tolist(),
                'width': float(self.widths[index]),
                'max_rate': float(self.max_rates[index]),
                'family': str(self.families[index]),
            }
            if self.families[index] == SIGMOID_RAMP:
                unit['direction'] = self.directions[index].tolist()
            units.append(unit)
        return {'units': units, 'noise': self.noise.to_dict()}

    def __repr__(self):
        return 'PopulationCode(n_units={}, dim={}, noise={})'.format(self.n_units, self.dim, self.noise.family)
