"""
Unit-variance noise densities Q and their Fisher information F_Q.
"""
import logging

import numpy as np
from scipy import integrate, stats

from category_geometry.apps.neurocode.constants import (
    DEFAULT_STUDENT_T_DOF,
    DENSITIES,
    MOMENT_TOLERANCE,
    Q_GAUSSIAN,
    Q_LAPLACE,
    Q_STUDENT_T,
    Q_UNIFORM,
    QUADRATURE_LIMIT,
    QUADRATURE_TRUNCATION,
)
from category_geometry.apps.neurocode.exceptions import InvalidNoise, NonSmoothDensity


logger = logging.getLogger(__name__)

LAPLACE_SCALE = 1.0 / np.sqrt(2.0)
UNIFORM_HALF_WIDTH = np.sqrt(3.0)


class NoiseDensity:
    """
    A zero-mean, unit-variance density on the real line.

    ``score`` is d/dz ln Q(z); ``fisher`` is F_Q = E[score^2].
    """

    def __init__(self, tag=Q_GAUSSIAN, nu=None):
        if tag not in DENSITIES:
            raise InvalidNoise('Unknown noise density {}; expected one of {}'.format(tag, DENSITIES))
        if tag == Q_STUDENT_T:
            nu = DEFAULT_STUDENT_T_DOF if nu is None else float(nu)
            if nu <= 2:
                raise InvalidNoise('Student-t noise needs nu > 2 for a finite variance, got {}'.format(nu))
        self.tag = tag
        self.nu = nu
        if tag == Q_STUDENT_T:
            self._t_scale = np.sqrt((nu - 2.0) / nu)
            self._frozen = stats.t(nu, scale=self._t_scale)
        elif tag == Q_LAPLACE:
            self._frozen = stats.laplace(scale=LAPLACE_SCALE)
        elif tag == Q_UNIFORM:
            self._frozen = stats.uniform(loc=-UNIFORM_HALF_WIDTH, scale=2 * UNIFORM_HALF_WIDTH)
        else:
            self._frozen = stats.norm()

    @property
    def is_gaussian(self):
        return self.tag == Q_GAUSSIAN

    def logpdf(self, z):
        return self._frozen.logpdf(z)

    def pdf(self, z):
        return self._frozen.pdf(z)

    def score(self, z):
        z = np.asarray(z, dtype=float)
        if self.tag == Q_GAUSSIAN:
            return -z
        if self.tag == Q_LAPLACE:
            return -np.sign(z) / LAPLACE_SCALE
        if self.tag == Q_STUDENT_T:
            return -(self.nu + 1.0) * z / (self.nu * self._t_scale ** 2 + z ** 2)
        raise NonSmoothDensity(self.tag)

    def sample(self, rng, size):
        if self.tag == Q_GAUSSIAN:
            return rng.standard_normal(size)
        if self.tag == Q_LAPLACE:
            return rng.laplace(0.0, LAPLACE_SCALE, size)
        if self.tag == Q_STUDENT_T:
            return self._t_scale * rng.standard_t(self.nu, size)
        return rng.uniform(-UNIFORM_HALF_WIDTH, UNIFORM_HALF_WIDTH, size)

    def entropy(self):
        return float(self._frozen.entropy())

    def moments(self):
        """
        Total mass, mean and variance by quadrature over the whole line.
        """
        points = [0.0] if self.tag == Q_LAPLACE else None
        if self.tag == Q_UNIFORM:
            low, high = -UNIFORM_HALF_WIDTH, UNIFORM_HALF_WIDTH
            mass = integrate.quad(self.pdf, low, high)[0]
            mean = integrate.quad(lambda z: z * self.pdf(z), low, high)[0]
            second = integrate.quad(lambda z: z * z * self.pdf(z), low, high)[0]
        else:
            mass = _quad_line(self.pdf, points)
            mean = _quad_line(lambda z: z * self.pdf(z), points)
            second = _quad_line(lambda z: z * z * self.pdf(z), points)
        return mass, mean, second - mean ** 2

    def check_moments(self):
        mass, mean, variance = self.moments()
        for name, value, target in (('mass', mass, 1.0), ('mean', mean, 0.0), ('variance', variance, 1.0)):
            if abs(value - target) > MOMENT_TOLERANCE:
                raise InvalidNoise('Noise density {} has {} {:.9f}, expected {}'.format(self.tag, name, value, target))
        return True

    def fisher(self):
        """
        F_Q = integral of score^2 Q over |z| <= QUADRATURE_TRUNCATION; exactly 1 for the Gaussian.
        """
        if self.tag == Q_GAUSSIAN:
            return 1.0
        if self.tag == Q_UNIFORM:
            raise NonSmoothDensity(self.tag)
        points = [0.0] if self.tag == Q_LAPLACE else None
        value, error = integrate.quad(
            lambda z: self.score(z) ** 2 * self.pdf(z),
            -QUADRATURE_TRUNCATION, QUADRATURE_TRUNCATION,
            points=points, limit=QUADRATURE_LIMIT, epsabs=1e-12, epsrel=1e-10,
        )
        logger.debug('F_Q of {} = {} (quadrature error {:.1e})'.format(self.tag, value, error))
        return float(value)

    def to_dict(self):
        data = {'density': self.tag}
        if self.tag == Q_STUDENT_T:
            data['nu'] = self.nu
        return data

    def __repr__(self):
        return 'NoiseDensity({}{})'.format(self.tag, '' if self.nu is None else ', nu={}'.format(self.nu))


def _quad_line(func, points=None):
    if points:
        left = integrate.quad(func, -np.inf, 0.0, limit=QUADRATURE_LIMIT)[0]
        right = integrate.quad(func, 0.0, np.inf, limit=QUADRATURE_LIMIT)[0]
        return left + right
    return integrate.quad(func, -np.inf, np.inf, limit=QUADRATURE_LIMIT)[0]
