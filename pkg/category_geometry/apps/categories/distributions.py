"""
Class-conditional densities and the category models built from them.
"""
import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from category_geometry.apps.categories.constants import (
    COVARIANCE_SYMMETRY_TOLERANCE,
    EXP_GAUSS,
    EXP_GAUSS_DOMAIN,
    GAUSSIAN,
    PRIOR_SUM_TOLERANCE,
)
from category_geometry.apps.categories.exceptions import AllDensitiesZero, InvalidModel


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


class GaussianComponent:
    """
    Multivariate normal density N(mean, cov).
    """
    kind = GAUSSIAN

    def __init__(self, mean, cov):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise InvalidModel('Gaussian mean of shape {} does not match cov of shape {}'.format(
                mean.shape, cov.shape,
            ))
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > COVARIANCE_SYMMETRY_TOLERANCE * scale:
            raise InvalidModel('Gaussian covariance is not symmetric: {}'.format(cov.tolist()))
        if np.min(np.linalg.eigvalsh(cov)) <= 0:
            raise InvalidModel('Gaussian covariance is not positive definite: {}'.format(cov.tolist()))

        self.mean = _frozen(mean)
        self.cov = _frozen(cov)
        self._chol = _frozen(linalg.cholesky(cov, lower=True))
        self.precision = _frozen(linalg.cho_solve((self._chol, True), np.eye(mean.size)))
        log_det = 2.0 * np.sum(np.log(np.diag(self._chol)))
        self._log_norm = -0.5 * (mean.size * np.log(2 * np.pi) + log_det)

    @property
    def dim(self):
        return self.mean.size

    def logpdf(self, points):
        diff = np.atleast_2d(points) - self.mean
        whitened = linalg.solve_triangular(self._chol, diff.T, lower=True)
        return self._log_norm - 0.5 * np.sum(whitened ** 2, axis=0)

    def grad_logpdf(self, points):
        return -(np.atleast_2d(points) - self.mean) @ self.precision

    def hessian_logpdf(self):
        return -self.precision

    def sample(self, rng, n):
        return self.mean + rng.standard_normal((n, self.dim)) @ self._chol.T

    def transformed(self, matrix):
        """
        Image of the density under the invertible linear map z = matrix @ x.
        """
        return GaussianComponent(matrix @ self.mean, matrix @ self.cov @ matrix.T)

    def to_dict(self):
        return {'type': self.kind, 'mean': self.mean.tolist(), 'cov': self.cov.tolist()}

    def __repr__(self):
        return 'GaussianComponent(mean={}, cov={})'.format(self.mean.tolist(), self.cov.tolist())


class ExpGaussComponent:
    """
    Two-dimensional density: x1 on a bounded interval with density proportional to exp(-|x1 - c1| / tau),
    x2 an independent centred Gaussian with variance sigma2_sq.
    """
    kind = EXP_GAUSS

    def __init__(self, c1, tau, sigma2_sq, domain=EXP_GAUSS_DOMAIN):
        low, high = (float(bound) for bound in domain)
        if tau <= 0 or sigma2_sq <= 0:
            raise InvalidModel('ExpGauss needs tau > 0 and sigma2_sq > 0, got tau={} sigma2_sq={}'.format(
                tau, sigma2_sq,
            ))
        if not low < high or not low <= c1 <= high:
            raise InvalidModel('ExpGauss center {} must lie in the domain [{}, {}]'.format(c1, low, high))
        self.c1 = float(c1)
        self.tau = float(tau)
        self.sigma2_sq = float(sigma2_sq)
        self.domain = (low, high)
        # mass on each side of the center
        self._left_mass = self.tau * (1.0 - np.exp(-(self.c1 - low) / self.tau))
        self._right_mass = self.tau * (1.0 - np.exp(-(high - self.c1) / self.tau))
        self._log_norm_x1 = np.log(self._left_mass + self._right_mass)
        self._log_norm_x2 = -0.5 * np.log(2 * np.pi * self.sigma2_sq)

    @property
    def dim(self):
        return 2

    @property
    def kinks(self):
        """
        Coordinates (axis, value) where the density is not differentiable.
        """
        return ((0, self.c1),)

    def x1_pdf(self, x1):
        x1 = np.asarray(x1, dtype=float)
        low, high = self.domain
        inside = (x1 >= low) & (x1 <= high)
        return np.where(inside, np.exp(-np.abs(x1 - self.c1) / self.tau - self._log_norm_x1), 0.0)

    def logpdf(self, points):
        points = np.atleast_2d(points)
        x1, x2 = points[:, 0], points[:, 1]
        low, high = self.domain
        inside = (x1 >= low) & (x1 <= high)
        log_x1 = -np.abs(x1 - self.c1) / self.tau - self._log_norm_x1
        log_x2 = self._log_norm_x2 - 0.5 * x2 ** 2 / self.sigma2_sq
        return np.where(inside, log_x1 + log_x2, -np.inf)

    def sample(self, rng, n):
        low, _ = self.domain
        total = self._left_mass + self._right_mass
        mass = rng.random(n) * total
        left = mass < self._left_mass
        x1 = np.empty(n)
        x1[left] = self.c1 + self.tau * np.log(mass[left] / self.tau + np.exp((low - self.c1) / self.tau))
        remaining = mass[~left] - self._left_mass
        x1[~left] = self.c1 - self.tau * np.log1p(-remaining / self.tau)
        x2 = rng.standard_normal(n) * np.sqrt(self.sigma2_sq)
        return np.column_stack([x1, x2])

    def to_dict(self):
        return {
            'type': self.kind,
            'c1': self.c1,
            'tau': self.tau,
            'sigma2_sq': self.sigma2_sq,
            'domain': list(self.domain),
        }

    def __repr__(self):
        return 'ExpGaussComponent(c1={}, tau={}, sigma2_sq={})'.format(self.c1, self.tau, self.sigma2_sq)


class CategoryModel:
    """
    M class priors plus one density per class over a K-dimensional feature space.

    Densities are combined in the log domain, so posteriors stay finite far from every mean.
    """

    def __init__(self, components, priors=None):
        components = tuple(components)
        if not components:
            raise InvalidModel('A category model needs at least one component')
        dims = {component.dim for component in components}
        if len(dims) != 1:
            raise InvalidModel('Components disagree on the feature dimension: {}'.format(sorted(dims)))

        if priors is None:
            priors = np.full(len(components), 1.0 / len(components))
        priors = np.asarray(priors, dtype=float)
        if priors.shape != (len(components),):
            raise InvalidModel('Got {} priors for {} components'.format(priors.size, len(components)))
        if np.any(priors < 0) or abs(priors.sum() - 1.0) > PRIOR_SUM_TOLERANCE:
            raise InvalidModel('Priors must be nonnegative and sum to 1, got {}'.format(priors.tolist()))

        self.components = components
        self.priors = _frozen(priors)
        with np.errstate(divide='ignore'):
            self.log_priors = _frozen(np.log(priors))

    @property
    def dim(self):
        return self.components[0].dim

    @property
    def n_classes(self):
        return len(self.components)

    @property
    def is_gaussian(self):
        return all(component.kind == GAUSSIAN for component in self.components)

    def log_joint(self, points):
        """
        ln P_y + ln P(x|y), shape (n, M).
        """
        points = np.atleast_2d(points)
        columns = [component.logpdf(points) for component in self.components]
        return np.column_stack(columns) + self.log_priors

    def log_density(self, points):
        return logsumexp(self.log_joint(points), axis=1)

    def density(self, points):
        return np.exp(self.log_density(points))

    def log_posterior(self, points):
        log_joint = self.log_joint(points)
        normalizer = logsumexp(log_joint, axis=1, keepdims=True)
        empty = ~np.isfinite(normalizer[:, 0])
        if np.any(empty):
            raise AllDensitiesZero(np.atleast_2d(points)[np.argmax(empty)].tolist())
        return log_joint - normalizer

    def transformed(self, matrix):
        """
        The model seen in coordinates z = matrix @ x (Gaussian models only).
        """
        if not self.is_gaussian:
            raise InvalidModel('Only Gaussian models can be linearly reparameterized')
        matrix = np.asarray(matrix, dtype=float)
        return CategoryModel([component.transformed(matrix) for component in self.components], self.priors)

    def marginal(self, axes):
        """
        The model of the feature coordinates ``axes`` alone (Gaussian models only).
        """
        axes = [int(axis) for axis in axes]
        if not axes or any(not 0 <= axis < self.dim for axis in axes):
            raise InvalidModel('Marginal axes {} are not feature axes of a {}-D model'.format(axes, self.dim))
        return self.transformed(np.eye(self.dim)[axes])

    def to_dict(self):
        return {
            'dim': self.dim,
            'priors': self.priors.tolist(),
            'components': [component.to_dict() for component in self.components],
        }

    def __repr__(self):
        return 'CategoryModel(priors={}, components={})'.format(self.priors.tolist(), list(self.components))
