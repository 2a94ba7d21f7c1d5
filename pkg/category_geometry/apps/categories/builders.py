"""
Reference category models used by the scenarios and the tests.
"""
import numpy as np

from category_geometry.apps.categories.distributions import (
    CategoryModel,
    ExpGaussComponent,
    GaussianComponent,
)


THREE_GAUSSIAN_CENTERS = ((0.0, 1.5), (-1.3, -0.75), (1.3, -0.75))
THREE_GAUSSIAN_VARIANCE = 0.5

ELLIPTIC_COV_MINUS = ((0.2, 0.05), (0.05, 0.1))
HYPERBOLIC_COV_MINUS = ((0.4, 0.1), (0.1, 0.2))
HYPERBOLIC_COV_PLUS = ((0.2, 0.1), (0.1, 0.4))


def gauss_pair(cov_minus, cov_plus, c, priors=None):
    """
    Two Gaussians centred at -c ('-' class, index 0) and +c ('+' class, index 1).
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    return CategoryModel(
        [GaussianComponent(-c, cov_minus), GaussianComponent(c, cov_plus)],
        priors=priors,
    )


def diagonal_pair(a, sigma, c):
    """
    Sigma_- = sigma^2 I and Sigma_+ = a^2 sigma^2 I, so a > 1 makes the '+' category the wider one.
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    identity = np.eye(c.size)
    return gauss_pair(sigma ** 2 * identity, (a * sigma) ** 2 * identity, c)


def gauss_pair_1d(a, sigma, c=1.0):
    return diagonal_pair(a, sigma, [c])


def equal_covariance_pair(cov, c):
    return gauss_pair(cov, cov, c)


def elliptic_pair(c=(1.0, 0.0)):
    cov_minus = np.asarray(ELLIPTIC_COV_MINUS)
    return gauss_pair(cov_minus, 10.0 * cov_minus, c)


def hyperbolic_pair(c=(1.0, 0.0)):
    return gauss_pair(HYPERBOLIC_COV_MINUS, HYPERBOLIC_COV_PLUS, c)


def expgauss_pair(tau_minus=0.2, tau_plus=0.5, sigma2_minus=0.1, sigma2_plus=0.4):
    """
    Exponential decrease away from the two ends of x1 in [-1, 1], Gaussian along x2.
    """
    return CategoryModel([
        ExpGaussComponent(-1.0, tau_minus, sigma2_minus),
        ExpGaussComponent(1.0, tau_plus, sigma2_plus),
    ])


def three_gaussians(variance=THREE_GAUSSIAN_VARIANCE, centers=THREE_GAUSSIAN_CENTERS):
    cov = variance * np.eye(2)
    return CategoryModel([GaussianComponent(center, cov) for center in centers])


def triple_point(model):
    """
    Point of equal posteriors of a three-class isotropic model (the centroid of the centres).
    """
    return np.mean([component.mean for component in model.components], axis=0)
