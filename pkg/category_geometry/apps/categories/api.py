"""
Posteriors, log-odds fields and samplers of category models.

Every function accepts either a single point (shape (K,)) or a batch (shape (n, K)) and returns
results of the matching rank.
"""
import logging
from dataclasses import dataclass

import numpy as np

from category_geometry.apps.categories.constants import (
    FD_GRADIENT_STEP,
    FD_HESSIAN_STEP,
    KINK_FLAG_STEPS,
    MINUS,
    PLUS,
)
from category_geometry.apps.categories.exceptions import DimMismatch, NotBinary
from category_geometry.apps.core.constants import FLAG_NON_DIFFERENTIABLE
from category_geometry.apps.core.utils import as_points


logger = logging.getLogger(__name__)


def _points(model, x):
    try:
        return as_points(x, model.dim)
    except ValueError:
        raise DimMismatch(model.dim, np.shape(x))


def _require_binary(model):
    if model.n_classes != 2:
        raise NotBinary(model.n_classes)


def _unwrap(values, single):
    return values[0] if single else values


def _steps(points, base):
    return base * (1.0 + np.abs(points))


def _central_gradient(func, points):
    """
    Central differences of a vectorized ``func`` (n, K) -> (n, ...) along every coordinate.
    Returns shape (n, ..., K).
    """
    steps = _steps(points, FD_GRADIENT_STEP)
    columns = []
    for axis in range(points.shape[1]):
        shift = np.zeros_like(points)
        shift[:, axis] = steps[:, axis]
        delta = func(points + shift) - func(points - shift)
        scale = 2.0 * steps[:, axis]
        columns.append(delta / scale.reshape((-1,) + (1,) * (delta.ndim - 1)))
    return np.stack(columns, axis=-1)


def _log_odds_values(model, points):
    log_joint = model.log_joint(points)
    return log_joint[:, PLUS] - log_joint[:, MINUS]


@dataclass(frozen=True)
class LabelledSample:
    features: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return self.labels.size

    def __iter__(self):
        return iter(zip(self.features, self.labels))


def posterior(model, x):
    """
    P(y|x) for every class, normalized in the log domain.
    """
    points, single = _points(model, x)
    return _unwrap(np.exp(model.log_posterior(points)), single)


def log_posterior(model, x):
    points, single = _points(model, x)
    return _unwrap(model.log_posterior(points), single)


def log_odds(model, x):
    """
    L(x) = ln P(+|x) - ln P(-|x) for a binary model.
    """
    _require_binary(model)
    points, single = _points(model, x)
    return _unwrap(_log_odds_values(model, points), single)


def grad_log_odds(model, x):
    _require_binary(model)
    points, single = _points(model, x)
    if model.is_gaussian:
        minus, plus = model.components[MINUS], model.components[PLUS]
        gradient = plus.grad_logpdf(points) - minus.grad_logpdf(points)
    else:
        gradient = _central_gradient(lambda p: _log_odds_values(model, p), points)
    return _unwrap(gradient, single)


def hessian_log_odds(model, x):
    """
    Hessian of L. Constant for Gaussian pairs: inv(cov_minus) - inv(cov_plus).
    """
    _require_binary(model)
    points, single = _points(model, x)
    n, dim = points.shape
    if model.is_gaussian:
        minus, plus = model.components[MINUS], model.components[PLUS]
        constant = plus.hessian_logpdf() - minus.hessian_logpdf()
        hessian = np.broadcast_to(constant, (n, dim, dim)).copy()
    else:
        steps = _steps(points, FD_HESSIAN_STEP)
        hessian = np.empty((n, dim, dim))
        for i in range(dim):
            for j in range(i, dim):
                shift_i = np.zeros_like(points)
                shift_j = np.zeros_like(points)
                shift_i[:, i] = steps[:, i]
                shift_j[:, j] = steps[:, j]
                value = (
                    _log_odds_values(model, points + shift_i + shift_j)
                    - _log_odds_values(model, points + shift_i - shift_j)
                    - _log_odds_values(model, points - shift_i + shift_j)
                    + _log_odds_values(model, points - shift_i - shift_j)
                ) / (4.0 * steps[:, i] * steps[:, j])
                hessian[:, i, j] = value
                hessian[:, j, i] = value
    return _unwrap(hessian, single)


def grad_log_posterior(model, x):
    """
    Gradient of ln P(y|x) for every class, shape (M, K) per point.
    """
    points, single = _points(model, x)
    if model.is_gaussian:
        scores = np.stack([component.grad_logpdf(points) for component in model.components], axis=1)
        weights = np.exp(model.log_posterior(points))
        gradient = scores - np.einsum('nm,nmk->nk', weights, scores)[:, None, :]
    else:
        gradient = _central_gradient(model.log_posterior, points)
    return _unwrap(gradient, single)


def grad_posterior(model, x):
    """
    Gradient of P(y|x) for every class, shape (M, K) per point.
    """
    points, single = _points(model, x)
    weights = np.exp(model.log_posterior(points))
    gradient = weights[:, :, None] * grad_log_posterior(model, points)
    return _unwrap(gradient, single)


def nondifferentiable_flags(model, x):
    """
    Quality flags for points where finite-difference gradients straddle a density kink.
    """
    points, _ = _points(model, x)
    steps = _steps(points, FD_GRADIENT_STEP)
    for component in model.components:
        for axis, value in getattr(component, 'kinks', ()):
            if np.any(np.abs(points[:, axis] - value) < KINK_FLAG_STEPS * steps[:, axis]):
                return (FLAG_NON_DIFFERENTIABLE,)
    return ()


def sample(model, n, seed):
    """
    Draw n labelled points: labels from the priors, features from the class densities.
    """
    if n < 1:
        raise ValueError('sample size must be >= 1, got {}'.format(n))
    rng = np.random.default_rng(seed)
    labels = rng.choice(model.n_classes, size=n, p=model.priors)
    features = np.empty((n, model.dim))
    for label, component in enumerate(model.components):
        members = np.flatnonzero(labels == label)
        if members.size:
            features[members] = component.sample(rng, members.size)
    return LabelledSample(features=features, labels=labels)


def embed_continuum(emb, path):
    """
    Ambient images of a latent path, one row per path point.
    """
    path = np.asarray(path, dtype=float)
    if path.ndim == 1 and emb.latent_dim == 1:
        path = path[:, None]
    if path.ndim != 2 or path.shape[1] != emb.latent_dim:
        raise DimMismatch(emb.latent_dim, path.shape)
    return emb.embed(path)


def pull_back(emb, s):
    return emb.pull_back(s)


def linear_path(start, end, n_points):
    """
    Equally spaced points from ``start`` to ``end`` inclusive.
    """
    start = np.atleast_1d(np.asarray(start, dtype=float))
    end = np.atleast_1d(np.asarray(end, dtype=float))
    t = np.linspace(0.0, 1.0, n_points)[:, None]
    return start + t * (end - start)
