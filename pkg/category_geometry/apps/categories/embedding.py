"""
Deterministic embedding of a low-dimensional latent continuum into a high-dimensional stimulus space.
"""
import numpy as np

from category_geometry.apps.categories.exceptions import DimMismatch, InvalidModel
from category_geometry.apps.core.utils import as_points


class LatentEmbedding:
    """
    s = squash(W x + b) with W an N_s×K matrix with orthonormal columns and squash = tanh.

    W and b are drawn from a seeded standard normal unless given explicitly. Orthonormal columns and a
    strictly monotone squashing keep the map injective.
    """

    def __init__(self, latent_dim, ambient_dim, seed=0, squash=True, scale=1.0, weights=None, offset=None):
        if latent_dim < 1 or ambient_dim < latent_dim:
            raise InvalidModel('Embedding needs 1 <= latent_dim <= ambient_dim, got {} and {}'.format(
                latent_dim, ambient_dim,
            ))
        self.latent_dim = int(latent_dim)
        self.ambient_dim = int(ambient_dim)
        self.seed = seed
        self.squash = bool(squash)
        self.scale = float(scale)

        rng = np.random.default_rng(seed)
        if weights is None:
            basis, _ = np.linalg.qr(rng.standard_normal((self.ambient_dim, self.latent_dim)))
            weights = self.scale * basis
        if offset is None:
            offset = 0.1 * rng.standard_normal(self.ambient_dim) if self.squash else np.zeros(self.ambient_dim)
        weights = np.asarray(weights, dtype=float)
        offset = np.asarray(offset, dtype=float)
        if weights.shape != (self.ambient_dim, self.latent_dim) or offset.shape != (self.ambient_dim,):
            raise DimMismatch((self.ambient_dim, self.latent_dim), (weights.shape, offset.shape))
        if np.linalg.matrix_rank(weights) < self.latent_dim:
            raise InvalidModel('Embedding weights must have full column rank')

        self.weights = weights
        self.offset = offset
        self._left_inverse = np.linalg.pinv(weights)
        for array in (self.weights, self.offset, self._left_inverse):
            array.setflags(write=False)

    def _latent(self, x):
        try:
            return as_points(x, self.latent_dim)
        except ValueError:
            raise DimMismatch(self.latent_dim, np.shape(x))

    def preactivation(self, points):
        return points @ self.weights.T + self.offset

    def embed(self, x):
        points, single = self._latent(x)
        ambient = self.preactivation(points)
        if self.squash:
            ambient = np.tanh(ambient)
        return ambient[0] if single else ambient

    __call__ = embed

    def jacobian(self, x):
        """
        ds/dx at a single latent point, shape (N_s, K).
        """
        points, _ = self._latent(x)
        if not self.squash:
            return self.weights.copy()
        slope = 1.0 - np.tanh(self.preactivation(points)[0]) ** 2
        return slope[:, None] * self.weights

    def latent_jacobian(self, x):
        """
        dx/ds restricted to the embedded manifold, shape (K, N_s).
        """
        return np.linalg.pinv(self.jacobian(x))

    def pull_back(self, s):
        """
        Latent coordinates of ambient points lying on the embedded manifold.
        """
        ambient = np.asarray(s, dtype=float)
        single = ambient.ndim == 1
        ambient = np.atleast_2d(ambient)
        if ambient.shape[1] != self.ambient_dim:
            raise DimMismatch(self.ambient_dim, ambient.shape)
        if self.squash:
            ambient = np.arctanh(ambient)
        latent = (ambient - self.offset) @ self._left_inverse.T
        return latent[0] if single else latent

    def to_dict(self):
        return {
            'latent_dim': self.latent_dim,
            'ambient_dim': self.ambient_dim,
            'seed': self.seed,
            'squash': self.squash,
            'scale': self.scale,
        }
