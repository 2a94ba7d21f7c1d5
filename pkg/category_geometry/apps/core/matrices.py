"""
Symmetric positive semi-definite matrices with a cached eigensystem.

Both the categorical and the neural Fisher information are stored as ``FisherMatrix``.
"""
from dataclasses import dataclass, field

import numpy as np

from category_geometry.apps.core.constants import (
    PSD_TOLERANCE,
    SINGULAR_RELATIVE_TOLERANCE,
)


@dataclass(frozen=True)
class FisherMatrix:
    """
    K×K symmetric matrix; eigenvalues sorted in descending order, eigenvectors as columns.
    """
    entries: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    flags: tuple = field(default=())

    @classmethod
    def from_entries(cls, entries, flags=()):
        entries = np.atleast_2d(np.asarray(entries, dtype=float))
        if entries.shape[0] != entries.shape[1]:
            raise ValueError('Fisher matrix must be square, got shape {}'.format(entries.shape))
        symmetric = 0.5 * (entries + entries.T)
        values, vectors = np.linalg.eigh(symmetric)
        order = np.argsort(values)[::-1]
        values = values[order]
        vectors = vectors[:, order]
        scale = max(1.0, abs(values[0]))
        # round-off negatives
        values = np.where((values < 0) & (values > -PSD_TOLERANCE * scale), 0.0, values)
        return cls(
            entries=symmetric,
            eigenvalues=values,
            eigenvectors=vectors,
            flags=tuple(sorted(set(flags))),
        )

    @classmethod
    def zeros(cls, dim, flags=()):
        return cls.from_entries(np.zeros((dim, dim)), flags=flags)

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def top_eigenvalue(self):
        return float(self.eigenvalues[0])

    @property
    def top_eigenvector(self):
        return self.eigenvectors[:, 0]

    @property
    def trace(self):
        return float(np.trace(self.entries))

    def rank(self, relative_threshold, absolute_floor=0.0):
        threshold = max(relative_threshold * self.top_eigenvalue, absolute_floor)
        if self.top_eigenvalue <= absolute_floor:
            return 0
        return int(np.count_nonzero(self.eigenvalues > threshold))

    @property
    def is_singular(self):
        top = self.top_eigenvalue
        return top <= 0.0 or float(self.eigenvalues[-1]) <= SINGULAR_RELATIVE_TOLERANCE * top

    def reconstruct(self):
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    def quadratic_form(self, vector):
        vector = np.asarray(vector, dtype=float)
        return float(vector @ self.entries @ vector)

    def with_flags(self, *flags):
        return FisherMatrix(
            entries=self.entries,
            eigenvalues=self.eigenvalues,
            eigenvectors=self.eigenvectors,
            flags=tuple(sorted(set(self.flags) | set(flags))),
        )

    def as_row(self):
        """
        Flattened entries followed by the eigenvalues, the layout of Fisher CSV exports.
        """
        return list(self.entries.ravel()) + list(self.eigenvalues)

    def __str__(self):
        return 'FisherMatrix(dim={}, eigenvalues={})'.format(self.dim, np.array2string(self.eigenvalues))
