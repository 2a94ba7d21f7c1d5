"""
Polylines in feature space.
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Polyline:
    points: np.ndarray
    arc_lengths: np.ndarray

    @classmethod
    def from_points(cls, points):
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if len(points) < 2:
            raise ValueError('A polyline needs at least two points')
        segments = np.linalg.norm(np.diff(points, axis=0), axis=1)
        if np.any(segments <= 0):
            raise ValueError('Consecutive polyline points must be distinct')
        return cls(points=points, arc_lengths=np.concatenate([[0.0], np.cumsum(segments)]))

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def length(self):
        return float(self.arc_lengths[-1])

    def point_at(self, s):
        """
        Linear interpolation at arc length ``s``.
        """
        index = int(np.clip(np.searchsorted(self.arc_lengths, s, side='right') - 1, 0, len(self) - 2))
        start, end = self.arc_lengths[index], self.arc_lengths[index + 1]
        fraction = (s - start) / (end - start)
        return self.points[index] + fraction * (self.points[index + 1] - self.points[index])

    def tangents(self):
        """
        Unit tangents: central differences inside, one-sided at the ends.
        """
        gradient = np.gradient(self.points, axis=0)
        return gradient / np.linalg.norm(gradient, axis=1, keepdims=True)
