"""
Tensor-product Gauss-Legendre grids for integrals against P(x).
"""
import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from category_geometry.apps.categories.constants import EXP_GAUSS
from category_geometry.apps.infomeasure.constants import BOX_STANDARD_DEVIATIONS, LARGE_GRID_NODES


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureGrid:
    """
    Nodes (G, K) and positive weights (G,) over the box [lows, highs].
    """
    nodes: np.ndarray
    weights: np.ndarray
    lows: tuple
    highs: tuple
    nodes_per_dim: int

    @classmethod
    def from_box(cls, lows, highs, nodes_per_dim):
        lows = tuple(float(low) for low in np.atleast_1d(lows))
        highs = tuple(float(high) for high in np.atleast_1d(highs))
        if len(lows) != len(highs) or any(high <= low for low, high in zip(lows, highs)):
            raise ValueError('Invalid quadrature box {} - {}'.format(lows, highs))
        if nodes_per_dim ** len(lows) > LARGE_GRID_NODES:
            logger.warning('Quadrature grid has {} nodes'.format(nodes_per_dim ** len(lows)))
        base_nodes, base_weights = np.polynomial.legendre.leggauss(nodes_per_dim)
        axes = []
        axis_weights = []
        for low, high in zip(lows, highs):
            half = 0.5 * (high - low)
            axes.append(low + half * (base_nodes + 1.0))
            axis_weights.append(half * base_weights)
        nodes = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, len(lows))
        weights = np.ones(len(nodes))
        for weight in np.meshgrid(*axis_weights, indexing='ij'):
            weights = weights * weight.ravel()
        return cls(nodes=nodes, weights=weights, lows=lows, highs=highs, nodes_per_dim=int(nodes_per_dim))

    @property
    def dim(self):
        return self.nodes.shape[1]

    @property
    def size(self):
        return self.nodes.shape[0]

    def probability_weights(self, model):
        """
        w_g P(x_g); sums to the probability mass the box captures.
        """
        return self.weights * model.density(self.nodes)

    def check_normalization(self, model):
        return float(np.sum(self.probability_weights(model)))

    def class_masses(self, model):
        """
        Sum over nodes of w_g P(x_g | y) for every class.
        """
        log_conditionals = model.log_joint(self.nodes) - model.log_priors
        with np.errstate(invalid='ignore'):
            return np.nan_to_num(self.weights @ np.exp(log_conditionals))

    def expectation(self, model, values):
        """
        Integral of ``values`` (one per node) against P(x).
        """
        return float(np.dot(self.probability_weights(model), values))

    def to_dict(self):
        return {'lows': list(self.lows), 'highs': list(self.highs), 'nodes_per_dim': self.nodes_per_dim}


def component_box(component, widths=BOX_STANDARD_DEVIATIONS):
    if component.kind == EXP_GAUSS:
        spread = widths * np.sqrt(component.sigma2_sq)
        return np.array([component.domain[0], -spread]), np.array([component.domain[1], spread])
    spread = widths * np.sqrt(np.diag(component.cov))
    return component.mean - spread, component.mean + spread


def default_grid(model, nodes_per_dim=None):
    """
    Grid over the union of the component boxes (mean +- 6 standard deviations per axis).
    """
    if nodes_per_dim is None:
        nodes_per_dim = settings.CATEGORY_GEOMETRY['DEFAULT_QUADRATURE_NODES']
    boxes = [component_box(component) for component in model.components]
    lows = np.min([low for low, _ in boxes], axis=0)
    highs = np.max([high for _, high in boxes], axis=0)
    return QuadratureGrid.from_box(lows, highs, nodes_per_dim)
