"""
The optimal decoder P(y|r), with P(r|y) integrated over a stimulus grid.
"""
import numpy as np
from scipy.special import logsumexp

from category_geometry.apps.infomeasure.constants import BLOCK_ELEMENTS
from category_geometry.apps.infomeasure.exceptions import GridTooCoarse
from category_geometry.apps.infomeasure.grids import default_grid
from category_geometry.apps.infomeasure.responses import as_response_model


def grid_log_posterior(model, response_model, responses, grid, node_means=None):
    """
    ln P(y|r) for every response row, shape (n, M), with
    P(y|r) proportional to P_y sum_g w_g P(x_g|y) P(r|x_g).
    """
    response_model = as_response_model(response_model)
    responses = np.atleast_2d(np.asarray(responses, dtype=float))
    if node_means is None:
        node_means = response_model.mean(grid.nodes)
    with np.errstate(divide='ignore'):
        node_terms = model.log_joint(grid.nodes) + np.log(grid.weights)[:, None]

    block = max(1, BLOCK_ELEMENTS // (grid.size * model.n_classes))
    log_joint = np.empty((len(responses), model.n_classes))
    for start in range(0, len(responses), block):
        log_likelihood = response_model.log_likelihood(responses[start:start + block], node_means)
        log_joint[start:start + block] = logsumexp(log_likelihood[:, :, None] + node_terms[None], axis=1)

    normalizer = logsumexp(log_joint, axis=1, keepdims=True)
    if not np.all(np.isfinite(normalizer)):
        raise GridTooCoarse('{} responses have zero likelihood at every node'.format(
            int(np.count_nonzero(~np.isfinite(normalizer))),
        ))
    return log_joint - normalizer


class BayesDecoder:
    """
    Bayes-optimal category decoder from responses, given the true category model.
    """

    def __init__(self, model, response_model, grid=None):
        self.model = model
        self.response_model = as_response_model(response_model)
        self.grid = grid if grid is not None else default_grid(model)
        self._node_means = self.response_model.mean(self.grid.nodes)

    def log_posterior(self, responses):
        return grid_log_posterior(self.model, self.response_model, responses, self.grid, self._node_means)

    def posterior(self, responses):
        return np.exp(self.log_posterior(responses))

    def predict(self, responses):
        return np.argmax(self.log_posterior(responses), axis=1)

    def cross_entropy(self, responses, labels):
        """
        Mean cost -ln P(y|r) of the decoder on labelled responses.
        """
        log_posterior = self.log_posterior(responses)
        return float(-np.mean(log_posterior[np.arange(len(labels)), labels]))


def grid_posterior(model, response_model, responses, grid):
    return np.exp(grid_log_posterior(model, response_model, responses, grid))
