"""
End-to-end checks on networks trained to categorize: the coding-layer Fisher information they
learn concentrates at the decision boundaries and aligns with the category Fisher information.
"""
import numpy as np
from django.test import SimpleTestCase

from category_geometry.apps.catfisher import api as catfisher_api
from category_geometry.apps.categories import api as categories_api
from category_geometry.apps.categories import builders
from category_geometry.apps.categories.embedding import LatentEmbedding
from category_geometry.apps.infomeasure import api as infomeasure_api
from category_geometry.apps.nettrain import api
from category_geometry.apps.nettrain.networks import MLPModel
from category_geometry.apps.nettrain.training import TrainConfig
from category_geometry.apps.scenarios.constants import TRIPLE_EXCLUSION

RUNS = 10
EPOCHS = 200


def alignments(model, net, points):
    return [
        api.eigen_alignment(catfisher_api.fisher_cat(model, point), api.fisher_code_net(net, point))
        for point in points
    ]


class ThreeCategoryTrainingTests(SimpleTestCase):
    """
    Ten seeded runs of a 2x32 sigmoid network with sigma = 0.3 multiplicative noise, scored on
    50 boundary probes shared by all runs.
    """

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.model = builders.three_gaussians()
        cls.probes = api.boundary_probes(cls.model, 50, seed=3)
        cls.interior = api.interior_probes(cls.model, 50, seed=4)
        cls.runs = []
        for run in range(RUNS):
            data = categories_api.sample(cls.model, 3000, seed=run)
            untrained = MLPModel([2, 32, 32, 3], noise_sigma=0.3, seed=100 + run)
            result = api.train_sgd(untrained, data.features, data.labels, TrainConfig(epochs=EPOCHS, seed=200 + run))
            cls.runs.append((untrained, result))

    def pooled(self, attribute, trained=True, points=None):
        points = self.probes.points if points is None else points
        return np.array([
            getattr(alignment, attribute)
            for untrained, result in self.runs
            for alignment in alignments(self.model, result.net if trained else untrained, points)
        ])

    def test_loss_decreases(self):
        for _, result in self.runs:
            self.assertLess(result.final_loss, result.initial_loss)
            self.assertLess(result.losses[-1], result.losses[0])

    def test_accuracy_close_to_bayes(self):
        test = categories_api.sample(self.model, 20000, seed=5)
        bayes = infomeasure_api.bayes_rate(self.model)
        for _, result in self.runs:
            self.assertGreaterEqual(api.accuracy(result.net, test.features, test.labels), bayes - 0.02)

    def test_top_eigenvalue_peaks_at_the_boundaries(self):
        contrasts = [api.eigenvalue_contrast(result.net, self.probes.points, self.interior) for _, result in self.runs]
        self.assertGreaterEqual(np.median(contrasts), 5.0)

    def test_top_eigenvectors_align(self):
        self.assertLess(np.median(self.pooled('angle')), 15.0)
        self.assertGreater(np.median(self.pooled('angle', trained=False)), 30.0)

    def test_code_is_nearly_rank_one_away_from_the_triple_point(self):
        far = self.probes.triple_distance > TRIPLE_EXCLUSION
        near = ~far
        self.assertGreater(far.sum(), 5)
        self.assertGreater(near.sum(), 0)
        far_ratio = np.median(self.pooled('ratio', points=self.probes.points[far]))
        self.assertLess(far_ratio, 0.2)
        self.assertGreater(np.median(self.pooled('ratio', points=self.probes.points[near])), far_ratio)


class ContinuumTrainingTests(SimpleTestCase):
    """
    A 1-D two-category continuum seen through a squashed 20-dimensional embedding.
    """

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.model = builders.gauss_pair_1d(1.0, 0.5, 1.0)
        cls.embedding = LatentEmbedding(1, 20, seed=0)
        data = categories_api.sample(cls.model, 3000, seed=0)
        net = MLPModel([20, 32, 2], noise_sigma=0.3, seed=5)
        cls.net = api.train_sgd(
            net, cls.embedding.embed(data.features), data.labels, TrainConfig(epochs=EPOCHS, seed=6),
        ).net
        cls.probe = api.PathProbe.linear([-2.0], [2.0], 33, labels=(0, 1))
        cls.posteriors = categories_api.posterior(cls.model, cls.probe.points)

    def test_fisher_peaks_at_the_boundary(self):
        fisher = api.fisher_along_path(self.net, self.probe, input_map=self.embedding)
        boundary_index = int(np.argmin(np.max(self.posteriors, axis=1)))
        self.assertEqual(boundary_index, 16)
        self.assertLessEqual(abs(fisher.argmax - boundary_index), 2)

    def test_cosine_distance_tracks_fisher(self):
        profile = api.cosine_proxy(self.net, self.probe, input_map=self.embedding)
        self.assertEqual(len(profile.distances), len(self.probe) - 1)
        self.assertGreater(profile.fit.pearson, 0.95)

    def test_steepest_slopes_lie_in_the_transition_region(self):
        curves = api.tuning_curves(self.net, self.probe, input_map=self.embedding)
        self.assertGreater(np.count_nonzero(curves.steepest() >= 0), 0)
        self.assertGreaterEqual(api.transition_fraction(curves, self.posteriors), 0.6)
