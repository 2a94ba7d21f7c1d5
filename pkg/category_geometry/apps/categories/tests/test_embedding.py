"""
Tests for ``LatentEmbedding`` and ``embed_continuum``.
"""
import numpy as np
from django.test import SimpleTestCase

from category_geometry.apps.categories import api
from category_geometry.apps.categories.embedding import LatentEmbedding
from category_geometry.apps.categories.exceptions import DimMismatch
from category_geometry.apps.categories.tests.factories import LatentEmbeddingFactory


class EmbedContinuumTests(SimpleTestCase):

    def setUp(self):
        super().setUp()
        self.embedding = LatentEmbeddingFactory(seed=11)
        self.path = api.linear_path([-2.0, -1.0], [2.0, 1.5], 31)

    def test_identity_map_pads_input(self):
        embedding = LatentEmbedding(2, 5, squash=False, weights=np.eye(5, 2), offset=np.zeros(5))
        ambient = api.embed_continuum(embedding, [[0.3, -1.2]])
        np.testing.assert_array_equal(ambient, [[0.3, -1.2, 0.0, 0.0, 0.0]])

    def test_path_points_stay_distinct(self):
        ambient = api.embed_continuum(self.embedding, self.path)
        assert ambient.shape == (31, 16)
        distances = np.linalg.norm(ambient[:, None, :] - ambient[None, :, :], axis=-1)
        assert np.min(distances[~np.eye(31, dtype=bool)]) > 0

    def test_reversed_path(self):
        forward = api.embed_continuum(self.embedding, self.path)
        backward = api.embed_continuum(self.embedding, self.path[::-1])
        np.testing.assert_allclose(backward, forward[::-1], rtol=1e-14, atol=1e-14)

    def test_same_seed_is_bit_identical(self):
        again = LatentEmbeddingFactory(seed=11)
        np.testing.assert_array_equal(
            api.embed_continuum(self.embedding, self.path),
            api.embed_continuum(again, self.path),
        )

    def test_pull_back_recovers_latent_points(self):
        ambient = api.embed_continuum(self.embedding, self.path)
        np.testing.assert_allclose(api.pull_back(self.embedding, ambient), self.path, atol=1e-10)

    def test_latent_jacobian_inverts_the_embedding_jacobian(self):
        point = np.array([0.2, -0.4])
        product = self.embedding.latent_jacobian(point) @ self.embedding.jacobian(point)
        np.testing.assert_allclose(product, np.eye(2), atol=1e-10)

    def test_jacobian_matches_finite_differences(self):
        point = np.array([0.5, 0.1])
        step = 1e-6
        numeric = np.column_stack([
            (self.embedding.embed(point + step * e) - self.embedding.embed(point - step * e)) / (2 * step)
            for e in np.eye(2)
        ])
        np.testing.assert_allclose(self.embedding.jacobian(point), numeric, atol=1e-8)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimMismatch):
            api.embed_continuum(self.embedding, np.zeros((4, 3)))
