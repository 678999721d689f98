"""
Tests for the graph builders.
"""
import math

import ddt
import numpy as np

from noisecleaner.graphs.api import (AdjacencyKind, GraphConfig, VideoGraphs, build_constant,
                                     build_feature_similarity, build_temporal_consistency, renormalize,
                                     spectral_radius)
from noisecleaner.graphs.errors import GraphRequestError
from noisecleaner.test_utils import NumericTestCase, dense_renormalize


@ddt.ddt
class FeatureSimilarityTest(NumericTestCase):

    def test_identical_rows(self):
        x = np.tile([[0.3, -1.2, 2.0]], (4, 1))
        adjacency = build_feature_similarity(x)
        self.assertArrayEqual(adjacency.data, np.ones((4, 4)))
        self.assertEqual(adjacency.kind, AdjacencyKind.FEATURE_SIMILARITY)

    def test_orthonormal_rows(self):
        adjacency = build_feature_similarity([[1.0, 0.0], [0.0, 1.0]])
        inv_e = math.exp(-1.0)
        self.assertAllClose(adjacency.data, [[1.0, inv_e], [inv_e, 1.0]], atol=1e-15)

    def test_rows_reach_one_and_stay_in_bounds(self):
        for __ in range(1000):
            n = self.rng.integers(1, 13)
            d = self.rng.integers(1, 7)
            x = self.rng.normal(scale=2.0, size=(n, d))
            data = build_feature_similarity(x).data
            self.assertTrue(np.all(data.max(axis=1) == 1.0))
            self.assertTrue(np.all(data > 0.0))
            self.assertTrue(np.all(data <= 1.0))

    def test_asymmetry_witness(self):
        # Row 0 peaks on itself, row 1 peaks on row 0.
        data = build_feature_similarity([[2.0, 0.0], [1.0, 0.0]]).data
        self.assertAlmostEqual(data[0, 1], math.exp(-2.0))
        self.assertEqual(data[1, 0], 1.0)
        self.assertNotEqual(data[0, 1], data[1, 0])

    def test_symmetrize(self):
        data = build_feature_similarity([[2.0, 0.0], [1.0, 0.0]], symmetrize=True).data
        self.assertAllClose(data, data.T)
        self.assertAlmostEqual(data[0, 1], 0.5 * (1.0 + math.exp(-2.0)))

    @ddt.data(
        [[1.0, float('nan')]],
        [[float('inf'), 0.0], [0.0, 1.0]],
        np.zeros((0, 3)),
        [1.0, 2.0],
    )
    def test_invalid_features(self, x):
        with self.assertRaises(GraphRequestError):
            build_feature_similarity(x)

    def test_result_is_read_only(self):
        adjacency = build_feature_similarity([[1.0, 0.0], [0.0, 1.0]])
        with self.assertRaises(ValueError):
            adjacency.data[0, 0] = 3.0


@ddt.ddt
class TemporalConsistencyTest(NumericTestCase):

    def test_single_snippet(self):
        self.assertArrayEqual(build_temporal_consistency(1).data, [[1.0]])

    def test_three_snippets(self):
        e1, e2 = math.exp(-1.0), math.exp(-2.0)
        self.assertAllClose(
            build_temporal_consistency(3).data,
            [[1.0, e1, e2], [e1, 1.0, e1], [e2, e1, 1.0]],
            atol=1e-15
        )

    @ddt.data(1, 2, 7, 50)
    def test_symmetric_toeplitz(self, n):
        data = build_temporal_consistency(n).data
        self.assertArrayEqual(data, data.T)
        self.assertArrayEqual(np.diag(data), np.ones(n))
        for offset in range(1, n):
            diagonal = np.diag(data, k=offset)
            self.assertTrue(np.all(diagonal == diagonal[0]))
        self.assertTrue(np.all(data > 0.0))
        self.assertTrue(np.all(data <= 1.0))

    @ddt.data(0, -3)
    def test_empty(self, n):
        with self.assertRaises(GraphRequestError):
            build_temporal_consistency(n)


@ddt.ddt
class ConstantGraphTest(NumericTestCase):

    def test_mid_value(self):
        adjacency = build_constant(2, 0.5)
        self.assertArrayEqual(adjacency.data, [[0.5, 0.5], [0.5, 0.5]])
        self.assertEqual(adjacency.kind, AdjacencyKind.CONSTANT)

    def test_single_snippet(self):
        self.assertArrayEqual(build_constant(1, 1.0).data, [[1.0]])

    def test_renormalized_rows_are_identical(self):
        data = renormalize(build_constant(3, 0.5)).data
        for row in data[1:]:
            self.assertAllClose(np.sort(row), np.sort(data[0]))
        self.assertAllClose(data, data.T)

    @ddt.data(0.0, -0.5, 1.5, float('nan'))
    def test_out_of_range(self, value):
        with self.assertRaises(GraphRequestError):
            build_constant(2, value)


@ddt.ddt
class RenormalizeTest(NumericTestCase):

    @ddt.file_data('data/renormalize.json')
    def test_examples(self, adjacency, expected):
        self.assertAllClose(renormalize(adjacency).data, expected, atol=1e-15)

    def test_matches_dense_evaluation(self):
        for __ in range(100):
            n = self.rng.integers(1, 65)
            a = self.rng.uniform(0.0, 1.0, size=(n, n))
            a[self.rng.uniform(size=(n, n)) < 0.3] = 0.0
            self.assertAllClose(renormalize(a).data, dense_renormalize(a), atol=1e-12)

    def test_symmetric_input_bounds(self):
        for __ in range(50):
            n = self.rng.integers(1, 40)
            a = self.rng.uniform(0.0, 1.0, size=(n, n))
            a = 0.5 * (a + a.T)
            operator = renormalize(a)
            self.assertAllClose(operator.data, operator.data.T)
            self.assertLessEqual(spectral_radius(operator, iterations=200), 1.0 + 1e-8)
            self.assertTrue(np.all(operator.data >= 0.0))
            self.assertTrue(np.all(operator.data <= 1.0))
            self.assertTrue(np.all(np.diag(operator.data) > 0.0))

    def test_asymmetric_feature_graph(self):
        x = self.rng.normal(size=(6, 3))
        operator = renormalize(build_feature_similarity(x))
        self.assertTrue(np.all(np.isfinite(operator.data)))
        self.assertTrue(np.all(np.diag(operator.data) > 0.0))

    @ddt.data(
        [[0.0, -0.1], [0.2, 0.0]],
        [[0.0, 1.0, 0.0]],
        [[float('nan'), 0.0], [0.0, 0.0]],
    )
    def test_invalid(self, a):
        with self.assertRaises(GraphRequestError):
            renormalize(a)


@ddt.ddt
class SpectralRadiusTest(NumericTestCase):

    @ddt.unpack
    @ddt.data(
        (np.eye(3) * 0.5, 0.5),
        (np.diag([3.0, -1.0, 0.5]), 3.0),
        ([[0.0, 2.0], [2.0, 0.0]], 2.0),
        (np.zeros((2, 2)), 0.0),
    )
    def test_plain_matrix(self, matrix, expected):
        self.assertAlmostEqual(spectral_radius(matrix), expected, places=10)

    def test_adjacency(self):
        adjacency = build_constant(4, 0.5)
        self.assertAlmostEqual(spectral_radius(adjacency), 2.0, places=10)
        self.assertAlmostEqual(spectral_radius(renormalize(adjacency)), 1.0, places=10)

    @ddt.data(np.ones((2, 3)), np.ones(4), np.zeros((0, 0)))
    def test_not_square(self, matrix):
        with self.assertRaises(GraphRequestError):
            spectral_radius(matrix)


class VideoGraphsTest(NumericTestCase):

    def test_operators_are_cached(self):
        graphs = VideoGraphs(self.rng.normal(size=(5, 3)))
        self.assertIs(graphs.feature, graphs.feature)
        self.assertIs(graphs.operator('temporal'), graphs.temporal)

    def test_constant_replacement(self):
        graphs = VideoGraphs(self.rng.normal(size=(4, 3)), GraphConfig(temporal_constant=0.5))
        self.assertAllClose(graphs.temporal.data, renormalize(build_constant(4, 0.5)).data)
        self.assertAllClose(
            graphs.feature.data,
            renormalize(build_feature_similarity(graphs.features)).data
        )

    def test_unknown_branch(self):
        with self.assertRaises(GraphRequestError):
            VideoGraphs([[1.0]]).operator('spatial')

    def test_invalid_constant(self):
        with self.assertRaises(GraphRequestError):
            GraphConfig(feature_constant=2.0).validate()
