"""
Tests for the synthetic dataset generator.
"""
import os
import shutil
import tempfile

import ddt
import numpy as np

from noisecleaner.alternation.api import build_targets, evaluate_classifier
from noisecleaner.classifier.builtin import BuiltinClassifierConfig, BuiltinSnippetClassifier
from noisecleaner.errors import DatasetError, SyntheticDataRequestError
from noisecleaner.fileio.api import load_dataset
from noisecleaner.synthdata import SyntheticConfig, export_dataset, generate, standard_benchmark
from noisecleaner.test_utils import NumericTestCase
from noisecleaner.video import VideoBag

SMALL = dict(n_videos=12, snippets_per_video=(10, 20), feature_dim=4, seed=5)


def _runs(mask):
    """
    Number of maximal runs of ones in a 0/1 vector.
    """
    padded = np.concatenate([[0], mask.astype(int), [0]])
    return int(np.sum(np.diff(padded) == 1))


@ddt.ddt
class GenerateTest(NumericTestCase):

    def test_all_normal(self):
        dataset = generate(SyntheticConfig(anomaly_video_fraction=0.0, **SMALL))
        self.assertTrue(all(bag.label == 0 for bag in dataset))
        self.assertTrue(all(not np.any(bag.ground_truth) for bag in dataset))

    @ddt.data(1, 2, 3)
    def test_one_sided_noise(self, n_segments):
        config = SyntheticConfig(anomaly_segment_fraction=0.4, n_segments=n_segments, **SMALL)
        dataset = generate(config)
        self.assertEqual(sum(bag.label for bag in dataset), 5)
        for bag in dataset:
            if bag.label:
                self.assertEqual(int(bag.ground_truth.sum()), config.segment_length(bag.n_snippets))
                self.assertEqual(_runs(bag.ground_truth), n_segments)
                self.assertFalse(np.all(bag.ground_truth))
            else:
                self.assertFalse(np.any(bag.ground_truth))

    def test_shape_and_range(self):
        dataset = generate(SyntheticConfig(**SMALL))
        self.assertEqual(len(dataset), 12)
        for bag in dataset:
            self.assertTrue(10 <= bag.n_snippets <= 20)
            self.assertEqual(bag.feature_dim, 4)
            self.assertEqual(bag.features.dtype, np.float64)
            self.assertArrayEqual(bag.features, bag.features.astype(np.float32))

    def test_deterministic(self):
        first, second = generate(SyntheticConfig(**SMALL)), generate(SyntheticConfig(**SMALL))
        for one, other in zip(first, second):
            self.assertEqual(one.video_id, other.video_id)
            self.assertEqual(one.label, other.label)
            self.assertArrayEqual(one.features, other.features)
            self.assertArrayEqual(one.ground_truth, other.ground_truth)

    def test_seed_changes_data(self):
        first = generate(SyntheticConfig(**SMALL))
        second = generate(SyntheticConfig(**dict(SMALL, seed=6)))
        self.assertFalse(np.array_equal(first[0].features, second[0].features))

    def test_separation_moves_anomalies(self):
        dataset = generate(SyntheticConfig(class_separation=5.0, **dict(SMALL, n_videos=30)))
        features = np.concatenate([bag.features for bag in dataset])
        truth = np.concatenate([bag.ground_truth for bag in dataset]).astype(bool)
        gap = features[truth, 0].mean() - features[~truth, 0].mean()
        self.assertAlmostEqual(gap, 5.0, delta=0.5)

    def test_scene_shift(self):
        dataset = generate(SyntheticConfig(scene_shift=3.0, **dict(SMALL, n_videos=30)))
        anomalous = np.concatenate([bag.features[:, 1] for bag in dataset if bag.label])
        normal = np.concatenate([bag.features[:, 1] for bag in dataset if not bag.label])
        self.assertAlmostEqual(anomalous.mean() - normal.mean(), 3.0, delta=0.5)

    @ddt.unpack
    @ddt.data((0.0, 0), (0.5, 9), (1.0, 18))
    def test_scene_shared_by_normal_videos(self, rate, expected):
        dataset = generate(SyntheticConfig(scene_shift=6.0, scene_rate_normal=rate, **dict(SMALL, n_videos=30)))
        normal = [bag for bag in dataset if not bag.label]
        self.assertEqual(len(normal), 18)
        with_scene = [bag for bag in normal if bag.features[:, 1].mean() > 3.0]
        self.assertEqual(len(with_scene), expected)
        self.assertTrue(all(bag.features[:, 1].mean() > 3.0 for bag in dataset if bag.label))

    def test_no_separation_is_uninformative(self):
        values = dict(class_separation=0.0, n_videos=40, snippets_per_video=(32, 64), feature_dim=8)
        scores = []
        for seed in range(5):
            train = generate(SyntheticConfig(seed=2 * seed, id_prefix='train', **values))
            evaluation = generate(SyntheticConfig(seed=2 * seed + 1, id_prefix='eval', **values))
            classifier = BuiltinSnippetClassifier(BuiltinClassifierConfig(seed=seed))
            classifier.train(build_targets(train))
            scores.append(evaluate_classifier(classifier, evaluation).auc)
        self.assertTrue(0.45 <= np.mean(scores) <= 0.55, scores)
        self.assertTrue(all(0.4 <= score <= 0.6 for score in scores), scores)

    @ddt.data(
        {'anomaly_segment_fraction': 0.05},
        {'anomaly_segment_fraction': 0.0},
        {'anomaly_video_fraction': 1.5},
        {'n_videos': 0},
        {'snippets_per_video': (20, 10)},
        {'class_separation': -1.0},
        {'n_segments': 3, 'anomaly_segment_fraction': 1.0},
        {'scene_shift': 1.0, 'feature_dim': 1},
        {'scene_rate_normal': 1.5},
    )
    def test_infeasible(self, values):
        with self.assertRaises(SyntheticDataRequestError):
            generate(SyntheticConfig(**dict(SMALL, **values)))


class VideoBagTest(NumericTestCase):

    def test_normal_video_with_anomaly(self):
        with self.assertRaises(DatasetError):
            VideoBag('v', 0, np.zeros((3, 2)), [0, 1, 0])

    def test_anomalous_video_without_anomaly(self):
        with self.assertRaises(DatasetError):
            VideoBag('v', 1, np.zeros((3, 2)), [0, 0, 0])

    def test_non_finite_features(self):
        with self.assertRaises(DatasetError):
            VideoBag('v', 0, [[0.0, np.inf]])

    def test_label(self):
        with self.assertRaises(DatasetError):
            VideoBag('v', 2, np.zeros((3, 2)))


class StandardBenchmarkTest(NumericTestCase):

    @classmethod
    def setUpClass(cls):
        super(StandardBenchmarkTest, cls).setUpClass()
        cls.train, cls.eval, cls.descriptor = standard_benchmark()

    def test_sizes(self):
        self.assertEqual(len(self.train), 60)
        self.assertEqual(len(self.eval), 40)
        self.assertEqual(sum(bag.label for bag in self.train), 24)
        self.assertTrue(all(64 <= bag.n_snippets <= 128 for bag in self.train + self.eval))
        self.assertTrue(all(bag.feature_dim == 32 for bag in self.train + self.eval))

    def test_scene_split(self):
        scene = [bag.label for bag in self.train if bag.features[:, 1].mean() > 1.0]
        self.assertEqual(len(scene), 24 + 18)
        self.assertEqual(sum(scene), 24)
        self.assertIn('expected', self.descriptor.notes)

    def test_repeatable(self):
        train, evaluation, descriptor = standard_benchmark()
        self.assertEqual(descriptor, self.descriptor)
        for one, other in zip(train + evaluation, self.train + self.eval):
            self.assertEqual(one.video_id, other.video_id)
            self.assertArrayEqual(one.features, other.features)

    def test_disjoint_ids(self):
        train_ids = {bag.video_id for bag in self.train}
        eval_ids = {bag.video_id for bag in self.eval}
        self.assertFalse(train_ids & eval_ids)

    def test_replicates_differ(self):
        train, __, __ = standard_benchmark(seed=1)
        self.assertFalse(np.array_equal(train[0].features, self.train[0].features))


class ExportTest(NumericTestCase):

    def setUp(self):
        super(ExportTest, self).setUp()
        self.workdir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.workdir)

    def test_export_and_load(self):
        dataset = generate(SyntheticConfig(**SMALL))
        directory = os.path.join(self.workdir, 'features')
        paths = export_dataset(dataset, directory)
        self.assertEqual(len(paths), 12)
        loaded = load_dataset(directory)
        for original, restored in zip(dataset, loaded):
            self.assertEqual(original.video_id, restored.video_id)
            self.assertEqual(original.label, restored.label)
            self.assertEqual(original.features.tobytes(), restored.features.tobytes())
            self.assertArrayEqual(original.ground_truth, restored.ground_truth)

    def test_export_without_ground_truth(self):
        dataset = generate(SyntheticConfig(**SMALL))
        export_dataset(dataset, self.workdir, include_ground_truth=False)
        self.assertTrue(all(bag.ground_truth is None for bag in load_dataset(self.workdir)))
