"""
Tests for feature files and the tensor container.
"""
from collections import OrderedDict
import os
import shutil
import tempfile

import ddt
import numpy as np

from noisecleaner.fileio.api import (MAGIC, decode_feature_file, encode_feature_file, load_dataset,
                                     load_feature_file, save_feature_file)
from noisecleaner.fileio.exceptions import CheckpointFileError, FeatureFileError, FileIOError
from noisecleaner.fileio.tensors import decode_tensor_container, encode_tensor_container
from noisecleaner.test_utils import NumericTestCase
from noisecleaner.video import VideoBag

# Header size of a feature file whose video id is 5 bytes long.
HEADER_SIZE = 4 + 4 + 4 + 5 + 1 + 4 + 4


class FileTestCase(NumericTestCase):

    def setUp(self):
        super(FileTestCase, self).setUp()
        self.workdir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.workdir)

    def bag(self, video_id='vid-1', label=1, n_snippets=6, dim=3, ground_truth=True):
        features = self.rng.standard_normal((n_snippets, dim)).astype(np.float32)
        truth = None
        if ground_truth:
            truth = np.zeros(n_snippets, dtype=np.uint8)
            truth[1:3] = label
        return VideoBag(video_id, label, features, truth)


@ddt.ddt
class FeatureFileTest(FileTestCase):

    def assertBagsEqual(self, first, second):
        self.assertEqual(first.video_id, second.video_id)
        self.assertEqual(first.label, second.label)
        self.assertEqual(first.features.tobytes(), second.features.tobytes())
        if first.ground_truth is None:
            self.assertIsNone(second.ground_truth)
        else:
            self.assertArrayEqual(first.ground_truth, second.ground_truth)

    @ddt.data(
        (1, True), (0, True), (1, False), (0, False),
    )
    @ddt.unpack
    def test_save_and_load(self, label, ground_truth):
        bag = self.bag(label=label, ground_truth=ground_truth)
        path = os.path.join(self.workdir, 'vid-1.gcnf')
        save_feature_file(bag, path)
        self.assertBagsEqual(load_feature_file(path), bag)

    def test_ground_truth_left_out(self):
        bag = self.bag()
        self.assertIsNone(decode_feature_file(encode_feature_file(bag, include_ground_truth=False)).ground_truth)

    def test_unicode_id(self):
        bag = self.bag(video_id=u'caf\xe9-漢')
        self.assertBagsEqual(decode_feature_file(encode_feature_file(bag)), bag)

    def test_truncated_payload(self):
        buffer = encode_feature_file(self.bag(n_snippets=6, dim=3, ground_truth=False))
        with self.assertRaises(FeatureFileError) as context:
            decode_feature_file(buffer[:-5])
        message = str(context.exception)
        self.assertIn(u"feature payload", message)
        self.assertIn(u"expected 72 bytes, found 67", message)
        self.assertEqual(context.exception.offset, HEADER_SIZE)

    def test_wrong_magic(self):
        buffer = b'GCNX' + encode_feature_file(self.bag())[len(MAGIC):]
        with self.assertRaises(FeatureFileError) as context:
            decode_feature_file(buffer)
        self.assertIn(u"magic", str(context.exception))
        self.assertEqual(context.exception.offset, 0)

    def test_wrong_magic_short_file(self):
        with self.assertRaises(FeatureFileError) as context:
            decode_feature_file(b'GCNX')
        self.assertIn(u"magic", str(context.exception))

    def test_unsupported_version(self):
        buffer = bytearray(encode_feature_file(self.bag()))
        buffer[4] = 9
        with self.assertRaises(FeatureFileError) as context:
            decode_feature_file(bytes(buffer))
        self.assertEqual(context.exception.offset, 4)

    def test_trailing_bytes(self):
        with self.assertRaises(FeatureFileError):
            decode_feature_file(encode_feature_file(self.bag()) + b'\x00')

    def test_truncated_ground_truth(self):
        with self.assertRaises(FeatureFileError) as context:
            decode_feature_file(encode_feature_file(self.bag())[:-2])
        self.assertIn(u"ground-truth block", str(context.exception))

    def test_one_sided_noise_enforced(self):
        buffer = bytearray(encode_feature_file(self.bag(label=1)))
        buffer[HEADER_SIZE - 9] = 0
        with self.assertRaises(FeatureFileError):
            decode_feature_file(bytes(buffer))


class LoadDatasetTest(FileTestCase):

    def test_sorted_by_name(self):
        for video_id in ('b', 'c', 'a'):
            bag = self.bag(video_id=video_id, label=0)
            save_feature_file(bag, os.path.join(self.workdir, video_id + '.gcnf'))
        with open(os.path.join(self.workdir, 'notes.txt'), 'w') as handle:
            handle.write('ignored')
        self.assertEqual([bag.video_id for bag in load_dataset(self.workdir)], ['a', 'b', 'c'])

    def test_empty_directory(self):
        with self.assertRaises(FeatureFileError):
            load_dataset(self.workdir)

    def test_mixed_widths(self):
        save_feature_file(self.bag(video_id='a', dim=3), os.path.join(self.workdir, 'a.gcnf'))
        save_feature_file(self.bag(video_id='b', dim=4), os.path.join(self.workdir, 'b.gcnf'))
        with self.assertRaises(FeatureFileError):
            load_dataset(self.workdir)


class TensorContainerTest(NumericTestCase):

    def tensors(self):
        return OrderedDict([
            ('matrix', self.rng.standard_normal((3, 2))),
            ('scalar', np.array(1.5)),
            ('empty', np.zeros((0, 4))),
        ])

    def test_decode(self):
        tensors = self.tensors()
        config, decoded = decode_tensor_container(encode_tensor_container({'kind': 'test', 'step': 3}, tensors))
        self.assertEqual(config, {'kind': 'test', 'step': 3})
        self.assertEqual(list(decoded), list(tensors))
        for name, value in tensors.items():
            self.assertEqual(decoded[name].shape, value.shape)
            self.assertEqual(decoded[name].tobytes(), value.tobytes())

    def test_encoding_is_stable(self):
        tensors = self.tensors()
        self.assertEqual(
            encode_tensor_container({'b': 1, 'a': 2}, tensors),
            encode_tensor_container({'a': 2, 'b': 1}, tensors),
        )

    def test_bad_magic(self):
        with self.assertRaises(CheckpointFileError) as context:
            decode_tensor_container(b'GCNF' + encode_tensor_container({}, self.tensors())[4:])
        self.assertEqual(context.exception.offset, 0)
        self.assertIn(u"at byte offset 0", str(context.exception))

    def test_not_a_feature_file_error(self):
        with self.assertRaises(CheckpointFileError) as context:
            decode_tensor_container(b'GCNF')
        self.assertIsInstance(context.exception, FileIOError)
        self.assertNotIsInstance(context.exception, FeatureFileError)

    def test_truncated(self):
        buffer = encode_tensor_container({}, self.tensors())
        with self.assertRaises(CheckpointFileError) as context:
            decode_tensor_container(buffer[:-10])
        self.assertIn(u"Truncated", str(context.exception))

    def test_bad_config_block(self):
        buffer = bytearray(encode_tensor_container({'a': 1}, {}))
        buffer[12] = ord('?')
        with self.assertRaises(CheckpointFileError):
            decode_tensor_container(bytes(buffer))
