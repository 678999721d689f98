"""
Feature files: one externally extracted (or synthetic) video per file.

Layout (integers little-endian):

    magic "GCNF"
    format version                  u32
    video id                        u32 length + UTF-8 bytes
    video label Y                   u8
    snippet count N                 u32
    feature dimension d             u32
    features                        N * d float32, row-major
    optional ground truth           marker byte 0x01, then N bytes of 0/1

Ground truth is only for evaluation.  Training code never reads it.
"""
import glob
import logging
import os

import numpy as np

from noisecleaner.errors import DatasetError
from noisecleaner.video import VideoBag, check_dataset

from .binary import F32, U8, ByteReader, pack_string, pack_u32
from .exceptions import FeatureFileError

logger = logging.getLogger(__name__)

MAGIC = b'GCNF'
VERSION = 1
GROUND_TRUTH_MARKER = 1
EXTENSION = '.gcnf'


def encode_feature_file(bag, include_ground_truth=True):
    chunks = [
        MAGIC,
        pack_u32(VERSION),
        pack_string(bag.video_id),
        np.array([bag.label], dtype=U8).tobytes(),
        pack_u32(bag.n_snippets, bag.feature_dim),
        np.ascontiguousarray(bag.features, dtype=F32).tobytes(),
    ]
    if include_ground_truth and bag.ground_truth is not None:
        chunks.append(np.array([GROUND_TRUTH_MARKER], dtype=U8).tobytes())
        chunks.append(np.asarray(bag.ground_truth, dtype=U8).tobytes())
    return b''.join(chunks)


def decode_feature_file(buffer):
    """
    Parse the bytes of a feature file.

    Raises:
        FeatureFileError: Bad magic, unsupported version, truncation,
            trailing bytes or labels that break the one-sided noise rules.
            The message carries the byte offset of the failure.

    """
    reader = ByteReader(buffer, FeatureFileError)
    magic = reader.take(len(MAGIC), u"magic")
    if magic != MAGIC:
        reader.fail(u"Bad feature file magic {!r}, expected {!r}".format(magic, MAGIC), offset=0)
    version = reader.u32(u"format version")
    if version != VERSION:
        reader.fail(u"Unsupported feature file version {}".format(version), offset=len(MAGIC))

    video_id = reader.string(u"video id")
    label = reader.u8(u"video label")
    n_snippets = reader.u32(u"snippet count")
    feature_dim = reader.u32(u"feature dimension")
    features = reader.array(F32, n_snippets * feature_dim, u"feature payload")
    features = features.reshape(n_snippets, feature_dim).astype(np.float64)

    ground_truth = None
    if reader.remaining:
        start = reader.offset
        marker = reader.u8(u"ground-truth marker")
        if marker != GROUND_TRUTH_MARKER:
            reader.fail(u"Unknown block marker {}".format(marker), offset=start)
        ground_truth = reader.array(U8, n_snippets, u"ground-truth block").copy()
    if reader.remaining:
        reader.fail(u"{} unexpected trailing bytes".format(reader.remaining))

    try:
        return VideoBag(video_id=video_id, label=label, features=features, ground_truth=ground_truth)
    except DatasetError as ex:
        raise FeatureFileError(u"Invalid video '{}': {}".format(video_id, ex))


def save_feature_file(bag, path, include_ground_truth=True):
    """
    Write `bag` to `path`; features are stored as float32.
    """
    with open(path, 'wb') as handle:
        handle.write(encode_feature_file(bag, include_ground_truth=include_ground_truth))


def load_feature_file(path):
    """
    Read one video bag.

    Returns:
        VideoBag, with ground truth attached only when the file has a
        ground-truth block.

    Raises:
        FeatureFileError

    """
    with open(path, 'rb') as handle:
        buffer = handle.read()
    try:
        return decode_feature_file(buffer)
    except FeatureFileError:
        logger.warning(u"Could not parse feature file {}".format(path))
        raise


def load_dataset(directory):
    """
    Load every `*.gcnf` file under `directory`, sorted by file name.

    Raises:
        FeatureFileError: A file is malformed, or the files do not form one
            dataset (no files, duplicate ids, mixed feature widths).

    """
    paths = sorted(glob.glob(os.path.join(directory, '*' + EXTENSION)))
    dataset = [load_feature_file(path) for path in paths]
    try:
        check_dataset(dataset)
    except DatasetError as ex:
        raise FeatureFileError(u"{}: {}".format(directory, ex))
    logger.info(u"Loaded {} videos from {}".format(len(dataset), directory))
    return dataset
