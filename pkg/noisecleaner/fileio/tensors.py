"""
Binary tensor container used for cleaner and classifier checkpoints.

Layout (all integers u32 little-endian):

    magic "GCNC"
    format version
    config block: length, UTF-8 JSON
    tensor count
    per tensor: name length, UTF-8 name, rank, dims..., row-major float64 LE data
"""
from collections import OrderedDict
import json
import logging

import numpy as np

from .binary import F64, ByteReader, pack_string, pack_u32
from .exceptions import CheckpointFileError

logger = logging.getLogger(__name__)

MAGIC = b'GCNC'
VERSION = 1


def encode_tensor_container(config, tensors):
    """
    Serialize a JSON-compatible `config` and an ordered mapping of arrays to bytes.
    """
    chunks = [MAGIC, pack_u32(VERSION), pack_string(json.dumps(config, sort_keys=True)), pack_u32(len(tensors))]
    for name, value in tensors.items():
        value = np.ascontiguousarray(value, dtype=F64)
        chunks.append(pack_string(name))
        chunks.append(pack_u32(value.ndim, *value.shape))
        chunks.append(value.tobytes())
    return b''.join(chunks)


def decode_tensor_container(buffer):
    """
    Parse bytes produced by `encode_tensor_container`.

    Returns:
        tuple of (dict config, OrderedDict of name -> numpy.ndarray)

    Raises:
        CheckpointFileError: Bad magic, unsupported version, malformed
            config block or truncated data.

    """
    reader = ByteReader(buffer, CheckpointFileError)
    magic = reader.take(len(MAGIC), u"magic")
    if magic != MAGIC:
        reader.fail(u"Bad checkpoint magic {!r}, expected {!r}".format(magic, MAGIC), offset=0)
    version = reader.u32(u"format version")
    if version != VERSION:
        reader.fail(u"Unsupported checkpoint version {}".format(version), offset=len(MAGIC))

    start = reader.offset
    try:
        config = json.loads(reader.string(u"config block"))
    except ValueError:
        reader.fail(u"Config block is not valid JSON", offset=start)

    tensors = OrderedDict()
    for __ in range(reader.u32(u"tensor count")):
        name = reader.string(u"tensor name")
        rank = reader.u32(u"rank of '{}'".format(name))
        dims = tuple(int(dim) for dim in reader.array(np.dtype('<u4'), rank, u"dims of '{}'".format(name)))
        count = int(np.prod(dims)) if dims else 1
        tensors[name] = reader.array(F64, count, u"data of '{}'".format(name)).reshape(dims).copy()

    if reader.remaining:
        logger.warning(u"Ignoring {} trailing bytes in checkpoint".format(reader.remaining))
    return config, tensors


def write_tensor_container(path, config, tensors):
    with open(path, 'wb') as handle:
        handle.write(encode_tensor_container(config, tensors))


def read_tensor_container(path):
    with open(path, 'rb') as handle:
        return decode_tensor_container(handle.read())
