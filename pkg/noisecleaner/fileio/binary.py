"""
Little-endian primitives shared by the feature-file and tensor-container formats.
"""
import numpy as np

U8 = np.dtype('<u1')
U32 = np.dtype('<u4')
F32 = np.dtype('<f4')
F64 = np.dtype('<f8')


def pack_u32(*values):
    return np.array(values, dtype=U32).tobytes()


def pack_string(text):
    encoded = text.encode('utf-8')
    return pack_u32(len(encoded)) + encoded


class ByteReader(object):
    """
    Sequential reader over an in-memory buffer that reports byte offsets.

    Every short read raises `error_class` naming what was being read, how
    many bytes were expected and how many remained.
    """

    def __init__(self, buffer, error_class):
        self.buffer = buffer
        self.offset = 0
        self.error_class = error_class

    @property
    def remaining(self):
        return len(self.buffer) - self.offset

    def fail(self, message, offset=None):
        raise self.error_class(message, offset=self.offset if offset is None else offset)

    def take(self, size, what):
        if size > self.remaining:
            self.fail(u"Truncated {what}: expected {expected} bytes, found {actual}".format(
                what=what, expected=size, actual=self.remaining
            ))
        chunk = self.buffer[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def array(self, dtype, count, what):
        return np.frombuffer(self.take(dtype.itemsize * count, what), dtype=dtype, count=count)

    def u8(self, what):
        return int(self.array(U8, 1, what)[0])

    def u32(self, what):
        return int(self.array(U32, 1, what)[0])

    def string(self, what):
        length = self.u32(u"{} length".format(what))
        start = self.offset
        raw = self.take(length, what)
        try:
            return raw.decode('utf-8')
        except UnicodeDecodeError:
            self.fail(u"{} is not valid UTF-8".format(what), offset=start)
