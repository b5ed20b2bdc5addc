"""Netpbm graymap (PGM) reading and writing.

Plain (``P2``) and raw (``P5``) variants are supported.  Samples map
linearly to ``[0, 1]`` by dividing by ``maxval``.  Raw files with
``maxval > 255`` store big-endian 16-bit samples.
"""

import numpy as np

from .errors import ArgumentError, PgmParseError
from .grid_ops import Image

__all__ = ["parse_pgm", "encode_pgm", "read_pgm", "write_pgm"]

_WHITESPACE = b" \t\n\r\v\f"


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def skip_space(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos:self.pos + 1]
            if c == b"#":
                while self.pos < len(data) and data[self.pos:self.pos + 1] not in b"\r\n":
                    self.pos += 1
            elif c in _WHITESPACE:
                self.pos += 1
            else:
                return

    def token(self):
        self.skip_space()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos:self.pos + 1] not in _WHITESPACE \
                and self.data[self.pos:self.pos + 1] != b"#":
            self.pos += 1
        if start == self.pos:
            raise PgmParseError("unexpected end of data", start)
        return self.data[start:self.pos], start

    def integer(self, what):
        tok, start = self.token()
        if not tok.isdigit():
            raise PgmParseError(f"expected {what}, found {tok[:16]!r}", start)
        return int(tok)


def parse_pgm(data):
    """Decode PGM bytes into ``(width, height, maxval, samples)``.

    ``samples`` is an integer array of shape ``(height, width)``.
    """
    rd = _Reader(bytes(data))
    magic = rd.data[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmParseError(f"unsupported magic number {magic!r}", 0)
    rd.pos = 2
    width = rd.integer("width")
    height = rd.integer("height")
    rd.skip_space()
    maxval_pos = rd.pos
    maxval = rd.integer("maxval")
    if width < 1 or height < 1:
        raise PgmParseError(f"invalid size {width}x{height}", maxval_pos)
    if not 0 < maxval <= 65535:
        raise PgmParseError(f"maxval {maxval} outside 1..65535", maxval_pos)
    count = width * height

    if magic == b"P5":
        if rd.pos >= len(rd.data) or rd.data[rd.pos:rd.pos + 1] not in _WHITESPACE:
            raise PgmParseError("missing whitespace after maxval", rd.pos)
        start = rd.pos + 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        end = start + count * dtype.itemsize
        if end > len(rd.data):
            raise PgmParseError(
                f"truncated raster: need {count * dtype.itemsize} bytes, have "
                f"{len(rd.data) - start}", len(rd.data))
        samples = np.frombuffer(rd.data[start:end], dtype=dtype).astype(np.int64)
        bad = np.flatnonzero(samples > maxval)
        if bad.size:
            raise PgmParseError(f"sample {samples[bad[0]]} exceeds maxval {maxval}",
                                start + int(bad[0]) * dtype.itemsize)
    else:
        values = []
        for _ in range(count):
            try:
                tok, pos = rd.token()
            except PgmParseError as exc:
                raise PgmParseError(
                    f"truncated raster: {len(values)} of {count} samples", exc.offset) from None
            if not tok.isdigit():
                raise PgmParseError(f"bad sample {tok[:16]!r}", pos)
            v = int(tok)
            if v > maxval:
                raise PgmParseError(f"sample {v} exceeds maxval {maxval}", pos)
            values.append(v)
        samples = np.array(values, dtype=np.int64)
    return width, height, maxval, samples.reshape(height, width)


def encode_pgm(image, maxval=255, binary=True):
    """Encode an :class:`Image` as PGM bytes.

    Values are clamped to ``[0, 1]`` and rounded to the nearest of
    ``maxval + 1`` levels.
    """
    if not 0 < maxval <= 65535:
        raise ArgumentError(f"maxval {maxval} outside 1..65535")
    levels = np.rint(np.clip(image.data, 0.0, 1.0) * maxval).astype(np.int64)
    header = b"%s\n%d %d\n%d\n" % (b"P5" if binary else b"P2", image.width, image.height,
                                   maxval)
    if binary:
        dtype = ">u2" if maxval > 255 else "u1"
        return header + levels.astype(dtype).tobytes()
    rows = levels.reshape(image.height, image.width)
    body = "\n".join(" ".join(str(v) for v in row) for row in rows)
    return header + body.encode("ascii") + b"\n"


def read_pgm(path):
    """Read a PGM file into an :class:`Image` with samples in ``[0, 1]``."""
    with open(path, "rb") as fh:
        width, height, maxval, samples = parse_pgm(fh.read())
    return Image(width, height, samples.reshape(-1) / maxval)


def write_pgm(path, image, maxval=255, binary=True):
    with open(path, "wb") as fh:
        fh.write(encode_pgm(image, maxval, binary))
