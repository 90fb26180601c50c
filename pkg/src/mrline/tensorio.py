"""Bit-exact binary format for complex (M, N, J) tensors.

Layout, all little-endian:

    bytes 0..3   magic "CPLX"
    byte  4      version (1)
    byte  5      ndim (3)
    bytes 6..29  dims, 3 x u64
    payload      row-major interleaved float32 pairs (re, im)

The fixed endianness and float32 payload make round trips bit-exact across
platforms. Reads never return a partial tensor: any truncation or header
mismatch raises :class:`TensorFormatError`.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"CPLX"
VERSION = 1
_HEADER = struct.Struct("<4sBB3Q")

# Payload size guard: 2^31 complex elements (16 GiB header claim) is already
# far beyond anything this package produces.
MAX_ELEMENTS = 2**31


class TensorFormatError(ValueError):
    pass


def tensor_to_bytes(t: np.ndarray) -> bytes:
    t = np.asarray(t)
    if t.ndim != 3:
        raise TensorFormatError(f"only 3-d tensors are stored, got ndim={t.ndim}")
    m, n, j = t.shape
    header = _HEADER.pack(MAGIC, VERSION, 3, m, n, j)
    payload = np.ascontiguousarray(t, dtype=np.complex64)
    return header + payload.astype("<c8", copy=False).tobytes()


def tensor_from_bytes(data: bytes) -> np.ndarray:
    if len(data) < _HEADER.size:
        raise TensorFormatError("unexpected EOF in header")
    magic, version, ndim, m, n, j = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise TensorFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise TensorFormatError(f"unsupported version {version}")
    if ndim != 3:
        raise TensorFormatError(f"unsupported ndim {ndim}")
    count = m * n * j
    if min(m, n, j) < 1 or count > MAX_ELEMENTS:
        raise TensorFormatError(f"dim overflow: {(m, n, j)}")
    expected = _HEADER.size + 8 * count
    if len(data) < expected:
        raise TensorFormatError(f"unexpected EOF: want {expected} bytes, have {len(data)}")
    if len(data) > expected:
        raise TensorFormatError(f"trailing bytes: want {expected} bytes, have {len(data)}")
    flat = np.frombuffer(data, dtype="<c8", count=count, offset=_HEADER.size)
    return flat.reshape(m, n, j).astype(np.complex128)


def write_tensor(path: str | Path, t: np.ndarray) -> None:
    Path(path).write_bytes(tensor_to_bytes(t))


def read_tensor(path: str | Path) -> np.ndarray:
    return tensor_from_bytes(Path(path).read_bytes())
