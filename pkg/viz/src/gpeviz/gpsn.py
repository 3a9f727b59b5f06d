"""Format-exact reader/writer for GPSN snapshot files.

Layout (little-endian throughout):

    bytes 0-3    magic "GPSN"
    u32          version = 1
    u32          d                      (2 or 3)
    u32[d]       n, points per axis
    f64[d]       L, half box lengths    (domain [-L_j, L_j))
    f64          t, snapshot time
    c128[prod n] amplitudes as (re, im) f64 pairs, row-major, last axis fastest

The writer reproduces any read payload bit-exactly; the solver side owns the
format, this module only mirrors it.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from os import PathLike

import numpy as np

MAGIC = b"GPSN"
VERSION = 1


class GpsnError(ValueError):
    """Malformed GPSN payload: bad magic, version, or truncation."""


@dataclass
class Snapshot:
    t: float
    d: int
    n: tuple[int, ...]
    L: tuple[float, ...]
    data: np.ndarray  # complex128, shape n

    def axis_coordinates(self, axis: int) -> np.ndarray:
        h = 2.0 * self.L[axis] / self.n[axis]
        return -self.L[axis] + h * np.arange(self.n[axis])


def parse(buf: bytes) -> Snapshot:
    if len(buf) < 12:
        raise GpsnError("payload shorter than the fixed header")
    if buf[:4] != MAGIC:
        raise GpsnError(f"bad magic {buf[:4]!r}")
    version, d = struct.unpack_from("<II", buf, 4)
    if version != VERSION:
        raise GpsnError(f"unsupported version {version}")
    if d not in (2, 3):
        raise GpsnError(f"bad dimension {d}")
    off = 12
    if len(buf) < off + d * 12 + 8:
        raise GpsnError("truncated header")
    n = struct.unpack_from(f"<{d}I", buf, off)
    off += 4 * d
    L = struct.unpack_from(f"<{d}d", buf, off)
    off += 8 * d
    (t,) = struct.unpack_from("<d", buf, off)
    off += 8
    count = int(np.prod(n))
    if len(buf) != off + 16 * count:
        raise GpsnError(
            f"truncated payload: expected {off + 16 * count} bytes, got {len(buf)}")
    data = np.frombuffer(buf, dtype="<c16", count=count, offset=off)
    return Snapshot(t=t, d=d, n=tuple(int(v) for v in n),
                    L=tuple(float(v) for v in L),
                    data=data.reshape(n).astype(np.complex128))


def read(source) -> Snapshot:
    if isinstance(source, (bytes, bytearray)):
        return parse(bytes(source))
    if isinstance(source, (str, PathLike)):
        with open(source, "rb") as fh:
            return parse(fh.read())
    return parse(source.read())


def to_bytes(snap: Snapshot) -> bytes:
    head = MAGIC + struct.pack("<II", VERSION, snap.d)
    head += struct.pack(f"<{snap.d}I", *snap.n)
    head += struct.pack(f"<{snap.d}d", *snap.L)
    head += struct.pack("<d", float(snap.t))
    return head + np.ascontiguousarray(snap.data, dtype="<c16").tobytes()
