"""Time-series CSV and GPSN binary snapshot serialization.

CSV: header exactly ``t,mass,energy,mu,lz,sigma_norm,diss_rate,mass_drift``,
every value at full double precision (17 significant digits) so golden-file
comparisons are not laundered by formatting.

GPSN snapshot layout (all little-endian):

    bytes 0-3   magic "GPSN"
    u32         version = 1
    u32         d
    u32[d]      n, points per axis
    f64[d]      L, half box lengths
    f64         t, snapshot time
    c128[prod n] amplitudes as (re, im) f64 pairs, row-major, last axis fastest

write followed by read is a bit-exact identity.
"""

from __future__ import annotations

import struct
from os import PathLike
from typing import Iterable

import numpy as np

from .functionals import DiagRecord
from .grid import PHYSICAL, ComplexField, make_grid

MAGIC = b"GPSN"
VERSION = 1
CSV_HEADER = "t,mass,energy,mu,lz,sigma_norm,diss_rate,mass_drift"


class SnapshotFormatError(ValueError):
    """Malformed GPSN payload: bad magic, version, or truncation."""


def format_timeseries(records: Iterable[DiagRecord]) -> str:
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(",".join(f"{v:.17g}" for v in rec.as_tuple()))
    return "\n".join(lines) + "\n"


def write_timeseries(records: Iterable[DiagRecord], path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_timeseries(records))


def read_timeseries(path) -> list[DiagRecord]:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"bad CSV header in {path}")
    out = []
    for ln in lines[1:]:
        vals = [float(v) for v in ln.split(",")]
        if len(vals) != 8:
            raise ValueError(f"bad CSV row in {path}: {ln!r}")
        out.append(DiagRecord(*vals))
    return out


def snapshot_bytes(f: ComplexField, t: float) -> bytes:
    """Serialize one field to the GPSN layout."""
    if f.space != PHYSICAL:
        raise ValueError("snapshots store physical-space fields")
    g = f.grid
    head = MAGIC + struct.pack("<II", VERSION, g.d)
    head += struct.pack(f"<{g.d}I", *g.n)
    head += struct.pack(f"<{g.d}d", *g.L)
    head += struct.pack("<d", float(t))
    payload = np.ascontiguousarray(f.data, dtype="<c16").tobytes()
    return head + payload


def write_snapshot(f: ComplexField, t: float, path) -> None:
    with open(path, "wb") as fh:
        fh.write(snapshot_bytes(f, t))


def parse_snapshot(buf: bytes) -> tuple[float, ComplexField]:
    """Decode a GPSN payload to (t, field)."""
    if len(buf) < 12:
        raise SnapshotFormatError("payload shorter than the fixed header")
    if buf[:4] != MAGIC:
        raise SnapshotFormatError(f"bad magic {buf[:4]!r}")
    version, d = struct.unpack_from("<II", buf, 4)
    if version != VERSION:
        raise SnapshotFormatError(f"unsupported version {version}")
    if d not in (2, 3):
        raise SnapshotFormatError(f"bad dimension {d}")
    off = 12
    need = d * 4 + d * 8 + 8
    if len(buf) < off + need:
        raise SnapshotFormatError("truncated header")
    n = struct.unpack_from(f"<{d}I", buf, off)
    off += d * 4
    L = struct.unpack_from(f"<{d}d", buf, off)
    off += d * 8
    (t,) = struct.unpack_from("<d", buf, off)
    off += 8
    count = int(np.prod(n))
    if len(buf) != off + 16 * count:
        raise SnapshotFormatError(
            f"truncated payload: expected {off + 16 * count} bytes, got {len(buf)}")
    data = np.frombuffer(buf, dtype="<c16", count=count, offset=off)
    grid = make_grid(d, n, L)
    return t, ComplexField(grid, data.reshape(grid.shape).astype(np.complex128), PHYSICAL)


def read_snapshot(source) -> tuple[float, ComplexField]:
    """Read a GPSN snapshot from a path, bytes, or binary file object."""
    if isinstance(source, (bytes, bytearray)):
        return parse_snapshot(bytes(source))
    if isinstance(source, (str, PathLike)):
        with open(source, "rb") as fh:
            return parse_snapshot(fh.read())
    return parse_snapshot(source.read())
