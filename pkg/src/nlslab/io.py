"""
File formats: NLSF field snapshots and plain CSV tables.

NLSF layout (little-endian, 32-byte header)::

    offset  size  content
    0       4     magic b"NLSF"
    4       2     version (u16, currently 1)
    6       2     dim (u16)
    8       4     n (u32)
    12      4     zero padding (aligns half_width)
    16      8     half_width (f64)
    24      8     reserved, zero
    32      ...   n**dim complex samples, interleaved f64 (re, im), row-major
"""

from __future__ import annotations

import csv
import os
import struct
from typing import Iterable, Sequence

import numpy as np

from .grid import Field, Grid

__all__ = [
    "MAGIC",
    "VERSION",
    "HEADER",
    "SnapshotError",
    "write_snapshot",
    "read_snapshot",
    "read_header",
    "write_csv",
    "format_float",
]

MAGIC = b"NLSF"
VERSION = 1
HEADER = struct.Struct("<4sHHI4xd8x")
assert HEADER.size == 32

_SAMPLE = np.dtype("<c16")


class SnapshotError(ValueError):
    """Malformed or unsupported NLSF file."""


def write_snapshot(path: str | os.PathLike, field: Field) -> None:
    g = field.grid
    header = HEADER.pack(MAGIC, VERSION, g.dim, g.n, g.half_width)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(field.values, dtype=_SAMPLE).tobytes(order="C"))


def _parse_header(raw: bytes) -> dict:
    if len(raw) < HEADER.size:
        raise SnapshotError("file shorter than the 32-byte header")
    magic, version, dim, n, half_width = HEADER.unpack(raw[: HEADER.size])
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported version {version}")
    return {"version": version, "dim": dim, "n": n, "half_width": half_width}


def read_header(path: str | os.PathLike) -> dict:
    with open(path, "rb") as fh:
        return _parse_header(fh.read(HEADER.size))


def read_snapshot(path: str | os.PathLike) -> Field:
    with open(path, "rb") as fh:
        raw = fh.read()
    h = _parse_header(raw)
    try:
        grid = Grid(h["dim"], h["n"], h["half_width"])
    except ValueError as exc:
        raise SnapshotError(f"invalid grid in header: {exc}") from None
    body = raw[HEADER.size :]
    expected = grid.size * _SAMPLE.itemsize
    if len(body) != expected:
        raise SnapshotError(f"payload has {len(body)} bytes, expected {expected}")
    values = np.frombuffer(body, dtype=_SAMPLE).reshape(grid.shape)
    try:
        return Field(grid, values)
    except ValueError as exc:
        raise SnapshotError(str(exc)) from None


def format_float(x: float) -> str:
    return "%.17g" % x


def write_csv(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows with floats at full round-trip precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    return str(v)
