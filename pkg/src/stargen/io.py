"""Field files and tables.

Binary layout (little endian): magic ``SGF1``, ``u32 n_x``, ``u32 n_p``,
``f64 hbar, x_min, x_max, p_min, p_max``, then ``n_x * n_p`` row-major
``(re, im)`` pairs.  Wave fields are stored with ``n_p = 0`` and ``n_x``
pairs.  Bounds are the half-open lattice bounds used by ``SpatialGrid``.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ConfigurationError
from .grids import PhaseField, PhaseGrid, SpatialGrid, WaveField

MAGIC = b"SGF1"
_HEADER = struct.Struct("<4sIIddddd")

Field = Union[PhaseField, WaveField]


def write_field(path: Union[str, Path], field: Field, hbar: float | None = None) -> None:
    if isinstance(field, PhaseField):
        g = field.grid
        head = _HEADER.pack(MAGIC, g.x_axis.n_points, g.p_axis.n_points, g.hbar,
                            g.x_axis.x_min, g.x_axis.x_max, g.p_axis.x_min, g.p_axis.x_max)
    else:
        g = field.grid
        head = _HEADER.pack(MAGIC, g.n_points, 0, 1.0 if hbar is None else hbar,
                            g.x_min, g.x_max, 0.0, 0.0)
    body = np.ascontiguousarray(field.values, dtype="<c16").tobytes()
    Path(path).write_bytes(head + body)


def read_field(path: Union[str, Path]) -> Field:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ConfigurationError(f"{path}: file too short for a field header")
    magic, nx, np_, hbar, x0, x1, p0, p1 = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ConfigurationError(f"{path}: bad magic {magic!r}")
    count = nx * max(np_, 1)
    if len(data) != _HEADER.size + 16 * count:
        raise ConfigurationError(f"{path}: expected {count} complex samples")
    vals = np.frombuffer(data, dtype="<c16", offset=_HEADER.size).astype(complex)
    xg = SpatialGrid(x0, x1, nx)
    if np_ == 0:
        return WaveField(xg, vals)
    grid = PhaseGrid(xg, SpatialGrid(p0, p1, np_), hbar)
    return PhaseField(grid, vals.reshape(nx, np_))


def write_field_csv(path: Union[str, Path], field: PhaseField) -> None:
    """Columns ``x, p, re, im`` at full double precision."""
    X, P = field.grid.mesh()
    v = field.values
    with open(path, "w", newline="") as fh:
        fh.write("x,p,re,im\n")
        for x, p, z in zip(X.ravel(), P.ravel(), v.ravel()):
            fh.write(f"{x:.17g},{p:.17g},{z.real:.17g},{z.imag:.17g}\n")


def write_table(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


def write_json(path: Union[str, Path], payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
