"""Binary container for spectral snapshots.

Layout (all little-endian), documented in docs/formats.md:

    magic   4 bytes   b"SMHD"
    version u32       1
    n_x     u32
    n_y     u32
    L_y     f64
    t       f64
    len     u32       label byte length
    label   len bytes utf-8
    data    n_x*n_y complex64 values (f32 real, f32 imag pairs),
            row-major over (k index, eta index) in FFT order

Coefficients are stored at single precision; a write/read round trip is
exact to float32 resolution.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ConfigError
from .grid import Grid, SpectralField, make_grid

MAGIC = b"SMHD"
VERSION = 1


def write_snapshot(path, f: SpectralField, t: float) -> None:
    label = f.label.encode("utf-8")
    header = MAGIC + struct.pack(
        "<IIIddI", VERSION, f.grid.n_x, f.grid.n_y, f.grid.L_y, float(t), len(label))
    data = f.coeffs.astype("<c8").tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(label)
        fh.write(data)


def read_snapshot(path, grid: Grid | None = None) -> tuple[SpectralField, float]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ConfigError(f"{path}: not a spectral snapshot (magic {magic!r})")
        version, n_x, n_y, L_y, t, label_len = struct.unpack("<IIIddI", fh.read(32))
        if version != VERSION:
            raise ConfigError(f"{path}: unsupported snapshot version {version}")
        label = fh.read(label_len).decode("utf-8")
        raw = fh.read(n_x * n_y * 8)
    coeffs = np.frombuffer(raw, dtype="<c8").reshape(n_x, n_y).astype(np.complex128)
    if grid is None:
        grid = make_grid(n_x, n_y, L_y)
    elif (grid.n_x, grid.n_y) != (n_x, n_y) or abs(grid.L_y - L_y) > 1e-12:
        raise ConfigError(f"{path}: snapshot grid {n_x}x{n_y} does not match supplied grid")
    return SpectralField(grid, coeffs, label), t
