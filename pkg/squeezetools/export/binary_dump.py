"""Binary dumps of Green tables and moment kernels.

Layout (all little-endian):

    offset  size  field
    0       8     magic b"SQZDUMP\\0"
    8       4     uint32 layout version (1)
    12      4     uint32 kind (1 = green table G11/G12, 2 = kernels N/M)
    16      4     uint32 n_points
    20      4     uint32 array count
    24      8     float64 t_start [s]
    32      8     float64 t_end [s]
    40      ...   arrays, each n_points x n_points row-major (re, im) float64 pairs

For kind 1 entry [j, k] holds G(t_j, t_k) for j >= k and zero above the diagonal.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from squeezetools.core.errors import ConfigError
from squeezetools.core.models import GreenTable, MomentKernels, TimeGrid

MAGIC = b"SQZDUMP\x00"
LAYOUT_VERSION = 1
KIND_GREEN = 1
KIND_KERNELS = 2
_HEADER = struct.Struct("<8sIIIIdd")


def _write(path: Path, kind: int, grid: TimeGrid, arrays: list[np.ndarray]):
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, LAYOUT_VERSION, kind, grid.n_points, len(arrays),
                             grid.t_start, grid.t_end))
        for array in arrays:
            f.write(np.ascontiguousarray(array, dtype="<c16").tobytes(order="C"))


def dump_green(green: GreenTable, path: Path):
    _write(path, KIND_GREEN, green.grid, [green.g11, green.g12])


def dump_kernels(kernels: MomentKernels, grid: TimeGrid, path: Path):
    _write(path, KIND_KERNELS, grid, [kernels.kernel_n, kernels.kernel_m])


def read_dump(path: Path) -> tuple[int, TimeGrid, list[np.ndarray]]:
    """(kind, grid, arrays) of a dump file."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ConfigError(f"{path}: truncated dump header")
    magic, version, kind, n, count, t_start, t_end = _HEADER.unpack_from(data, 0)
    if magic != MAGIC or version != LAYOUT_VERSION:
        raise ConfigError(f"{path}: not a squeezetools dump (layout {version})")
    size = n * n * 16
    if len(data) != _HEADER.size + count * size:
        raise ConfigError(f"{path}: expected {count} arrays of {n}x{n}")
    arrays = [
        np.frombuffer(data, dtype="<c16", count=n * n, offset=_HEADER.size + i * size)
        .reshape(n, n).astype(complex)
        for i in range(count)
    ]
    return kind, TimeGrid(t_start, t_end, n), arrays
