"""Binary spectral-field dumps and trajectory export.

File layout (little-endian throughout):

    bytes 0-3   magic "MHD2"
    u32         version (1)
    u32         nx
    u32         ny
    f64         Lx
    f64         Ly
    nx*ny       complex coefficients as interleaved f64 (re, im),
                flattened with kx fastest (flat index = iy*nx + ix),
                wavenumbers in natural FFT order per axis.

The loader validates magic, version and payload size.
"""

import os
import struct

import numpy as np

from .spectral import Grid2D, SpectralField

MAGIC = b"MHD2"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdd")


def write_field(path, field):
    """Dump one spectral field; see module docstring for the layout."""
    g = field.grid
    payload = np.ascontiguousarray(field.coeffs.T).astype("<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, g.nx, g.ny, g.Lx, g.Ly))
        fh.write(payload)


def read_field(path):
    """Load a spectral field dumped by write_field."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, nx, ny, Lx, Ly = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        data = fh.read()
    expected = nx * ny * 16
    if len(data) != expected:
        raise ValueError(f"{path}: payload has {len(data)} bytes, expected {expected}")
    coeffs = np.frombuffer(data, dtype="<c16").reshape(ny, nx).T
    return SpectralField(Grid2D(nx, ny, Lx, Ly), coeffs.astype(complex))


def fmt(x):
    """Shortest round-trip decimal for CSV cells (bit-stable output)."""
    return repr(float(x))


def export_trajectory(traj, out_dir):
    """Write per-snapshot field dumps plus an index CSV (time, filenames)."""
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    # File suffixes avoid case-only collisions: b -> bx, B -> by.
    suffix = {"u": "u", "v": "v", "b": "bx", "B": "by"}
    for i, (t, state) in enumerate(zip(traj.times, traj.states)):
        names = {}
        for comp in ("u", "v", "b", "B"):
            fname = f"snap{i:04d}_{suffix[comp]}.mhd2"
            write_field(os.path.join(out_dir, fname), state.field(comp))
            names[comp] = fname
        rows.append((t, names))
    index_path = os.path.join(out_dir, "index.csv")
    with open(index_path, "w", newline="") as fh:
        fh.write("time,u,v,bx,by\n")
        for t, names in rows:
            fh.write(f"{fmt(t)},{names['u']},{names['v']},{names['b']},{names['B']}\n")
    return index_path
