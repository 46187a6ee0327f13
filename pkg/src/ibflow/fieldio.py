"""Field snapshot files and CSV emitters.

Snapshot format (shared repo-wide): a text header line
    IBFLOW n1 n2 h <count>
followed by <count> named channels.  Each channel is a name line followed by
n1*n2 little-endian float64 values in row-major (i fastest along x1) order.
"""

from __future__ import annotations

import io
import os

import numpy as np

from .grid import GridSpec, ScalarField

MAGIC = "IBFLOW"


def write_snapshot(path, spec: GridSpec, channels: dict[str, np.ndarray]) -> None:
    """Write named scalar channels to a snapshot file."""
    for name, arr in channels.items():
        if arr.shape != spec.shape:
            raise ValueError(f"channel {name!r} has shape {arr.shape}, grid is {spec.shape}")
        if "\n" in name or " " in name:
            raise ValueError(f"channel name {name!r} may not contain spaces or newlines")
    with open(path, "wb") as fh:
        fh.write(f"{MAGIC} {spec.n1} {spec.n2} {spec.h!r} {len(channels)}\n".encode())
        for name, arr in channels.items():
            fh.write(f"{name}\n".encode())
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_snapshot(path) -> tuple[GridSpec, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        header = fh.readline().decode().split()
        if len(header) != 5 or header[0] != MAGIC:
            raise ValueError(f"{path}: not an {MAGIC} snapshot file")
        n1, n2 = int(header[1]), int(header[2])
        h = float(header[3])
        count = int(header[4])
        spec = GridSpec(n1=n1, n2=n2, h=h)
        channels = {}
        for _ in range(count):
            name = fh.readline().decode().rstrip("\n")
            raw = fh.read(n1 * n2 * 8)
            if len(raw) != n1 * n2 * 8:
                raise ValueError(f"{path}: truncated channel {name!r}")
            channels[name] = np.frombuffer(raw, dtype="<f8").reshape(n1, n2).copy()
    return spec, channels


def field_to_csv(f: ScalarField) -> str:
    """One row per j, columns over i; for desk-scale inspection."""
    buf = io.StringIO()
    for j in range(f.spec.n2):
        buf.write(",".join(f"{v:.16e}" for v in f.values[:, j]))
        buf.write("\n")
    return buf.getvalue()


def write_atomic(path, data: str | bytes) -> None:
    """Write via a temp file and rename, so readers never see partial content."""
    mode = "wb" if isinstance(data, bytes) else "w"
    tmp = f"{path}.tmp"
    with open(tmp, mode) as fh:
        fh.write(data)
    os.replace(tmp, path)
