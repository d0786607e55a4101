"""Binary field snapshots and versioned CSV output.

Snapshot format: magic ``PHI4FLD1`` (8 bytes), little-endian u32 dimension,
u32 points per axis, u64 payload count n^d, then float64 physical values in
row-major order.  Reads invert writes bit-exactly.

CSV files start with the version header line ``# phi4 csv v1 <columns>``,
optionally followed by ``# meta key=value`` lines, then the data rows.
"""

from __future__ import annotations

import struct

import numpy as np

from .grid import Field, make_grid

__all__ = [
    "MAGIC",
    "CSV_VERSION",
    "write_field_snapshot",
    "read_field_snapshot",
    "write_csv",
]

MAGIC = b"PHI4FLD1"
CSV_VERSION = "phi4 csv v1"


class SnapshotError(IOError):
    pass


def write_field_snapshot(f: Field, path: str) -> None:
    """Write a field to the binary snapshot format."""
    grid = f.grid
    payload = np.ascontiguousarray(f.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIQ", grid.d, grid.n, grid.size))
        fh.write(payload.tobytes(order="C"))


def read_field_snapshot(path: str) -> Field:
    """Read a field back; raises SnapshotError on bad magic or truncation."""
    with open(path, "rb") as fh:
        head = fh.read(8)
        if head != MAGIC:
            raise SnapshotError(f"{path}: bad magic {head!r}")
        meta = fh.read(16)
        if len(meta) != 16:
            raise SnapshotError(f"{path}: truncated header")
        d, n, count = struct.unpack("<IIQ", meta)
        if d < 1 or d > 3 or count != n**d:
            raise SnapshotError(f"{path}: inconsistent dimensions d={d} n={n} count={count}")
        raw = fh.read(8 * count)
        if len(raw) != 8 * count:
            raise SnapshotError(f"{path}: truncated payload")
        extra = fh.read(1)
        if extra:
            raise SnapshotError(f"{path}: trailing bytes after payload")
    grid = make_grid(d, n)
    values = np.frombuffer(raw, dtype="<f8").reshape(grid.shape)
    return Field(grid, values=values)


def _format_cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def write_csv(path: str, columns, rows, meta: dict | None = None) -> None:
    """Write a versioned CSV file with deterministic float formatting."""
    lines = [f"# {CSV_VERSION} {','.join(columns)}"]
    for key in sorted(meta or {}):
        lines.append(f"# meta {key}={_format_cell((meta or {})[key])}")
    for row in rows:
        lines.append(",".join(_format_cell(c) for c in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
