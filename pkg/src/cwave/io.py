"""Binary snapshot files, raw model ingestion, and delimited outputs.

Snapshot format: the 8-byte magic ``CWAVSNAP``, an 8-byte little-endian
unsigned length, that many bytes of UTF-8 JSON metadata, then the full-grid
payload as little-endian float64 in x-fastest order.  The metadata records
t, step, dims, interior_counts, spacing and origin, which is enough to
rebuild the grid.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import CartesianGrid, MediaModel, ScalarField

SNAPSHOT_MAGIC = b"CWAVSNAP"

_DTYPES = {"f32": "<f4", "f64": "<f8"}


@dataclass
class SnapshotFrame:
    """One saved wavefield level with enough metadata to interpret it."""

    t: float
    step: int
    field: ScalarField

    @property
    def meta(self) -> dict:
        grid = self.field.grid
        return {
            "t": self.t,
            "step": self.step,
            "dims": grid.dims,
            "interior_counts": list(grid.interior_counts),
            "spacing": list(grid.spacings),
            "origin": list(grid.mins),
            "extent": list(grid.maxs),
        }


def write_snapshot(frame: SnapshotFrame, path) -> None:
    meta = json.dumps(frame.meta).encode("utf-8")
    payload = np.ascontiguousarray(frame.field.values, dtype="<f8")
    with open(path, "wb") as f:
        f.write(SNAPSHOT_MAGIC)
        f.write(struct.pack("<Q", len(meta)))
        f.write(meta)
        f.write(payload.tobytes())


def read_snapshot(path) -> SnapshotFrame:
    with open(path, "rb") as f:
        magic = f.read(len(SNAPSHOT_MAGIC))
        if magic != SNAPSHOT_MAGIC:
            raise ValueError("not a snapshot file")
        raw_len = f.read(8)
        if len(raw_len) != 8:
            raise ValueError("corrupt snapshot: truncated header")
        (meta_len,) = struct.unpack("<Q", raw_len)
        raw_meta = f.read(meta_len)
        if len(raw_meta) != meta_len:
            raise ValueError("corrupt snapshot: truncated metadata")
        try:
            meta = json.loads(raw_meta.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValueError("corrupt snapshot: bad metadata") from exc
        grid = _grid_from_meta(meta)
        count = int(np.prod(grid.full_counts))
        payload = f.read(count * 8)
        if len(payload) != count * 8:
            raise ValueError("corrupt snapshot: truncated payload")
        values = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(grid.shape)
    return SnapshotFrame(t=float(meta["t"]), step=int(meta["step"]),
                         field=ScalarField(grid, values))


def _grid_from_meta(meta: dict) -> CartesianGrid:
    try:
        counts = [int(n) for n in meta["interior_counts"]]
        spacing = [float(s) for s in meta["spacing"]]
        origin = [float(o) for o in meta["origin"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("corrupt snapshot: bad metadata") from exc
    mins = tuple(origin)
    maxs = tuple(o + (n + 1) * h for o, n, h in zip(origin, counts, spacing))
    return CartesianGrid(mins, maxs, tuple(counts), tuple(spacing))


def load_model(rho_path, c_path, meta_path) -> MediaModel:
    """Read a media model from two raw arrays plus a JSON descriptor.

    The descriptor gives the stored (boundary-inclusive) counts nx, ny and
    optionally nz, per-axis spacing ``h``, ``origin``, the payload ``dtype``
    ("f32" or "f64", little-endian) and ``order`` ("x-fastest").  32-bit
    payloads are widened to 64-bit.
    """
    with open(meta_path, "r", encoding="utf-8") as f:
        meta = json.load(f)
    counts = [int(meta["nx"]), int(meta["ny"])]
    if "nz" in meta and meta["nz"] is not None and int(meta["nz"]) > 1:
        counts.append(int(meta["nz"]))
    dtype_name = meta.get("dtype", "f64")
    if dtype_name not in _DTYPES:
        raise ValueError(f"unsupported dtype: {dtype_name!r}")
    order = meta.get("order", "x-fastest")
    if order != "x-fastest":
        raise ValueError(f"unsupported payload order: {order!r}")
    h = [float(v) for v in meta["h"]]
    origin = [float(v) for v in meta.get("origin", [0.0] * len(counts))]
    if len(h) < len(counts) or len(origin) < len(counts):
        raise ValueError("meta h/origin do not cover every axis")

    mins = tuple(origin[: len(counts)])
    maxs = tuple(o + (n - 1) * s for o, n, s in zip(origin, counts, h))
    grid = CartesianGrid(mins, maxs, tuple(n - 2 for n in counts), tuple(h[: len(counts)]))

    total = int(np.prod(counts))
    fields = []
    for path in (rho_path, c_path):
        raw = Path(path).read_bytes()
        arr = np.frombuffer(raw, dtype=_DTYPES[dtype_name])
        if arr.size != total:
            raise ValueError(
                f"payload length mismatch: {Path(path).name} holds {arr.size} values, "
                f"expected {total}"
            )
        fields.append(ScalarField(grid, arr.astype(np.float64).reshape(grid.shape)))
    return MediaModel(rho=fields[0], c=fields[1])


def write_convergence_csv(rows: list[dict], stream) -> None:
    """Emit the convergence table as ``h,tau,E,order`` (order blank on row 1)."""
    stream.write("h,tau,E,order\n")
    for row in rows:
        order = "" if row.get("order") is None else f"{row['order']:.4f}"
        stream.write(f"{row['h']:.17g},{row['tau']:.17g},{row['E']:.17g},{order}\n")


def read_convergence_csv(path) -> list[dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip()
        if header != "h,tau,E,order":
            raise ValueError("malformed convergence CSV: expected 'h,tau,E,order' header")
        for line in f:
            if not line.strip():
                continue
            h_s, tau_s, e_s, o_s = line.strip().split(",")
            rows.append({
                "h": float(h_s),
                "tau": float(tau_s),
                "E": float(e_s),
                "order": float(o_s) if o_s else None,
            })
    return rows
