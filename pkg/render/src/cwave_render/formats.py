"""Readers for the solver's documented output formats.

These are standalone re-implementations of the external wire formats (the
renderer deliberately has no in-process dependency on the solver):

* snapshot: 8-byte magic ``CWAVSNAP``, an 8-byte little-endian unsigned
  metadata length, UTF-8 JSON metadata, then the full-grid field as
  little-endian float64 in x-fastest order;
* energy trace: CSV with header ``t,E``;
* convergence table: CSV with header ``h,tau,E,order`` (order blank on the
  first row).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

SNAPSHOT_MAGIC = b"CWAVSNAP"


@dataclass
class Snapshot:
    t: float
    step: int
    dims: int
    values: np.ndarray          # shape (nz, ny, nx) or (ny, nx)
    origin: list[float]
    extent: list[float]
    spacing: list[float]


def read_snapshot(path) -> Snapshot:
    with open(path, "rb") as f:
        if f.read(len(SNAPSHOT_MAGIC)) != SNAPSHOT_MAGIC:
            raise ValueError("not a snapshot file")
        raw = f.read(8)
        if len(raw) != 8:
            raise ValueError("corrupt snapshot: truncated header")
        (meta_len,) = struct.unpack("<Q", raw)
        try:
            meta = json.loads(f.read(meta_len).decode("utf-8"))
            dims = int(meta["dims"])
            counts = [int(n) + 2 for n in meta["interior_counts"]]
            spacing = [float(v) for v in meta["spacing"]]
            origin = [float(v) for v in meta["origin"]]
        except (KeyError, ValueError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValueError("corrupt snapshot: bad metadata") from exc
        total = int(np.prod(counts))
        payload = f.read(total * 8)
        if len(payload) != total * 8:
            raise ValueError("corrupt snapshot: truncated payload")
        values = np.frombuffer(payload, dtype="<f8").reshape(tuple(reversed(counts)))
    extent = [o + (n - 1) * s for o, n, s in zip(origin, counts, spacing)]
    return Snapshot(t=float(meta["t"]), step=int(meta["step"]), dims=dims,
                    values=values, origin=origin, extent=extent, spacing=spacing)


def read_energy_csv(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, "r", encoding="utf-8") as f:
        if f.readline().strip() != "t,E":
            raise ValueError("malformed energy CSV: expected 't,E' header")
        rows = [line.split(",") for line in f if line.strip()]
    if not rows:
        raise ValueError("empty energy CSV")
    try:
        t = np.array([float(r[0]) for r in rows])
        e = np.array([float(r[1]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise ValueError("malformed energy CSV") from exc
    return t, e


def read_convergence_csv(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as f:
        if f.readline().strip() != "h,tau,E,order":
            raise ValueError("malformed convergence CSV: expected 'h,tau,E,order' header")
        rows = []
        for line in f:
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != 4:
                raise ValueError("malformed convergence CSV row")
            try:
                rows.append({
                    "h": float(parts[0]),
                    "tau": float(parts[1]),
                    "E": float(parts[2]),
                    "order": float(parts[3]) if parts[3] else None,
                })
            except ValueError as exc:
                raise ValueError("malformed convergence CSV row") from exc
    if not rows:
        raise ValueError("empty convergence CSV")
    return rows
