"""Offline figure generation from solver output files."""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .formats import read_convergence_csv, read_energy_csv, read_snapshot

_AXES = "xyz"
FIGSIZE = (7.0, 5.0)
DPI = 110


@dataclass
class RenderJob:
    """One snapshot-to-image request."""

    input_path: str
    output_path: str
    colormap: str = "seismic"
    section_axis: str | None = None     # x | y | z, 3D inputs only
    section_index: int | None = None
    title: str | None = None


def _save(fig, path) -> dict:
    fig.savefig(path, dpi=DPI)
    w, h = fig.get_size_inches()
    plt.close(fig)
    return {"width_px": int(round(w * DPI)), "height_px": int(round(h * DPI))}


def render_snapshot(job: RenderJob) -> dict:
    """Raster heatmap of a wavefield section with a symmetric color scale.

    Returns a summary dict (image dimensions, plotted data extent, scale).
    """
    snap = read_snapshot(job.input_path)
    values = snap.values
    if snap.dims == 3:
        if job.section_axis is None or job.section_index is None:
            raise ValueError("section required: 3D snapshots need --section and --index")
        axis = _AXES.index(job.section_axis)
        arr_axis = snap.dims - 1 - axis
        if not 0 <= job.section_index < values.shape[arr_axis]:
            raise ValueError("section index outside grid bounds")
        values = np.take(values, job.section_index, axis=arr_axis)
        plot_axes = [a for a in range(snap.dims) if a != axis]
    elif job.section_axis is not None:
        raise ValueError("sections apply to 3D snapshots only")
    else:
        plot_axes = [0, 1]

    ax_h, ax_v = plot_axes  # horizontal and vertical coordinate axes
    vmax = float(np.max(np.abs(values)))
    if vmax == 0.0:
        vmax = 1.0
    extent = [snap.origin[ax_h], snap.extent[ax_h], snap.origin[ax_v], snap.extent[ax_v]]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    im = ax.imshow(values, origin="lower", extent=extent, cmap=job.colormap,
                   vmin=-vmax, vmax=vmax, aspect="equal", interpolation="nearest")
    ax.set_xlabel(_AXES[ax_h])
    ax.set_ylabel(_AXES[ax_v])
    ax.set_title(job.title or f"wavefield at t = {snap.t:.4g} (step {snap.step})")
    fig.colorbar(im, ax=ax, shrink=0.85)
    out = _save(fig, job.output_path)
    out.update({"extent": extent, "vmax": vmax, "t": snap.t})
    return out


def render_energy(csv_path, output_path, title: str | None = None) -> dict:
    """Line plot of the acoustic-energy trace."""
    t, e = read_energy_csv(csv_path)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(t, e, lw=1.5)
    ax.set_xlabel("t")
    ax.set_ylabel("E(t)")
    ax.set_title(title or "acoustic energy")
    ax.grid(True, alpha=0.3)
    out = _save(fig, output_path)
    out.update({"t_range": [float(t.min()), float(t.max())],
                "e_range": [float(e.min()), float(e.max())]})
    return out


def render_convergence(csv_path, output_path, title: str | None = None) -> dict:
    """Log-log error-versus-spacing plot with a slope-4 reference line."""
    rows = read_convergence_csv(csv_path)
    h = np.array([r["h"] for r in rows])
    err = np.array([r["E"] for r in rows])
    if (err <= 0).any() or (h <= 0).any():
        raise ValueError("log scale requires positive errors and spacings")
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.loglog(h, err, "o-", label="measured")
    if len(rows) > 1:
        ref = err[0] * (h / h[0]) ** 4
        ax.loglog(h, ref, "k--", alpha=0.6, label="slope 4")
        ax.legend()
    ax.set_xlabel("h")
    ax.set_ylabel("max-norm error")
    ax.set_title(title or "convergence")
    ax.grid(True, which="both", alpha=0.3)
    out = _save(fig, output_path)
    out.update({"h_range": [float(h.min()), float(h.max())],
                "e_range": [float(err.min()), float(err.max())]})
    return out
