"""Figure generation for cwave solver outputs."""

from .formats import Snapshot, read_convergence_csv, read_energy_csv, read_snapshot
from .render import RenderJob, render_convergence, render_energy, render_snapshot

__version__ = "0.1.0"

__all__ = [
    "RenderJob",
    "Snapshot",
    "read_convergence_csv",
    "read_energy_csv",
    "read_snapshot",
    "render_convergence",
    "render_energy",
    "render_snapshot",
]
