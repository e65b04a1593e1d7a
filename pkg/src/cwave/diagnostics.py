"""Error norms, convergence orders, and the acoustic-energy functional.

The energy of a 2D wavefield with particle velocity v is

    E(t) = integral( rho/2 |v|^2 + u^2/(2 rho c^2) ) dx dy,

with v reconstructed from rho dv/dt = -grad u by the trapezoidal rule.
"""

from __future__ import annotations

import io as _io
from dataclasses import dataclass, field

import numpy as np

from .compact import gradient
from .grid import CartesianGrid, MediaModel, ScalarField


def max_norm_error(numeric: ScalarField, exact: ScalarField) -> float:
    """Max over interior nodes of the absolute difference."""
    if numeric.grid != exact.grid:
        raise ValueError("fields on different grids")
    return float(np.max(np.abs(numeric.interior - exact.interior)))


def convergence_order(e1: float, h1: float, e2: float, h2: float) -> float:
    """log(e1/e2) / log(h1/h2)."""
    if e1 <= 0 or e2 <= 0:
        raise ValueError("invalid error pair")
    if h1 == h2:
        raise ValueError("spacings must differ")
    return float(np.log(e1 / e2) / np.log(h1 / h2))


@dataclass
class ParticleVelocity:
    """Velocity components on the wavefield grid (2D)."""

    v_x: ScalarField
    v_y: ScalarField

    def __post_init__(self):
        if self.v_x.grid != self.v_y.grid:
            raise ValueError("velocity components on different grids")

    @classmethod
    def zero(cls, grid: CartesianGrid) -> "ParticleVelocity":
        return cls(ScalarField.zeros(grid), ScalarField.zeros(grid))


def particle_velocity_update(v: ParticleVelocity, u_n: ScalarField, u_np1: ScalarField,
                             rho: ScalarField, tau: float) -> ParticleVelocity:
    """Trapezoidal step of rho dv/dt = -grad u across one level pair.

        v^{n+1} = v^n - (tau / (2 rho)) (grad u^n + grad u^{n+1})
    """
    grid = u_n.grid
    gx_n, gy_n = gradient(u_n.values, grid)
    gx_1, gy_1 = gradient(u_np1.values, grid)
    scale = tau / (2.0 * rho.values)
    return ParticleVelocity(
        ScalarField(grid, v.v_x.values - scale * (gx_n + gx_1)),
        ScalarField(grid, v.v_y.values - scale * (gy_n + gy_1)),
    )


def acoustic_energy(u: ScalarField, v: ParticleVelocity, model: MediaModel,
                    region: tuple[slice, ...] | None = None) -> float:
    """Quadrature of the energy density over a rectangular node box.

    ``region`` is an index box in array order (default: the whole domain);
    for absorbing-layer runs pass the undamped region so the layer is
    excluded.  Cells are integrated with corner-averaged (trapezoidal)
    weights, covering the box exactly with O(h^2) accuracy.
    """
    grid = u.grid
    if region is None:
        region = (slice(None),) * grid.dims
    rho = model.rho.values[region]
    c2 = model.c.values[region] ** 2
    uu = u.values[region]
    dens = (uu**2) / (2.0 * rho * c2)
    dens = dens + 0.5 * rho * (v.v_x.values[region] ** 2 + v.v_y.values[region] ** 2)
    w = np.ones_like(dens)
    for axis in range(dens.ndim):
        sl0 = [slice(None)] * dens.ndim
        sl1 = [slice(None)] * dens.ndim
        sl0[axis] = 0
        sl1[axis] = -1
        w[tuple(sl0)] *= 0.5
        w[tuple(sl1)] *= 0.5
    cell = float(np.prod(grid.spacings))
    return float(np.sum(w * dens) * cell)


@dataclass
class EnergyTrace:
    """Time series of the acoustic energy."""

    samples: list[tuple[float, float]] = field(default_factory=list)

    def append(self, t: float, e: float) -> None:
        if self.samples and t <= self.samples[-1][0]:
            raise ValueError("energy samples must have increasing time")
        if e < 0:
            raise ValueError("energy must be nonnegative")
        self.samples.append((float(t), float(e)))

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples])

    @property
    def energies(self) -> np.ndarray:
        return np.array([e for _, e in self.samples])

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_csv())

    def to_csv(self) -> str:
        buf = _io.StringIO()
        buf.write("t,E\n")
        for t, e in self.samples:
            buf.write(f"{t:.17g},{e:.17g}\n")
        return buf.getvalue()

    @classmethod
    def read_csv(cls, path) -> "EnergyTrace":
        trace = cls()
        with open(path, "r", encoding="utf-8") as f:
            header = f.readline().strip()
            if header != "t,E":
                raise ValueError("malformed energy CSV: expected 't,E' header")
            for line in f:
                if not line.strip():
                    continue
                t_s, e_s = line.split(",")
                trace.append(float(t_s), float(e_s))
        return trace
