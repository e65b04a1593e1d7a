"""Explicit time integration for the variable-density wave equation.

The update is leapfrog in time:

    u^{n+1} = tau^2 rho c^2 [div((1/rho) grad u)^n + s^n] + 2 u^n - u^{n-1},

with the source s defined as the right-hand side of
(1/(rho c^2)) u_tt - div((1/rho) grad u) = s.  The missing start level
u^{-1} comes from a Taylor expansion around t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, TYPE_CHECKING

import numpy as np

from .compact import divergence_laplacian
from .grid import BoundarySpec, CartesianGrid, InitialConditions, MediaModel, ScalarField

if TYPE_CHECKING:
    from .diagnostics import EnergyTrace
    from .io import SnapshotFrame
    from .pml import PmlRun

#: Sup-norm ceiling beyond which a run is declared unstable.
INSTABILITY_CEILING = 1e12


class InstabilityError(RuntimeError):
    """Raised when the wavefield goes non-finite or beyond the ceiling."""

    def __init__(self, step: int):
        super().__init__(f"instability detected at step {step}")
        self.step = step


def check_stable(values: np.ndarray, step: int) -> None:
    m = np.max(np.abs(values))
    if not np.isfinite(m) or m > INSTABILITY_CEILING:
        raise InstabilityError(step)


def ricker(t, f_p: float, d_r: float):
    """Ricker wavelet (1 - 2 pi^2 f_p^2 (t-d_r)^2) exp(-pi^2 f_p^2 (t-d_r)^2)."""
    if not f_p > 0:
        raise ValueError("dominant frequency must be positive")
    a = (np.pi * f_p * (np.asarray(t, dtype=np.float64) - d_r)) ** 2
    out = (1.0 - 2.0 * a) * np.exp(-a)
    return float(out) if np.ndim(t) == 0 else out


def ricker_dt(t, f_p: float, d_r: float):
    """Analytic time derivative of :func:`ricker`."""
    delta = np.asarray(t, dtype=np.float64) - d_r
    a = (np.pi * f_p * delta) ** 2
    out = -2.0 * (np.pi * f_p) ** 2 * delta * (3.0 - 2.0 * a) * np.exp(-a)
    return float(out) if np.ndim(t) == 0 else out


@dataclass
class SourceSpec:
    """Source model: silent, a point Ricker wavelet, or an analytic field."""

    kind: str
    f_p: float = 0.0
    d_r: float = 0.0
    location: tuple[float, ...] | None = None
    evaluator: Callable | None = None
    dt_evaluator: Callable | None = None

    @classmethod
    def none(cls) -> "SourceSpec":
        return cls(kind="none")

    @classmethod
    def point_ricker(cls, f_p: float, d_r: float, location) -> "SourceSpec":
        if not f_p > 0:
            raise ValueError("dominant frequency must be positive")
        if d_r < 0:
            raise ValueError("temporal delay must be nonnegative")
        return cls(kind="point-ricker", f_p=f_p, d_r=d_r, location=tuple(float(c) for c in location))

    @classmethod
    def analytic(cls, evaluator: Callable, dt_evaluator: Callable | None = None) -> "SourceSpec":
        return cls(kind="analytic-field", evaluator=evaluator, dt_evaluator=dt_evaluator)

    def interior_values(self, t: float, grid: CartesianGrid) -> np.ndarray | None:
        """Source term on the interior nodes at time ``t`` (None when silent)."""
        if self.kind == "none":
            return None
        if self.kind == "point-ricker":
            out = np.zeros(grid.interior_shape)
            inject_point_source(out, self, ricker(t, self.f_p, self.d_r), grid)
            return out
        coords = grid.coordinate_arrays(interior_only=True)
        return np.broadcast_to(
            np.asarray(self.evaluator(t, *coords), dtype=np.float64), grid.interior_shape
        )

    def interior_dt_values(self, t: float, grid: CartesianGrid, dt_step: float) -> np.ndarray | None:
        """Time derivative of the source; centered difference when no analytic form."""
        if self.kind == "none":
            return None
        if self.kind == "point-ricker":
            out = np.zeros(grid.interior_shape)
            inject_point_source(out, self, ricker_dt(t, self.f_p, self.d_r), grid)
            return out
        if self.dt_evaluator is not None:
            coords = grid.coordinate_arrays(interior_only=True)
            return np.broadcast_to(
                np.asarray(self.dt_evaluator(t, *coords), dtype=np.float64), grid.interior_shape
            )
        lo = self.interior_values(t - dt_step, grid)
        hi = self.interior_values(t + dt_step, grid)
        return (hi - lo) / (2.0 * dt_step)


def nearest_interior_node(location, grid: CartesianGrid) -> tuple[int, ...]:
    """Grid node nearest a point; exact midpoints break toward the lower index."""
    idx = []
    for axis, coord in enumerate(location):
        lo, hi = grid.mins[axis], grid.maxs[axis]
        if not lo < coord < hi:
            raise ValueError("source outside interior")
        frac = (coord - lo) / grid.spacings[axis]
        base = int(np.floor(frac))
        node = base if frac - base <= 0.5 else base + 1
        node = min(max(node, 1), grid.interior_counts[axis])
        idx.append(node)
    return tuple(idx)


def inject_point_source(target: np.ndarray, src: SourceSpec, amplitude: float,
                        grid: CartesianGrid) -> None:
    """Add a discretized spatial delta (amplitude / prod(h)) to one interior node.

    ``target`` is the interior-shaped array the stepper assembles the source
    term in.
    """
    if src.location is None or len(src.location) != grid.dims:
        raise ValueError("source location does not match grid dimensionality")
    node = nearest_interior_node(src.location, grid)
    cell = float(np.prod(grid.spacings))
    target[tuple(reversed([i - 1 for i in node]))] += amplitude / cell


@dataclass
class WavefieldState:
    """Leapfrog pair (u^{n-1}, u^n) plus the step index and step size."""

    u_prev: ScalarField
    u_curr: ScalarField
    n: int
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("time step must be positive")
        if self.u_prev.grid != self.u_curr.grid:
            raise ValueError("state fields on different grids")

    @property
    def t(self) -> float:
        return self.n * self.tau


def initial_back_step(ic: InitialConditions, model: MediaModel, src: SourceSpec,
                      bc: BoundarySpec, tau: float) -> ScalarField:
    """Taylor-expanded field at t = -tau needed to seed the leapfrog.

        u^{-1} = alpha - tau beta
                 + (tau^2/2) rho c^2 [div((1/rho) grad alpha) + s^0]
                 - (tau^3/6) rho c^2 [div((1/rho) grad beta) + (d_t s)^0]

    The divergence terms are evaluated numerically; the source derivative is
    analytic when available, else a centered difference with step tau/100.
    """
    grid = model.grid
    rho_c2 = model.rho_c_squared()[(slice(1, -1),) * grid.dims]
    lap_alpha = divergence_laplacian(ic.alpha, model)
    lap_beta = divergence_laplacian(ic.beta, model)
    s0 = src.interior_values(0.0, grid)
    s0_dt = src.interior_dt_values(0.0, grid, dt_step=tau / 100.0)
    acc = lap_alpha if s0 is None else lap_alpha + s0
    jerk = lap_beta if s0_dt is None else lap_beta + s0_dt
    out = ScalarField.zeros(grid)
    out.interior[...] = (
        ic.alpha.interior
        - tau * ic.beta.interior
        + 0.5 * tau**2 * rho_c2 * acc
        - (tau**3 / 6.0) * rho_c2 * jerk
    )
    bc.apply(out.values, grid, -tau)
    return out


def leapfrog_step(state: WavefieldState, model: MediaModel, src: SourceSpec,
                  bc: BoundarySpec) -> WavefieldState:
    """Advance one level; the new boundary layer is filled at t_{n+1}."""
    grid = state.u_curr.grid
    tau = state.tau
    t_n = state.t
    lap = divergence_laplacian(state.u_curr, model)
    s_n = src.interior_values(t_n, grid)
    if s_n is not None:
        lap = lap + s_n
    rho_c2 = model.rho_c_squared()[(slice(1, -1),) * grid.dims]
    u_next = ScalarField.zeros(grid)
    u_next.interior[...] = (
        tau * tau * rho_c2 * lap + 2.0 * state.u_curr.interior - state.u_prev.interior
    )
    bc.apply(u_next.values, grid, t_n + tau)
    check_stable(u_next.values, state.n + 1)
    return WavefieldState(u_prev=state.u_curr, u_curr=u_next, n=state.n + 1, tau=tau)


@dataclass
class RunConfig:
    """Resolved inputs for one simulation."""

    grid: CartesianGrid
    model: MediaModel
    source: SourceSpec
    bc: BoundarySpec
    ic: InitialConditions
    tau: float
    n_steps: int
    pml: "PmlRun | None" = None
    snapshot_every: int = 0
    cfl_override: bool = False
    track_energy: bool = False
    energy_every: int = 1
    energy_region: tuple[slice, ...] | None = None
    u_prev_init: ScalarField | None = None
    exact_solution: Callable | None = None
    solution_transform: Callable | None = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("time step must be positive")
        if self.n_steps < 0:
            raise ValueError("step count must be nonnegative")
        if self.snapshot_every < 0:
            raise ValueError("snapshot cadence must be nonnegative")


def run_simulation(config: RunConfig):
    """Drive a full run; returns (final state, snapshot list, energy trace or None).

    The CFL report must pass unless ``cfl_override`` is set.  Snapshots are
    taken at step 0, every ``snapshot_every`` steps when positive, and at the
    final step.
    """
    from .io import SnapshotFrame
    from .stability import cfl_threshold

    report = cfl_threshold(config.model, config.tau)
    if not report.pass_ and not config.cfl_override:
        raise ValueError(
            f"CFL violation: tau/h = {report.tau_over_h:.4f} exceeds "
            f"{report.tau_over_h_limit:.4f} (set cfl_override to run anyway)"
        )

    grid = config.grid
    u0 = config.ic.alpha.copy()
    config.bc.apply(u0.values, grid, 0.0)
    if config.u_prev_init is not None:
        u_m1 = config.u_prev_init
    else:
        u_m1 = initial_back_step(config.ic, config.model, config.source, config.bc, config.tau)

    pml_state = None
    state = WavefieldState(u_prev=u_m1, u_curr=u0, n=0, tau=config.tau)
    if config.pml is not None:
        pml_state = config.pml.initial_state(state)

    snapshots: list[SnapshotFrame] = []

    def snap(s: WavefieldState):
        snapshots.append(SnapshotFrame(t=s.t, step=s.n, field=s.u_curr.copy()))

    energy = None
    velocity = None
    if config.track_energy:
        from .diagnostics import EnergyTrace, ParticleVelocity, acoustic_energy

        if grid.dims != 2:
            raise ValueError("energy tracking is implemented for 2D runs")
        velocity = ParticleVelocity.zero(grid)
        energy = EnergyTrace()
        energy.append(0.0, acoustic_energy(state.u_curr, velocity, config.model,
                                           region=config.energy_region))

    snap(state)
    for n in range(config.n_steps):
        prev_u = state.u_curr
        if config.pml is None:
            state = leapfrog_step(state, config.model, config.source, config.bc)
        else:
            state, pml_state = config.pml.step(state, pml_state, config.model,
                                               config.source, config.bc)
        if config.track_energy:
            from .diagnostics import acoustic_energy, particle_velocity_update

            velocity = particle_velocity_update(velocity, prev_u, state.u_curr,
                                                config.model.rho, config.tau)
            if (state.n % config.energy_every) == 0 or state.n == config.n_steps:
                energy.append(state.t, acoustic_energy(state.u_curr, velocity, config.model,
                                                       region=config.energy_region))
        if config.snapshot_every and state.n % config.snapshot_every == 0:
            snap(state)
    if config.n_steps and (not config.snapshot_every or config.n_steps % config.snapshot_every):
        snap(state)
    return state, snapshots, energy
