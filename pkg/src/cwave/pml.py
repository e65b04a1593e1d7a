"""2D perfectly matched layers for the variable-density wave equation.

Direct form, with damping profiles sigma_x(x), sigma_y(y):

    (1/(rho c^2)) (u_tt + (sx+sy) u_t + sx sy u) - div((1/rho)(v + grad u)) = f
    v_t + H v + J grad u = 0,   H = diag(sx, sy),  J = diag(sx-sy, sy-sx)

Substituted form, writing u = exp(-(sx+sy) t / 2) w to remove the first-order
time term (w is stepped, u recovered by the exponential factor):

    (1/(rho c^2)) (s w_tt + (-(sx+sy)^2/4 + sx sy) s w) - div((1/rho)(v + grad(s w))) = f
    v_t + H v + J grad(s w) = g

u is advanced by leapfrog with a pointwise division; the auxiliary fields by
an explicit trapezoidal (Heun) update with the gradient taken at both time
levels, which keeps the coupling second-order accurate in time.  The
explicit auxiliary update requires sigma*tau < 2 pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .compact import _sweep, gradient
from .grid import BoundarySpec, CartesianGrid, MediaModel, ScalarField
from .stepper import SourceSpec, WavefieldState, check_stable

PROFILE_KINDS = ("constant", "linear", "quadratic", "inverse-distance")
ALL_SIDES = ("x_min", "x_max", "y_min", "y_max")


@dataclass(frozen=True)
class PmlLayout:
    """Absorbing-layer geometry: width, strength and profile shape.

    The physical (undamped) region is the grid domain shrunk by ``width``
    on every listed side.
    """

    width: float
    sigma_max: float
    profile: str = "inverse-distance"
    sides: tuple[str, ...] = ALL_SIDES

    def __post_init__(self):
        if self.profile not in PROFILE_KINDS:
            raise ValueError(f"unknown damping profile {self.profile!r}")
        if self.width < 0:
            raise ValueError("layer width must be nonnegative")
        for s in self.sides:
            if s not in ALL_SIDES:
                raise ValueError(f"unknown side {s!r}")

    def interior_bounds(self, grid: CartesianGrid) -> list[tuple[float, float]]:
        """Per-axis extent of the undamped region."""
        out = []
        for axis, name in enumerate("xy"[: grid.dims]):
            lo, hi = grid.mins[axis], grid.maxs[axis]
            if f"{name}_min" in self.sides:
                lo += self.width
            if f"{name}_max" in self.sides:
                hi -= self.width
            out.append((lo, hi))
        return out

    def interior_region(self, grid: CartesianGrid) -> tuple[slice, ...]:
        """Index box (array order, slowest axis first) of the undamped region."""
        slices = []
        for axis, (lo, hi) in enumerate(self.interior_bounds(grid)):
            coords = grid.axis_coords(axis)
            inside = np.nonzero((coords >= lo - 1e-12) & (coords <= hi + 1e-12))[0]
            slices.append(slice(int(inside[0]), int(inside[-1]) + 1))
        return tuple(reversed(slices))


class DampingField:
    """Per-axis damping profiles on the full grid plus derived diagonals."""

    def __init__(self, sigma_x: ScalarField, sigma_y: ScalarField):
        if sigma_x.grid != sigma_y.grid:
            raise ValueError("damping profiles on different grids")
        if sigma_x.grid.dims != 2:
            raise ValueError("damping fields are 2D")
        if np.ptp(sigma_x.values, axis=0).max() > 1e-12:
            raise ValueError("sigma_x must vary along x only")
        if np.ptp(sigma_y.values, axis=1).max() > 1e-12:
            raise ValueError("sigma_y must vary along y only")
        self.sigma_x = sigma_x
        self.sigma_y = sigma_y

    @property
    def grid(self) -> CartesianGrid:
        return self.sigma_x.grid

    @classmethod
    def from_profiles(cls, sigma_x_fn: Callable, sigma_y_fn: Callable,
                      grid: CartesianGrid) -> "DampingField":
        """Build from 1D coordinate functions sigma_x(x), sigma_y(y)."""
        xs = grid.axis_coords(0)
        ys = grid.axis_coords(1)
        sx = np.broadcast_to(np.asarray(sigma_x_fn(xs), dtype=np.float64), grid.shape).copy()
        sy = np.broadcast_to(
            np.asarray(sigma_y_fn(ys), dtype=np.float64)[:, None], grid.shape
        ).copy()
        return cls(ScalarField(grid, sx), ScalarField(grid, sy))

    @cached_property
    def total(self) -> np.ndarray:
        """sx + sy (the coefficient of u_t in the direct form)."""
        return self.sigma_x.values + self.sigma_y.values

    @cached_property
    def product(self) -> np.ndarray:
        """sx * sy (the zeroth-order coefficient in the direct form)."""
        return self.sigma_x.values * self.sigma_y.values

    @cached_property
    def substituted_zeroth(self) -> np.ndarray:
        """-(sx+sy)^2/4 + sx sy, the zeroth-order coefficient after substitution."""
        return -0.25 * self.total**2 + self.product

    def substitution_factor(self, t: float) -> np.ndarray:
        """exp(-(sx+sy) t / 2), the factor relating u to the substituted field."""
        return np.exp(-0.5 * self.total * t)

    @property
    def is_zero(self) -> bool:
        return not self.sigma_x.values.any() and not self.sigma_y.values.any()


def _axis_profile(layout: PmlLayout, grid: CartesianGrid, axis: int) -> np.ndarray:
    name = "xy"[axis]
    h = grid.spacings[axis]
    coords = grid.axis_coords(axis)
    lo, hi = layout.interior_bounds(grid)[axis]
    dist = np.zeros_like(coords)
    if f"{name}_min" in layout.sides:
        dist = np.maximum(dist, lo - coords)
    if f"{name}_max" in layout.sides:
        dist = np.maximum(dist, coords - hi)
    sigma = np.zeros_like(coords)
    in_layer = dist > 1e-12
    if not in_layer.any():
        return sigma
    if layout.width <= 0:
        raise ValueError("degenerate layer: zero width with nonzero damping")
    d = dist[in_layer]
    if layout.profile == "constant":
        sigma[in_layer] = layout.sigma_max
    elif layout.profile == "linear":
        sigma[in_layer] = layout.sigma_max * d / layout.width
    elif layout.profile == "quadratic":
        sigma[in_layer] = layout.sigma_max * (d / layout.width) ** 2
    else:  # inverse-distance, floored at one spacing
        sigma[in_layer] = layout.sigma_max * h / np.maximum(d, h)
    return sigma


def damping_profile(layout: PmlLayout, grid: CartesianGrid) -> DampingField:
    """Materialize the layout's damping functions on a grid."""
    if grid.dims != 2:
        raise ValueError("absorbing layers are implemented in 2D")
    if layout.sigma_max != 0 and layout.sides:
        if layout.width <= 0:
            raise ValueError("degenerate layer: zero width with nonzero damping")
        min_h = min(grid.spacings)
        if layout.width < 4 * min_h - 1e-12:
            raise ValueError("layer thinner than four spacings cannot hold the closure")
    sx = _axis_profile(layout, grid, 0)
    sy = _axis_profile(layout, grid, 1)
    return DampingField(
        ScalarField(grid, np.broadcast_to(sx, grid.shape).copy()),
        ScalarField(grid, np.broadcast_to(sy[:, None], grid.shape).copy()),
    )


@dataclass
class PmlForcing:
    """Manufactured forcing: f on the pressure equation, g on the auxiliary one."""

    f: Callable | None = None          # f(t) -> interior-shaped array
    g: Callable | None = None          # g(t) -> (gx, gy) full-grid arrays


@dataclass
class PmlState2D:
    """Leapfrog pair plus auxiliary flux-correction fields."""

    u_prev: ScalarField
    u_curr: ScalarField
    v_x: ScalarField
    v_y: ScalarField
    n: int
    tau: float
    grad_cache: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        g = self.u_curr.grid
        if any(f.grid != g for f in (self.u_prev, self.v_x, self.v_y)):
            raise ValueError("state fields on different grids")

    @property
    def t(self) -> float:
        return self.n * self.tau

    @classmethod
    def initial(cls, u_prev: ScalarField, u_curr: ScalarField, tau: float,
                v_init: tuple[ScalarField, ScalarField] | None = None) -> "PmlState2D":
        grid = u_curr.grid
        if v_init is None:
            v_init = (ScalarField.zeros(grid), ScalarField.zeros(grid))
        return cls(u_prev=u_prev, u_curr=u_curr, v_x=v_init[0], v_y=v_init[1], n=0, tau=tau)


def _heun_aux_update(v: np.ndarray, sigma: np.ndarray, j_diag: np.ndarray,
                     grad_n: np.ndarray, grad_np1: np.ndarray, tau: float,
                     g_n: np.ndarray | None = None,
                     g_np1: np.ndarray | None = None) -> np.ndarray:
    """One explicit-trapezoidal step of v_t = -sigma v - j_diag * grad + g."""
    k1 = -sigma * v - j_diag * grad_n
    if g_n is not None:
        k1 = k1 + g_n
    k2 = -sigma * (v + tau * k1) - j_diag * grad_np1
    if g_np1 is not None:
        k2 = k2 + g_np1
    return v + 0.5 * tau * (k1 + k2)


def pml_step_direct(state: PmlState2D, model: MediaModel, damping: DampingField,
                    src: SourceSpec, bc: BoundarySpec) -> PmlState2D:
    """Advance the direct-form system one level.

    The damped u_t term is centered, so the new level is a pointwise
    division; the auxiliary fields see the gradient at both levels.
    """
    grid = state.u_curr.grid
    tau = state.tau
    t_n = state.t
    inner = (slice(1, -1),) * 2
    rho = model.rho.values
    inv_rc2 = 1.0 / model.rho_c_squared()[inner]
    sig_sum = damping.total[inner]
    sig_prod = damping.product[inner]

    grad_n = state.grad_cache or tuple(gradient(state.u_curr.values, grid))
    flux_div = _sweep(state.u_curr.values, rho, grid, 0, aux=state.v_x.values)
    flux_div += _sweep(state.u_curr.values, rho, grid, 1, aux=state.v_y.values)
    f_n = src.interior_values(t_n, grid)
    if f_n is not None:
        flux_div = flux_div + f_n

    u_n = state.u_curr.interior
    u_nm1 = state.u_prev.interior
    denom = inv_rc2 * (1.0 / tau**2 + sig_sum / (2.0 * tau))
    numer = flux_div + inv_rc2 * (
        (2.0 * u_n - u_nm1) / tau**2 + (sig_sum / (2.0 * tau)) * u_nm1 - sig_prod * u_n
    )
    u_next = ScalarField.zeros(grid)
    u_next.interior[...] = numer / denom
    bc.apply(u_next.values, grid, t_n + tau)
    check_stable(u_next.values, state.n + 1)

    grad_np1 = tuple(gradient(u_next.values, grid))
    sx = damping.sigma_x.values
    sy = damping.sigma_y.values
    vx = _heun_aux_update(state.v_x.values, sx, sx - sy, grad_n[0], grad_np1[0], tau)
    vy = _heun_aux_update(state.v_y.values, sy, sy - sx, grad_n[1], grad_np1[1], tau)
    return PmlState2D(
        u_prev=state.u_curr, u_curr=u_next,
        v_x=ScalarField(grid, vx), v_y=ScalarField(grid, vy),
        n=state.n + 1, tau=tau, grad_cache=grad_np1,
    )


def pml_step_substituted(state: PmlState2D, model: MediaModel, damping: DampingField,
                         forcing: PmlForcing, bc: BoundarySpec) -> PmlState2D:
    """Advance the substituted-form system one level.

    ``state`` carries the substituted field; pressure is recovered by
    multiplying with the substitution factor.  ``bc`` prescribes boundary
    values of the substituted field.
    """
    grid = state.u_curr.grid
    tau = state.tau
    t_n = state.t
    inner = (slice(1, -1),) * 2
    rho = model.rho.values
    rc2 = model.rho_c_squared()[inner]

    s_n = damping.substitution_factor(t_n)
    su_n = s_n * state.u_curr.values
    grad_n = state.grad_cache or tuple(gradient(su_n, grid))
    flux_div = _sweep(su_n, rho, grid, 0, aux=state.v_x.values)
    flux_div += _sweep(su_n, rho, grid, 1, aux=state.v_y.values)
    f_n = forcing.f(t_n) if forcing.f is not None else None
    if f_n is not None:
        flux_div = flux_div + f_n

    u_next = ScalarField.zeros(grid)
    u_next.interior[...] = (
        2.0 * state.u_curr.interior - state.u_prev.interior
        + tau**2 * (rc2 / s_n[inner] * flux_div
                    - damping.substituted_zeroth[inner] * state.u_curr.interior)
    )
    bc.apply(u_next.values, grid, t_n + tau)
    check_stable(u_next.values, state.n + 1)

    su_np1 = damping.substitution_factor(t_n + tau) * u_next.values
    grad_np1 = tuple(gradient(su_np1, grid))
    g_n = forcing.g(t_n) if forcing.g is not None else (None, None)
    g_np1 = forcing.g(t_n + tau) if forcing.g is not None else (None, None)
    sx = damping.sigma_x.values
    sy = damping.sigma_y.values
    vx = _heun_aux_update(state.v_x.values, sx, sx - sy, grad_n[0], grad_np1[0], tau,
                          g_n[0], g_np1[0])
    vy = _heun_aux_update(state.v_y.values, sy, sy - sx, grad_n[1], grad_np1[1], tau,
                          g_n[1], g_np1[1])
    return PmlState2D(
        u_prev=state.u_curr, u_curr=u_next,
        v_x=ScalarField(grid, vx), v_y=ScalarField(grid, vy),
        n=state.n + 1, tau=tau, grad_cache=grad_np1,
    )


@dataclass
class PmlRun:
    """Everything the simulation driver needs to step an absorbing-layer run."""

    damping: DampingField
    formulation: str = "direct"
    forcing: PmlForcing | None = None
    v_init: tuple[ScalarField, ScalarField] | None = None

    def __post_init__(self):
        if self.formulation not in ("direct", "substituted"):
            raise ValueError(f"unknown formulation {self.formulation!r}")
        if self.formulation == "substituted" and self.forcing is None:
            self.forcing = PmlForcing()

    def initial_state(self, state: WavefieldState) -> PmlState2D:
        return PmlState2D.initial(state.u_prev, state.u_curr, state.tau, self.v_init)

    def step(self, state: WavefieldState, pml_state: PmlState2D, model: MediaModel,
             src: SourceSpec, bc: BoundarySpec):
        if self.formulation == "direct":
            ps = pml_step_direct(pml_state, model, self.damping, src, bc)
        else:
            ps = pml_step_substituted(pml_state, model, self.damping, self.forcing, bc)
        wrapped = WavefieldState(u_prev=ps.u_prev, u_curr=ps.u_curr, n=ps.n, tau=ps.tau)
        return wrapped, ps
