"""Combined compact 4th-order spatial operators.

One line at a time, the first derivative v' satisfies the implicit 3-point
relation

    v'_{i-1}/4 + v'_i + v'_{i+1}/4 = (3/(4h)) (v_{i+1} - v_{i-1}),

closed at the line ends by a 5-point one-sided formula.  Two such passes,
with a division by the density in between, produce the divergence-form
term ((1/rho) u_x)_x; summing the per-axis sweeps yields the
variable-density Laplacian div((1/rho) grad u).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .grid import CartesianGrid, MediaModel, ScalarField, BoundarySpec, MIN_INTERIOR_POINTS

# 5-point one-sided first-derivative closure, exact through degree 4.
_ONE_SIDED = np.array([-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25])

_banded_cache: dict[int, np.ndarray] = {}


def _banded_lhs(n: int) -> np.ndarray:
    """Banded storage of the tridiagonal system (diag 1, off-diagonals 1/4)."""
    ab = _banded_cache.get(n)
    if ab is None:
        ab = np.zeros((3, n))
        ab[0, 1:] = 0.25
        ab[1, :] = 1.0
        ab[2, :-1] = 0.25
        _banded_cache[n] = ab
    return ab


@dataclass(frozen=True)
class CompactSystem:
    """Dense forms of the line-coupling matrices for an N-point interior.

    ``lhs`` is the symmetric positive-definite matrix coupling derivative
    unknowns (diag 1, off-diagonals 1/4); ``rhs`` the antisymmetric
    differencing matrix (off-diagonals +-3/4).
    """

    size: int

    def lhs_dense(self) -> np.ndarray:
        a = np.eye(self.size)
        idx = np.arange(self.size - 1)
        a[idx, idx + 1] = 0.25
        a[idx + 1, idx] = 0.25
        return a

    def rhs_dense(self) -> np.ndarray:
        b = np.zeros((self.size, self.size))
        idx = np.arange(self.size - 1)
        b[idx, idx + 1] = 0.75
        b[idx + 1, idx] = -0.75
        return b


@dataclass
class LineBuffer:
    """One grid line: N interior values plus the two boundary values."""

    interior: np.ndarray
    left_boundary: float
    right_boundary: float
    h: float

    def __post_init__(self):
        self.interior = np.asarray(self.interior, dtype=np.float64)
        if self.interior.size < MIN_INTERIOR_POINTS:
            raise ValueError("grid too small for 4th-order closure")
        if not self.h > 0:
            raise ValueError("line spacing must be positive")

    def full(self) -> np.ndarray:
        return np.concatenate(([self.left_boundary], self.interior, [self.right_boundary]))


def thomas_solve(sub: np.ndarray, diag: np.ndarray, sup: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a single tridiagonal system by the Thomas algorithm.

    ``sub``/``sup`` hold the n-1 off-diagonal entries; raises on a zero or
    near-zero pivot.
    """
    diag = np.asarray(diag, dtype=np.float64)
    sub = np.asarray(sub, dtype=np.float64)
    sup = np.asarray(sup, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    n = diag.size
    if sub.size != n - 1 or sup.size != n - 1 or rhs.size != n:
        raise ValueError("inconsistent tridiagonal system sizes")
    cp = np.empty(n - 1) if n > 1 else np.empty(0)
    dp = np.empty(n)
    piv = diag[0]
    if abs(piv) < 1e-14 * max(1.0, abs(diag).max()):
        raise ValueError("singular tridiagonal system")
    dp[0] = rhs[0] / piv
    if n > 1:
        cp[0] = sup[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub[i - 1] * cp[i - 1]
        if abs(piv) < 1e-14 * max(1.0, abs(diag).max()):
            raise ValueError("singular tridiagonal system")
        dp[i] = (rhs[i] - sub[i - 1] * dp[i - 1]) / piv
        if i < n - 1:
            cp[i] = sup[i] / piv
    x = np.empty(n)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def one_sided_first_derivative(five_values: np.ndarray, h: float, side: str) -> float:
    """4th-order boundary derivative from the five nearest line values.

    ``five_values`` is ordered along the axis; ``side`` selects which end of
    the line the values sit on ("left" or "right").
    """
    v = np.asarray(five_values, dtype=np.float64)
    if v.shape != (5,):
        raise ValueError("need exactly five values")
    if not h > 0:
        raise ValueError("spacing must be positive")
    if side == "left":
        return float(_ONE_SIDED @ v) / h
    if side == "right":
        return float(-(_ONE_SIDED @ v[::-1])) / h
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _thread_count() -> int:
    try:
        n = int(os.environ.get("CW_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def _derivative_lines(values: np.ndarray, h: float) -> np.ndarray:
    """Full derivative lines for a (M, N+2) batch of full lines."""
    n_full = values.shape[-1]
    n = n_full - 2
    d = np.empty_like(values)
    v = values
    d[:, 0] = (
        _ONE_SIDED[0] * v[:, 0]
        + _ONE_SIDED[1] * v[:, 1]
        + _ONE_SIDED[2] * v[:, 2]
        + _ONE_SIDED[3] * v[:, 3]
        + _ONE_SIDED[4] * v[:, 4]
    ) / h
    d[:, -1] = -(
        _ONE_SIDED[0] * v[:, -1]
        + _ONE_SIDED[1] * v[:, -2]
        + _ONE_SIDED[2] * v[:, -3]
        + _ONE_SIDED[3] * v[:, -4]
        + _ONE_SIDED[4] * v[:, -5]
    ) / h
    rhs = (0.75 / h) * (v[:, 2:] - v[:, :-2])
    rhs[:, 0] -= 0.25 * d[:, 0]
    rhs[:, -1] -= 0.25 * d[:, -1]
    d[:, 1:-1] = solve_banded((1, 1), _banded_lhs(n), rhs.T, check_finite=False).T
    return d


def _flux_divergence_lines(u: np.ndarray, rho: np.ndarray, h: float,
                           aux: np.ndarray | None = None) -> np.ndarray:
    """Interior ((1/rho) u_x)_x for a batch of full lines.

    ``aux``, when given, is a full-line field added to the derivative before
    the density division (the absorbing-layer flux correction).
    """
    du = _derivative_lines(u, h)
    if aux is not None:
        du = du + aux
    phi = du / rho
    return _derivative_lines(phi, h)[:, 1:-1]


def _chunked(fn, batch: int, out: np.ndarray, *arrays) -> None:
    """Apply ``fn(out_slice, *array_slices)`` over leading-axis chunks."""
    threads = _thread_count()
    if threads <= 1 or batch < 2 * threads:
        fn(out, *arrays)
        return
    bounds = np.linspace(0, batch, threads + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(fn, out[lo:hi], *[a[lo:hi] for a in arrays])
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()


def compact_first_derivative_line(line: LineBuffer) -> tuple[np.ndarray, float, float]:
    """Interior derivatives of one line plus the one-sided end derivatives."""
    full = line.full()[None, :]
    d = _derivative_lines(full, line.h)[0]
    return d[1:-1], float(d[0]), float(d[-1])


def flux_divergence_line(u_line: LineBuffer, rho_line: LineBuffer) -> np.ndarray:
    """Interior values of ((1/rho) u_x)_x along one line.

    The six-stage pipeline: boundary derivatives of u by the one-sided
    closure, interior derivatives by the tridiagonal solve, division by the
    density (boundary flux directly from the boundary derivative and
    boundary density), then the same derivative machinery applied to the
    flux line.
    """
    if u_line.interior.size != rho_line.interior.size or u_line.h != rho_line.h:
        raise ValueError("u and rho lines must share length and spacing")
    rho_full = rho_line.full()
    if not (rho_full > 0).all():
        raise ValueError("invalid density")
    return _flux_divergence_lines(u_line.full()[None, :], rho_full[None, :], u_line.h)[0]


def _sweep(values: np.ndarray, rho: np.ndarray, grid: CartesianGrid, axis: int,
           aux: np.ndarray | None = None) -> np.ndarray:
    """Directional flux-divergence sweep; returns the interior-shaped result.

    ``axis`` is the coordinate axis (0 = x).  Lines span the full axis; the
    batch ranges over interior indices of the other axes.
    """
    dims = grid.dims
    arr_axis = dims - 1 - axis
    h = grid.spacings[axis]
    sel = [slice(1, -1)] * dims
    sel[arr_axis] = slice(None)
    sel = tuple(sel)

    def lineize(a: np.ndarray) -> np.ndarray:
        sub = a[sel]
        return np.ascontiguousarray(np.moveaxis(sub, arr_axis, -1))

    u_lines = lineize(values)
    rho_lines = lineize(rho)
    aux_lines = lineize(aux) if aux is not None else None
    batch_shape = u_lines.shape[:-1]
    n_full = u_lines.shape[-1]
    m = int(np.prod(batch_shape))
    u_lines = u_lines.reshape(m, n_full)
    rho_lines = rho_lines.reshape(m, n_full)
    out = np.empty((m, n_full - 2))

    if aux_lines is None:
        def work(o, uu, rr):
            o[...] = _flux_divergence_lines(uu, rr, h)

        _chunked(work, m, out, u_lines, rho_lines)
    else:
        aux_lines = aux_lines.reshape(m, n_full)

        def work(o, uu, rr, xx):
            o[...] = _flux_divergence_lines(uu, rr, h, aux=xx)

        _chunked(work, m, out, u_lines, rho_lines, aux_lines)

    out = out.reshape(*batch_shape, n_full - 2)
    return np.moveaxis(out, -1, arr_axis)


def divergence_laplacian(u: ScalarField, model: MediaModel,
                         bc: BoundarySpec | None = None, t: float = 0.0) -> np.ndarray:
    """Interior div((1/rho) grad u) by per-axis line sweeps.

    When ``bc`` is given, the boundary layer of ``u`` is refreshed from it
    at time ``t`` first; otherwise the stored boundary values are used as-is.
    """
    grid = u.grid
    if grid != model.grid:
        raise ValueError("field and media model on different grids")
    if bc is not None:
        bc.apply(u.values, grid, t)
    out = _sweep(u.values, model.rho.values, grid, axis=0)
    for axis in range(1, grid.dims):
        out += _sweep(u.values, model.rho.values, grid, axis)
    return out


def gradient(values: np.ndarray, grid: CartesianGrid) -> list[np.ndarray]:
    """Full-grid compact first derivatives of ``values`` along every axis.

    Lines parallel to each axis are differentiated over the whole grid
    (boundary-layer lines included); end values come from the one-sided
    closure.
    """
    dims = grid.dims
    grads = []
    for axis in range(dims):
        arr_axis = dims - 1 - axis
        h = grid.spacings[axis]
        lines = np.ascontiguousarray(np.moveaxis(values, arr_axis, -1))
        batch_shape = lines.shape[:-1]
        n_full = lines.shape[-1]
        m = int(np.prod(batch_shape))
        lines = lines.reshape(m, n_full)
        out = np.empty_like(lines)

        def work(o, vv):
            o[...] = _derivative_lines(vv, h)

        _chunked(work, m, out, lines)
        grads.append(np.moveaxis(out.reshape(*batch_shape, n_full), -1, arr_axis))
    return grads
