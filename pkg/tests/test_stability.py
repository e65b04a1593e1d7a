import numpy as np
import pytest

from cwave import (
    MediaModel,
    amplification_roots,
    analytic_spectra,
    build_1d_composed_operator,
    build_grid,
    cfl_threshold,
    spectral_bound,
    spectral_report,
)
from cwave.compact import CompactSystem
from cwave.stability import CFL_CONSTANT


def _unit_model(dims=3, n=9, extent=1.0):
    g = build_grid([(0.0, extent)] * dims, [n] * dims)
    return MediaModel.constant(1.0, 1.0, g)


def _example2_model(n=19):
    g = build_grid([(0.0, 2.0)] * 3, [n] * 3)
    return MediaModel.from_functions(
        lambda x, y, z: 2.0 * z**2 + 1.0, lambda x, y, z: np.ones_like(x + y + z), g
    )


# --- CFL condition ----------------------------------------------------------

def test_cfl_unit_coefficients():
    m = _unit_model()
    rep = cfl_threshold(m, tau=0.01)
    assert rep.tau_over_h_limit == pytest.approx(2.0 / (3.0 * np.sqrt(3.0)))
    assert rep.threshold == pytest.approx(0.3849, abs=1e-4)
    assert rep.pass_


def test_cfl_example2_threshold():
    m = _example2_model()
    h = m.grid.spacings[0]
    rep = cfl_threshold(m, tau=0.1 * h)
    assert rep.q_max / rep.q_min == pytest.approx(9.0)
    assert rep.tau_over_h_limit == pytest.approx(2.0 / (9.0 * np.sqrt(3.0)), rel=1e-12)
    assert rep.tau_over_h_limit == pytest.approx(0.1283, abs=1e-4)
    assert rep.pass_
    assert not cfl_threshold(m, tau=0.15 * h).pass_


def test_cfl_closed_form_limit():
    # c_max = 2, q ratio 4  ->  limit = 0.3849/(2*2)
    from cwave import sample

    g = build_grid([(0.0, 1.0)] * 2, [9] * 2)
    rho = sample(lambda x, y: 1.0 + 3.0 * x + 0.0 * y, g)  # ratio 4 at the edges
    c = sample(lambda x, y: 2.0 + 0.0 * x * y, g)
    m = MediaModel(rho=rho, c=c)
    rep = cfl_threshold(m, tau=0.001)
    assert rep.tau_over_h_limit == pytest.approx(CFL_CONSTANT / 4.0, rel=1e-12)
    assert rep.tau_over_h_limit == pytest.approx(0.0962, abs=1e-4)


def test_cfl_r_definition():
    m = _example2_model()
    tau, h = 0.002, m.grid.spacings[0]
    rep = cfl_threshold(m, tau)
    assert rep.r == pytest.approx(1.0 * 9.0 * tau**2 / h**2, rel=1e-12)


# --- analytic spectra -------------------------------------------------------

def test_spectra_n1():
    eigs_a, eigs_b = analytic_spectra(1)
    assert eigs_a[0] == pytest.approx(1.0)
    assert eigs_b[0] == pytest.approx(0.0, abs=1e-15)


def test_spectra_n3_against_dense():
    eigs_a, _ = analytic_spectra(3)
    dense = np.sort(np.linalg.eigvalsh(CompactSystem(3).lhs_dense()))
    np.testing.assert_allclose(np.sort(eigs_a), dense, atol=1e-12)
    np.testing.assert_allclose(
        np.sort(eigs_a), [1 - np.sqrt(2) / 4, 1.0, 1 + np.sqrt(2) / 4], atol=1e-12
    )


@pytest.mark.parametrize("n", [2, 5, 9, 16, 33])
def test_spectra_bounds(n):
    eigs_a, eigs_b = analytic_spectra(n)
    assert eigs_a.min() > 0.5 and eigs_a.max() < 1.5
    assert np.abs(eigs_b).max() < 1.5


@pytest.mark.parametrize("n", list(range(2, 17)))
def test_spectra_match_dense_eigensolves(n):
    eigs_a, eigs_b = analytic_spectra(n)
    sysm = CompactSystem(n)
    dense_a = np.linalg.eigvalsh(sysm.lhs_dense())
    np.testing.assert_allclose(np.sort(eigs_a), np.sort(dense_a), atol=1e-10)
    dense_b = np.linalg.eigvals(sysm.rhs_dense())
    assert np.max(np.abs(dense_b.real)) < 1e-10
    np.testing.assert_allclose(np.sort(dense_b.imag), np.sort(eigs_b), atol=1e-10)


# --- composed operator ------------------------------------------------------

def test_composed_n2_real_negative():
    m = build_1d_composed_operator(2)
    eigs = np.linalg.eigvals(m)
    assert np.max(np.abs(eigs.imag)) < 1e-10
    assert (eigs.real <= 1e-12).all()
    assert np.trace(m) == pytest.approx(eigs.real.sum(), abs=1e-10)


def test_composed_odd_is_singular():
    eigs = np.linalg.eigvals(build_1d_composed_operator(5))
    assert np.min(np.abs(eigs)) < 1e-10


def test_composed_even_is_regular_and_contained():
    eigs = np.linalg.eigvals(build_1d_composed_operator(8))
    assert np.max(np.abs(eigs.imag)) < 1e-10
    assert np.min(np.abs(eigs)) > 1e-10
    assert (eigs.real > -9.0).all() and (eigs.real < 0.0).all()


@pytest.mark.parametrize("n", list(range(2, 17)))
def test_composed_spectrum_containment(n):
    eigs = np.linalg.eigvals(build_1d_composed_operator(n))
    assert np.max(np.abs(eigs.imag)) < 1e-10
    assert (eigs.real > -9.0).all() and (eigs.real <= 1e-12).all()
    if n % 2 == 1:
        assert np.min(np.abs(eigs)) < 1e-10
    else:
        assert np.min(np.abs(eigs)) > 1e-10


@pytest.mark.parametrize("n", [2, 3])
def test_kronecker_sum_spectrum(n):
    m = build_1d_composed_operator(n)
    eye = np.eye(n)
    big = (np.kron(np.kron(eye, eye), m)
           + np.kron(np.kron(eye, m), eye)
           + np.kron(np.kron(m, eye), eye))
    got = np.sort(np.linalg.eigvals(big).real)
    lam = np.linalg.eigvals(m).real
    expect = np.sort([a + b + c for a in lam for b in lam for c in lam])
    np.testing.assert_allclose(got, expect, atol=1e-8)
    assert got.min() > -27.0


# --- frozen-coefficient bound -----------------------------------------------

def test_spectral_bound_values():
    assert spectral_bound(_unit_model()) == pytest.approx(27.0)
    assert spectral_bound(_example2_model()) == pytest.approx(243.0)
    from cwave import sample

    g = build_grid([(0.0, 1.0)] * 2, [9] * 2)
    m = MediaModel(
        rho=sample(lambda x, y: 1.0 + x + 0.0 * y, g),
        c=sample(lambda x, y: 3.0 + 0.0 * x * y, g),
    )
    assert spectral_bound(m) == pytest.approx(27.0 * 9.0 * 2.0)


def test_spectral_report_zero_eig_flag():
    assert spectral_report(5).zero_eig_present
    assert not spectral_report(8).zero_eig_present
    rep = spectral_report(8)
    assert rep.bound == pytest.approx(27.0)
    assert max(abs(z.imag) for z in rep.eigenvalues_composed) < 1e-10
    assert all(-9.0 < z.real <= 1e-12 for z in rep.eigenvalues_composed)


# --- character equation -----------------------------------------------------

@pytest.mark.parametrize("r", [0.01, 0.1, 0.14])
def test_amplification_roots_on_unit_circle(r):
    roots = amplification_roots(r)
    np.testing.assert_allclose(np.abs(roots), 1.0, atol=1e-12)


@pytest.mark.parametrize("r", [0.149, 0.2])
def test_amplification_roots_leave_unit_circle(r):
    assert np.max(np.abs(amplification_roots(r))) > 1.0 + 1e-8
