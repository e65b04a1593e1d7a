import numpy as np
import pytest

from cwave import (
    BoundarySpec,
    EnergyTrace,
    InitialConditions,
    MediaModel,
    ParticleVelocity,
    RunConfig,
    ScalarField,
    acoustic_energy,
    build_grid,
    convergence_order,
    max_norm_error,
    particle_velocity_update,
    run_simulation,
    sample,
    SourceSpec,
)


# --- norms and orders ---------------------------------------------------------

def test_max_norm_identical_fields():
    g = build_grid([(0.0, 1.0)] * 2, [9] * 2)
    f = sample(lambda x, y: x * y, g)
    assert max_norm_error(f, f.copy()) == 0.0


def test_max_norm_single_node_difference():
    g = build_grid([(0.0, 1.0)] * 2, [9] * 2)
    a = ScalarField.zeros(g)
    b = ScalarField.zeros(g)
    b.values[3, 4] += 1e-3
    assert max_norm_error(a, b) == pytest.approx(1e-3)


def test_max_norm_ignores_boundary():
    g = build_grid([(0.0, 1.0)] * 2, [9] * 2)
    a = ScalarField.zeros(g)
    b = ScalarField.zeros(g)
    b.values[0, :] = 99.0
    assert max_norm_error(a, b) == 0.0


def test_max_norm_grid_mismatch():
    a = ScalarField.zeros(build_grid([(0.0, 1.0)] * 2, [9] * 2))
    b = ScalarField.zeros(build_grid([(0.0, 1.0)] * 2, [7] * 2))
    with pytest.raises(ValueError, match="different grids"):
        max_norm_error(a, b)


def test_convergence_order_exact_fourth():
    assert convergence_order(16e-6, 0.2, 1e-6, 0.1) == pytest.approx(4.0)


def test_convergence_order_reference_pair():
    assert convergence_order(7.6115e-05, 1 / 10, 9.5211e-06, 1 / 16) == pytest.approx(
        4.4228, abs=1e-3
    )


def test_convergence_order_equal_errors():
    assert convergence_order(1e-5, 0.2, 1e-5, 0.1) == 0.0


def test_convergence_order_antisymmetric():
    a = convergence_order(3e-4, 0.2, 2e-5, 0.1)
    b = convergence_order(2e-5, 0.1, 3e-4, 0.2)
    assert a == pytest.approx(b)


def test_convergence_order_invalid_errors():
    with pytest.raises(ValueError, match="invalid error pair"):
        convergence_order(0.0, 0.2, 1e-5, 0.1)


# --- particle velocity --------------------------------------------------------

def _unit_setup():
    g = build_grid([(0.0, 1.0)] * 2, [9] * 2)
    return g, MediaModel.constant(1.0, 1.0, g)


def test_velocity_unchanged_for_flat_field():
    g, m = _unit_setup()
    v = ParticleVelocity.zero(g)
    u = ScalarField(g, np.full(g.shape, 2.0))
    v2 = particle_velocity_update(v, u, u.copy(), m.rho, tau=0.1)
    # gradient of a constant is zero up to closure-coefficient roundoff
    np.testing.assert_allclose(v2.v_x.values, 0.0, atol=1e-13)
    np.testing.assert_allclose(v2.v_y.values, 0.0, atol=1e-13)


def test_velocity_linear_field_drift():
    g, m = _unit_setup()
    v = ParticleVelocity.zero(g)
    u = sample(lambda x, y: x + 0.0 * y, g)
    tau = 0.05
    v2 = particle_velocity_update(v, u, u.copy(), m.rho, tau)
    np.testing.assert_allclose(v2.v_x.values, -tau, atol=1e-12)
    np.testing.assert_allclose(v2.v_y.values, 0.0, atol=1e-12)


# --- energy functional --------------------------------------------------------

def test_energy_zero_fields():
    g, m = _unit_setup()
    assert acoustic_energy(ScalarField.zeros(g), ParticleVelocity.zero(g), m) == 0.0


def test_energy_constant_pressure_unit_square():
    g, m = _unit_setup()
    u = ScalarField(g, np.ones(g.shape))
    e = acoustic_energy(u, ParticleVelocity.zero(g), m)
    assert e == pytest.approx(0.5, rel=1e-12)


def test_energy_nonnegative_random_fields():
    g, m = _unit_setup()
    rng = np.random.default_rng(0)
    for _ in range(5):
        u = ScalarField(g, rng.normal(size=g.shape))
        v = ParticleVelocity(
            ScalarField(g, rng.normal(size=g.shape)), ScalarField(g, rng.normal(size=g.shape))
        )
        assert acoustic_energy(u, v, m) >= 0.0


def test_energy_region_restriction():
    g, m = _unit_setup()
    u = ScalarField(g, np.ones(g.shape))
    region = (slice(0, g.shape[0]), slice(0, g.shape[1] // 2 + 1))
    partial = acoustic_energy(u, ParticleVelocity.zero(g), m, region=region)
    assert partial == pytest.approx(0.25, rel=1e-12)


def test_energy_conserved_without_absorbing_layer():
    # zero-Dirichlet cavity, no source: the windowed trace stays within 20%
    g = build_grid([(0.0, 1.0)] * 2, [39] * 2)
    m = MediaModel.constant(1.0, 1.0, g)
    cfg = RunConfig(
        grid=g,
        model=m,
        source=SourceSpec.none(),
        bc=BoundarySpec.zero(2),
        ic=InitialConditions.from_functions(
            lambda x, y: np.exp(-((x - 0.5) ** 2 + (y - 0.5) ** 2) / 0.01),
            lambda x, y: 0.0 * x * y,
            g,
        ),
        tau=0.25 * g.spacings[0],
        n_steps=300,
        track_energy=True,
        energy_every=10,
    )
    _, _, trace = run_simulation(cfg)
    e = trace.energies[1:]  # first sample has v = 0 by construction
    assert e.max() / e.min() < 1.2


# --- EnergyTrace --------------------------------------------------------------

def test_trace_requires_increasing_time():
    tr = EnergyTrace()
    tr.append(0.0, 1.0)
    with pytest.raises(ValueError, match="increasing"):
        tr.append(0.0, 2.0)


def test_trace_rejects_negative_energy():
    tr = EnergyTrace()
    with pytest.raises(ValueError, match="nonnegative"):
        tr.append(0.0, -1.0)


def test_trace_csv_round_trip(tmp_path):
    tr = EnergyTrace()
    tr.append(0.0, 0.0)
    tr.append(0.1 + 1e-17, 1.0 / 3.0)
    tr.append(0.2, 12345.678901234567)
    path = tmp_path / "energy.csv"
    tr.write_csv(path)
    text = path.read_text()
    assert text.splitlines()[0] == "t,E"
    back = EnergyTrace.read_csv(path)
    assert back.samples == tr.samples


def test_trace_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,energy\n0,1\n")
    with pytest.raises(ValueError, match="malformed energy CSV"):
        EnergyTrace.read_csv(path)
