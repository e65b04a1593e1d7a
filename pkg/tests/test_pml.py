import numpy as np
import pytest

from cwave import (
    BoundarySpec,
    DampingField,
    InitialConditions,
    MediaModel,
    PmlForcing,
    PmlLayout,
    PmlRun,
    PmlState2D,
    RunConfig,
    ScalarField,
    SourceSpec,
    WavefieldState,
    build_grid,
    damping_profile,
    leapfrog_step,
    pml_step_direct,
    pml_step_substituted,
    run_simulation,
    sample,
)
from cwave.presets import final_error, preset_example3


# --- damping profiles -------------------------------------------------------

def test_layout_rejects_unknown_profile():
    with pytest.raises(ValueError, match="unknown damping profile"):
        PmlLayout(width=0.2, sigma_max=10.0, profile="cubic")


def test_degenerate_layer():
    g = build_grid([(0.0, 1.0)] * 2, [19] * 2)
    with pytest.raises(ValueError, match="degenerate layer"):
        damping_profile(PmlLayout(width=0.0, sigma_max=100.0), g)


def test_profile_zero_in_interior():
    g = build_grid([(0.0, 1.0)] * 2, [19] * 2)
    d = damping_profile(PmlLayout(width=0.25, sigma_max=100.0), g)
    region = PmlLayout(width=0.25, sigma_max=100.0).interior_region(g)
    assert not d.sigma_x.values[region].any()
    assert not d.sigma_y.values[region].any()
    assert d.sigma_x.values.max() > 0


def test_inverse_distance_first_node():
    g = build_grid([(0.0, 1.0)] * 2, [19] * 2)
    h = g.spacings[0]
    d = damping_profile(PmlLayout(width=0.25, sigma_max=100.0, profile="inverse-distance"), g)
    xs = g.axis_coords(0)
    profile = d.sigma_x.values[0, :]
    # first node inside the low-x layer sits one spacing from the undamped
    # region: the floored inverse distance gives sigma_max there
    node = np.argmin(np.abs(xs - (0.25 - h)))
    assert profile[node] == pytest.approx(100.0)
    # the node on the undamped-region edge is undamped
    assert profile[np.argmin(np.abs(xs - 0.25))] == 0.0
    # deeper nodes decay like h/dist
    assert profile[0] == pytest.approx(100.0 * h / 0.25, rel=1e-6)


def test_linear_profile_halfway():
    g = build_grid([(0.0, 1.0)] * 2, [19] * 2)
    d = damping_profile(PmlLayout(width=0.3, sigma_max=10.0, profile="linear"), g)
    xs = g.axis_coords(0)
    node = np.argmin(np.abs(xs - 0.15))  # halfway through the low-x layer
    assert d.sigma_x.values[0, node] == pytest.approx(10.0 * (0.3 - xs[node]) / 0.3, rel=1e-12)


def test_damping_field_axis_constraint():
    g = build_grid([(0.0, 1.0)] * 2, [9] * 2)
    varies_wrong = sample(lambda x, y: y + 0.0 * x, g)
    ok = sample(lambda x, y: x + 0.0 * y, g)
    with pytest.raises(ValueError, match="vary along x only"):
        DampingField(sigma_x=varies_wrong, sigma_y=varies_wrong)
    DampingField(sigma_x=ok, sigma_y=varies_wrong)  # correct orientation passes


def test_sides_restrict_profile():
    g = build_grid([(0.0, 1.0)] * 2, [19] * 2)
    d = damping_profile(
        PmlLayout(width=0.25, sigma_max=5.0, profile="constant", sides=("x_min", "x_max")), g
    )
    assert d.sigma_x.values.max() == pytest.approx(5.0)
    assert not d.sigma_y.values.any()


# --- degeneracy against the plain stepper -----------------------------------

def _smooth_setup():
    g = build_grid([(0.0, 1.0)] * 2, [24] * 2)
    m = MediaModel.from_functions(
        lambda x, y: 1.0 + 0.3 * x + 0.2 * y, lambda x, y: 1.0 + 0.1 * x + 0.0 * y, g
    )
    u0 = sample(lambda x, y: np.exp(-((x - 0.5) ** 2 + (y - 0.4) ** 2) / 0.02), g)
    bc = BoundarySpec.zero(2)
    bc.apply(u0.values, g, 0.0)
    return g, m, u0, bc


@pytest.mark.parametrize("formulation", ["direct", "substituted"])
def test_zero_damping_matches_leapfrog(formulation):
    g, m, u0, bc = _smooth_setup()
    tau = 0.25 * g.spacings[0]
    zero = DampingField.from_profiles(lambda x: 0.0 * x, lambda y: 0.0 * y, g)
    plain = WavefieldState(u_prev=u0.copy(), u_curr=u0.copy(), n=0, tau=tau)
    pml = PmlState2D.initial(u0.copy(), u0.copy(), tau)
    src = SourceSpec.none()
    for _ in range(10):
        plain = leapfrog_step(plain, m, src, bc)
        if formulation == "direct":
            pml = pml_step_direct(pml, m, zero, src, bc)
        else:
            pml = pml_step_substituted(pml, m, zero, PmlForcing(), bc)
        scale = np.max(np.abs(plain.u_curr.values))
        diff = np.max(np.abs(pml.u_curr.values - plain.u_curr.values))
        assert diff / scale < 1e-12
        assert not pml.v_x.values.any() and not pml.v_y.values.any()


def test_zero_data_stays_zero():
    g, m, _, bc = _smooth_setup()
    tau = 0.25 * g.spacings[0]
    d = damping_profile(PmlLayout(width=0.25, sigma_max=50.0), g)
    state = PmlState2D.initial(ScalarField.zeros(g), ScalarField.zeros(g), tau)
    for _ in range(5):
        state = pml_step_direct(state, m, d, SourceSpec.none(), bc)
    assert not state.u_curr.values.any()
    assert not state.v_x.values.any()


# --- manufactured accuracy (substituted form) --------------------------------

def test_example3_single_grid_error_pinned():
    # frozen from this implementation at h = pi/25; reference table reports
    # 2.2419e-03 for the same study
    err = final_error(preset_example3(h=np.pi / 25.0))
    assert err == pytest.approx(1.7497021044e-03, rel=1e-6)


def test_example3_order_between_two_grids():
    e1 = final_error(preset_example3(h=np.pi / 25.0))
    e2 = final_error(preset_example3(h=np.pi / 50.0))
    order = np.log(e1 / e2) / np.log(2.0)
    assert order == pytest.approx(3.92, abs=0.15)


# --- reflection suppression --------------------------------------------------

def _plane_pulse_return(h, c, damp):
    # a y-invariant pulse travels along x into layers on the x faces only;
    # the y extent is deep enough that y-boundary effects cannot reach the
    # center row within the test horizon
    width = 0.5
    g = build_grid([(-width, 3.0 + width), (0.0, 7.0 * c)],
                   [int(round(4.0 / h)) - 1, int(round(7.0 * c / h)) - 1])
    m = MediaModel.constant(1.0, c, g)
    layout = PmlLayout(width=width, sigma_max=100.0 if damp else 0.0,
                       profile="inverse-distance", sides=("x_min", "x_max"))
    d = damping_profile(layout, g)
    u0 = sample(lambda x, y: np.exp(-((x - 1.5) ** 2) / (2 * 0.2**2)) + 0.0 * y, g)
    bc = BoundarySpec.zero(2)
    bc.apply(u0.values, g, 0.0)
    tau = 0.3 * h / c
    state = PmlState2D.initial(u0.copy(), u0.copy(), tau)
    src = SourceSpec.none()
    xs = g.axis_coords(0)
    ys = g.axis_coords(1)
    row = np.argmin(np.abs(ys - 3.5 * c))
    sel = (xs > 0.3) & (xs < 2.7)
    residual = 0.0
    for _ in range(int(round(3.0 / c / tau))):
        state = pml_step_direct(state, m, d, src, bc)
        if state.t > 2.4 / c:
            residual = max(residual, np.max(np.abs(state.u_curr.values[row, sel])))
    return residual


def test_reflection_suppressed_by_layer():
    # The inverse-distance profile concentrates its damping in a near-grid
    # sheet at the interface (sigma = sigma_max one node in), so its discrete
    # reflection floor scales like (sigma_max h / 2c)^2 plus the transmitted
    # round trip; it suppresses the returning front but does not reach the
    # few-percent regime of ramped profiles.  Measured here: ~16% of the
    # incident amplitude versus 100% without the layer.
    incident = 0.5  # split-pulse amplitude of the unit initial bump
    returned = _plane_pulse_return(h=0.025, c=3.0, damp=True)
    baseline = _plane_pulse_return(h=0.025, c=3.0, damp=False)
    assert baseline > 0.9 * incident  # undamped wall sends the front back
    assert returned < 0.25 * incident
    assert returned < 0.25 * baseline


# --- energy behaviour (short sanity run; the full study is in acceptance) ----

def test_energy_decays_in_short_absorbing_run():
    h = 0.02
    width = 0.2
    g = build_grid([(-width, 1.0 + width), (-width, 1.0 + width)],
                   [int(round(1.4 / h)) - 1] * 2)
    m = MediaModel.constant(1.0, 1.5, g)
    layout = PmlLayout(width=width, sigma_max=100.0, profile="inverse-distance")
    cfg = RunConfig(
        grid=g,
        model=m,
        source=SourceSpec.point_ricker(f_p=5.0, d_r=0.1, location=(0.5, 0.5)),
        bc=BoundarySpec.zero(2),
        ic=InitialConditions.zero(g),
        tau=0.002,
        n_steps=600,
        pml=PmlRun(damping=damping_profile(layout, g), formulation="direct"),
        track_energy=True,
        energy_every=5,
        energy_region=layout.interior_region(g),
    )
    _, _, trace = run_simulation(cfg)
    e = trace.energies
    t = trace.times
    peak = e.max()
    late = e[t > 0.9]
    assert late[-1] < 0.2 * peak
    assert (np.diff(late) <= 0.01 * peak).all()
