import numpy as np
import pytest

from cwave import BoundarySpec, MediaModel, ScalarField, build_grid, sample


def test_build_grid_spacing():
    g = build_grid([(0.0, 1.0), (0.0, 1.0)], [9, 9])
    assert g.spacings == (0.1, 0.1)
    assert g.full_counts == (11, 11)


def test_build_grid_3d_spacing():
    g = build_grid([(0.0, 2.0)] * 3, [79] * 3)
    assert g.spacings == (0.025, 0.025, 0.025)


def test_build_grid_too_small():
    with pytest.raises(ValueError, match="grid too small"):
        build_grid([(0.0, 1.0), (0.0, 1.0)], [4, 9])


def test_build_grid_empty_axis():
    with pytest.raises(ValueError, match="empty axis"):
        build_grid([(1.0, 1.0), (0.0, 1.0)], [9, 9])


def test_flat_index_round_trip():
    g = build_grid([(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)], [5, 7, 9])
    rng = np.random.default_rng(7)
    for _ in range(50):
        idx = tuple(int(rng.integers(0, n)) for n in g.full_counts)
        assert g.unflat_index(g.flat_index(idx)) == idx


def test_flat_index_matches_memory_layout():
    g = build_grid([(0.0, 1.0)] * 3, [5] * 3)
    f = sample(lambda x, y, z: x + 10 * y + 100 * z, g)
    flat = f.values.ravel()
    i, j, k = 2, 3, 4
    assert flat[g.flat_index((i, j, k))] == f.values[k, j, i]


def test_sample_zero():
    g = build_grid([(0.0, 1.0)] * 2, [5, 5])
    f = sample(lambda x, y: 0.0 * x * y, g)
    assert not f.values.any()


def test_sample_example1_density():
    g = build_grid([(0.0, 1.0)] * 3, [9] * 3)
    f = sample(lambda x, y, z: np.exp((-x - y - z) / 3.0), g)
    assert f.values[0, 0, 0] == pytest.approx(1.0)
    assert f.values[-1, -1, -1] == pytest.approx(np.exp(-1.0))


def test_sample_linear_ramp_is_x_fastest():
    g = build_grid([(0.0, 1.0)] * 2, [9, 9])
    f = sample(lambda x, y: x + 0.0 * y, g)
    row = f.values.ravel()[: g.full_counts[0]]
    np.testing.assert_allclose(row, np.arange(11) * 0.1)
    assert (np.diff(row) > 0).all()


def test_sample_scalar_only_function():
    g = build_grid([(0.0, 1.0)] * 2, [5, 5])
    f = sample(lambda x, y: float(x) ** 2, g)
    assert f.values[0, -1] == pytest.approx(1.0)


def test_sample_non_finite():
    g = build_grid([(0.0, 1.0)] * 2, [5, 5])
    with pytest.raises(ValueError, match="non-finite sample"):
        sample(lambda x, y: np.where(x > 0.5, np.nan, 1.0), g)


def test_scalar_field_shape_check():
    g = build_grid([(0.0, 1.0)] * 2, [5, 5])
    with pytest.raises(ValueError, match="does not match"):
        ScalarField(g, np.zeros((3, 3)))


def test_media_model_requires_positive_fields():
    g = build_grid([(0.0, 1.0)] * 2, [5, 5])
    bad = ScalarField(g, np.zeros(g.shape))
    good = ScalarField(g, np.ones(g.shape))
    with pytest.raises(ValueError, match="invalid media model"):
        MediaModel(rho=bad, c=good)


def test_media_model_is_read_only():
    g = build_grid([(0.0, 1.0)] * 2, [5, 5])
    m = MediaModel.constant(2.0, 3.0, g)
    with pytest.raises(ValueError):
        m.rho.values[0, 0] = 5.0


def test_boundary_zero_apply():
    g = build_grid([(0.0, 1.0)] * 2, [5, 5])
    f = ScalarField(g, np.ones(g.shape))
    BoundarySpec.zero(2).apply(f.values, g, 0.3)
    assert not f.values[0, :].any() and not f.values[-1, :].any()
    assert not f.values[:, 0].any() and not f.values[:, -1].any()
    assert (f.interior == 1.0).all()


def test_boundary_from_solution_matches_solution():
    g = build_grid([(0.0, 1.0), (0.0, 2.0)], [7, 9])
    u = lambda t, x, y: np.sin(t) * x + y**2
    f = ScalarField.zeros(g)
    BoundarySpec.from_solution(u, g).apply(f.values, g, 0.7)
    xs = g.axis_coords(0)
    ys = g.axis_coords(1)
    np.testing.assert_allclose(f.values[:, 0], u(0.7, 0.0, ys))
    np.testing.assert_allclose(f.values[:, -1], u(0.7, 1.0, ys))
    np.testing.assert_allclose(f.values[0, :], u(0.7, xs, 0.0))
    np.testing.assert_allclose(f.values[-1, :], u(0.7, xs, 2.0))
