import json

import numpy as np
import pytest

from freedeq import fdesolver as fde
from freedeq import matcore
from freedeq import transforms as tr
from freedeq.errors import (
    CoverageError,
    DimensionError,
    FixedPointError,
    GridError,
    InputError,
)


def two_projection_model(N):
    p = np.diag([1.0] * (N // 2) + [0.0] * (N // 2)).astype(complex)
    return fde.model_spec(N, [N, N], [np.eye(N), np.eye(N)], [p, p])


def g_arcsine(z):
    """Transform of the measure on [0, 2] from two free half projections."""
    return 1.0 / (np.sqrt(z) * np.sqrt(z - 2.0))


def test_model_validation():
    with pytest.raises(DimensionError):
        fde.model_spec(4, [4, 4], [np.eye(4)], [np.eye(4)])
    with pytest.raises(InputError):
        fde.model_spec(4, [4], [np.eye(4)], [np.triu(np.ones((4, 4)))])
    with pytest.raises(DimensionError):
        fde.model_spec(4, [3], [np.eye(4)], [np.eye(3)])


def test_point_mass_reduction():
    N = 12
    m = fde.model_spec(N, [N], [np.eye(N)], [np.eye(N)])
    for z in np.linspace(-3, 3, 25) + 0.05j:
        sol = fde.solve_point(m, z, want_w=False)
        assert abs(sol.G - 1.0 / (z - 1.0)) < 1e-10
        assert abs(sol.f[0] - 1.0 / (z - 1.0)) < 1e-10


def test_hermitian_reduction():
    rng = np.random.default_rng(21)
    N = 32
    a = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    t = (a + a.conj().T) / 2
    m = fde.model_spec(N, [N], [np.eye(N)], [t])
    mu = tr.matrix_measure(t)
    prep = fde.prepare(m)
    for z in np.linspace(-6, 6, 31) + 0.1j:
        sol = fde.solve_point(prep, z, want_w=False)
        assert abs(sol.G - tr.cauchy(mu, z)) < 1e-8


def test_two_projection_arcsine():
    m = two_projection_model(32)
    res = fde.solve_grid(m, fde.GridSpec(-0.5, 2.5, 41, 0.05))
    assert not res.failures
    for z, g in zip(res.spectral.grid, res.spectral.G):
        assert abs(g - g_arcsine(z)) < 1e-8
    assert all(s.herglotz_ok for s in res.solutions)


def test_converged_y_is_inverse_branch():
    # the solver's internal evaluation points invert the individual
    # transforms at the reported f values
    m = two_projection_model(16)
    prep = fde.prepare(m)
    sol = fde.solve_point(prep, 0.7 + 0.1j, want_w=False)
    for a, i in enumerate([0, 1]):
        mu = prep.measures[i]
        assert abs(tr.cauchy(mu, sol.y[a]) - sol.f[i]) < 1e-9
        r_direct = tr.r_transform_newton(mu, sol.f[i], x0=sol.y[a])
        g, rho, _ = fde._sub_terms(mu, sol.y[a], False)
        assert abs(r_direct - rho) < 1e-9


def test_resolvent_matrix():
    m = two_projection_model(16)
    sol = fde.solve_point(m, 1.0 + 0.2j, want_w=True)
    assert sol.W is not None
    assert abs(np.trace(sol.W) / 16 - sol.G) < 1e-9
    b = np.eye(16)
    assert abs(np.sum(sol.W * b.T) / 16 - sol.f[0]) < 1e-9


def test_tail_behavior():
    m = fde.model_spec(16, [16], [np.eye(16)],
                       [np.diag(np.linspace(-1, 1, 16)).astype(complex)])
    for mag in (100.0, 1e3, 1e4):
        sol = fde.solve_point(m, mag * 1j, want_w=False)
        assert abs(mag * 1j * sol.G - 1.0) <= 10.0 / mag


def test_zero_blocks():
    N = 8
    m = fde.model_spec(N, [N, N], [np.eye(N), np.zeros((N, N))],
                       [np.eye(N), np.eye(N)])
    sol = fde.solve_point(m, 0.5 + 0.1j, want_w=False)
    assert sol.f[1] == 0
    assert abs(sol.G - 1.0 / (0.5 + 0.1j - 1.0)) < 1e-10
    m0 = fde.model_spec(N, [N], [np.eye(N)], [np.zeros((N, N))])
    sol = fde.solve_point(m0, 0.5 + 0.1j, want_w=False)
    assert abs(sol.G - 1.0 / (0.5 + 0.1j)) < 1e-12


def test_solve_point_requires_upper_half_plane():
    m = two_projection_model(8)
    with pytest.raises(GridError):
        fde.solve_point(m, 1.0 - 0.1j)


def test_grid_single_point_matches_solve_point():
    m = two_projection_model(16)
    z = np.array([0.8 + 0.07j])
    res = fde.solve_grid(m, z)
    sol = fde.solve_point(m, z[0], want_w=False)
    assert abs(res.spectral.G[0] - sol.G) < 1e-10


def test_grid_warm_equals_cold():
    m = two_projection_model(24)
    grid = fde.GridSpec(-0.3, 2.3, 21, 0.08)
    warm = fde.solve_grid(m, grid, warm_start=True)
    cold = fde.solve_grid(m, grid, warm_start=False)
    assert not warm.failures and not cold.failures
    assert np.abs(warm.spectral.G - cold.spectral.G).max() < 1e-8
    assert np.median(warm.iterations) <= np.median(cold.iterations)


def test_grid_threads_deterministic():
    m = two_projection_model(16)
    grid = fde.GridSpec(-0.2, 2.2, 17, 0.06)
    a = fde.solve_grid(m, grid, threads=1)
    b = fde.solve_grid(m, grid, threads=3)
    assert np.array_equal(a.spectral.G, b.spectral.G)


def test_grid_marks_failures():
    m = two_projection_model(16)
    res = fde.solve_grid(m, fde.GridSpec(0.0, 2.0, 5, 0.05), max_iter=2,
                         homotopy=False, warm_start=False)
    assert res.failures
    assert np.isnan(res.spectral.G[res.failures[0]]).all() or \
        np.isnan(res.spectral.G[res.failures[0]].real)


def test_dense_path_matches_fast_path():
    # same commuting model, solved with and without the joint eigenbasis
    rng = np.random.default_rng(22)
    N = 16
    d1 = np.diag(rng.uniform(0.5, 2.0, N)).astype(complex)
    d2 = np.diag(rng.uniform(0.1, 1.0, N)).astype(complex)
    h1 = matcore.as_cmatrix(np.sqrt(d1))
    h2 = matcore.as_cmatrix(np.sqrt(d2))
    t1 = np.diag(rng.normal(size=N)).astype(complex)
    t2 = np.diag(rng.normal(size=N)).astype(complex)
    m = fde.model_spec(N, [N, N], [h1, h2], [t1, t2])
    prep_fast = fde.prepare(m)
    assert prep_fast.joint_cols is not None
    prep_dense = fde.prepare(m)
    prep_dense.joint_cols = None
    prep_dense.joint_V = None
    for z in (0.4 + 0.1j, -1.0 + 0.05j):
        a = fde.solve_point(prep_fast, z, want_w=False)
        b = fde.solve_point(prep_dense, z, want_w=False)
        assert abs(a.G - b.G) < 1e-9


def test_noncommuting_uses_dense_path():
    rng = np.random.default_rng(23)
    N = 12
    h1 = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    h2 = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    m = fde.model_spec(N, [N, N], [h1 / np.sqrt(N), h2 / np.sqrt(N)],
                       [np.diag(rng.normal(size=N)).astype(complex),
                        np.diag(rng.normal(size=N)).astype(complex)])
    prep = fde.prepare(m)
    assert prep.joint_cols is None
    sol = fde.solve_point(prep, 0.3 + 0.2j, want_w=True)
    assert sol.herglotz_ok
    assert sol.residual < 1e-9
    # resolvent identity: (zI - sum B_i rho_i) W = I
    assert sol.W is not None


def test_pad_rectangular():
    t = np.eye(2, dtype=complex)
    padded = fde.pad_rectangular_T(t, 4)
    mu = tr.matrix_measure(padded)
    assert sorted(mu.atoms) == pytest.approx([0, 0, 1, 1])
    assert np.array_equal(fde.pad_rectangular_T(t, 2), t)
    rng = np.random.default_rng(24)
    a = rng.standard_normal((3, 3))
    t3 = (a + a.T) / 2
    padded = fde.pad_rectangular_T(t3, 5)
    for m in range(1, 5):
        lhs = np.trace(np.linalg.matrix_power(padded, m)) / 5
        rhs = (3 / 5) * np.trace(np.linalg.matrix_power(t3, m)) / 3
        assert lhs == pytest.approx(rhs)
    with pytest.raises(DimensionError):
        fde.pad_rectangular_T(np.eye(4), 2)


def test_moments_point_mass():
    N = 8
    m = fde.model_spec(N, [N], [np.eye(N)], [np.eye(N)])
    mom = fde.fde_moments(m, 3, eta=0.01)
    assert np.abs(np.array(mom) - 1.0).max() < 1e-2


def test_moments_two_projections():
    m = two_projection_model(16)
    mom = fde.fde_moments(m, 2, eta=0.01)
    assert abs(mom[0] - 1.0) < 1e-2
    assert abs(mom[1] - 1.5) < 2e-2


def test_moments_coverage_error():
    m = two_projection_model(8)
    with pytest.raises(CoverageError):
        fde.fde_moments(m, 2, eta=0.01, x_min=0.8, x_max=1.2)


def test_model_json(tmp_path):
    h = np.eye(4, dtype=complex)
    hfile = tmp_path / "h.csv"
    matcore.write_matrix_csv(hfile, h)
    doc = {
        "k": 2,
        "N": 4,
        "sizes": [4, 4],
        "H": [{"kind": "identity"}, {"file": "h.csv"}],
        "T": [{"kind": "diag", "values": [1, 1, 0, 0]},
              {"kind": "projection", "rank": 2}],
    }
    path = tmp_path / "model.json"
    path.write_text(json.dumps(doc))
    model = fde.load_model(path)
    assert model.k == 2 and model.N == 4
    assert np.array_equal(model.T[0], model.T[1])

    doc["T"][0]["values"] = [1, 1]
    path.write_text(json.dumps(doc))
    with pytest.raises(InputError):
        fde.load_model(path)

    doc["T"][0]["values"] = [1, 1, 0, 0]
    doc["H"][1]["file"] = "missing.csv"
    path.write_text(json.dumps(doc))
    with pytest.raises(InputError):
        fde.load_model(path)

    with pytest.raises(InputError):
        fde.load_model(tmp_path / "nothere.json")


def test_model_json_gaussian_deterministic(tmp_path):
    doc = {
        "k": 1, "N": 6, "sizes": [6],
        "H": [{"kind": "gaussian", "seed": 11, "scale": 2.0}],
        "T": [{"kind": "identity"}],
    }
    p1 = tmp_path / "a.json"
    p1.write_text(json.dumps(doc))
    m1 = fde.load_model(p1)
    m2 = fde.load_model(p1)
    assert np.array_equal(m1.H[0], m2.H[0])
    assert np.abs(m1.H[0]).max() > 0
