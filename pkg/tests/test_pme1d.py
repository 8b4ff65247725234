import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lagpme import mesh, oracle, pme1d, solver
from lagpme.energy import EnergyLaw


def table1_grid(alpha, N=51):
    B = oracle.Barenblatt(alpha)
    r = B.radius(1.0)
    X = np.linspace(-r, r, N)
    return pme1d.Grid1D.from_function(X, lambda s: B.value(s, 1.0), alpha)


@pytest.mark.parametrize("scheme,law", [("scheme1", "law1"), ("scheme2", "law2")])
@pytest.mark.parametrize("alpha", [3.0, 4.0])
def test_general_machinery_solution_zeroes_residual(scheme, law, alpha):
    grid = table1_grid(alpha)
    tri = mesh.from_1d_nodes(grid.X)
    x1, _ = solver.step_backward_euler(tri, tri.identity(), EnergyLaw(law, alpha), grid.rho_mid, 0.01)
    fn = pme1d.residual_scheme1 if scheme == "scheme1" else pme1d.residual_scheme2
    assert np.abs(fn(grid, grid.X, x1[:, 0], 0.01)).max() <= 1e-10


def test_zero_density_leaves_only_mass_term():
    X = np.linspace(0, 1, 9)
    grid = pme1d.Grid1D.from_function(X, np.zeros_like, 3.0)
    assert np.all(pme1d.residual_scheme1(grid, X, X, 0.1) == 0)
    a = X + 0.01 * np.sin(np.pi * X)
    assert np.abs(pme1d.residual_scheme1(grid, X, a, 0.1)).max() == 0  # M vanishes with rho0
    r2 = pme1d.residual_scheme2(grid, X, a, 0.1)
    lo, di, up = pme1d.mass_scheme2(X)
    assert np.allclose(r2, pme1d._tridiag_apply(lo, di, up, (a - X) / 0.1))
    assert np.abs(r2).max() > 0


@pytest.mark.parametrize("fn", [pme1d.residual_scheme1, pme1d.residual_scheme2])
def test_symmetric_data_gives_antisymmetric_residual(fn):
    X = np.linspace(-1, 1, 7)
    grid = pme1d.Grid1D.from_function(X, lambda s: 1.0 + np.cos(s), 4.0)
    a = 1.2 * X + 0.05 * X ** 3
    r = fn(grid, X, a, 0.05)
    assert np.allclose(r, -r[::-1], atol=1e-13)


def test_alpha2_uniform_stretch():
    X = np.linspace(0, 1, 6)
    a = 1.5 * X
    flat = pme1d.Grid1D.from_function(X, lambda s: np.full_like(s, 0.8), 2.0)
    bumpy = pme1d.Grid1D.from_function(X, lambda s: 0.8 + 0.1 * s, 2.0)
    tau = 0.1
    # with a = a_n the mass term vanishes; the interior flux jumps cancel only for equal densities
    r_flat = pme1d.residual_scheme2(flat, a, a, tau)
    r_bumpy = pme1d.residual_scheme2(bumpy, a, a, tau)
    assert np.abs(r_flat[1:-1]).max() <= 1e-14
    assert np.abs(r_bumpy[1:-1]).min() > 1e-3
    q = 2.0 * 0.8 / 1.5
    assert r_flat[0] == pytest.approx(q) and r_flat[-1] == pytest.approx(-q)


def test_scheme2_boundary_rows_are_one_sided():
    a = np.array([0.0, 0.5, 1.5, 1.75])
    lo, di, up = pme1d.mass_scheme2(a)
    assert di[0] == pytest.approx(0.5 / 3) and di[-1] == pytest.approx(0.25 / 3)
    assert di[1] == pytest.approx((0.5 + 1.0) / 3)
    assert np.allclose(lo, [0.5 / 6, 1.0 / 6, 0.25 / 6]) and np.allclose(up, lo)


@given(c=st.floats(-50, 50), tau=st.floats(1e-3, 1.0))
def test_translation_equivariance(c, tau):
    grid = table1_grid(4.0, 11)
    a = grid.X * 1.1
    for fn in (pme1d.residual_scheme1, pme1d.residual_scheme2):
        shifted = pme1d.Grid1D(grid.X + c, grid.rho_mid, grid.alpha)
        assert np.allclose(fn(grid, grid.X, a, tau), fn(shifted, grid.X + c, a + c, tau), rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("alpha", [3.0, 4.0])
@pytest.mark.parametrize("N", [51, 101, 201])
def test_newton_converges_quickly_on_table_data(alpha, N):
    grid = table1_grid(alpha, N)
    a, iters = pme1d.solve_step(grid, grid.X, 0.01, "scheme2")
    assert iters <= 10
    assert np.abs(pme1d.residual_scheme2(grid, grid.X, a, 0.01)).max() <= 1e-12


def test_verbatim_stencil_differs_from_symmetric():
    grid = table1_grid(4.0, 21)
    a = grid.X + 0.02 * np.sin(grid.X)
    sym = pme1d.residual_scheme2(grid, grid.X, a, 0.01)
    verb = pme1d.residual_scheme2(grid, grid.X, a, 0.01, stencil="verbatim")
    assert np.abs(sym - verb).max() > 1e-3


def test_input_validation():
    with pytest.raises(ValueError):
        pme1d.Grid1D.from_function([0, 1, 1], np.ones_like, 2.0)
    with pytest.raises(ValueError):
        pme1d.Grid1D.from_function([0, 1, 2], lambda s: -np.ones_like(s), 2.0)
    grid = table1_grid(3.0, 5)
    with pytest.raises(ValueError, match="not strictly increasing"):
        pme1d.residual_scheme1(grid, grid.X, grid.X[::-1], 0.1)
    with pytest.raises(ValueError):
        pme1d.solve_step(grid, grid.X, 0.1, "scheme3")


def test_closed_form_run_matches_general_run():
    grid = table1_grid(4.0, 31)
    tri = mesh.from_1d_nodes(grid.X)
    traj = solver.run(tri, tri.identity(), EnergyLaw("law2", 4.0), grid.rho_mid, 0.02, 0.1)
    closed = pme1d.run_closed_form(grid, 0.02, 5)
    assert len(closed) == len(traj.configs)
    assert max(np.abs(c - x[:, 0]).max() for c, x in zip(closed, traj.configs)) <= 1e-10
