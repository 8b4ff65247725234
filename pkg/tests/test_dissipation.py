import numpy as np
import pytest

from lagpme import dissipation, mesh
from lagpme.dissipation import SolverError

from conftest import perturbed

P1 = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])


def test_reference_mass_matrices():
    assert np.allclose(dissipation.p1_mass_reference(2), P1 / 12)
    assert np.allclose(dissipation.p1_mass_reference(1), [[1 / 3, 1 / 6], [1 / 6, 1 / 3]])


def test_law1_single_element(unit_triangle):
    M = dissipation.assemble_M_law1(unit_triangle, lambda X: np.ones(len(X))).matrix.toarray()
    assert np.allclose(M, P1 / 24)


def test_law1_1d_interior_row():
    h = 0.1
    tri = mesh.build_interval(0.0, 1.0, 11)
    M = dissipation.assemble_M_law1(tri, np.ones(10)).matrix.toarray()
    assert np.allclose(M[5, 4:7], [h / 6, 2 * h / 3, h / 6])


def test_law1_zero_density_gives_zero_matrix(square):
    M = dissipation.assemble_M_law1(square, np.zeros(square.n_elements)).matrix
    assert abs(M).sum() == 0.0


def test_law2_identity_single_element(unit_triangle):
    M = dissipation.assemble_M_law2(unit_triangle, unit_triangle.identity()).matrix.toarray()
    assert np.allclose(M, P1 / 24)


def test_law2_1d_interior_row():
    tri = mesh.build_interval(0.0, 1.0, 11)
    da = 0.3
    x = (np.arange(11) * da)[:, None]
    M = dissipation.assemble_M_law2(tri, x).matrix.toarray()
    assert np.allclose(M[5, 4:7], [da / 6, 2 * da / 3, da / 6])
    assert M[0, 0] == pytest.approx(da / 3) and M[-1, -1] == pytest.approx(da / 3)


def test_law2_entry_sum_is_deformed_area(square, rng):
    x = perturbed(square, rng, 0.3)
    M = dissipation.assemble_M_law2(square, x).matrix
    assert M.sum() == pytest.approx(np.sum(square.areas * mesh.det_F(square, x)))


def test_law2_rejects_inadmissible(square):
    x = square.identity()
    x[square.elements[0, 1]] = x[square.elements[0, 0]]
    with pytest.raises(mesh.AdmissibilityError):
        dissipation.assemble_M_law2(square, x)


def test_symmetry_sparsity_and_positivity(rng):
    tri = mesh.build_disk(1.0, 0.3, grading=1.0)
    x = perturbed(tri, rng, 0.2)
    for dm in (dissipation.assemble_M_law1(tri, 0.1 + rng.random(tri.n_elements)), dissipation.assemble_M_law2(tri, x)):
        M = dm.matrix.toarray()
        assert np.array_equal(M, M.T)
        share = np.zeros_like(M, dtype=bool)
        for el in tri.elements:
            share[np.ix_(el, el)] = True
        assert not np.any(M[~share])
        V = rng.standard_normal((1000, tri.n_nodes))
        assert np.all(np.einsum("ki,ij,kj->k", V, M, V) >= 0)
        assert np.linalg.eigvalsh(M).min() > 0


def test_apply_and_solve_roundtrip(square, rng):
    dm = dissipation.assemble_M_law2(square, perturbed(square, rng, 0.2))
    assert np.array_equal(dissipation.apply_D(dm, np.zeros(square.n_dof)), np.zeros(square.n_dof))
    v = rng.standard_normal(square.n_dof)
    assert np.allclose(dissipation.apply_D(dm, v), dm.block @ v)
    back = dissipation.solve_D(dm, dissipation.apply_D(dm, v))
    assert np.allclose(back, v, atol=1e-10)


def test_singular_row_is_reported():
    # node 4 is the centre of a 2x2 square; zero density on its whole patch
    tri = mesh.build_structured((0, 1, 0, 1), (2, 2))
    rho = np.ones(tri.n_elements)
    rho[tri.patch(4)] = 0.0
    dm = dissipation.assemble_M_law1(tri, rho)
    with pytest.raises(SolverError, match=r"singular row [048]"):
        dissipation.solve_D(dm, np.ones(tri.n_dof))


def test_indefinite_matrix_is_reported():
    import scipy.sparse as sp

    dm = dissipation.DissipationMatrix(sp.csr_matrix(np.array([[1.0, 2.0], [2.0, 1.0]])), "law1", 1, "test")
    with pytest.raises(SolverError, match="smallest pivot"):
        dissipation.solve_D(dm, np.ones(2))


def test_strip_mesh_matches_1d_closed_form():
    # a 2D strip of height eps: summing over the two rows reproduces the 1D mass
    n = 6
    tri2 = mesh.build_structured((0.0, 1.0, 0.0, 1.0), (n, 1))
    tri1 = mesh.build_interval(0.0, 1.0, n + 1)
    M2 = dissipation.assemble_M_law2(tri2, tri2.identity()).matrix.toarray()
    M1 = dissipation.assemble_M_law2(tri1, tri1.identity()).matrix.toarray()
    lumped = M2[: n + 1, : n + 1] + M2[: n + 1, n + 1 :] + M2[n + 1 :, : n + 1] + M2[n + 1 :, n + 1 :]
    assert np.allclose(lumped, M1)


def test_law2_snapshot_changes_with_configuration(square, rng):
    a = dissipation.assemble_M_law2(square, square.identity())
    b = dissipation.assemble_M_law2(square, perturbed(square, rng, 0.2))
    assert a.snapshot != b.snapshot
    assert dissipation.assemble_M_law1(square, np.ones(square.n_elements)).snapshot == "static"
