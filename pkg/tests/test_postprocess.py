import math

import numpy as np
import pytest
from conftest import perturbed

from lagpme import mesh, oracle, postprocess, solver
from lagpme.energy import EnergyLaw


def test_identity_density_equals_reference(square, rng):
    rc = rng.uniform(0.1, 2, square.n_elements)
    xc, rho = postprocess.density_at_centroids(square, square.identity(), rc)
    assert np.array_equal(rho, rc) and np.allclose(xc, square.centroids)
    rn = rng.uniform(0.1, 2, square.n_nodes)
    assert np.allclose(postprocess.density_at_nodes(square, square.identity(), rn), rn, rtol=1e-15)


def test_dilation(square, rng):
    rc = rng.uniform(0.1, 2, square.n_elements)
    rn = rng.uniform(0.1, 2, square.n_nodes)
    x = 2.0 * square.identity()
    _, rho = postprocess.density_at_centroids(square, x, rc)
    assert np.allclose(rho, rc / 4)
    assert np.allclose(postprocess.density_at_nodes(square, 3.0 * square.identity(), rn), rn / 9)


def test_1d_single_element_changes():
    tri = mesh.build_interval(0, 3, 4)
    x = tri.identity()
    x[2:] += 1.0  # element 1 doubled
    _, rho = postprocess.density_at_centroids(tri, x, np.ones(3))
    assert np.allclose(rho, [1, 0.5, 1])
    nodal = postprocess.density_at_nodes(tri, x, np.full(4, 2.0))
    assert nodal[0] == pytest.approx(2.0) and nodal[3] == pytest.approx(2.0)
    assert nodal[1] == pytest.approx(2.0 * 2 / 3)


def test_nodal_density_is_patch_formula(square, rng):
    x = perturbed(square, rng, 0.05)
    J = mesh.det_F(square, x)
    rn = rng.uniform(0.5, 1.5, square.n_nodes)
    got = postprocess.density_at_nodes(square, x, rn)
    for i in range(square.n_nodes):
        G = square.patch(i)
        assert got[i] == pytest.approx(rn[i] * square.areas[G].sum() / (square.areas[G] * J[G]).sum(), rel=1e-13)


def test_l2_error_examples(square, rng):
    x = perturbed(square, rng, 0.05)
    rc = rng.uniform(0.1, 2, square.n_elements)
    xc, rho = postprocess.density_at_centroids(square, x, rc)
    lookup = {tuple(p): r for p, r in zip(xc, rho)}

    def exact(pts):
        return np.array([lookup[tuple(p)] for p in pts])

    assert postprocess.l2_error(square, x, rc, exact) == 0.0
    A = float(np.sum(square.areas * mesh.det_F(square, x)))
    c = 0.3
    err = postprocess.l2_error(square, x, rc, lambda pts: exact(pts) + c)
    assert err == pytest.approx(c * math.sqrt(A), rel=1e-13)
    assert postprocess.max_centroid_error(square, x, rc, lambda pts: exact(pts) + c) == pytest.approx(c)


def test_l2_error_relabelling_invariance(square, rng):
    x = perturbed(square, rng, 0.05)
    rc = rng.uniform(0.1, 2, square.n_elements)
    exact = oracle.two_peaks()
    perm = rng.permutation(square.n_elements)
    relabelled = mesh.Triangulation.from_arrays(square.nodes, square.elements[perm])
    a = postprocess.l2_error(square, x, rc, exact)
    b = postprocess.l2_error(relabelled, x, rc[perm], exact)
    assert a == pytest.approx(b, rel=1e-13)


def test_mass_identity(square, rng):
    for _ in range(20):
        x = perturbed(square, rng, 0.08)
        rc = rng.uniform(0.0, 3, square.n_elements)
        m0 = float(np.sum(rc * square.areas))
        assert postprocess.reconstructed_mass(square, x, rc) == pytest.approx(m0, rel=1e-13)


def test_interfaces_at_identity():
    tri = mesh.build_interval(-1.5, 1.5, 11)
    assert postprocess.interface_extract(tri, tri.identity()) == (-1.5, 1.5)
    disk = mesh.build_disk(1.0, 0.3, seed=1)
    radial, loop = postprocess.interface_extract(disk, disk.identity())
    assert radial == pytest.approx(1.0, abs=1e-3)
    assert loop.shape[1] == 2 and len(loop) == disk.boundary_nodes.size
    assert postprocess.radial_location(disk, 0.5 * disk.identity(), 1.0) == 1.0


def test_boundary_loop_is_closed_chain(square):
    loop = postprocess.boundary_loop(square)
    assert sorted(loop.tolist()) == sorted(square.boundary_nodes.tolist())
    steps = np.diff(square.nodes[np.append(loop, loop[0])], axis=0)
    assert np.allclose(np.linalg.norm(steps, axis=1), 0.25)


def test_barenblatt_has_no_waiting_time():
    B = oracle.Barenblatt(4.0)
    r = B.radius(1.0)
    tri = mesh.build_interval(-r, r, 41)
    rc = B.value(tri.centroids[:, 0], 1.0)
    tau = 0.01
    traj = solver.run(tri, tri.identity(), EnergyLaw("law2", 4.0), rc, tau, 0.05)
    left = [x[0, 0] for x in traj.configs]
    right = [x[-1, 0] for x in traj.configs]
    t_star = postprocess.numerical_waiting_time(traj.times, left, right)
    assert t_star is not None and t_star <= 2 * tau


def test_waiting_time_criteria():
    t = [0, 1, 2, 3]
    # one end moving is not enough
    assert postprocess.numerical_waiting_time(t, [0, -0.1, -0.2, -0.3], [1, 1, 1, 1]) is None
    assert postprocess.numerical_waiting_time(t, [0, -0.1, -0.2, -0.3], [1, 1, 1.1, 1.2]) == 2.0
    assert postprocess.numerical_waiting_time(t, radial=[0.9, 0.95, 1.01, 1.2], xi0=1.0) == 2.0
    assert postprocess.numerical_waiting_time(t, radial=[1, 1, 1, 1], xi0=1.0) is None


def test_convergence_order():
    assert postprocess.convergence_order([51, 101], [4e-4, 1e-4])[0] == pytest.approx(2.0)
    assert postprocess.convergence_order([100, 400], [4e-4, 1e-4], dim=2)[0] == pytest.approx(2.0)
    with pytest.raises(ValueError, match="insufficient data"):
        postprocess.convergence_order([51], [1e-3])


def test_inadmissible_configuration_is_refused():
    tri = mesh.build_interval(0, 1, 4)
    x = tri.identity()[::-1].copy()
    with pytest.raises(mesh.AdmissibilityError):
        postprocess.density_at_centroids(tri, x, np.ones(3))
