"""Density reconstruction, error norms, interfaces and waiting times."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mesh import Triangulation, _check_cfg, require_admissible


@dataclass
class Snapshot:
    time: float
    centroids: np.ndarray  # deformed element centroids, (M, d)
    rho_c: np.ndarray  # centroid densities
    positions: np.ndarray  # (N, d)
    rho_nodes: np.ndarray
    det_F: np.ndarray


def density_at_centroids(tri: Triangulation, x, rho0_c):
    """Deformed centroids and ``rho_0(X_c^e) / det F_e``."""
    x = _check_cfg(tri, x)
    J = require_admissible(tri, x)
    return x[tri.elements].mean(axis=1), np.asarray(rho0_c, dtype=float) / J


def density_at_nodes(tri: Triangulation, x, rho0_nodes):
    """rho0(X_i) * sum_{G(i)} |tau_e| / sum_{G(i)} |tau_e| det F_e."""
    x = _check_cfg(tri, x)
    J = require_admissible(tri, x)
    el = tri.elements.ravel()
    n = tri.elements.shape[1]
    ref = np.bincount(el, weights=np.repeat(tri.areas, n), minlength=tri.n_nodes)
    cur = np.bincount(el, weights=np.repeat(tri.areas * J, n), minlength=tri.n_nodes)
    return np.asarray(rho0_nodes, dtype=float) * ref / cur


def snapshot(tri, x, rho0_c, rho0_nodes, t=0.0) -> Snapshot:
    xc, rc = density_at_centroids(tri, x, rho0_c)
    J = require_admissible(tri, x)
    return Snapshot(t, xc, rc, np.array(x, dtype=float), density_at_nodes(tri, x, rho0_nodes), J)


def l2_error(tri: Triangulation, x, rho0_c, exact) -> float:
    """Centroid-rule L2 error sqrt(sum_e (rho_h - rho)(x_c^e)^2 |tau_e| det F_e)."""
    xc, rc = density_at_centroids(tri, x, rho0_c)
    J = require_admissible(tri, x)
    pts = xc[:, 0] if tri.dim == 1 else xc
    err = rc - np.asarray(exact(pts), dtype=float).reshape(-1)
    return float(np.sqrt(np.sum(err ** 2 * tri.areas * J)))


def max_centroid_error(tri, x, rho0_c, exact) -> float:
    xc, rc = density_at_centroids(tri, x, rho0_c)
    pts = xc[:, 0] if tri.dim == 1 else xc
    return float(np.max(np.abs(rc - np.asarray(exact(pts), dtype=float).reshape(-1))))


def reconstructed_mass(tri, x, rho0_c) -> float:
    _, rc = density_at_centroids(tri, x, rho0_c)
    return float(np.sum(rc * tri.areas * require_admissible(tri, x)))


def interface_extract(tri: Triangulation, x):
    """Support boundary of a free-support run.

    1D: ``(left, right)`` end-node positions. 2D: ``(radial, polyline)`` where
    ``radial`` is the smallest distance of a boundary node from the origin and
    ``polyline`` the ordered deformed boundary.
    """
    x = _check_cfg(tri, x)
    if tri.dim == 1:
        return float(x[0, 0]), float(x[-1, 0])
    b = tri.boundary_nodes
    radial = float(np.min(np.hypot(x[b, 0], x[b, 1])))
    return radial, x[boundary_loop(tri)]


def boundary_loop(tri: Triangulation) -> np.ndarray:
    """Boundary nodes ordered along the (first) boundary loop."""
    el = tri.elements
    edges = np.concatenate([el[:, [0, 1]], el[:, [1, 2]], el[:, [2, 0]]])
    key = np.sort(edges, axis=1)
    _, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    bedges = edges[counts[inv.ravel()] == 1]
    nxt = dict(zip(bedges[:, 0].tolist(), bedges[:, 1].tolist()))
    start = int(bedges[0, 0])
    loop = [start]
    node = nxt[start]
    while node != start and len(loop) <= len(bedges):
        loop.append(node)
        node = nxt[node]
    return np.array(loop)


def radial_location(tri, x, xi0: float) -> float:
    """max(min_b |x_h(X_b)|, xi0)."""
    return max(interface_extract(tri, x)[0], xi0)


def numerical_waiting_time(times, left=None, right=None, *, left0=None, right0=None, radial=None, xi0=None):
    """First time the numerical support has expanded.

    1D: both end nodes have moved outward past their initial positions.
    2D: the radial location ``min_b |x_b|`` exceeds ``xi0``.
    Returns None when the support never expands within the history.
    """
    times = np.asarray(times, dtype=float)
    if radial is not None:
        radial = np.asarray(radial, dtype=float)
        ref = xi0 if xi0 is not None else radial[0]
        hit = radial > ref
    else:
        left = np.asarray(left, dtype=float)
        right = np.asarray(right, dtype=float)
        l0 = left[0] if left0 is None else left0
        r0 = right[0] if right0 is None else right0
        hit = (left < l0) & (right > r0)
    idx = np.flatnonzero(hit)
    return float(times[idx[0]]) if idx.size else None


def convergence_order(N, errors, dim: int = 1):
    """Observed orders between successive refinements.

    The mesh size is taken as 1/(N-1) in 1D and N^(-1/2) in 2D.
    """
    N = np.asarray(N, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if N.size < 2 or N.size != errors.size:
        raise ValueError("insufficient data: need at least two (N, error) pairs")
    h = 1.0 / (N - 1.0) if dim == 1 else N ** -0.5
    return [math.log(errors[i] / errors[i + 1]) / math.log(h[i] / h[i + 1]) for i in range(len(N) - 1)]
