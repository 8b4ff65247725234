"""Dissipation (mass-type) matrices M* for the two laws.

D* is block diagonal with one copy of M per coordinate, so only the N x N
matrix M is stored.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .mesh import Triangulation, require_admissible


class SolverError(RuntimeError):
    """A dissipation matrix could not be factorised."""


@dataclass(frozen=True, eq=False)
class DissipationMatrix:
    matrix: sp.csr_matrix
    law: str
    dim: int
    snapshot: str

    @cached_property
    def block(self) -> sp.csr_matrix:
        """The full D* = diag(M, ..., M)."""
        return sp.block_diag([self.matrix] * self.dim, format="csr")

    @cached_property
    def _lu(self):
        return _factor(self.matrix)


def p1_mass_reference(dim: int) -> np.ndarray:
    """Exact P1 mass matrix of a simplex with unit measure."""
    n = dim + 1
    return (np.ones((n, n)) + np.eye(n)) / ((n) * (n + 1))


def _assemble(tri: Triangulation, weights) -> sp.csr_matrix:
    ref = p1_mass_reference(tri.dim)
    el = tri.elements
    n = el.shape[1]
    vals = weights[:, None, None] * ref[None]
    rows = np.broadcast_to(el[:, :, None], (len(el), n, n)).ravel()
    cols = np.broadcast_to(el[:, None, :], (len(el), n, n)).ravel()
    N = tri.n_nodes
    return sp.csr_matrix((vals.ravel(), (rows, cols)), shape=(N, N))


def _centroid_values(tri, rho0):
    if callable(rho0):
        return np.asarray(rho0(tri.centroids), dtype=float).reshape(tri.n_elements)
    return np.asarray(rho0, dtype=float).reshape(tri.n_elements)


def assemble_M_law1(tri: Triangulation, rho0) -> DissipationMatrix:
    """M*_ij = sum_e rho0(X_c^e) int phi_i phi_j dX (time independent).

    ``rho0`` is either a callable on (k, d) points or the per-element
    centroid values.
    """
    rho_c = _centroid_values(tri, rho0)
    if np.any(rho_c < 0):
        raise ValueError("initial density must be non-negative")
    return DissipationMatrix(_assemble(tri, rho_c * tri.areas), "law1", tri.dim, "static")


def assemble_M_law2(tri: Triangulation, x_n) -> DissipationMatrix:
    """M*_ij = sum_e int phi_i phi_j det F_e^n dX, frozen at the configuration ``x_n``."""
    J = require_admissible(tri, x_n, "configuration at t_n")
    snap = hashlib.sha1(np.ascontiguousarray(x_n, dtype=float).tobytes()).hexdigest()[:12]
    return DissipationMatrix(_assemble(tri, J * tri.areas), "law2", tri.dim, snap)


def assemble_M(tri, law, rho0_c, x_n) -> DissipationMatrix:
    if law.law == "law1":
        return assemble_M_law1(tri, rho0_c)
    return assemble_M_law2(tri, x_n)


def apply_D(dm: DissipationMatrix, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    V = v.reshape(dm.dim, -1)
    return np.concatenate([dm.matrix @ V[c] for c in range(dm.dim)])


def solve_D(dm: DissipationMatrix, rhs) -> np.ndarray:
    rhs = np.asarray(rhs, dtype=float)
    R = rhs.reshape(dm.dim, -1)
    lu = dm._lu
    out = np.concatenate([lu.solve(R[c]) for c in range(dm.dim)])
    res = apply_D(dm, out) - rhs
    scale = max(np.abs(rhs).max(initial=0.0), 1e-300)
    if np.abs(res).max(initial=0.0) > 1e-12 * scale:
        raise SolverError(f"solve residual {np.abs(res).max():.3e} exceeds 1e-12 relative")
    return out


def _factor(M: sp.csr_matrix):
    row_abs = np.asarray(abs(M).sum(axis=1)).ravel()
    zero = np.flatnonzero(row_abs == 0.0)
    if zero.size:
        raise SolverError(f"singular row {int(zero[0])} in dissipation matrix (all entries zero)")
    try:
        lu = splu(
            M.tocsc(),
            permc_spec="MMD_AT_PLUS_A",
            diag_pivot_thresh=0.0,
            options={"SymmetricMode": True},
        )
    except RuntimeError as exc:
        raise SolverError(f"factorisation failed: {exc}") from None
    piv = lu.U.diagonal()
    k = int(np.argmin(piv))
    if not piv[k] > 0.0 or not math.isfinite(piv[k]):
        raise SolverError(f"dissipation matrix is not positive definite (smallest pivot {piv[k]:.3e})")
    return lu
