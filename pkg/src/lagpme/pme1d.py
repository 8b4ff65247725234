"""Closed-form 1D versions of scheme 1 and scheme 2.

These are written directly from the tridiagonal 1D formulas and share no
code with the general element assembly, so they double as an oracle for it.
Boundary convention: the half-point densities outside the grid are zero,
i.e. ``rho0(X_{1/2}) = rho0(X_{N+1/2}) = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

SCHEMES = ("scheme1", "scheme2")


@dataclass(frozen=True)
class Grid1D:
    X: np.ndarray  # reference nodes, strictly increasing
    rho_mid: np.ndarray  # rho0(X_{i+1/2}), length N-1
    alpha: float

    @classmethod
    def from_function(cls, X, rho0, alpha: float) -> "Grid1D":
        X = np.asarray(X, dtype=float)
        if np.any(np.diff(X) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        mid = 0.5 * (X[1:] + X[:-1])
        rho_mid = np.asarray(rho0(mid), dtype=float).reshape(-1)
        if np.any(rho_mid < 0):
            raise ValueError("midpoint densities must be non-negative")
        return cls(X, rho_mid, float(alpha))

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.X)

    @property
    def n(self) -> int:
        return self.X.size


def _check_increasing(a, what):
    if np.any(np.diff(a) <= 0):
        raise ValueError(f"{what} is not strictly increasing")


def _tridiag_apply(lower, diag, upper, v):
    out = diag * v
    out[1:] += lower * v[:-1]
    out[:-1] += upper * v[1:]
    return out


def mass_scheme1(grid: Grid1D):
    """(lower, diag, upper) of M with entries rho0(X_{i-+1/2}) h / 6, / 3."""
    w = grid.rho_mid * grid.h
    diag = np.zeros(grid.n)
    diag[:-1] += w / 3.0
    diag[1:] += w / 3.0
    return w / 6.0, diag, w / 6.0


def mass_scheme2(a_n):
    """(lower, diag, upper) of M(a^n) from the deformed spacings a_i - a_{i-1}."""
    g = np.diff(a_n)
    diag = np.zeros(a_n.size)
    diag[1:] += g / 3.0  # (1 - delta_{1i}) (a_i - a_{i-1}) / 3
    diag[:-1] += g / 3.0  # (1 - delta_{Ni}) (a_{i+1} - a_i) / 3
    return g / 6.0, diag, g / 6.0


def _flux(grid, a, scheme, stencil):
    """Half-point fluxes q_{i+1/2} and their derivatives in the local gap."""
    alpha = grid.alpha
    if scheme == "scheme1":
        beta, pref = alpha, 1.0
    else:
        beta, pref = alpha - 1.0, alpha / (alpha - 1.0)
    gap = np.diff(a)
    if stencil == "verbatim":
        # both half-point terms of row i use the left gap a_i - a_{i-1}
        # (row 1 falls back to a_2 - a_1); returned per row, not per half point
        left_gap = np.concatenate([[gap[0]], gap])
        c_plus = np.concatenate([grid.rho_mid, [0.0]]) * np.concatenate([grid.h, [grid.h[-1]]])
        c_minus = np.concatenate([[0.0], grid.rho_mid]) * np.concatenate([[grid.h[0]], grid.h])
        return pref * ((c_plus / left_gap) ** beta - (c_minus / left_gap) ** beta)
    c = grid.rho_mid * grid.h
    q = pref * (c / gap) ** beta
    dq = -beta * q / gap
    return q, dq


def _residual(grid, a_n, a, tau, scheme, stencil):
    a_n = np.asarray(a_n, dtype=float)
    a = np.asarray(a, dtype=float)
    _check_increasing(a_n, "a_n")
    _check_increasing(a, "candidate configuration")
    if scheme == "scheme1":
        lo, di, up = mass_scheme1(grid)
    else:
        lo, di, up = mass_scheme2(a_n)
    r = _tridiag_apply(lo, di, up, (a - a_n) / tau)
    if stencil == "verbatim":
        return r + _flux(grid, a, scheme, stencil)
    q, _ = _flux(grid, a, scheme, stencil)
    r[:-1] += q
    r[1:] -= q
    return r


def residual_scheme1(grid: Grid1D, a_n, a, tau: float, stencil: str = "symmetric"):
    """Row i: M_ij (a_j - a_j^n)/tau + q_{i+1/2} - q_{i-1/2}, q = (rho0 h / gap)^alpha."""
    return _residual(grid, a_n, a, tau, "scheme1", stencil)


def residual_scheme2(grid: Grid1D, a_n, a, tau: float, stencil: str = "symmetric"):
    """As scheme 1 with q = alpha/(alpha-1) (rho0 h / gap)^(alpha-1) and M = M(a^n)."""
    return _residual(grid, a_n, a, tau, "scheme2", stencil)


def jacobian_banded(grid: Grid1D, a_n, a, tau: float, scheme: str):
    """d residual / d a in ``solve_banded`` (1, 1) layout (symmetric stencil)."""
    if scheme == "scheme1":
        lo, di, up = mass_scheme1(grid)
    else:
        lo, di, up = mass_scheme2(np.asarray(a_n, dtype=float))
    _, dq = _flux(grid, np.asarray(a, dtype=float), scheme, "symmetric")
    ab = np.zeros((3, grid.n))
    ab[0, 1:] = up / tau + dq  # d r_i / d a_{i+1}
    ab[2, :-1] = lo / tau + dq  # d r_{i+1} / d a_i
    diag = di / tau
    diag[:-1] -= dq
    diag[1:] -= dq
    ab[1] = diag
    return ab


def solve_step(grid: Grid1D, a_n, tau: float, scheme: str = "scheme2", *, tol=1e-12, max_iter=50):
    """Newton on the closed-form residual, halving the step to keep ``a`` increasing."""
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    res_fn = residual_scheme1 if scheme == "scheme1" else residual_scheme2
    a_n = np.asarray(a_n, dtype=float)
    a = a_n.copy()
    for it in range(max_iter):
        r = res_fn(grid, a_n, a, tau)
        if np.abs(r).max() <= tol:
            return a, it
        da = solve_banded((1, 1), jacobian_banded(grid, a_n, a, tau, scheme), r)
        s = 1.0
        while np.any(np.diff(a - s * da) <= 0):
            s *= 0.5
            if s < 2.0 ** -30:
                raise RuntimeError("closed-form Newton left the admissible set")
        a = a - s * da
    raise RuntimeError(f"closed-form Newton did not converge (residual {np.abs(r).max():.3e})")


def run_closed_form(grid: Grid1D, tau: float, n_steps: int, scheme: str = "scheme2", a0=None):
    """Configurations a^0..a^n_steps of the closed-form scheme."""
    a = grid.X.copy() if a0 is None else np.asarray(a0, dtype=float)
    out = [a]
    for _ in range(n_steps):
        a, _ = solve_step(grid, a, tau, scheme)
        out.append(a)
    return out
