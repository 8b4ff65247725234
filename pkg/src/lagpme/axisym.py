"""Radially symmetric reduction of the 2D scheme.

The flow map is ``x = r(R, t) X / R`` on reference rings ``R_e <= R <= R_{e+1}``
with ``r`` piecewise linear in R. On ring e

    J_e = (r_{e+1}^2 - r_e^2) / (R_{e+1}^2 - R_e^2),   |ring_e| = pi (R_{e+1}^2 - R_e^2),

and E_h = sum_e |ring_e| omega(rho_e^0 / J_e) J_e as in 2D. The centre node
``R_0 = 0`` stays at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .energy import EnergyLaw
from .mesh import AdmissibilityError
from .solver import ENERGY_SLACK, NewtonOptions, StepError, StepReport, n_steps, newton_inner


@dataclass(frozen=True)
class RadialGrid:
    R: np.ndarray  # reference radii, R[0] = 0, strictly increasing
    rho0: np.ndarray  # one value per ring, sampled at the mid radius

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        if R.ndim != 1 or R.size < 2 or R[0] != 0.0 or np.any(np.diff(R) <= 0):
            raise ValueError("radii must start at 0 and be strictly increasing")
        rho0 = np.asarray(self.rho0, dtype=float)
        if rho0.shape != (R.size - 1,):
            raise ValueError("need one reference density per ring")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "rho0", rho0)

    @classmethod
    def uniform(cls, radius: float, n_nodes: int, rho0) -> "RadialGrid":
        R = np.linspace(0.0, radius, n_nodes)
        return cls(R, np.asarray(rho0(0.5 * (R[1:] + R[:-1])), dtype=float))

    @property
    def dR2(self) -> np.ndarray:
        return np.diff(self.R ** 2)

    @property
    def areas(self) -> np.ndarray:
        return np.pi * self.dR2


def jacobians(grid: RadialGrid, r) -> np.ndarray:
    return np.diff(np.asarray(r, dtype=float) ** 2) / grid.dR2


def admissible(r) -> bool:
    return bool(r[0] == 0.0 and np.all(np.diff(r) > 0))


def _state(grid, r, law):
    J = jacobians(grid, r)
    if not J.min() > 0:
        raise AdmissibilityError("radial configuration is not admissible", margin=float(J.min()))
    return J, grid.rho0 / J


def energy(grid: RadialGrid, r, law: EnergyLaw) -> float:
    J, rho = _state(grid, r, law)
    return float(np.sum(grid.areas * law.omega(rho) * J))


def energy_gradient(grid: RadialGrid, r, law: EnergyLaw) -> np.ndarray:
    """dE/dr_i = 2 pi r_i (p_i - p_{i-1}), p_e the pressure on ring e."""
    _, rho = _state(grid, r, law)
    p = law.pressure(rho)
    jump = np.zeros(r.size)
    jump[:-1] += p
    jump[1:] -= p
    return 2.0 * np.pi * r * jump


def energy_hessian(grid: RadialGrid, r, law: EnergyLaw) -> sp.csr_matrix:
    J, rho = _state(grid, r, law)
    p = law.pressure(rho)
    w = np.pi * law.rho_dpressure(rho) / J * 4.0 / grid.dR2
    a, b = r[:-1], r[1:]
    diag = np.zeros(r.size)
    diag[:-1] += w * a * a + 2.0 * np.pi * p
    diag[1:] += w * b * b - 2.0 * np.pi * p
    off = -w * a * b
    return sp.diags([off, diag, off], [-1, 0, 1], format="csr")


def mass_matrix(grid: RadialGrid, law: EnergyLaw, r_n) -> sp.csr_matrix:
    """int phi_i phi_j 2 pi s ds over the current (law2) or reference (law1) rings."""
    if law.law == "law1":
        s, wt = grid.R, grid.rho0
    else:
        s, wt = np.asarray(r_n, dtype=float), np.ones(grid.rho0.size)
    a, b = s[:-1], s[1:]
    c = 2.0 * np.pi * wt * (b - a) / 12.0
    diag = np.zeros(s.size)
    diag[:-1] += c * (3.0 * a + b)
    diag[1:] += c * (a + 3.0 * b)
    off = c * (a + b)
    return sp.diags([off, diag, off], [-1, 0, 1], format="csr")


@dataclass
class RadialTrajectory:
    times: list = field(default_factory=list)
    interface: list = field(default_factory=list)
    final: np.ndarray | None = None
    slack: list = field(default_factory=list)


def step(grid: RadialGrid, r_n, law: EnergyLaw, tau: float, newton: NewtonOptions = NewtonOptions(), step_index=0):
    """One backward Euler step with r_0 = 0 held fixed; returns ``(r, StepReport)``."""
    r_n = np.asarray(r_n, dtype=float)
    M = mass_matrix(grid, law, r_n)[1:, 1:].tocsr()
    z_n = r_n[1:]

    def full(z):
        return np.concatenate([[0.0], z])

    def fun(z):
        dz = z - z_n
        return 0.5 / tau * float(dz @ (M @ dz)) + energy(grid, full(z), law)

    def grad(z):
        return M @ (z - z_n) / tau + energy_gradient(grid, full(z), law)[1:]

    def hess(z):
        return (M / tau + energy_hessian(grid, full(z), law)[1:, 1:]).tocsc()

    res = newton_inner(None if law.formal else fun, grad, hess, z_n, lambda z: admissible(full(z)), newton)
    r = full(res.x)
    dz = res.x - z_n
    diss = float(dz @ (M @ dz)) / (2.0 * tau * tau)
    e0 = float("nan") if law.formal else energy(grid, r_n, law)
    e1 = float("nan") if law.formal else energy(grid, r, law)
    rep = StepReport(
        step_index, tau, res.iterations, res.residual, e0, e1, diss, float(jacobians(grid, r).min()), True,
        res.smallest_step,
    )
    if not law.formal and rep.energy_slack > ENERGY_SLACK:
        rep.accepted = False
        raise StepError(
            f"step {step_index}: radial step violated the discrete energy law by {rep.energy_slack:.3e}", report=rep
        )
    return r, rep


def run(grid: RadialGrid, law: EnergyLaw, tau: float, T: float, newton: NewtonOptions = NewtonOptions(), callbacks=()):
    """Integrate to ``T``, recording the outer radius r_N after every step.

    Callbacks are called as ``cb(t, r, report)``, with ``report=None`` at t = 0.
    """
    r = grid.R.copy()
    out = RadialTrajectory([0.0], [float(r[-1])])
    for cb in callbacks:
        cb(0.0, r, None)
    for n in range(n_steps(T, tau)):
        r, rep = step(grid, r, law, tau, newton, step_index=n + 1)
        t = (n + 1) * tau
        out.times.append(t)
        out.interface.append(float(r[-1]))
        out.slack.append(rep.energy_slack)
        for cb in callbacks:
            cb(t, r, rep)
    out.final = r
    return out


def density(grid: RadialGrid, r) -> np.ndarray:
    return grid.rho0 / jacobians(grid, r)


def nodal_density(grid: RadialGrid, r, rho0_nodes) -> np.ndarray:
    """Ring-area weighted analogue of the 2D patch formula."""
    J = jacobians(grid, r)
    ref = np.zeros(grid.R.size)
    cur = np.zeros(grid.R.size)
    for sl in (slice(None, -1), slice(1, None)):
        ref[sl] += grid.areas
        cur[sl] += grid.areas * J
    return np.asarray(rho0_nodes, dtype=float) * ref / cur
