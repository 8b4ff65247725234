"""Free energies of the two dissipation laws and the discrete energy E_h.

With ``J_e = det F_e`` and ``rho_e = rho_e^0 / J_e`` the discrete energy is

    E_h = sum_e |tau_e| * omega(rho_e) * J_e .

Writing ``g(J) = omega(rho0 / J) J`` one has ``g'(J) = -p(rho)`` and
``g''(J) = rho p'(rho) / J`` with the pressure ``p = rho omega_rho - omega``,
which is all the gradient and Hessian need.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .mesh import AdmissibilityError, Triangulation, _check_cfg, to_dof

LAWS = ("law1", "law2")


class FormalModeError(RuntimeError):
    """Raised when omega is requested for law2 with 1 < alpha < 2."""


@dataclass(frozen=True)
class EnergyLaw:
    """Energy-dissipation law for the PME ``rho_t = Lap rho^alpha``.

    law1: omega = rho^alpha/(alpha-1), friction eta(rho) = rho.
    law2: omega = 2 rho ln rho (alpha = 2) or
          alpha rho^(alpha-1) / ((alpha-1)(alpha-2)) (alpha > 2), eta = 1.
          For 1 < alpha < 2 only the pressure is defined ("formal" mode).
    """

    law: str
    alpha: float

    def __post_init__(self):
        if self.law not in LAWS:
            raise ValueError(f"law must be one of {LAWS}, got {self.law!r}")
        if not self.alpha > 1.0:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def formal(self) -> bool:
        return self.law == "law2" and self.alpha < 2.0

    def omega(self, rho):
        rho = _nonneg(rho)
        a = self.alpha
        if self.law == "law1":
            return rho ** a / (a - 1.0)
        if self.formal:
            raise FormalModeError(f"law2 free energy is undefined for alpha = {a} < 2")
        if a == 2.0:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(rho > 0, 2.0 * rho * np.log(np.where(rho > 0, rho, 1.0)), 0.0)
        return a * rho ** (a - 1.0) / ((a - 1.0) * (a - 2.0))

    def omega_rho(self, rho):
        rho = _nonneg(rho)
        a = self.alpha
        if self.law == "law1":
            return a * rho ** (a - 1.0) / (a - 1.0)
        if self.formal:
            raise FormalModeError(f"law2 free energy is undefined for alpha = {a} < 2")
        if a == 2.0:
            with np.errstate(divide="ignore"):
                return 2.0 * np.log(rho) + 2.0
        return a * rho ** (a - 2.0) / (a - 2.0)

    def pressure(self, rho):
        """p = omega_rho rho - omega, in closed form (defined for every alpha > 1)."""
        rho = _nonneg(rho)
        a = self.alpha
        if self.law == "law1":
            return rho ** a
        return a / (a - 1.0) * rho ** (a - 1.0)

    def rho_dpressure(self, rho):
        """rho * p'(rho); finite at rho = 0."""
        rho = _nonneg(rho)
        a = self.alpha
        if self.law == "law1":
            return a * rho ** a
        return a * rho ** (a - 1.0)

    def eta(self, rho):
        rho = np.asarray(rho, dtype=float)
        return rho.copy() if self.law == "law1" else np.ones_like(rho)


def _nonneg(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("density must be non-negative")
    return rho


def pressure(law: EnergyLaw, rho):
    return law.pressure(rho)


def _element_state(tri, x, rho0_c):
    x = _check_cfg(tri, x)
    J, dJ = kernels.jacobian_terms(x, tri.elements, tri.grad_lambda)
    if J.size and not J.min() > 0.0:
        e = int(np.argmin(J))
        raise AdmissibilityError(f"configuration is not admissible: det F[{e}] = {J[e]:.3e}", margin=float(J[e]))
    rho0_c = np.asarray(rho0_c, dtype=float)
    if rho0_c.shape != (tri.n_elements,):
        raise ValueError(f"rho0_c must have one value per element ({tri.n_elements}), got {rho0_c.shape}")
    return J, dJ, rho0_c / J


def discrete_energy(tri: Triangulation, x, law: EnergyLaw, rho0_c) -> float:
    J, _, rho = _element_state(tri, x, rho0_c)
    return float(np.sum(law.omega(rho) * J * tri.areas))


def energy_gradient(tri: Triangulation, x, law: EnergyLaw, rho0_c) -> np.ndarray:
    """grad E_h as a flat dof vector."""
    J, dJ, rho = _element_state(tri, x, rho0_c)
    w = -tri.areas * law.pressure(rho)
    return to_dof(kernels.scatter_nodal(w[:, None, None] * dJ, tri.elements, tri.n_nodes))


def action_gradient(tri: Triangulation, x, law: EnergyLaw, rho0_c) -> np.ndarray:
    """delta A_h / delta Xi = -grad E_h, assembled element by element."""
    return -energy_gradient(tri, x, law, rho0_c)


def energy_hessian(tri: Triangulation, x, law: EnergyLaw, rho0_c) -> sp.csr_matrix:
    J, dJ, rho = _element_state(tri, x, rho0_c)
    w_outer = tri.areas * law.rho_dpressure(rho) / J
    w_curv = -tri.areas * law.pressure(rho)
    H = kernels.element_hessians(dJ, tri.grad_lambda, w_outer, w_curv)
    return assemble_blocks(tri, H)


def assemble_blocks(tri: Triangulation, blocks) -> sp.csr_matrix:
    """Sum element matrices in local ``c*(d+1)+l`` ordering into a global sparse matrix."""
    idx = tri.dof_index
    K = idx.shape[1]
    rows = np.broadcast_to(idx[:, :, None], (idx.shape[0], K, K)).ravel()
    cols = np.broadcast_to(idx[:, None, :], (idx.shape[0], K, K)).ravel()
    n = tri.n_dof
    return sp.csr_matrix((np.asarray(blocks).ravel(), (rows, cols)), shape=(n, n))


def dissipation_value(tri: Triangulation, x, rate, law: EnergyLaw, rho0_c) -> float:
    """2 D_h(Xi, Xi') = Xi'^T D(Xi) Xi' with the law's dissipation matrix."""
    from .dissipation import apply_D, assemble_M

    dm = assemble_M(tri, law, rho0_c, x)
    rate = np.asarray(rate, dtype=float).ravel()
    return float(rate @ apply_D(dm, rate))
