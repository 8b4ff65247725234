"""Time stepping for the semi-discrete system D*(Xi) Xi' = dA_h/dXi.

The backward Euler step is computed as a stationary point of

    J(Xi) = 1/(2 tau) (Xi - Xi^n)^T D*_n (Xi - Xi^n) + E_h(Xi)

by a damped Newton iteration that never leaves the admissible set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu, spsolve

from .dissipation import DissipationMatrix, assemble_M_law1, assemble_M_law2
from .energy import EnergyLaw, discrete_energy, energy_gradient, energy_hessian
from .mesh import AdmissibilityError, Triangulation, from_dof, is_admissible, require_admissible, to_dof

ENERGY_SLACK = 1e-9


class StepError(RuntimeError):
    """A time step could not be completed."""

    def __init__(self, message, report=None, residual=None):
        super().__init__(message)
        self.report = report
        self.residual = residual
        self.trajectory = None


class NewtonError(StepError):
    """Newton iteration hit its iteration cap."""


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-10
    max_iter: int = 50
    damping: float = 1.0
    min_step: float = 2.0 ** -20


@dataclass
class NewtonResult:
    x: np.ndarray
    iterations: int
    residual: float
    smallest_step: float


@dataclass
class StepReport:
    step: int
    tau: float
    newton_iterations: int
    residual: float
    energy_before: float
    energy_after: float
    dissipation: float  # (1/(2 tau^2)) dXi^T D*_n dXi
    margin: float
    accepted: bool
    damping: float = 1.0

    @property
    def energy_slack(self) -> float:
        """(E^{n+1} - E^n)/tau + dissipation; <= 0 is the discrete dissipation law."""
        return (self.energy_after - self.energy_before) / self.tau + self.dissipation

    FIELDS = (
        "step",
        "tau",
        "newton_iterations",
        "residual",
        "energy_before",
        "energy_after",
        "dissipation",
        "margin",
        "accepted",
    )


@dataclass(frozen=True)
class BoundaryMode:
    """Free support (every node moves) or pinned nodes (zero velocity)."""

    kind: str = "free"
    pinned: tuple = ()

    def __post_init__(self):
        if self.kind not in ("free", "pinned"):
            raise ValueError(f"unknown boundary mode {self.kind!r}")

    @classmethod
    def free(cls) -> "BoundaryMode":
        return cls("free", ())

    @classmethod
    def pinned_boundary(cls, tri: Triangulation) -> "BoundaryMode":
        return cls("pinned", tuple(int(i) for i in tri.boundary_nodes))

    @classmethod
    def pinned_nodes(cls, nodes) -> "BoundaryMode":
        return cls("pinned", tuple(sorted(int(i) for i in nodes)))

    def free_dofs(self, tri: Triangulation) -> np.ndarray:
        mask = np.ones(tri.n_nodes, dtype=bool)
        if self.kind == "pinned":
            mask[list(self.pinned)] = False
        return np.flatnonzero(np.tile(mask, tri.dim))


def _solve(H, g):
    if sp.issparse(H):
        return spsolve(H.tocsc(), g)
    return np.linalg.solve(H, g)


def newton_inner(
    fun: Optional[Callable],
    grad: Callable,
    hess: Callable,
    x0,
    guard: Callable,
    options: NewtonOptions = NewtonOptions(),
) -> NewtonResult:
    """Damped Newton for a stationary point of ``fun`` inside ``guard``.

    Each iteration tries ``x - s H^{-1} g`` with the fixed damping ``s``;
    while the trial point fails the guard or increases ``fun`` the step is
    halved, down to ``options.min_step``. ``fun`` may be None, in which case
    only the guard is enforced.
    """
    x = np.array(x0, dtype=float)
    if not guard(x):
        raise ValueError("Newton initial guess violates the admissibility guard")
    f = fun(x) if fun is not None else None
    smallest = options.damping
    r = math.inf
    for it in range(options.max_iter + 1):
        g = grad(x)
        r = float(np.abs(g).max(initial=0.0))
        if r <= options.tol:
            return NewtonResult(x, it, r, smallest)
        if it == options.max_iter:
            break
        dx = _solve(hess(x), g)
        s = options.damping
        while True:
            xt = x - s * dx
            if guard(xt):
                if fun is None:
                    break
                ft = fun(xt)
                if ft <= f + 1e-13 * max(1.0, abs(f)):
                    break
            s *= 0.5
            if s < options.min_step:
                raise AdmissibilityError(
                    f"Newton backtracking floor reached at iteration {it} (residual {r:.3e})"
                )
        smallest = min(smallest, s)
        x = xt
        if fun is not None:
            f = ft
    raise NewtonError(f"Newton did not converge in {options.max_iter} iterations", residual=r)


def _dissipation_matrix(tri, law, rho0_c, x_n, M_static):
    if law.law == "law1":
        return M_static if M_static is not None else assemble_M_law1(tri, rho0_c)
    return assemble_M_law2(tri, x_n)


def _energy_or_nan(tri, x, law, rho0_c):
    return math.nan if law.formal else discrete_energy(tri, x, law, rho0_c)


def step_backward_euler(
    tri: Triangulation,
    x_n,
    law: EnergyLaw,
    rho0_c,
    tau: float,
    mode: BoundaryMode = BoundaryMode(),
    *,
    newton: NewtonOptions = NewtonOptions(),
    step_index: int = 0,
    M: Optional[DissipationMatrix] = None,
):
    """One backward Euler step; returns ``(x_{n+1}, StepReport)``."""
    if not tau > 0:
        raise ValueError(f"time step must be positive, got {tau}")
    x_n = np.asarray(x_n, dtype=float).reshape(tri.nodes.shape)
    require_admissible(tri, x_n, "configuration at t_n")
    dm = _dissipation_matrix(tri, law, rho0_c, x_n, M)
    free = mode.free_dofs(tri)
    all_free = free.size == tri.n_dof
    D = dm.block if all_free else dm.block[free][:, free]
    xi_n = to_dof(x_n)
    z_n = xi_n[free]
    d = tri.dim

    def full(z):
        xi = xi_n.copy()
        xi[free] = z
        return from_dof(xi, d)

    def fun(z):
        dz = z - z_n
        return 0.5 / tau * float(dz @ (D @ dz)) + discrete_energy(tri, full(z), law, rho0_c)

    def grad(z):
        return D @ (z - z_n) / tau + energy_gradient(tri, full(z), law, rho0_c)[free]

    def hess(z):
        H = energy_hessian(tri, full(z), law, rho0_c)
        if not all_free:
            H = H[free][:, free]
        return D / tau + H

    def guard(z):
        return is_admissible(tri, full(z))[0]

    E_n = _energy_or_nan(tri, x_n, law, rho0_c)
    opts = newton
    for attempt in range(2):
        res = newton_inner(None if law.formal else fun, grad, hess, z_n, guard, opts)
        x_new = full(res.x)
        dxi = to_dof(x_new) - xi_n
        diss = float(dxi @ (dm.block @ dxi)) / (2.0 * tau * tau)
        E_new = _energy_or_nan(tri, x_new, law, rho0_c)
        _, margin = is_admissible(tri, x_new)
        report = StepReport(
            step_index, tau, res.iterations, res.residual, E_n, E_new, diss, margin, True, res.smallest_step
        )
        if law.formal or report.energy_slack <= ENERGY_SLACK:
            return x_new, report
        opts = replace(opts, damping=opts.damping * 0.5)
    report.accepted = False
    raise StepError(
        f"step {step_index}: discrete energy law violated by {report.energy_slack:.3e}", report=report
    )


def step_explicit_euler(
    tri: Triangulation,
    x_n,
    law: EnergyLaw,
    rho0_c,
    tau: float,
    mode: BoundaryMode = BoundaryMode(),
    *,
    step_index: int = 0,
    M: Optional[DissipationMatrix] = None,
):
    """Forward Euler: D*_n (Xi^{n+1} - Xi^n) = tau dA_h/dXi(Xi^n)."""
    if not tau > 0:
        raise ValueError(f"time step must be positive, got {tau}")
    x_n = np.asarray(x_n, dtype=float).reshape(tri.nodes.shape)
    require_admissible(tri, x_n, "configuration at t_n")
    dm = _dissipation_matrix(tri, law, rho0_c, x_n, M)
    free = mode.free_dofs(tri)
    D = dm.block[free][:, free]
    force = -energy_gradient(tri, x_n, law, rho0_c)
    dz = tau * splu(D.tocsc()).solve(force[free])
    xi = to_dof(x_n)
    xi[free] += dz
    x_new = from_dof(xi, tri.dim)
    dxi = xi - to_dof(x_n)
    diss = float(dxi @ (dm.block @ dxi)) / (2.0 * tau * tau)
    ok, margin = is_admissible(tri, x_new)
    E_n = _energy_or_nan(tri, x_n, law, rho0_c)
    E_new = _energy_or_nan(tri, x_new, law, rho0_c) if ok else math.nan
    resid = float(np.abs(D @ dz / tau - force[free]).max(initial=0.0))
    # a few ulps of roundoff on a stationary state is not an energy increase
    accepted = ok and (law.formal or E_new <= E_n + 1e-14 * abs(E_n))
    return x_new, StepReport(step_index, tau, 0, resid, E_n, E_new, diss, margin, accepted)


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    configs: list = field(default_factory=list)
    reports: list = field(default_factory=list)  # reports[k] produced configs[k+1]

    @property
    def final(self) -> np.ndarray:
        return self.configs[-1]


def n_steps(T: float, tau: float) -> int:
    return int(math.ceil(T / tau - 1e-9)) if T > 0 else 0


def run(
    tri: Triangulation,
    x0,
    law: EnergyLaw,
    rho0_c,
    tau: float,
    T: float,
    mode: BoundaryMode = BoundaryMode(),
    callbacks: Sequence[Callable] = (),
    *,
    integrator: str = "backward",
    newton: NewtonOptions = NewtonOptions(),
    keep_configs: bool = True,
) -> Trajectory:
    """Advance ``ceil(T/tau)`` uniform steps from ``x0``.

    Each callback is called as ``cb(t, x, report)`` for the initial state
    (``report=None``) and every accepted step. On failure the raised
    :class:`StepError` carries the partial trajectory in ``.trajectory``.
    """
    if T < 0:
        raise ValueError("final time must be non-negative")
    if not tau > 0:
        raise ValueError(f"time step must be positive, got {tau}")
    if integrator not in ("backward", "explicit"):
        raise ValueError(f"unknown integrator {integrator!r}")
    x = np.array(x0, dtype=float).reshape(tri.nodes.shape)
    require_admissible(tri, x, "initial configuration")
    M = assemble_M_law1(tri, rho0_c) if law.law == "law1" else None
    traj = Trajectory([0.0], [x.copy()], [])
    for cb in callbacks:
        cb(0.0, x, None)
    for n in range(n_steps(T, tau)):
        try:
            if integrator == "backward":
                x, rep = step_backward_euler(tri, x, law, rho0_c, tau, mode, newton=newton, step_index=n + 1, M=M)
            else:
                x, rep = step_explicit_euler(tri, x, law, rho0_c, tau, mode, step_index=n + 1, M=M)
                if not rep.accepted:
                    raise StepError(f"step {n + 1}: explicit step rejected (margin {rep.margin:.3e})", report=rep)
        except (StepError, AdmissibilityError) as exc:
            err = exc if isinstance(exc, StepError) else StepError(f"step {n + 1}: {exc}")
            err.trajectory = traj
            raise err from (None if err is exc else exc)
        t = (n + 1) * tau
        traj.times.append(t)
        traj.configs.append(x.copy() if keep_configs else None)
        traj.reports.append(rep)
        for cb in callbacks:
            cb(t, x, rep)
    if not keep_configs and traj.configs:
        traj.configs[-1] = x.copy()
    return traj
