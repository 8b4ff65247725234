"""Experiment configurations, named presets, and the run / sweep drivers.

A configuration is flat ``key = value`` text whose keys are exactly the
fields of :class:`ExperimentConfig`. A run writes

    snapshots/<step>.csv   elem,xc,yc,detF,rho
    nodes/<step>.csv       node,x,y,rho
    steps.csv              one StepReport per accepted step
    interface.csv          t,xi_left,xi_right (1D) or t,xi_radial (2D)
    summary.json           final errors, t*, structure checks
    timing.json            wall-clock only (kept apart so the rest is byte-reproducible)
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import axisym, mesh, oracle, postprocess, solver
from .energy import LAWS, EnergyLaw
from .solver import BoundaryMode, NewtonOptions, StepError, StepReport

BOUNDARY_MODES = ("free", "pinned")
INTEGRATORS = ("backward", "explicit")
EXACT = ("none", "barenblatt")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"config field {field!r}: {message}")
        self.field = field


@dataclass(frozen=True)
class ExperimentConfig:
    law: str = "law2"
    alpha: float = 4.0
    dim: int = 1
    mesh: str = "interval:51"
    datum: str = "barenblatt"
    theta: float = 0.0
    C0: float = 1.0
    t0: float = 1.0
    exact: str = "none"
    tau: float = 0.01
    T: float = 1.0
    boundary: str = "free"
    cadence: int = 10
    out: str = "out"
    integrator: str = "backward"
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    newton_damping: float = 1.0

    def validate(self) -> "ExperimentConfig":
        if self.law not in LAWS:
            raise ConfigError("law", f"must be one of {LAWS}, got {self.law!r}")
        if not self.alpha > 1:
            raise ConfigError("alpha", f"must exceed 1, got {self.alpha}")
        if self.dim not in (1, 2):
            raise ConfigError("dim", f"must be 1 or 2, got {self.dim}")
        if self.datum not in oracle.DATA:
            raise ConfigError("datum", f"must be one of {oracle.DATA}, got {self.datum!r}")
        if not self.tau > 0:
            raise ConfigError("tau", f"must be positive, got {self.tau}")
        if not self.T >= 0:
            raise ConfigError("T", f"must be non-negative, got {self.T}")
        if self.cadence < 1:
            raise ConfigError("cadence", f"must be at least 1, got {self.cadence}")
        if self.boundary not in BOUNDARY_MODES:
            raise ConfigError("boundary", f"must be one of {BOUNDARY_MODES}, got {self.boundary!r}")
        if self.integrator not in INTEGRATORS:
            raise ConfigError("integrator", f"must be one of {INTEGRATORS}, got {self.integrator!r}")
        if self.exact not in EXACT:
            raise ConfigError("exact", f"must be one of {EXACT}, got {self.exact!r}")
        if self.exact == "barenblatt" and self.datum != "barenblatt":
            raise ConfigError("exact", "the Barenblatt comparison needs datum = barenblatt")
        if self.datum == "barenblatt" and self.dim == 1 and self.C0 != 1.0:
            raise ConfigError("C0", "the 1D Barenblatt solution uses C0 = 1")
        if not self.t0 > 0:
            raise ConfigError("t0", "must be positive")
        if not self.newton_tol > 0:
            raise ConfigError("newton_tol", "must be positive")
        if self.newton_max_iter < 1:
            raise ConfigError("newton_max_iter", "must be at least 1")
        if not 0 < self.newton_damping <= 1:
            raise ConfigError("newton_damping", "must lie in (0, 1]")
        return self

    @property
    def energy_law(self) -> EnergyLaw:
        return EnergyLaw(self.law, self.alpha)

    @property
    def newton(self) -> NewtonOptions:
        return NewtonOptions(tol=self.newton_tol, max_iter=self.newton_max_iter, damping=self.newton_damping)


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_CONVERT = {"str": str, "float": lambda v: float(Fraction(v)), "int": int}


def config_from_dict(values: dict, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Build a validated config; string values are converted by field type."""
    kw = {}
    for key, val in values.items():
        if key not in _TYPES:
            raise ConfigError(key, "unknown key")
        conv = _CONVERT[_TYPES[key]]
        try:
            kw[key] = conv(str(val).strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError(key, f"cannot parse {val!r} as {_TYPES[key]}") from None
    return replace(base or ExperimentConfig(), **kw).validate()


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key:
            raise ConfigError(key or "?", f"line {lineno}: expected 'key = value'")
        if key in values:
            raise ConfigError(key, f"line {lineno}: duplicate key")
        values[key] = val
    return config_from_dict(values, base)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def format_config(cfg: ExperimentConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in asdict(cfg).items())


# ----------------------------------------------------------------------------
# initial data and meshes
# ----------------------------------------------------------------------------


def initial_density(cfg: ExperimentConfig):
    return oracle.initial_datum(cfg.datum, alpha=cfg.alpha, dim=cfg.dim, C0=cfg.C0, t0=cfg.t0, theta=cfg.theta)


def datum_support(cfg: ExperimentConfig):
    """Interval (1D) or radius (2D) of the initial support, when known in closed form."""
    if cfg.datum == "barenblatt":
        r = oracle.Barenblatt(cfg.alpha, cfg.dim, cfg.C0).radius(cfg.t0)
        return (-r, r) if cfg.dim == 1 else r
    if cfg.datum == "sine-power":
        return (-math.pi, 0.0)
    if cfg.datum == "cosine-bump-2d":
        return 1.0
    return None


def bundled_mesh_path(name: str) -> Path:
    path = resources.files("lagpme") / "data" / "meshes" / f"{name}.mesh"
    if not path.is_file():
        raise ConfigError("mesh", f"no bundled mesh named {name!r}")
    return Path(str(path))


def bundled_meshes() -> list:
    root = resources.files("lagpme") / "data" / "meshes"
    return sorted(p.name[: -len(".mesh")] for p in root.iterdir() if p.name.endswith(".mesh"))


def _numbers(spec, args, count_options):
    if len(args) not in count_options:
        raise ConfigError("mesh", f"{spec!r}: expected {' or '.join(map(str, count_options))} arguments")
    try:
        return [float(Fraction(a)) for a in args]
    except (ValueError, ZeroDivisionError):
        raise ConfigError("mesh", f"{spec!r}: arguments must be numbers") from None


def build_mesh(cfg: ExperimentConfig):
    """Resolve ``cfg.mesh``; returns a Triangulation or an axisym.RadialGrid.

    Forms: ``interval:[a,b,]N``, ``refined-interval:[a,b,]cells,split``,
    ``rect:x0,x1,y0,y1,nx,ny``, ``disk:[R,]spacing[,grading]``,
    ``radial:[R,]N``, ``bundled:<name>`` or a mesh file path. Omitted extents
    default to the initial support of the datum.
    """
    spec = cfg.mesh.strip()
    kind, _, rest = spec.partition(":")
    args = [a.strip() for a in rest.split(",")] if rest else []
    support = datum_support(cfg)

    def need_support(want):
        if support is None or (want == "interval") != isinstance(support, tuple):
            raise ConfigError("mesh", f"{spec!r}: datum {cfg.datum!r} has no default {want}; give it explicitly")
        return support

    if kind in ("interval", "refined-interval"):
        n_req = 1 if kind == "interval" else 2
        v = _numbers(spec, args, (n_req, n_req + 2))
        a, b = v[:2] if len(v) > n_req else need_support("interval")
        tail = [int(t) for t in v[-n_req:]]
        tri = mesh.build_interval(a, b, tail[0]) if kind == "interval" else mesh.refined_interval(a, b, *tail)
    elif kind == "rect":
        v = _numbers(spec, args, (6,))
        tri = mesh.build_structured(v[:4], (int(v[4]), int(v[5])))
    elif kind == "disk":
        v = _numbers(spec, args, (1, 2, 3))
        if len(v) == 1:
            v = [need_support("radius")] + v
        tri = mesh.build_disk(v[0], v[1], v[2] if len(v) > 2 else 0.0)
    elif kind == "radial":
        v = _numbers(spec, args, (1, 2))
        R = v[0] if len(v) == 2 else need_support("radius")
        if cfg.dim != 2:
            raise ConfigError("dim", "the radial reduction needs dim = 2")
        return axisym.RadialGrid.uniform(R, int(v[-1]), lambda r: initial_density(cfg)(np.column_stack([r, 0 * r])))
    elif kind == "bundled":
        tri = mesh.load_mesh(bundled_mesh_path(rest.strip()))
    else:
        path = Path(spec)
        if not path.is_file():
            raise ConfigError("mesh", f"{spec!r} is neither a builtin mesh spec nor an existing file")
        tri = mesh.load_mesh(path)
    if tri.dim != cfg.dim:
        raise ConfigError("dim", f"mesh {spec!r} is {tri.dim}D but dim = {cfg.dim}")
    return tri


# ----------------------------------------------------------------------------
# output helpers
# ----------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


class _Writer:
    def __init__(self, out: Path):
        self.out = out
        out.mkdir(parents=True, exist_ok=True)
        for sub in ("snapshots", "nodes"):
            d = out / sub
            d.mkdir(exist_ok=True)
            for old in d.glob("*.csv"):
                old.unlink()

    def table(self, rel, header, rows):
        with open(self.out / rel, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])

    def json(self, rel, obj):
        (self.out / rel).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _jsonable(v):
    if v is None or isinstance(v, (str, bool)):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else None


# ----------------------------------------------------------------------------
# drivers
# ----------------------------------------------------------------------------


@dataclass
class RunResult:
    summary: dict
    out: Path
    wall_clock: float


def _exact_solution(cfg):
    if cfg.exact != "barenblatt":
        return None
    return oracle.Barenblatt(cfg.alpha, cfg.dim, cfg.C0)


def run_experiment(cfg: ExperimentConfig, out=None) -> RunResult:
    """Run one configuration and write its artifact files into ``out`` (default ``cfg.out``)."""
    cfg = cfg.validate()
    out = Path(out if out is not None else cfg.out)
    geom = build_mesh(cfg)
    start = time.perf_counter()
    if isinstance(geom, axisym.RadialGrid):
        summary = _run_radial(cfg, geom, _Writer(out))
    else:
        summary = _run_mesh(cfg, geom, _Writer(out))
    wall = time.perf_counter() - start
    (out / "timing.json").write_text(json.dumps({"wall_clock_seconds": wall}, indent=2) + "\n")
    if summary["status"] != "ok":
        raise StepError(summary["status"])
    return RunResult(summary, out, wall)


def _summary_base(cfg, n_nodes, n_elements):
    law = cfg.energy_law
    return {
        "config": asdict(cfg),
        "n_nodes": n_nodes,
        "n_elements": n_elements,
        "formal_mode": law.formal,
        "energy": "formal mode: energy not defined" if law.formal else None,
        "status": "ok",
    }


class _Recorder:
    """Collects per-step data shared by the mesh and radial drivers."""

    def __init__(self, cfg, writer, total_steps):
        self.cfg = cfg
        self.writer = writer
        self.total = total_steps
        self.steps = []
        self.interface = []
        self.max_slack = -math.inf
        self.min_margin = math.inf
        self.max_mass_drift = 0.0
        self.step = 0

    def snapshot_due(self):
        return self.step % self.cfg.cadence == 0 or self.step == self.total

    def report(self, rep: StepReport):
        self.step = rep.step
        self.steps.append([getattr(rep, f) for f in StepReport.FIELDS])
        if not self.cfg.energy_law.formal:
            self.max_slack = max(self.max_slack, rep.energy_slack)
        self.min_margin = min(self.min_margin, rep.margin)

    def finish(self, summary):
        w = self.writer
        w.table("steps.csv", StepReport.FIELDS, self.steps)
        head = ("t", "xi_left", "xi_right") if len(self.interface[0]) == 3 else ("t", "xi_radial")
        w.table("interface.csv", head, self.interface)
        summary["n_steps"] = self.step
        summary["final_time"] = self.step * self.cfg.tau
        summary["structure"] = {
            "max_energy_slack": None if self.cfg.energy_law.formal or not self.steps else self.max_slack,
            "min_margin": self.min_margin if self.steps else None,
            "max_mass_drift": self.max_mass_drift,
            "max_newton_iterations": max((r[2] for r in self.steps), default=0),
        }
        w.json("summary.json", _clean(summary))


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _jsonable(obj)


def _run_mesh(cfg, tri, writer) -> dict:
    law = cfg.energy_law
    rho0 = initial_density(cfg)
    rho0_c = np.asarray(rho0(tri.centroids), dtype=float).reshape(tri.n_elements)
    rho0_n = np.asarray(rho0(tri.nodes), dtype=float).reshape(tri.n_nodes)
    mass0 = float(np.sum(rho0_c * tri.areas))
    mode = BoundaryMode.pinned_boundary(tri) if cfg.boundary == "pinned" else BoundaryMode.free()
    rec = _Recorder(cfg, writer, solver.n_steps(cfg.T, cfg.tau))
    summary = _summary_base(cfg, tri.n_nodes, tri.n_elements)
    summary["initial_mass"] = mass0
    exact = _exact_solution(cfg)
    state = {"x": tri.identity(), "t": 0.0}
    x_init = tri.identity()

    def write_snapshot(t, x):
        xc, rc = postprocess.density_at_centroids(tri, x, rho0_c)
        J = mesh.det_F(tri, x)
        yc = xc[:, 1] if tri.dim == 2 else np.zeros(tri.n_elements)
        writer.table(f"snapshots/{rec.step}.csv", ("elem", "xc", "yc", "detF", "rho"),
                     zip(range(tri.n_elements), xc[:, 0], yc, J, rc))
        rn = postprocess.density_at_nodes(tri, x, rho0_n)
        y = x[:, 1] if tri.dim == 2 else np.zeros(tri.n_nodes)
        writer.table(f"nodes/{rec.step}.csv", ("node", "x", "y", "rho"), zip(range(tri.n_nodes), x[:, 0], y, rn))

    def callback(t, x, rep):
        if rep is not None:
            rec.report(rep)
        state["x"], state["t"] = x, t
        drift = abs(postprocess.reconstructed_mass(tri, x, rho0_c) - mass0) / max(abs(mass0), 1e-300)
        rec.max_mass_drift = max(rec.max_mass_drift, drift)
        if tri.dim == 1:
            rec.interface.append((t, x[0, 0], x[-1, 0]))
        else:
            rec.interface.append((t, postprocess.interface_extract(tri, x)[0]))
        if rep is None or rec.snapshot_due():
            write_snapshot(t, x)

    try:
        traj = solver.run(
            tri, x_init, law, rho0_c, cfg.tau, cfg.T, mode, [callback],
            integrator=cfg.integrator, newton=cfg.newton, keep_configs=False,
        )
        if not law.formal:
            summary["energy"] = {
                "initial": traj.reports[0].energy_before if traj.reports else None,
                "final": traj.reports[-1].energy_after if traj.reports else None,
            }
    except StepError as exc:
        summary["status"] = f"failed at step {rec.step + 1}: {exc}"
    x, t = state["x"], state["t"]
    if rec.step and not rec.snapshot_due():
        write_snapshot(t, x)
    summary["errors"] = _mesh_errors(cfg, tri, x, t, rho0_c, rho0_n, exact)
    summary["t_star"] = _waiting_time(tri, rec.interface, mode)
    rec.finish(summary)
    return summary


def _waiting_time(tri, hist, mode):
    if mode.kind != "free" or not hist:
        return None
    times = [h[0] for h in hist]
    if tri.dim == 1:
        return postprocess.numerical_waiting_time(times, [h[1] for h in hist], [h[2] for h in hist])
    return postprocess.numerical_waiting_time(times, radial=[h[1] for h in hist], xi0=hist[0][1])


def _mesh_errors(cfg, tri, x, t, rho0_c, rho0_n, exact):
    if exact is None:
        return {}
    tt = cfg.t0 + t

    def ex(p):
        return exact.value(p, tt)

    err = {
        "l2": postprocess.l2_error(tri, x, rho0_c, ex),
        "max_centroid": postprocess.max_centroid_error(tri, x, rho0_c, ex),
    }
    xi = exact.radius(tt)
    if tri.dim == 1:
        centre = np.flatnonzero(np.abs(tri.nodes[:, 0]) < 1e-12)
        if centre.size:
            i = int(centre[0])
            rn = postprocess.density_at_nodes(tri, x, rho0_n)
            err["x0"] = abs(rn[i] - float(exact.value(np.array([x[i, 0]]), tt)[0]))
        err["interface_right"] = abs(x[-1, 0] - xi)
        err["interface_left"] = abs(x[0, 0] + xi)
    else:
        b = tri.boundary_nodes
        err["interface_radial"] = float(np.max(np.abs(np.hypot(x[b, 0], x[b, 1]) - xi)))
    return err


def _run_radial(cfg, grid, writer) -> dict:
    law = cfg.energy_law
    rho0 = initial_density(cfg)
    rho0_n = np.asarray(rho0(np.column_stack([grid.R, 0 * grid.R])), dtype=float)
    mass0 = float(np.sum(grid.rho0 * grid.areas))
    rec = _Recorder(cfg, writer, solver.n_steps(cfg.T, cfg.tau))
    summary = _summary_base(cfg, grid.R.size, grid.R.size - 1)
    summary["initial_mass"] = mass0
    state = {"r": grid.R.copy(), "t": 0.0}

    def write_snapshot(r):
        J = axisym.jacobians(grid, r)
        rc = 0.5 * (r[1:] + r[:-1])
        zeros = np.zeros(rc.size)
        writer.table(f"snapshots/{rec.step}.csv", ("elem", "xc", "yc", "detF", "rho"),
                     zip(range(rc.size), rc, zeros, J, grid.rho0 / J))
        rn = axisym.nodal_density(grid, r, rho0_n)
        writer.table(f"nodes/{rec.step}.csv", ("node", "x", "y", "rho"), zip(range(r.size), r, 0 * r, rn))

    def callback(t, r, rep):
        if rep is not None:
            rec.report(rep)
        state["r"], state["t"] = r, t
        m = float(np.sum(axisym.density(grid, r) * grid.areas * axisym.jacobians(grid, r)))
        rec.max_mass_drift = max(rec.max_mass_drift, abs(m - mass0) / max(abs(mass0), 1e-300))
        rec.interface.append((t, r[-1]))
        if rep is None or rec.snapshot_due():
            write_snapshot(r)

    try:
        traj = axisym.run(grid, law, cfg.tau, cfg.T, cfg.newton, callbacks=[callback])
        if not law.formal:
            summary["energy"] = {
                "initial": axisym.energy(grid, grid.R, law),
                "final": axisym.energy(grid, traj.final, law),
            }
    except (StepError, mesh.AdmissibilityError) as exc:
        summary["status"] = f"failed at step {rec.step + 1}: {exc}"
    if rec.step and not rec.snapshot_due():
        write_snapshot(state["r"])
    summary["errors"] = {}
    hist = rec.interface
    summary["t_star"] = postprocess.numerical_waiting_time(
        [h[0] for h in hist], radial=[h[1] for h in hist], xi0=grid.R[-1]
    )
    rec.finish(summary)
    return summary


# ----------------------------------------------------------------------------
# sweeps
# ----------------------------------------------------------------------------


def parse_ladder(text: str) -> list:
    """Rows ``N,tau`` (tau may be a fraction such as 1/400); optional ``N,tau`` header."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.replace(";", ",").split(",")] if "," in line else line.split()
        if [p.lower() for p in parts] == ["n", "tau"]:
            continue
        if len(parts) != 2:
            raise ValueError(f"ladder line {lineno}: expected 'N,tau'")
        try:
            rows.append((int(parts[0]), float(Fraction(parts[1]))))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"ladder line {lineno}: cannot parse {line!r}") from None
    if not rows:
        raise ValueError("ladder is empty")
    return rows


SWEEP_COLUMNS = ("N", "tau", "l2", "order_l2", "x0", "order_x0", "interface", "order_interface", "max_centroid")


def run_sweep(base: ExperimentConfig, ladder, out=None) -> list:
    """Run each ladder row (``{N}`` in ``base.mesh`` is substituted) and write convergence.csv."""
    out = Path(out if out is not None else base.out)
    if base.exact == "none":
        raise ConfigError("exact", "a convergence sweep needs an exact solution")
    if "{N}" not in base.mesh and len(ladder) > 1:
        raise ConfigError("mesh", "a sweep mesh spec must contain the placeholder {N}")
    rows = []
    for k, (N, tau) in enumerate(ladder):
        cfg = replace(base, mesh=base.mesh.replace("{N}", str(N)), tau=tau)
        res = run_experiment(cfg, out / f"row{k}-N{N}")
        e = res.summary["errors"]
        iface = e.get("interface_right", e.get("interface_radial"))
        rows.append({"N": res.summary["n_nodes"], "tau": tau, "l2": e.get("l2"), "x0": e.get("x0"),
                     "interface": iface, "max_centroid": e.get("max_centroid")})
    Ns = [r["N"] for r in rows]
    for key in ("l2", "x0", "interface"):
        vals = [r[key] for r in rows]
        orders = [None] * len(rows)
        if len(rows) > 1 and all(v is not None for v in vals):
            orders[1:] = postprocess.convergence_order(Ns, vals, base.dim)
        for r, o in zip(rows, orders):
            r[f"order_{key}"] = o
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "convergence.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow(["" if r[c] is None else _fmt(r[c]) for c in SWEEP_COLUMNS])
    return rows


# ----------------------------------------------------------------------------
# presets
# ----------------------------------------------------------------------------

TAU_1D = {51: 1 / 100, 101: 1 / 400, 201: 1 / 1600}
LADDER_1D = [(51, 1 / 100), (101, 1 / 400), (201, 1 / 1600)]
LADDER_2D = {
    2: [(132, 1 / 100), (524, 1 / 400), (2103, 1 / 1600)],
    4: [(135, 1 / 100), (516, 1 / 400), (2124, 1 / 1600)],
}


@dataclass(frozen=True)
class Preset:
    config: dict
    ladder: tuple = ()

    @property
    def is_sweep(self) -> bool:
        return bool(self.ladder)


def _barenblatt_1d(law, alpha, N, tau):
    return {"law": law, "alpha": alpha, "dim": 1, "mesh": f"interval:{N}", "datum": "barenblatt",
            "exact": "barenblatt", "tau": tau, "T": 1.0, "cadence": 10}


def _barenblatt_2d(alpha, mesh_name, tau, T):
    return {"law": "law2", "alpha": alpha, "dim": 2, "mesh": f"bundled:{mesh_name}", "datum": "barenblatt",
            "C0": 0.1, "exact": "barenblatt", "tau": tau, "T": T, "cadence": 10}


def _build_presets():
    p = {}
    for scheme, law in (("scheme1", "law1"), ("scheme2", "law2")):
        for alpha in (3, 4):
            for N, tau in LADDER_1D:
                p[f"table1-{scheme}-alpha{alpha}-N{N}"] = Preset(_barenblatt_1d(law, alpha, N, tau))
            sweep = _barenblatt_1d(law, alpha, "{N}", 0.01)
            p[f"table1-{scheme}-alpha{alpha}-sweep"] = Preset(sweep, tuple(LADDER_1D))
    for alpha in (4, 5, 6, 8):
        for N, tau in LADDER_1D[:2]:
            p[f"table2-alpha{alpha}-N{N}"] = Preset(_barenblatt_1d("law2", alpha, N, tau))
        p[f"table2-alpha{alpha}-sweep"] = Preset(_barenblatt_1d("law2", alpha, "{N}", 0.01), tuple(LADDER_1D[:2]))
    for theta, alpha in ((0, 4), (0.5, 7)):
        p[f"waiting-1d-theta{theta}-alpha{alpha}"] = Preset({
            "law": "law2", "alpha": alpha, "dim": 1, "mesh": "refined-interval:100,4", "datum": "sine-power",
            "theta": theta, "tau": 1e-4, "T": 0.2, "cadence": 200})
    for alpha, ladder in LADDER_2D.items():
        for N, tau in ladder:
            p[f"table3-alpha{alpha}-N{N}"] = Preset(_barenblatt_2d(alpha, f"barenblatt-a{alpha}-N{N}", tau, 0.1))
        p[f"table3-alpha{alpha}-sweep"] = Preset(
            _barenblatt_2d(alpha, f"barenblatt-a{alpha}-N{{N}}", 0.01, 0.1), tuple(ladder))
    p["barenblatt2d-alpha4-N516-T1"] = Preset(_barenblatt_2d(4, "barenblatt-a4-N516", 1 / 400, 1.0) | {"cadence": 40})
    p["waiting-2d-cosine"] = Preset({
        "law": "law2", "alpha": 4, "dim": 2, "mesh": "bundled:cosine-bump-N2105", "datum": "cosine-bump-2d",
        "tau": 1e-3, "T": 0.5, "cadence": 50})
    p["waiting-2d-axisym"] = Preset({
        "law": "law2", "alpha": 4, "dim": 2, "mesh": "radial:1,201", "datum": "cosine-bump-2d",
        "tau": 1e-4, "T": 0.5, "cadence": 500})
    p["donut-alpha3"] = Preset({
        "law": "law2", "alpha": 3, "dim": 2, "mesh": "bundled:donut-N910", "datum": "donut",
        "tau": 1e-2, "T": 0.2, "cadence": 10})
    p["peaks-merge"] = Preset({
        "law": "law2", "alpha": 4, "dim": 2, "mesh": "rect:-1,1,-1,1,28,28", "datum": "two-peaks",
        "boundary": "pinned", "tau": 1e-2, "T": 5.0, "cadence": 50})
    return p


PRESETS = _build_presets()


def preset_config(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}") from None


def run_preset(name: str, out=None):
    """Run a named preset; sweeps return their rows, single runs a RunResult."""
    pre = preset_config(name)
    cfg = config_from_dict(pre.config)
    out = Path(out) if out is not None else Path(cfg.out) / name
    if pre.is_sweep:
        return run_sweep(cfg, list(pre.ladder), out)
    return run_experiment(cfg, out)
