"""Reference meshes and the piecewise-linear flow map on them.

A configuration is stored as an ``(N, d)`` array of current node positions
``x[i] = x_h(X_i)``. The flat degree-of-freedom vector used by the solver
keeps the coordinate blocks contiguous, ``(a_1..a_N, b_1..b_N)``; see
:func:`to_dof` / :func:`from_dof`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay

from . import kernels


class MeshError(ValueError):
    """Malformed or invalid mesh input."""


class AdmissibilityError(ValueError):
    """A configuration has an element with ``det F_e <= 0``."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


# reference gradients of the barycentric basis on the unit simplex
_REF_GRAD = {1: np.array([[-1.0], [1.0]]), 2: np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])}


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Simplicial mesh of the reference domain.

    Use :meth:`from_arrays` rather than the constructor; it validates the
    input, fixes the orientation and precomputes the per-element data.
    """

    nodes: np.ndarray  # (N, d)
    elements: np.ndarray  # (M, d+1)
    det_A: np.ndarray  # (M,) determinant of the reference-element map
    areas: np.ndarray  # (M,) |tau_e|
    grad_lambda: np.ndarray  # (M, d+1, d)
    boundary: np.ndarray  # (N,) bool

    @classmethod
    def from_arrays(cls, nodes, elements) -> "Triangulation":
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        elements = np.array(elements, dtype=np.int64)
        if nodes.ndim != 2 or nodes.shape[1] not in (1, 2):
            raise MeshError(f"nodes must have shape (N, 1) or (N, 2), got {nodes.shape}")
        d = nodes.shape[1]
        N = nodes.shape[0]
        if elements.ndim != 2 or elements.shape[1] != d + 1:
            raise MeshError(f"elements must have {d + 1} columns in {d}D, got shape {elements.shape}")
        if elements.size and (elements.min() < 0 or elements.max() >= N):
            bad = int(np.argmax((elements < 0).any(1) | (elements >= N).any(1)))
            raise MeshError(f"element {bad} references a node index outside 0..{N - 1}")
        for e, row in enumerate(elements):
            if len(set(row.tolist())) != d + 1:
                raise MeshError(f"degenerate element {e}: {tuple(row.tolist())}")
        _check_duplicate_nodes(nodes)

        if d == 1:
            if np.any(np.diff(nodes[:, 0]) <= 0):
                raise MeshError("1D nodes must be strictly increasing")
            swap = nodes[elements[:, 0], 0] > nodes[elements[:, 1], 0]
            elements[swap] = elements[swap][:, ::-1]
            det_A = nodes[elements[:, 1], 0] - nodes[elements[:, 0], 0]
        else:
            det_A = _det_A_2d(nodes, elements)
            scale = np.max(np.ptp(nodes, axis=0)) ** 2 if N else 1.0
            tiny = np.abs(det_A) <= 1e-14 * scale
            if np.any(tiny):
                raise MeshError(f"degenerate element {int(np.argmax(tiny))}: zero area")
            cw = det_A < 0
            elements[cw] = elements[cw][:, [0, 2, 1]]
            det_A = np.abs(det_A)

        areas = det_A / math.factorial(d)
        grad_lambda = _grad_lambda(nodes, elements)
        boundary = _boundary_nodes(N, elements, d)
        for arr in (nodes, elements, det_A, areas, grad_lambda, boundary):
            arr.setflags(write=False)
        return cls(nodes, elements, det_A, areas, grad_lambda, boundary)

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    @property
    def n_dof(self) -> int:
        return self.n_nodes * self.dim

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.nodes[self.elements].mean(axis=1)

    @cached_property
    def boundary_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.boundary)

    @cached_property
    def _patch_csr(self):
        n = self.elements.shape[1]
        flat = self.elements.ravel()
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=self.n_nodes)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return indptr, order // n

    def patch(self, i: int) -> np.ndarray:
        """Indices of the elements containing node ``i`` (the set N(i))."""
        indptr, elems = self._patch_csr
        return elems[indptr[i]:indptr[i + 1]]

    @cached_property
    def dof_index(self) -> np.ndarray:
        """(M, d*(d+1)) global dof of each local dof ``c*(d+1) + l``."""
        d = self.dim
        return np.concatenate([c * self.n_nodes + self.elements for c in range(d)], axis=1)

    def identity(self) -> np.ndarray:
        """The identity configuration ``x = X`` (writable copy)."""
        return np.array(self.nodes, dtype=float)


def _det_A_2d(nodes, elements):
    p = nodes[elements]
    return (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (p[:, 2, 0] - p[:, 0, 0]) * (
        p[:, 1, 1] - p[:, 0, 1]
    )


def _grad_lambda(nodes, elements):
    d = nodes.shape[1]
    p = nodes[elements]
    # A_e columns are the edge vectors X_l - X_1
    A = (p[:, 1:, :] - p[:, :1, :]).transpose(0, 2, 1)
    Ainv = np.linalg.inv(A)
    # grad lambda_l = A^{-T} grad_ref lambda_l  ->  rows: ref_grad @ A^{-1}
    return np.einsum("lk,ekj->elj", _REF_GRAD[d], Ainv)


def _boundary_nodes(N, elements, d):
    flags = np.zeros(N, dtype=bool)
    if d == 1:
        if N:
            flags[0] = flags[-1] = True
        return flags
    edges = np.sort(np.concatenate([elements[:, [0, 1]], elements[:, [1, 2]], elements[:, [2, 0]]]), axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    flags[uniq[counts == 1].ravel()] = True
    return flags


def _check_duplicate_nodes(nodes):
    if len(nodes) < 2:
        return
    uniq, inverse, counts = np.unique(nodes, axis=0, return_inverse=True, return_counts=True)
    if np.any(counts > 1):
        dup = np.flatnonzero(counts[inverse.ravel()] > 1)
        raise MeshError(f"duplicate node coordinates at nodes {dup[:2].tolist()}")


# ----------------------------------------------------------------------------
# flow map on the mesh
# ----------------------------------------------------------------------------


def to_dof(x: np.ndarray) -> np.ndarray:
    """(N, d) positions -> flat vector ``(a_1..a_N, b_1..b_N)``."""
    return np.asarray(x, dtype=float).T.flatten()  # always a copy


def from_dof(xi: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(xi, dtype=float).reshape(dim, -1).T.copy()


def _check_cfg(tri: Triangulation, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1 and tri.dim == 1:
        x = x[:, None]
    if x.shape != tri.nodes.shape:
        raise ValueError(f"configuration shape {x.shape} does not match mesh {tri.nodes.shape}")
    return np.ascontiguousarray(x)


def deformation_gradients(tri: Triangulation, x) -> np.ndarray:
    """All element deformation gradients, shape (M, d, d)."""
    x = _check_cfg(tri, x)
    return kernels.deformation_gradients(x, tri.elements, tri.grad_lambda)


def deformation_gradient(tri: Triangulation, x, e: int) -> np.ndarray:
    """F_e = sum_l x_{en(e,l)} (x) grad lambda_l, constant on element ``e``."""
    x = _check_cfg(tri, x)
    return x[tri.elements[e]].T @ tri.grad_lambda[e]


def det_F(tri: Triangulation, x, e: int | None = None):
    """det F_e for element ``e``, or for all elements when ``e`` is None."""
    x = _check_cfg(tri, x)
    if e is not None:
        return float(np.linalg.det(deformation_gradient(tri, x, e))) if tri.dim == 2 else float(
            deformation_gradient(tri, x, e)[0, 0]
        )
    J, _ = kernels.jacobian_terms(x, tri.elements, tri.grad_lambda)
    return J


def is_admissible(tri: Triangulation, x) -> tuple[bool, float]:
    """``(all det F_e > 0, min_e det F_e)``."""
    J = det_F(tri, x)
    margin = float(J.min()) if J.size else math.inf
    return bool(margin > 0.0), margin


def require_admissible(tri: Triangulation, x, what="configuration") -> np.ndarray:
    J = det_F(tri, x)
    if J.size and not J.min() > 0.0:
        e = int(np.argmin(J))
        raise AdmissibilityError(f"{what} is not admissible: det F[{e}] = {J[e]:.3e}", margin=float(J[e]))
    return J


# ----------------------------------------------------------------------------
# builders
# ----------------------------------------------------------------------------


def build_interval(left: float, right: float, n_nodes: int) -> Triangulation:
    if n_nodes < 2 or not right > left:
        raise ValueError("need n_nodes >= 2 and right > left")
    X = np.linspace(left, right, n_nodes)
    return from_1d_nodes(X)


def from_1d_nodes(X) -> Triangulation:
    X = np.asarray(X, dtype=float)
    el = np.column_stack([np.arange(len(X) - 1), np.arange(1, len(X))])
    return Triangulation.from_arrays(X[:, None], el)


def build_structured(domain, resolution) -> Triangulation:
    """Uniform mesh of an interval ``(a, b)`` or rectangle ``(x0, x1, y0, y1)``.

    In 2D ``resolution = (nx, ny)`` counts cells; each cell is cut into two
    triangles along the same diagonal. In 1D ``resolution`` is the number of
    cells.
    """
    domain = tuple(float(v) for v in domain)
    if len(domain) == 2:
        n = int(np.atleast_1d(resolution)[0])
        if n < 1:
            raise ValueError("resolution must be positive")
        return build_interval(domain[0], domain[1], n + 1)
    x0, x1, y0, y1 = domain
    nx, ny = (int(r) for r in resolution)
    if nx < 1 or ny < 1:
        raise ValueError("resolution must be positive")
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    XX, YY = np.meshgrid(xs, ys)
    nodes = np.column_stack([XX.ravel(), YY.ravel()])
    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    n00 = (j * (nx + 1) + i).ravel()
    n10, n01, n11 = n00 + 1, n00 + nx + 1, n00 + nx + 2
    elements = np.concatenate([np.column_stack([n00, n10, n11]), np.column_stack([n00, n11, n01])])
    return Triangulation.from_arrays(nodes, elements)


def refined_interval(left: float, right: float, n_cells: int, end_split: int = 1) -> Triangulation:
    """Uniform interval mesh whose first and last cells are split ``end_split`` ways."""
    X = np.linspace(left, right, n_cells + 1)
    if end_split > 1:
        head = np.linspace(X[0], X[1], end_split + 1)
        tail = np.linspace(X[-2], X[-1], end_split + 1)
        X = np.concatenate([head, X[2:-2], tail])
    return from_1d_nodes(X)


def distmesh2d(fd, fh, h0, bbox, pfix=None, *, seed=0, max_iter=3000, dptol=1e-3):
    """Persson-Strang force-equilibrium mesh generator.

    ``fd`` is a signed distance function (negative inside), ``fh`` a relative
    size function. Returns ``(points, triangles)``. Deterministic for a fixed
    ``seed``.
    """
    geps = 1e-3 * h0
    deps = math.sqrt(np.finfo(float).eps) * h0
    ttol, Fscale, deltat = 0.1, 1.2, 0.2
    (xmin, ymin), (xmax, ymax) = bbox
    x, y = np.meshgrid(np.arange(xmin, xmax + h0 / 2, h0), np.arange(ymin, ymax + h0 / 2, h0 * math.sqrt(3) / 2))
    x[1::2, :] += h0 / 2
    p = np.column_stack([x.ravel(), y.ravel()])
    p = p[fd(p) < geps]
    r0 = 1.0 / fh(p) ** 2
    rng = np.random.default_rng(seed)
    p = p[rng.random(len(p)) < r0 / r0.max()]
    pfix = np.zeros((0, 2)) if pfix is None else np.asarray(pfix, dtype=float).reshape(-1, 2)
    nfix = len(pfix)
    p = np.vstack([pfix, p])
    pold = np.full_like(p, np.inf)
    t = None
    for _ in range(max_iter):
        if np.max(np.sqrt(((p - pold) ** 2).sum(1))) / h0 > ttol:
            pold = p.copy()
            t = Delaunay(p).simplices
            pmid = p[t].mean(axis=1)
            t = t[fd(pmid) < -geps]
            bars = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
            bars = np.unique(bars, axis=0)
        barvec = p[bars[:, 0]] - p[bars[:, 1]]
        L = np.sqrt((barvec ** 2).sum(1))
        hbars = fh((p[bars[:, 0]] + p[bars[:, 1]]) / 2)
        L0 = hbars * Fscale * math.sqrt((L ** 2).sum() / (hbars ** 2).sum())
        F = np.maximum(L0 - L, 0.0)
        Fvec = (F / L)[:, None] * barvec
        Ftot = np.zeros_like(p)
        for c in range(2):
            Ftot[:, c] += np.bincount(bars[:, 0], weights=Fvec[:, c], minlength=len(p))
            Ftot[:, c] -= np.bincount(bars[:, 1], weights=Fvec[:, c], minlength=len(p))
        Ftot[:nfix] = 0.0
        p = p + deltat * Ftot
        d = fd(p)
        ix = d > 0
        if np.any(ix):
            q = p[ix]
            dgradx = (fd(q + [deps, 0]) - d[ix]) / deps
            dgrady = (fd(q + [0, deps]) - d[ix]) / deps
            p[ix] -= np.column_stack([d[ix] * dgradx, d[ix] * dgrady])
        inner = d < -geps
        if np.max(np.sqrt((deltat * Ftot[inner] ** 2).sum(1)), initial=0.0) / h0 < dptol:
            break
    t = Delaunay(p).simplices
    t = t[fd(p[t].mean(axis=1)) < -geps]
    used = np.unique(t)
    remap = np.full(len(p), -1)
    remap[used] = np.arange(len(used))
    return p[used], remap[t]


def build_disk(radius: float, spacing: float, grading: float = 0.0, *, seed: int = 0) -> Triangulation:
    """Disk mesh, element size ``spacing * (1 + grading * (1 - r/radius))``.

    ``grading > 0`` makes the mesh denser at the rim. Boundary nodes are put
    exactly on the circle.
    """
    if radius <= 0 or spacing <= 0:
        raise ValueError("radius and spacing must be positive")

    def fd(p):
        return np.sqrt((p ** 2).sum(1)) - radius

    def fh(p):
        return 1.0 + grading * np.clip(1.0 - np.sqrt((p ** 2).sum(1)) / radius, 0.0, 1.0)

    bbox = ((-radius, -radius), (radius, radius))
    pts, tris = distmesh2d(fd, fh, spacing, bbox, seed=seed)
    tri = Triangulation.from_arrays(pts, tris)
    nodes = np.array(tri.nodes)
    b = tri.boundary_nodes
    nodes[b] *= radius / np.sqrt((nodes[b] ** 2).sum(1))[:, None]
    return Triangulation.from_arrays(nodes, tri.elements)


# ----------------------------------------------------------------------------
# text format
# ----------------------------------------------------------------------------


def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_mesh(text: str) -> Triangulation:
    lines = list(_data_lines(text))
    pos = 0

    def header(word):
        nonlocal pos
        if pos >= len(lines):
            raise MeshError(f"missing '{word} <count>' header")
        lineno, tok = lines[pos]
        if len(tok) != 2 or tok[0] != word:
            raise MeshError(f"line {lineno}: expected '{word} <count>', got {' '.join(tok)!r}")
        try:
            count = int(tok[1])
        except ValueError:
            raise MeshError(f"line {lineno}: bad count {tok[1]!r}") from None
        if count < 0:
            raise MeshError(f"line {lineno}: negative count")
        pos += 1
        return count

    def block(count, width, conv, what):
        nonlocal pos
        rows = []
        for _ in range(count):
            if pos >= len(lines):
                raise MeshError(f"unexpected end of file while reading {what}")
            lineno, tok = lines[pos]
            if width is not None and len(tok) != width:
                raise MeshError(f"line {lineno}: expected {width} values for {what}, got {len(tok)}")
            try:
                rows.append([conv(v) for v in tok])
            except ValueError:
                raise MeshError(f"line {lineno}: cannot parse {what} entry {' '.join(tok)!r}") from None
            pos += 1
        return rows

    n_nodes = header("nodes")
    if n_nodes == 0:
        raise MeshError("mesh has no nodes")
    width = len(lines[pos][1]) if pos < len(lines) else None
    if width not in (1, 2):
        raise MeshError(f"line {lines[pos][0] if pos < len(lines) else '?'}: nodes need 1 or 2 coordinates")
    nodes = block(n_nodes, width, float, "node")
    n_el = header("elements")
    elements = block(n_el, width + 1, int, "element")
    if pos != len(lines):
        raise MeshError(f"line {lines[pos][0]}: trailing content after elements")
    return Triangulation.from_arrays(np.array(nodes), np.array(elements, dtype=np.int64).reshape(-1, width + 1))


def load_mesh(path) -> Triangulation:
    return parse_mesh(Path(path).read_text())


def format_mesh(tri: Triangulation) -> str:
    out = [f"nodes {tri.n_nodes}"]
    out += [" ".join(repr(float(v)) for v in row) for row in tri.nodes]
    out.append(f"elements {tri.n_elements}")
    out += [" ".join(str(int(v)) for v in row) for row in tri.elements]
    return "\n".join(out) + "\n"


def save_mesh(tri: Triangulation, path) -> None:
    Path(path).write_text(format_mesh(tri))
