"""Regenerate the bundled 2D meshes in src/lagpme/data/meshes.

The spacing of each mesh is searched (secant on log N vs log h) until the
node count hits the target or the closest count seen is kept. DistMesh is
seeded, so the output is reproducible.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from lagpme import mesh, oracle

OUT = Path(__file__).resolve().parents[1] / "src" / "lagpme" / "data" / "meshes"
GRADING = 1.0


def _donut(h):
    pts, tris = mesh.distmesh2d(oracle.donut_distance, lambda p: np.ones(len(p)), h, ((-1.05, -1.05), (1.05, 1.05)))
    return mesh.Triangulation.from_arrays(pts, tris)


def _disk(radius):
    return lambda h: mesh.build_disk(radius, h * radius, grading=GRADING)


def tune(build, target, h0, max_iter=8):
    best = None
    h = h0
    history = []
    for _ in range(max_iter):
        tri = build(h)
        n = tri.n_nodes
        history.append((math.log(h), math.log(n)))
        if best is None or abs(n - target) < abs(best.n_nodes - target):
            best = tri
        if n == target:
            break
        if len(history) >= 2 and history[-1][0] != history[-2][0]:
            (a0, b0), (a1, b1) = history[-2:]
            slope = (b1 - b0) / (a1 - a0) if b1 != b0 else -2.0
        else:
            slope = -2.0
        h = math.exp(math.log(h) + (math.log(target) - math.log(n)) / slope)
    return best


def targets():
    r2 = oracle.Barenblatt(2.0, 2, 0.1).radius(1.0)
    r4 = oracle.Barenblatt(4.0, 2, 0.1).radius(1.0)
    out = {}
    for n in (132, 524, 2103):
        out[f"barenblatt-a2-N{n}"] = (_disk(r2), n, 1.45 / math.sqrt(n))
    for n in (135, 516, 2124):
        out[f"barenblatt-a4-N{n}"] = (_disk(r4), n, 1.45 / math.sqrt(n))
    out["cosine-bump-N2105"] = (_disk(1.0), 2105, 1.45 / math.sqrt(2105))
    out["donut-N910"] = (_donut, 910, 0.04)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", help="subset of meshes to build")
    args = ap.parse_args()
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (build, n, h0) in targets().items():
        if args.names and name not in args.names:
            continue
        tri = tune(build, n, h0)
        print(f"{name}: {tri.n_nodes} nodes, {tri.n_elements} elements, min area {tri.areas.min():.3e}")
        mesh.save_mesh(tri, OUT / f"{name}.mesh")


if __name__ == "__main__":
    main()
