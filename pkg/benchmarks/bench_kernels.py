"""Time the numpy and numba element kernels side by side.

    python3 benchmarks/bench_kernels.py --spacing 0.02 --repeat 20

Both paths are imported directly from ``lagpme.kernels`` so one process
can time them regardless of LAGPME_BACKEND. Each kernel is called once
before timing so numba compilation is excluded. A full backward Euler
step is timed under each backend in a child process.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from lagpme import kernels, mesh

STEP_SNIPPET = """
import time, numpy as np
from lagpme import mesh, oracle, solver
from lagpme.energy import EnergyLaw
tri = mesh.build_disk(1.46, {spacing}, seed=0)
rc = oracle.Barenblatt(4.0, 2, 0.1).value(tri.centroids, 1.0)
law = EnergyLaw("law2", 4.0)
solver.step_backward_euler(tri, tri.identity(), law, rc, 1e-3)
t0 = time.perf_counter()
for _ in range({repeat}):
    solver.step_backward_euler(tri, tri.identity(), law, rc, 1e-3)
print((time.perf_counter() - t0) / {repeat})
"""


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_table(tri, repeat, rng):
    x = tri.identity() + 0.01 * rng.standard_normal(tri.nodes.shape)
    el, gl = tri.elements, tri.grad_lambda
    _, dJ = kernels.jacobian_terms_numpy(x, el, gl)
    w1 = rng.uniform(0.5, 1.5, tri.n_elements)
    w2 = rng.uniform(-1.0, 1.0, tri.n_elements)
    cases = {
        "deformation_gradients": lambda k: lambda: getattr(kernels, f"deformation_gradients_{k}")(x, el, gl),
        "jacobian_terms": lambda k: lambda: getattr(kernels, f"jacobian_terms_{k}")(x, el, gl),
        "scatter_nodal": lambda k: lambda: getattr(kernels, f"scatter_nodal_{k}")(dJ, el, tri.n_nodes),
        "element_hessians": lambda k: lambda: getattr(kernels, f"element_hessians_{k}")(dJ, gl, w1, w2),
    }
    rows = []
    for name, make in cases.items():
        t_np = best_of(make("numpy"), repeat)
        t_nb = best_of(make("numba"), repeat) if kernels.HAVE_NUMBA else float("nan")
        rows.append((name, t_np, t_nb))
    return rows


def step_time(backend, spacing, repeat):
    env = dict(os.environ, LAGPME_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", STEP_SNIPPET.format(spacing=spacing, repeat=repeat)],
        env=env, check=True, capture_output=True, text=True,
    )
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spacing", type=float, default=0.03, help="disk mesh spacing (smaller = more elements)")
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--no-step", action="store_true", help="skip the full-step timing")
    args = ap.parse_args(argv)

    tri = mesh.build_disk(1.46, args.spacing, seed=0)
    print(f"disk mesh: {tri.n_nodes} nodes, {tri.n_elements} elements")
    print(f"{'kernel':<24}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, t_np, t_nb in kernel_table(tri, args.repeat, np.random.default_rng(0)):
        print(f"{name:<24}{1e3 * t_np:12.3f}{1e3 * t_nb:12.3f}{t_np / t_nb:10.1f}")
    if not args.no_step:
        reps = max(1, args.repeat // 4)
        t_np = step_time("numpy", args.spacing, reps)
        t_nb = step_time("numba", args.spacing, reps)
        print(f"{'backward Euler step':<24}{1e3 * t_np:12.3f}{1e3 * t_nb:12.3f}{t_np / t_nb:10.1f}")


if __name__ == "__main__":
    main()
