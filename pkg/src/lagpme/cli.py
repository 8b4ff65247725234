"""Command line entry point: ``lagpme run | sweep | preset``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments
from .mesh import MeshError
from .solver import StepError


def _build_parser():
    ap = argparse.ArgumentParser(prog="lagpme", description="Lagrangian solver for the porous medium equation.")
    ap.add_argument("--out", help="output directory (overrides the config)")
    ap.add_argument("--seedless", action="store_true", help="forbid randomness (runs are already deterministic)")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one configuration")
    run.add_argument("--config", required=True, help="flat 'key = value' config file")

    sweep = sub.add_parser("sweep", help="convergence sweep over an (N, tau) ladder")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--ladder", required=True, help="file with one 'N,tau' row per refinement")

    pre = sub.add_parser("preset", help="run a named experiment")
    pre.add_argument("name", nargs="?")
    pre.add_argument("--list", action="store_true", help="list preset names and exit")

    for p in (run, sweep, pre):
        p.add_argument("--out", dest="sub_out", help=argparse.SUPPRESS)
    return ap


def _print_summary(summary):
    keep = {k: summary.get(k) for k in ("status", "n_nodes", "n_steps", "final_time", "errors", "t_star")}
    print(json.dumps(keep, indent=2, sort_keys=True))


def _print_rows(rows):
    cols = experiments.SWEEP_COLUMNS
    print(",".join(cols))
    for r in rows:
        print(",".join("" if r[c] is None else f"{r[c]:.6g}" for c in cols))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    out = args.sub_out or args.out
    try:
        if args.command == "run":
            cfg = experiments.load_config(args.config)
            res = experiments.run_experiment(cfg, out)
            _print_summary(res.summary)
        elif args.command == "sweep":
            cfg = experiments.load_config(args.config)
            ladder = experiments.parse_ladder(Path(args.ladder).read_text())
            _print_rows(experiments.run_sweep(cfg, ladder, out))
        else:
            if args.list or not args.name:
                print("\n".join(sorted(experiments.PRESETS)))
                return 0
            res = experiments.run_preset(args.name, out)
            if isinstance(res, list):
                _print_rows(res)
            else:
                _print_summary(res.summary)
    except (experiments.ConfigError, MeshError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StepError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
