"""specmuon-bench: run sweeps, reproduce the comparison figure, check theorems.

Exit codes: 0 on success with all enabled checks passing, 1 when a
theorem check fails, 2 on bad configuration or usage. The output
directory resolves in order: --outdir flag, SPECMUON_OUTDIR environment
variable, config file value, built-in default.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from ..errors import SpecmuonError
from .harness import load_config, reproduce_fig1, run_experiment, sweep_rtop

ENV_OUTDIR = "SPECMUON_OUTDIR"


def _resolve_outdir(flag_value, fallback) -> Path:
    if flag_value is not None:
        return Path(flag_value)
    env = os.environ.get(ENV_OUTDIR)
    if env:
        return Path(env)
    return Path(fallback)


def _apply_outdir(cfg, flag_value):
    cfg.outdir = _resolve_outdir(flag_value, cfg.outdir)
    return cfg


def _print_failures(failures):
    for line in failures:
        print(f"FAIL {line}")


def _cmd_run(args) -> int:
    cfg = _apply_outdir(load_config(args.config), args.outdir)
    summary = run_experiment(cfg)
    for name, block in summary["optimizers"].items():
        mean = block["final_loss"]["mean"]
        print(f"{name}: final loss mean {mean:.6g} "
              f"({block['iterations_to_threshold']['n_reached']}"
              f"/{len(cfg.seeds)} seeds at threshold)")
    print(f"wrote {cfg.outdir}/summary.json")
    if not summary["checks_passed"]:
        _print_failures(summary["failures"])
        return 1
    return 0


def _cmd_fig1(args) -> int:
    outdir = _resolve_outdir(args.outdir, Path("runs") / "fig1")
    summary = reproduce_fig1(args.seed, outdir)
    for name, lr in summary["chosen_lr"].items():
        print(f"{name}: lr {lr}, iterations to threshold "
              f"{summary['iterations_to_threshold'][name]}")
    print(f"specmuon at or below best Adam/AdamW in "
          f"{summary['specmuon_wins']}/{summary['n_seeds']} seeds")
    print(f"wrote {outdir}/fig1_summary.json")
    return 0


def _cmd_rtop(args) -> int:
    cfg = _apply_outdir(load_config(args.config), args.outdir)
    values = [int(v) for v in args.values.split(",") if v.strip()]
    summary = sweep_rtop(cfg, values)
    print("ranking (best first): " + ", ".join(summary["ranking"]))
    print(f"wrote {cfg.outdir}/rtop_sweep.json")
    return 0


def _cmd_check(args) -> int:
    cfg = _apply_outdir(load_config(args.config), args.outdir)
    cfg.check_theorems = True
    cfg.plot = False
    summary = run_experiment(cfg)
    if summary["checks_passed"]:
        print(f"all theorem checks passed "
              f"({len(cfg.optimizers)} optimizers, {len(cfg.seeds)} seeds)")
        return 0
    _print_failures(summary["failures"])
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specmuon-bench",
        description="Benchmark harness for spectral energy-stable optimizers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute the sweep described by a TOML config")
    p.add_argument("config", type=Path)
    p.add_argument("--outdir", type=Path, default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("fig1", help="tuned four-optimizer regression comparison")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", type=Path, default=None)
    p.set_defaults(func=_cmd_fig1)

    p = sub.add_parser("rtop-sweep", help="sweep the retained-rank count")
    p.add_argument("config", type=Path)
    p.add_argument("--values", required=True,
                   help="comma-separated rank counts, e.g. 0,2,4,6")
    p.add_argument("--outdir", type=Path, default=None)
    p.set_defaults(func=_cmd_rtop)

    p = sub.add_parser("check", help="run with theorem checks only, no plots")
    p.add_argument("config", type=Path)
    p.add_argument("--outdir", type=Path, default=None)
    p.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpecmuonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
