"""Command line entry point.

::

    socialcapital simulate --config society.toml [--seed N] [--reps N] [--parallel N] [--out DIR]
    socialcapital preset fig3b [--scale 0.5] [--parallel N] [--out DIR]
    socialcapital oracle --config society.toml
    socialcapital verify fig5 [--scale 1.0] [--parallel N] [--out DIR]

Outputs go to ``--out``, else ``$SOCIALCAPITAL_OUT/<name>``, else
``./out/<name>``.  Exit codes: 0 success, 1 a scored comparison failed
(``verify`` only), 2 configuration error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from ..oracles import all_predictions
from ..utility import ConfigError, SocietyConfig
from .config import describe, load_config
from .emit import EmitError, emit
from .presets import PRESETS, ExperimentPreset, custom_preset, get_preset
from .runner import RunSummary, run_experiment

OUT_ENV = "SOCIALCAPITAL_OUT"

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _out_dir(arg: str | None, name: str) -> str:
    if arg:
        return arg
    return os.path.join(os.environ.get(OUT_ENV, "out"), name)


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="socialcapital", description="Social capital network formation simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run replications of a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--reps", type=_positive_int)
    s.add_argument("--parallel", type=_positive_int, default=1)
    s.add_argument("--out")

    for name, hlp in (("preset", "run a named preset"), ("verify", "run a preset and fail on a missed tolerance")):
        q = sub.add_parser(name, help=hlp)
        q.add_argument("name", choices=PRESETS)
        q.add_argument("--scale", type=_positive_float, default=1.0, help="multiply replication counts")
        q.add_argument("--parallel", type=_positive_int, default=1)
        q.add_argument("--out")

    o = sub.add_parser("oracle", help="print closed-form predictions for a config")
    o.add_argument("--config", required=True)
    o.add_argument("--agent", type=_positive_int, default=10, help="birth step used by popularity curves")
    return p


def _compact(pred) -> dict:
    d = pred.to_dict()
    v = d["value"]
    if isinstance(v, dict) and "mass" in v:
        pmf = pred.value
        d["value"] = {"mean": pmf.mean(), "support_max": int(pmf.support.max()), "tail": pmf.tail}
    return d


def _report(summary: RunSummary, files: list[str], stream=sys.stdout) -> None:
    for c in summary.comparisons:
        tag = "PASS" if c.passed else "FAIL"
        if not c.in_regime:
            tag += " (out of regime)"
        print(f"[{tag}] C{c.criterion} {c.name}: predicted {c.predicted}, observed {c.observed}, "
              f"tolerance {c.tolerance}", file=stream)
        if c.detail:
            print(f"        {c.detail}", file=stream)
    print(f"wall clock {summary.wall_clock:.1f} s; wrote {len(files)} files"
          + (f" to {os.path.dirname(files[0])}" if files else ""), file=stream)


def _run(preset: ExperimentPreset, scale: float, parallel: int, out: str | None) -> RunSummary:
    summary = run_experiment(preset, parallelism=parallel, scale=scale)
    files = emit(summary, _out_dir(out, preset.name), preset.outputs, preset.plots)
    _report(summary, files)
    return summary


def _simulate(args) -> int:
    cfg = load_config(args.config)
    if isinstance(cfg, SocietyConfig):
        if args.seed is not None or args.reps is not None:
            cfg = dataclasses.replace(
                cfg,
                seed=cfg.seed if args.seed is None else args.seed,
                replication_count=cfg.replication_count if args.reps is None else args.reps,
            )
        print(json.dumps(describe(cfg), indent=2))
        name = os.path.splitext(os.path.basename(args.config))[0]
        preset = custom_preset(name, cfg, [cfg], [{}])
    else:
        preset = cfg
        if args.seed is not None or args.reps is not None:
            for pt in preset.points:
                pt.society = dataclasses.replace(
                    pt.society,
                    seed=pt.society.seed if args.seed is None else args.seed,
                    replication_count=pt.society.replication_count if args.reps is None else args.reps,
                )
            if args.seed is not None:
                preset.seed = args.seed
    _run(preset, 1.0, args.parallel, args.out)
    return EXIT_OK


def _oracle(args) -> int:
    cfg = load_config(args.config)
    if not isinstance(cfg, SocietyConfig):
        raise ConfigError([f"<file>: {args.config} is a preset; oracle needs a single society config"])
    preds = [_compact(p) for p in all_predictions(cfg, args.agent) if p.in_regime]
    print(json.dumps({"society": describe(cfg), "predictions": preds}, indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _simulate(args)
        if args.command == "oracle":
            return _oracle(args)
        summary = _run(get_preset(args.name), args.scale, args.parallel, args.out)
        if args.command == "verify" and not summary.passed:
            print(f"{len(summary.failures())} comparison(s) outside tolerance", file=sys.stderr)
            return EXIT_FAIL
        return EXIT_OK
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except EmitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
