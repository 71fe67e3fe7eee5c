"""Command-line verification harness.

Two subcommands: ``run`` executes one named suite from a JSON config
and writes summary.json plus metric-<name>.csv artifacts; ``sweep``
repeats the suite along one declared axis (p, lam-scale, or translate)
and tabulates every summary metric against the axis.  Exit codes:
0 all metrics passed, 1 an assertion or metric failed, 2 bad config.
"""

import argparse
import csv
import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import serialization as ser
from .suites import ConfigError, parse_config, run_suite

_AXES = {"p": "p", "lam-scale": "lam_scale", "lam_scale": "lam_scale",
         "translate": "translate"}


def _load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config: file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from exc
    return parse_config(raw)


def _execute(cfg, out_dir, verbose=False):
    os.makedirs(out_dir, exist_ok=True)
    metrics, artifacts = run_suite(cfg)
    for name, columns in artifacts.items():
        ser.save_metric_csv(out_dir, name, columns)
    summary = ser.save_summary(out_dir, cfg.suite, cfg.space, metrics)
    if verbose:
        for m in summary["metrics"]:
            state = "PASS" if m["pass"] else "FAIL"
            print(f"  [{state}] {m['name']}: {m['value']:.6g} (tol {m['tolerance']:.3g})")
    status = "PASS" if summary["pass"] else "FAIL"
    print(f"{cfg.suite} ({cfg.space.m1},{cfg.space.m2}): {status} -> {out_dir}")
    return summary


def cmd_run(args):
    cfg = _load_config(args.config)
    out_dir = args.out or cfg.out_dir
    summary = _execute(cfg, out_dir, verbose=args.verbose)
    return 0 if summary["pass"] else 1


def cmd_sweep(args):
    cfg = _load_config(args.config)
    axis_key = _AXES.get(args.axis.replace("λ", "lam"))
    if axis_key is None:
        raise ConfigError(f"axis: unknown axis {args.axis!r}; expected p, lam-scale, or translate")
    values = cfg.sweep.get(axis_key, [])
    if not values:
        raise ConfigError(f"sweep.{axis_key}: empty axis; list the values to sweep in the config")
    if axis_key == "p" and not all(isinstance(v, (int, float)) and 1.0 < v <= 2.0 for v in values):
        raise ConfigError("sweep.p: values must lie in (1, 2]")
    out_dir = args.out or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)

    def one(v):
        sub = dataclasses.replace(cfg, **{axis_key: float(v)})
        return _execute(sub, os.path.join(out_dir, f"{axis_key}={v}"), verbose=args.verbose)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            summaries = list(pool.map(one, values))
    else:
        summaries = [one(v) for v in values]

    names = [m["name"] for m in summaries[0]["metrics"]]
    path = os.path.join(out_dir, f"sweep-{axis_key}.csv")
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow([axis_key] + names + ["pass"])
        for v, s in zip(values, summaries):
            row = {m["name"]: m["value"] for m in s["metrics"]}
            wr.writerow([ser._fmt(v)] + [ser._fmt(row.get(n, float("nan"))) for n in names]
                        + ["true" if s["pass"] else "false"])
    print(f"sweep over {axis_key}: {len(values)} points -> {path}")
    return 0 if all(s["pass"] for s in summaries) else 1


def main(argv=None):
    parser = argparse.ArgumentParser(prog="hyperharm",
                                     description="verification suites and sweeps")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("run", cmd_run), ("sweep", cmd_sweep)):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON config path")
        sp.add_argument("--out", default=None, help="output directory (overrides config)")
        sp.add_argument("--jobs", type=int, default=1, help="parallel sweep points")
        sp.add_argument("--verbose", action="store_true")
        sp.set_defaults(fn=fn)
    sub.choices["sweep"].add_argument("--axis", required=True,
                                      help="one of: p, lam-scale, translate")
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"assertion failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
