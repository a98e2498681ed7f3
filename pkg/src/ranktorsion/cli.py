"""Command line entry point: ``ranktorsion run config.json``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .experiment import ConfigError, load_config, rows_to_csv, rows_to_json, run_experiment
from .groups import FAMILIES

FAMILY_NOTES = {
    "torus": "Z^k mod n, params: k (default 2), n",
    "heisenberg": "integer Heisenberg group mod n, chain x,z,y, params: n",
    "sl3z-principal": "SL(3,Z) on SL(3,Z/p), the principal congruence quotient, params: p",
    "sl3z-projective": "SL(3,Z) on the projective plane over Z/p, params: p",
}


def build_parser():
    ap = argparse.ArgumentParser(prog="ranktorsion", description=__doc__)
    ap.add_argument("--families", action="store_true", help="list the built-in families and exit")
    sub = ap.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run a JSON experiment config")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides the config)")
    run.add_argument("--workers", type=int, help="worker processes (overrides the config)")
    run.add_argument("--format", choices=("csv", "json", "both"), default="csv")
    run.add_argument("--verify", action="store_true",
                     help="enable every cross-route check (homology by both presentations)")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.families:
        for tag in FAMILIES:
            print(f"{tag:16s} {FAMILY_NOTES[tag]}")
        return 0
    if args.command != "run":
        ap.print_usage(sys.stderr)
        return 2
    try:
        config = load_config(args.config)
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("--workers must be positive")
            config = replace(config, workers=args.workers)
        if args.out is not None:
            config = replace(config, output=args.out)
        if args.verify:
            config = replace(config, homology=True, two_route=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    result = run_experiment(config)
    out = config.output or "."
    os.makedirs(out, exist_ok=True)
    if args.format in ("csv", "both"):
        with open(os.path.join(out, "results.csv"), "w", newline="") as fh:
            fh.write(rows_to_csv(result.rows))
    if args.format in ("json", "both"):
        with open(os.path.join(out, "results.json"), "w") as fh:
            fh.write(rows_to_json(result.rows))
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump(result.summary, fh, indent=1)
        fh.write("\n")
    print(f"{len(result.rows)} rows written to {out}")
    for fam, label, R, err in result.violations:
        print(f"FAILED {fam} {label} R={R}: {err}", file=sys.stderr)
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
