"""Command-line entry point: ``uavris {sweep-snr,sweep-op,aod-boundary,validate}``."""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import experiments as ex
from .config import load_config
from .errors import ConfigError, EmptyRegion


def _u64(text: str) -> int:
    value = int(text, 10)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavris", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "sweep-snr": "average received SNR versus UAV-RIS distance",
        "sweep-op": "outage probability versus UAV-RIS distance",
        "aod-boundary": "boundary of the hovering region for a target AOD",
        "validate": "analytic-vs-Monte-Carlo check table",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", type=Path, default=None, help="key = value config file")
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")
        p.add_argument("--seed", type=_u64, default=None, help="overrides the config seed")
        if name == "aod-boundary":
            p.add_argument("--target-ms", type=float, default=1.0)
            p.add_argument("--theta-deg", type=float, default=None)
    return parser


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_overrides(seed=args.seed)
        if args.command == "aod-boundary":
            overrides = {"aod_target_ms": args.target_ms}
            if args.theta_deg is not None:
                overrides["theta_deg"] = args.theta_deg
            cfg = cfg.with_overrides(**overrides)
    except (ConfigError, OSError) as exc:
        print(f"uavris: config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "sweep-snr":
        _emit(ex.sweep_snr(cfg).to_csv(), args.out)
    elif args.command == "sweep-op":
        _emit(ex.sweep_op(cfg).to_csv(), args.out)
    elif args.command == "aod-boundary":
        target, theta = cfg.aod_target_ms * 1e-3, math.radians(cfg.theta_deg)
        try:
            poly = ex.aod_boundary(cfg)
        except EmptyRegion as exc:
            _emit(ex.boundary_table(cfg, None, target, theta).to_csv(), args.out)
            print(f"uavris: {exc}", file=sys.stderr)
            return 1
        _emit(ex.boundary_table(cfg, poly, target, theta).to_csv(), args.out)
    else:
        report = ex.validate(cfg)
        _emit(report.render(), args.out)
        return 0 if report.passed else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
