"""Command-line entry point.

Subcommands: simulate, scan-l, scan-stark, correlation (bath diagnostics),
validate (oracle suite). Exit codes: 0 success, 2 config error, 3 numerical
failure, 4 validation-suite failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import PRESETS, load_config, preset_config
from .errors import (CapacityExceeded, ConfigError, Diverged,
                     QuadratureNotConverged, SpinBlochError)
from .kernels import backend_name, set_num_threads

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4


def _add_common(p: argparse.ArgumentParser, needs_config: bool = True) -> None:
    if needs_config:
        p.add_argument("config", nargs="?", default=None,
                       help="YAML experiment config (or a run manifest)")
        p.add_argument("--preset", choices=sorted(PRESETS),
                       help="use a bundled configuration instead of a file")
    p.add_argument("--out-dir", default=None, help="output directory override")
    p.add_argument("--threads", type=int, default=0,
                   help="worker threads for the hierarchy sweep (must not change results)")
    p.add_argument("--seedless", action="store_true",
                   help="assert that no RNG is involved anywhere (always true; CI hook)")


def _resolve(args) -> "ExperimentConfig":
    if args.config is None and args.preset is None:
        raise ConfigError("give a config file or --preset")
    if args.config is not None and args.preset is not None:
        raise ConfigError("give either a config file or --preset, not both")
    cfg = preset_config(args.preset) if args.preset else load_config(args.config)
    if args.out_dir is not None:
        from dataclasses import replace

        cfg = replace(cfg, out_dir=args.out_dir)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbloch",
        description="Spin-boson HEOM dynamics with Bloch-volume non-Markovianity diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="single run: probes, map, volume, rates")
    _add_common(p)
    p = sub.add_parser("scan-l", help="hierarchy truncation convergence scan")
    _add_common(p)
    p = sub.add_parser("scan-stark", help="transition-frequency (Stark shift) sweep")
    _add_common(p)
    p = sub.add_parser("correlation", help="bath correlation function diagnostics")
    _add_common(p)
    p = sub.add_parser("validate", help="oracle validation suite")
    _add_common(p, needs_config=False)
    p.add_argument("--fast", action="store_true", help="shorter validation window")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads:
        set_num_threads(args.threads)

    try:
        if args.command == "validate":
            from .validate import render_table, run_all

            checks = run_all(fast=args.fast)
            print(render_table(checks))
            print(f"backend: {backend_name()}")
            return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION

        from . import run as runmod

        cfg = _resolve(args)
        out_dir = Path(cfg.out_dir)
        if args.command == "simulate":
            result = runmod.emit_run(cfg, out_dir)
            n_wit = len(result.report.witness_intervals)
            tdec = result.decoherence_time_fs()
            print(f"wrote {out_dir}/run_results.csv "
                  f"(witness intervals: {n_wit}, first V<0.01 at "
                  f"{'never' if tdec is None else f'{tdec:.2f} fs'})")
        elif args.command == "scan-l":
            results = runmod.scan_hierarchy(cfg, out_dir)
            print(f"wrote per-level results for L in {sorted(results)} to {out_dir}")
        elif args.command == "scan-stark":
            results = runmod.scan_stark(cfg, out_dir)
            print(f"wrote sweep over {len(results)} frequencies to {out_dir}")
        elif args.command == "correlation":
            path = runmod.emit_correlation(cfg, out_dir)
            print(f"wrote {path}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (Diverged, QuadratureNotConverged, CapacityExceeded) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SpinBlochError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
