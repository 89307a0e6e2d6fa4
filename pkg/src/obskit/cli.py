"""Command line entry point: one subcommand per scenario.

Every run writes the structured JSON report to the configured output path
(``--format csv`` additionally writes one CSV per table, plus verdicts and
constants, next to it) and prints a short human summary.  Exit codes:

* 0 — every verdict passed
* 2 — a mathematical verdict failed
* 3 — input error (config parse/schema/invariant, bad domain or shape)
* 4 — numeric failure (quadrature, eigensolver, bracket expansion)
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .config import SCENARIOS, apply_overrides, default_config, load_config
from .errors import CoercivityError, ConfigError, DomainError, NumericError, ShapeError
from .report import bundle_summary_text, bundle_to_csv_texts, bundle_to_json_text
from .scenarios import run_scenario

_SCENARIO_HELP = {
    "verify-cutoff": "check the window transform closed form and its sandwich bounds",
    "coercivity-scan": "scan eigenvalue clusters for minimal observed energy",
    "resolvent-scan": "test the per-frequency resolvent inequality on random states",
    "weak-observability": "evaluate observation-time bounds on random states",
    "assumption-i": "verify the two-full-sides square observation is uniformly coercive",
    "assumption-ii-iii": "fit the one-side square decay constant and its certificates",
    "admissibility": "bound observed energy above on random states",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obskit",
        description="Spectral observability toolkit: verify frequency-localization "
        "identities, coercivity certificates, and observability inequalities on "
        "finite spectral systems.",
    )
    parser.add_argument("--version", action="version", version=f"obskit {__version__}")
    sub = parser.add_subparsers(dest="scenario", required=True, metavar="SCENARIO")
    for scenario in SCENARIOS:
        p = sub.add_parser(scenario, help=_SCENARIO_HELP[scenario])
        p.add_argument("--config", help="JSON config document: a file path or inline text")
        p.add_argument("--out", help="report output path (overrides the config)")
        p.add_argument("--seed", type=int, help="random seed override")
        p.add_argument("--trials", type=int, help="random trial count override")
        p.add_argument("--T", type=float, dest="T", help="time horizon override")
        p.add_argument(
            "--format",
            choices=("structured", "csv"),
            default="structured",
            help="structured: JSON report only (default); csv: also one CSV per table",
        )
    return parser


def _write_outputs(bundle, output_path: str, fmt: str) -> None:
    out = Path(output_path)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(bundle_to_json_text(bundle), encoding="utf-8")
    if fmt == "csv":
        stem = out.with_suffix("") if out.suffix else out
        for name, text in bundle_to_csv_texts(bundle).items():
            Path(f"{stem}.{name}.csv").write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            cfg = load_config(args.config, default_scenario=args.scenario)
        else:
            cfg = default_config(args.scenario)
        cfg = apply_overrides(
            cfg, seed=args.seed, trials=args.trials, T=args.T, output_path=args.out
        )
        bundle = run_scenario(cfg)
        _write_outputs(bundle, cfg.output_path, args.format)
        sys.stdout.write(bundle_summary_text(bundle))
        return bundle.exit_code
    except (ConfigError, DomainError, ShapeError) as exc:
        sys.stderr.write(f"obskit: {exc}\n")
        return 3
    except CoercivityError as exc:
        sys.stderr.write(f"obskit: {exc}\n")
        return 2
    except (NumericError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"obskit: numeric failure: {exc}\n")
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
