"""Command line entry point: ``ratproof <subcommand> --config FILE``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigInvalid, RatProofError
from .harness.config import STEPS, check, load_config
from .harness.report import encode
from .harness.runner import invalid_inputs, run_experiment, validate_rip
from .strategies import Caps

EPILOG = """\
exit codes:
  0  success
  1  analysis failure (INVALID-RIP, failed audit, gap violated, validation failed)
  2  configuration error (bad TOML, missing formula file, unknown option)
  3  enumeration cap exceeded (profiles or random tapes)

config defaults (TOML):
  [protocol]  kind="np" checker="perfect" noise_bits=2 gamma=1 normalize=false
              wrap=false bind_first_message=true corruption="none"
  [[inputs]]  formulas=[...] or bits="..."; label="member"|"nonmember" (required)
  [analysis]  steps=["gap"] gap_gamma=(none) intervals=(none; needed by decide)
  [transform] gamma=(none; needed by transform)
  [amplify]   gamma_prime, n (needed by amplify); c, s, rho optional overrides
  [caps]      profiles=1048576 tapes=1048576
  [output]    path=(stdout) format="json" seed=0

subcommands pick the steps: run uses [analysis].steps, gap/decide/transform
run that step alone, amplify runs transform+amplify unless c and s are given.
"""

SUBCOMMANDS = {
    "run": "run the steps listed in the config",
    "gap": "optimal payments, answer bits and utility gaps",
    "decide": "interval decider against the rational answer",
    "transform": "zero-one rounding, gap gate and (c, s) extraction",
    "amplify": "threshold repetition certificate",
    "validate": "check rational answers against member/nonmember labels",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratproof",
        description="Exact experiments on rational interactive proofs.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in SUBCOMMANDS.items():
        p = sub.add_parser(
            name, help=help_text, epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter
        )
        p.add_argument("--config", required=True, type=Path, metavar="PATH")
        p.add_argument("--out", type=Path, metavar="PATH", help="report file (default: stdout)")
        p.add_argument("--caps", type=int, metavar="N", help="cap on profiles and on tapes")
        p.add_argument("--seed", type=int, metavar="N", help="seed for sampled spot checks")
        p.add_argument("--format", choices=("json", "csv"), help="report format (default json)")
    return parser


def _configure(args):
    cfg = load_config(args.config)
    if args.caps is not None:
        if args.caps < 1:
            raise ConfigInvalid("--caps must be positive")
        cfg.caps = Caps(args.caps, args.caps)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.format is not None:
        cfg.format = args.format
    if args.command in ("gap", "decide", "transform"):
        cfg.steps = (args.command,)
    elif args.command == "amplify":
        cfg.steps = ("amplify",) if cfg.c is not None else ("transform", "amplify")
    cfg.steps = tuple(s for s in STEPS if s in cfg.steps)
    check(cfg)
    return cfg


def write_outputs(report, cfg) -> list[Path]:
    """Write the report (and its CSV gap table and figures) to ``cfg.out``."""
    from .harness.plotting import render_figures

    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = [out]
    if cfg.format == "csv":
        out.write_text(report.gap_csv())
    else:
        out.write_text(report.to_json())
        if report.gap_table:
            table = out.with_suffix(".csv")
            table.write_text(report.gap_csv())
            written.append(table)
    written += render_figures(report, out)
    return written


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _configure(args)
        if args.command == "validate":
            summary = validate_rip(cfg)
            text = json.dumps(encode(summary.to_dict()), indent=2) + "\n"
            if cfg.out:
                Path(cfg.out).write_text(text)
            else:
                sys.stdout.write(text)
            status = "PASS" if summary.passed else "FAIL"
            note = " (vacuous)" if summary.vacuous else ""
            print(f"validate: {status}{note}", file=sys.stderr)
            for name in summary.offending:
                print(f"  offending input: {name}", file=sys.stderr)
            return 0 if summary.passed else 1

        report = run_experiment(cfg)
        if cfg.out:
            for path in write_outputs(report, cfg):
                print(f"wrote {path}", file=sys.stderr)
        else:
            sys.stdout.write(report.gap_csv() if cfg.format == "csv" else report.to_json())
        bad = invalid_inputs(report)
        if bad:
            print(f"INVALID-RIP on {', '.join(bad)}", file=sys.stderr)
            return 1
        return 0
    except RatProofError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
