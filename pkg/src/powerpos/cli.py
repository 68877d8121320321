"""Command-line front end.

Output is always JSON.  Exit codes: 0 on success (whatever the verdict),
2 for invalid input, 3 when a witness search fails.
"""

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .errors import PowerPosError, WitnessSearchFailed
from .io import dumps, verdict_to_json

EXIT_OK, EXIT_INPUT, EXIT_SEARCH = 0, 2, 3


def build_parser():
    p = argparse.ArgumentParser(prog="powerpos", description="Positivity of entrywise and blockwise power maps.")
    p.add_argument("command", choices=["classify", "witness", "apply", "verify", "monotone"])
    p.add_argument("--regime", choices=harness.REGIMES, default="entrywise")
    p.add_argument("--m", type=int, default=2, help="block size (ignored for entrywise)")
    p.add_argument("--n", type=int, default=3, help="matrix or block-grid size")
    p.add_argument("--family", choices=["Psi", "phi", "psi", "f"], default="Psi")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--input", help="matrix JSON for the apply command")
    p.add_argument("--output", help="also write the JSON result (witness file for 'witness') here")
    p.add_argument("--json", action="store_true", help="JSON output (the only mode; accepted for clarity)")
    return p


def _config(args):
    return harness.RunConfig(
        command=args.command,
        regime=args.regime,
        m=args.m,
        n=args.n,
        family=args.family,
        alpha=args.alpha,
        beta=args.beta,
        samples=args.samples,
        seed=args.seed,
        output=args.output,
        input=args.input,
        workers=args.workers,
    )


def run(cfg):
    if cfg.command == "classify":
        return verdict_to_json(harness.run_classify(cfg))
    if cfg.command == "witness":
        return harness.run_witness(cfg)
    if cfg.command == "verify":
        return harness.run_verify(cfg)
    if cfg.command == "monotone":
        return harness.run_monotone(cfg)
    return harness.run_apply(cfg)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    cfg = _config(args)
    try:
        result = run(cfg)
    except WitnessSearchFailed as exc:
        print(dumps({"error": "witness_search_failed", "message": str(exc), "best": exc.best}))
        return EXIT_SEARCH
    except (PowerPosError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(dumps({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_INPUT
    text = dumps(result)
    print(text)
    if cfg.output and cfg.command != "witness":
        Path(cfg.output).write_text(text + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
