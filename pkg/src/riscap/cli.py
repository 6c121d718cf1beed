"""Command-line entry point: ``riscap {validate,optimize,sweep,fig<N>} [options]``."""

import argparse
import json
import logging
import sys
from dataclasses import replace

from ._validation import RiscapError, ValidationError
from .experiments import PRESETS, ExperimentSpec, emit, parse_config, preset, run_many

log = logging.getLogger("riscap")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(json.dumps({"error": "usage_error", "message": message, "usage": self.format_usage().strip()}) + "\n")
        sys.exit(2)


def _parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON experiment file (defaults apply to missing keys)")
    common.add_argument("--out", default="-", help="output file, '-' for stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, help="override master_seed")
    common.add_argument("--trials", type=int, help="override the trial count")
    common.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it")
    common.add_argument("-v", "--verbose", action="store_true", help="progress logs on stderr")

    p = _Parser(prog="riscap", description="Ergodic capacity experiments for RIS-assisted MIMO links.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="approximations vs Monte-Carlo at one operating point")
    sub.add_parser("optimize", parents=[common], help="covariance and phase design vs the random baseline")
    sub.add_parser("sweep", parents=[common], help="sweep one axis (mode 'sweep' or 'upper_bound')")
    for name in sorted(PRESETS, key=lambda n: int(n[3:])):
        sub.add_parser(name, parents=[common], help=f"preset reproducing {name}")
    return p


def _specs(args):
    if args.command in PRESETS:
        if args.config:
            raise ValidationError("presets do not take --config", key="config")
        specs = preset(args.command)
    else:
        spec = parse_config(args.config) if args.config else ExperimentSpec()
        if args.command == "sweep":
            mode = spec.mode if spec.mode in ("sweep", "upper_bound") else "sweep"
        else:
            mode = args.command
        if mode != spec.mode:
            keep = spec.quantities if args.config and _explicit(args.config, "quantities") else ()
            spec = replace(spec, mode=mode, quantities=keep)
        specs = [spec]
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    return [replace(s, **overrides) for s in specs] if overrides else specs


def _explicit(path, key):
    with open(path, encoding="utf-8") as fh:
        return key in json.load(fh)


def _error(exc, code):
    payload = exc.to_dict() if isinstance(exc, RiscapError) else {"error": "io_error", "message": str(exc)}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.threads < 1:
            raise ValidationError("--threads must be >= 1", key="threads")
        specs = _specs(args)
        rows, cols = run_many(specs, n_jobs=args.threads)
        emit(rows, args.format, args.out, cols)
    except ValidationError as exc:
        return _error(exc, 2)
    except RiscapError as exc:
        return _error(exc, 1)
    except OSError as exc:
        return _error(exc, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
