"""Command-line entry point: ``jrc-sim`` / ``python -m jrchybrid``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import SystemConfig, dataclass_schema
from .errors import ConfigurationError
from .harness import EXPERIMENTS, ExperimentSpec, run_experiment, spec_from_dict

EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="jrc-sim",
        description="Monte-Carlo simulator for RF-chain selection and sub-arrayed hybrid "
                    "precoding in joint radar-communication transmitters.",
    )
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="output file; format follows the suffix unless --format is given")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--config", help="JSON experiment config; flags override its fields")
    p.add_argument("--snr-db", type=float, nargs="+")
    p.add_argument("--rho", type=float, nargs="+")
    p.add_argument("--pmax", type=float, nargs="+", help="P_max values in watts")
    p.add_argument("--nrx", type=int, nargs="+")
    p.add_argument("--workers", type=int)
    p.add_argument("--traces", action="store_true", help="keep nu/G/objective traces in JSON records")
    p.add_argument("--print-schema", action="store_true", help="print the config JSON schema and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_schema() -> dict:
    sch = dataclass_schema(ExperimentSpec)
    props = sch["properties"]
    props["experiment"] = {"enum": list(EXPERIMENTS)}
    props["system"] = dataclass_schema(SystemConfig)
    props["sweep"] = {
        "type": "object",
        "properties": {
            "snr_db": {"type": "array", "items": {"type": "number"}},
            "rho": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
            "p_max": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
            "n_rx": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        },
        "additionalProperties": False,
    }
    return {"$schema": "https://json-schema.org/draft/2020-12/schema", "title": "jrc-sim config", **sch}


def make_spec(args) -> ExperimentSpec:
    spec = ExperimentSpec()
    if args.config:
        with open(args.config) as fh:
            spec = spec_from_dict(json.load(fh), spec)
    if args.experiment:
        spec.experiment = args.experiment
    if args.trials is not None:
        spec.trials = args.trials
    if args.seed is not None:
        spec.master_seed = args.seed
    if args.workers is not None:
        spec.workers = args.workers
    if args.traces:
        spec.keep_traces = True
    sweep = dict(spec.sweep)
    for key, val in (("snr_db", args.snr_db), ("rho", args.rho), ("p_max", args.pmax), ("n_rx", args.nrx)):
        if val:
            sweep[key] = list(val)
    spec.sweep = sweep
    return spec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.print_schema:
        print(json.dumps(config_schema(), indent=2))
        return 0
    try:
        spec = make_spec(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_experiment(spec, args.out, args.format)
    except ConfigurationError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.out is None:
        json.dump(result.summary["cells"], sys.stdout, indent=1)
        print()
    return 0
