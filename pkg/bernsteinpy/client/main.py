# -*- coding: utf-8 -*-
import argparse
import logging
import sys
from typing import List, Optional

from bernsteinpy.data.data_readiness import build_params, parse_vector, read_config, snapshot
from bernsteinpy.global_variable import DATASET_OUTPUT_PATH, DEFAULT_DT, DEFAULT_L_MAX, DEFAULT_N_MAX, \
    DEFAULT_POPULATION_SIZE, DEFAULT_REPLICAS, ENV_OPERATOR_MODES, OUTPUT_FORMATS, SUBCOMMANDS, TOOL_VERSION
from bernsteinpy.process.verify import CheckSelection, RunOptions
from bernsteinpy.utils.base import log
from bernsteinpy.utils.exceptions import BernsteinPyError

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", required=True,
                        help="model config (.json, .toml, .yaml) or a built-in model name")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--replicas", type=int, default=DEFAULT_REPLICAS)
    shared.add_argument("--t", type=float, default=None, help="time horizon; subcommand default if omitted")
    shared.add_argument("--x0", type=float, default=None, help="initial frequency; a grid if omitted")
    shared.add_argument("--dt", type=float, default=DEFAULT_DT)
    shared.add_argument("--v", type=parse_vector, default=None, help="coefficient list, e.g. 0,0.5,1")
    shared.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    shared.add_argument("--out", default=DATASET_OUTPUT_PATH)
    shared.add_argument("--format", choices=OUTPUT_FORMATS, default="json")
    shared.add_argument("--force", action="store_true", help="run estimators although the recurrence condition fails")
    shared.add_argument("--population-size", type=int, default=DEFAULT_POPULATION_SIZE)
    shared.add_argument("--l-max", type=int, default=DEFAULT_L_MAX)
    shared.add_argument("--env-mode", choices=ENV_OPERATOR_MODES, default="exact")
    shared.add_argument("--n-jobs", type=int, default=1)

    parser = argparse.ArgumentParser(prog="bernsteinpy",
                                     description="Simulate and verify two-type Lambda-Wright-Fisher processes "
                                                 "through their Bernstein coefficient dual.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in SUBCOMMANDS:
        subparsers.add_parser(command, parents=[shared])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    print("BernsteinPy - Lambda-Wright-Fisher Duality Toolkit")
    logger = log(args.out, "bernsteinpy.log")
    logger.info(f"BernsteinPy {TOOL_VERSION}: {args.command}")
    try:
        logger.debug("Config Loaded")
        print("-*-*- Config Loaded -*-*-")
        config = read_config(args.config)
        params = build_params(config)
        options = RunOptions(seed=args.seed, replicas=args.replicas, t=args.t, x0=args.x0, dt=args.dt, v=args.v,
                             n_max=args.n_max, out=args.out, fmt=args.format, force=args.force,
                             population_size=args.population_size, l_max=args.l_max, env_mode=args.env_mode,
                             n_jobs=args.n_jobs)
        logger.debug("Verification")
        record = CheckSelection(args.command).activate(params, snapshot(config), options)
    except BernsteinPyError as err:
        logging.getLogger(__name__).error(f"{type(err).__name__}: {err}")
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_PASS if record.verdict else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
