# Copyright 2024 - GitHub user: fredericks1982

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Command line interface.

    hapnet generate --config run.toml --seed 3 --out out/
    hapnet place    --config run.toml --seed 3 --out out/
    hapnet solve    --config run.toml --seed 3 --path fp --utility mmu --out out/
    hapnet sweep    --config run.toml --seeds 0-19 --workers 4 --out out/

The exit code is 0 when every requested row succeeded, 1 when a run failed
and 2 on an invalid configuration or command line.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd

from .config import load_config
from .harness import (
    ExperimentSpec,
    build_scenario,
    convergence,
    place,
    solve_short_term,
    sweep,
    write_csv,
    write_manifest,
)
from .models import rng as rng_streams
from .models.channel import draw_realization
from .models.enums import Baseline, SolverPath, UtilityKind
from .models.exceptions import HapNetConfigError, HapNetError

_LOGGER = logging.getLogger(__package__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def parse_seeds(text: str) -> tuple[int, ...]:
    """Parses '0,3,7' and inclusive ranges like '0-19' (or a mix of both)."""
    seeds: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                first, last = (int(value) for value in part.split("-", 1))
                if last < first:
                    raise ValueError
                seeds.extend(range(first, last + 1))
            else:
                seeds.append(int(part))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid seed list: '{text}'") from e
    return tuple(seeds)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hapnet",
        description="Satellite - HAP - terrestrial downlink simulator and optimizer",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logs")
    commands = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML configuration file")
    common.add_argument("--out", type=Path, default=Path("out"), help="output dir")

    single = argparse.ArgumentParser(add_help=False)
    single.add_argument("--seed", type=int, help="master seed (first configured)")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--path", choices=[p.value for p in SolverPath])
    solver.add_argument("--utility", choices=[u.value for u in UtilityKind])
    solver.add_argument("--baseline", choices=[b.value for b in Baseline])

    commands.add_parser(
        "generate", parents=[common, single], help="write the node table"
    )
    commands.add_parser(
        "place", parents=[common, single], help="run the long-term stage only"
    )
    solve = commands.add_parser(
        "solve", parents=[common, single, solver], help="solve one instance"
    )
    solve.add_argument(
        "--no-place", action="store_true", help="keep the initial HAP positions"
    )
    run = commands.add_parser(
        "sweep", parents=[common, solver], help="run a parameter sweep"
    )
    run.add_argument("--seeds", type=parse_seeds, help="e.g. 0-19 or 1,5,9")
    run.add_argument("--workers", type=int, default=1, help="process pool size")
    run.add_argument(
        "--convergence",
        action="store_true",
        help="also write the placement and SCA histories",
    )
    return parser


def _spec(args: argparse.Namespace) -> ExperimentSpec:
    config = load_config(args.config)
    seeds = getattr(args, "seeds", None)
    if getattr(args, "seed", None) is not None:
        seeds = (args.seed,)
    elif seeds is None and args.command != "sweep":
        seeds = config.experiment.seeds[:1]

    def option(name, enum_type):
        value = getattr(args, name, None)
        return enum_type(value) if value is not None else None

    return ExperimentSpec.from_config(
        config,
        path=option("path", SolverPath),
        utility=option("utility", UtilityKind),
        baseline=option("baseline", Baseline),
        seeds=seeds,
    )


def _generate(spec: ExperimentSpec, out: Path) -> int:
    scenario = build_scenario(spec.config, spec.seeds[0])
    files = {"nodes": write_csv(scenario.to_frame(), out / "nodes.csv", "hapnet-nodes")}
    write_manifest(out, spec, "generate", files)
    _LOGGER.info("%s written to %s", scenario, out)
    return EXIT_OK


def _place(spec: ExperimentSpec, out: Path) -> int:
    scenario, trace = place(build_scenario(spec.config, spec.seeds[0]), spec.config)
    files = {
        "nodes": write_csv(scenario.to_frame(), out / "nodes.csv", "hapnet-nodes"),
        "sr_trace": write_csv(
            trace.iterations_frame(), out / "sr_trace.csv", "hapnet-sr-trace"
        ),
        "sr_candidates": write_csv(
            trace.to_frame(), out / "sr_candidates.csv", "hapnet-sr-candidates"
        ),
    }
    write_manifest(out, spec, "place", files)
    _LOGGER.info(
        "Placement: %d HAP users after %d iterations (%s)",
        trace.objectives[-1],
        len(trace.iterations),
        trace.stop_reason,
    )
    return EXIT_OK


def _solve(spec: ExperimentSpec, out: Path, no_place: bool) -> int:
    seed = spec.seeds[0]
    scenario = build_scenario(spec.config, seed)
    if not no_place:
        scenario, _ = place(scenario, spec.config)
    realization = draw_realization(scenario, rng_streams.stream(seed, rng_streams.FADING))
    outcome = solve_short_term(
        scenario,
        realization,
        spec.path,
        spec.utility,
        spec.baseline,
        association=spec.config.association,
        power=spec.config.power,
        rng=rng_streams.stream(seed, rng_streams.BASELINE),
    )
    files = {
        "users": write_csv(outcome.report.to_frame(), out / "users.csv", "hapnet-users"),
        "backhaul": write_csv(
            outcome.assoc.bh_frame(), out / "backhaul.csv", "hapnet-backhaul"
        ),
        "summary": write_csv(
            pd.DataFrame([outcome.report.summary()]),
            out / "solve.csv",
            "hapnet-solve",
        ),
    }
    write_manifest(out, spec, "solve", files)
    _LOGGER.info("Solved: %s", outcome.report)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs the command line; returns the exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        _LOGGER.setLevel(logging.DEBUG)

    try:
        spec = _spec(args)
    except (HapNetConfigError, ValueError) as e:
        _LOGGER.error("Invalid configuration. Error: %s", e)
        return EXIT_USAGE

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "generate":
            return _generate(spec, out)
        if args.command == "place":
            return _place(spec, out)
        if args.command == "solve":
            return _solve(spec, out, args.no_place)
        if args.workers < 1:
            _LOGGER.error("The number of workers must be at least 1")
            return EXIT_USAGE
        result = sweep(spec, out, args.workers)
        if args.convergence:
            convergence(spec, out / "convergence")
        return EXIT_OK if result.succeeded else EXIT_FAILED
    except HapNetError as e:
        _LOGGER.error("The %s command failed. Error: %s", args.command, e)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
