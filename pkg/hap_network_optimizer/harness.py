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
This module runs the two-stage pipeline and the parameter sweeps.

Long-term stage: HAP placement on average channel statistics. Short-term
stage: a fresh fading draw, FH and BH association, power allocation and
evaluation. A sweep runs the pipeline over a grid of one parameter times a
list of seeds and writes the raw rows, their mean/std summary and a run
manifest.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import multiprocessing
import traceback
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from .association import (
    default_threshold,
    random_association,
    solve_bh,
    solve_fh_fp,
    solve_fh_near_optimal,
)
from .config import AssociationSettings, PowerSettings, RunConfig
from .models import rng as rng_streams
from .models.channel import ChannelRealization, average_realization, draw_realization
from .models.enums import Baseline, SolverPath, SweepVariable, UtilityKind
from .models.exceptions import HapNetInfeasibleError
from .models.rates import Association, PowerAllocation, RateReport, evaluate
from .models.scenario import Scenario, generate_scenario
from .placement import SrTrace, sr_optimize
from .power import ScaState, mmu_power, sca_msu, uniform_allocation

_LOGGER = logging.getLogger(__package__)

SCHEMA_VERSION = 1
STATUS_OK = "ok"
STATUS_FAILED = "failed"

RAW_FILE = "raw.csv"
SUMMARY_FILE = "summary.csv"
MANIFEST_FILE = "manifest.json"
SR_TRACE_FILE = "sr_trace.csv"
SR_CANDIDATES_FILE = "sr_candidates.csv"
SCA_TRACE_FILE = "sca_trace.csv"

KEY_COLUMNS = [
    "sweep_variable",
    "sweep_value",
    "seed",
    "path",
    "utility",
    "baseline",
    "status",
    "error",
]


def _report_columns() -> list[str]:
    empty = RateReport(
        [], np.zeros(0), PowerAllocation(), 0, np.zeros(0), np.zeros(0),
        UtilityKind.MSU, [],
    )
    return [key for key in empty.summary() if key != "utility_kind"]


METRIC_COLUMNS = [
    *_report_columns(),
    "hap_fh_load_bps",
    "hap_bh_rate_bps",
    "placement_objective",
    "placement_iterations",
]
RAW_COLUMNS = KEY_COLUMNS + METRIC_COLUMNS
SUMMARY_COLUMNS = ["sweep_variable", "sweep_value", "rows", "failed"] + [
    f"{column}_{stat}" for column in METRIC_COLUMNS for stat in ("mean", "std")
]


# region Experiment


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run: the scenario configuration, the solver path, the utility,
    the baseline, the swept parameter with its grid (SI units) and the seeds.

    :raises ValueError: if the seeds are empty or repeated, or if a sweep has
        an empty grid.
    """

    config: RunConfig
    path: SolverPath = SolverPath.NEAR_OPTIMAL
    utility: UtilityKind = UtilityKind.MSU
    baseline: Baseline = Baseline.NONE
    sweep: SweepVariable = SweepVariable.NONE
    grid: tuple[float, ...] = ()
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("At least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("The seeds must be distinct")
        if self.sweep != SweepVariable.NONE and not self.grid:
            raise ValueError("The sweep grid must not be empty")

    @property
    def points(self) -> tuple[Optional[float], ...]:
        """Returns the sweep values (a single None point without a sweep)."""
        if self.sweep == SweepVariable.NONE:
            return (None,)
        return self.grid

    def config_at(self, value: Optional[float]) -> RunConfig:
        """Returns the configuration of one sweep point."""
        if value is None:
            return self.config
        return self.config.with_sweep_value(self.sweep, value)

    @classmethod
    def from_config(
        cls,
        config: RunConfig,
        *,
        path: Optional[SolverPath] = None,
        utility: Optional[UtilityKind] = None,
        baseline: Optional[Baseline] = None,
        seeds: Optional[tuple[int, ...]] = None,
    ) -> "ExperimentSpec":
        """Creates the spec of a configuration, with optional overrides."""
        return cls(
            config=config,
            path=path if path is not None else config.association.path,
            utility=utility if utility is not None else config.power.utility,
            baseline=baseline if baseline is not None else config.experiment.baseline,
            sweep=config.experiment.sweep,
            grid=config.experiment.grid,
            seeds=tuple(seeds) if seeds is not None else config.experiment.seeds,
        )

    def describe(self) -> dict:
        """Returns the JSON-ready description used in the run manifest."""
        return {
            "path": self.path.value,
            "utility": self.utility.value,
            "baseline": self.baseline.value,
            "sweep": self.sweep.value,
            "grid": list(self.grid),
            "seeds": list(self.seeds),
        }


# endregion

# region Short-term stage


@dataclass
class ShortTermOutcome:
    """The result of one short-term instance."""

    assoc: Association
    power: PowerAllocation
    report: RateReport
    sca_state: Optional[ScaState] = None
    min_rate: Optional[float] = None


def associate(
    scenario: Scenario,
    realization: ChannelRealization,
    path: SolverPath,
    settings: AssociationSettings = AssociationSettings(),
) -> Association:
    """FH association on the chosen path, then the BH association."""
    if path == SolverPath.NEAR_OPTIMAL:
        assoc = solve_fh_near_optimal(scenario, realization, settings.max_rounds)
    else:
        threshold = (
            settings.center_threshold
            if settings.center_threshold is not None
            else default_threshold(scenario)
        )
        assoc = solve_fh_fp(scenario, realization, threshold)
    return assoc.with_bh(solve_bh(scenario, realization))


def solve_short_term(
    scenario: Scenario,
    realization: ChannelRealization,
    path: SolverPath = SolverPath.NEAR_OPTIMAL,
    utility: UtilityKind = UtilityKind.MSU,
    baseline: Baseline = Baseline.NONE,
    *,
    association: AssociationSettings = AssociationSettings(),
    power: PowerSettings = PowerSettings(),
    rng: Optional[np.random.Generator] = None,
) -> ShortTermOutcome:
    """Associates, allocates power and evaluates one channel realization.

    The uniform-power baseline keeps the chosen association; the
    random-association baseline draws a random feasible association (from
    `rng`, by default the baseline stream of the scenario seed). Both use
    uniform power.

    :raises HapNetInfeasibleError: if the BH capacities cannot host the HAPs
        or the outcome violates a constraint.
    """
    state, min_rate = None, None
    if baseline == Baseline.RANDOM_ASSOCIATION:
        if rng is None:
            rng = rng_streams.stream(scenario.seed, rng_streams.BASELINE)
        assoc = random_association(scenario, rng)
        allocation = uniform_allocation(
            scenario, realization, assoc, omega_bandwidth=power.omega_bandwidth
        )
    else:
        assoc = associate(scenario, realization, path, association)
        if baseline == Baseline.UNIFORM_POWER:
            allocation = uniform_allocation(
                scenario, realization, assoc, omega_bandwidth=power.omega_bandwidth
            )
        elif utility == UtilityKind.MSU:
            allocation, state = sca_msu(
                scenario,
                realization,
                assoc,
                tol=power.sca_tolerance,
                max_iter=power.sca_max_iterations,
                omega_bandwidth=power.omega_bandwidth,
            )
        else:
            allocation, min_rate = mmu_power(
                scenario,
                realization,
                assoc,
                tol=power.mmu_tolerance,
                omega_bandwidth=power.omega_bandwidth,
            )

    report = evaluate(
        scenario, realization, assoc, allocation, utility, power.omega_bandwidth
    )
    if not report.is_feasible:
        raise HapNetInfeasibleError(
            "The short-term outcome violates "
            + ", ".join(v.constraint.value for v in report.violations)
        )
    return ShortTermOutcome(assoc, allocation, report, state, min_rate)


# endregion

# region Pipeline


def build_scenario(config: RunConfig, seed: int) -> Scenario:
    """Drops the nodes of a configuration for a seed."""
    return generate_scenario(config.layout, config.counts, seed, config.parameters)


def place(scenario: Scenario, config: RunConfig) -> tuple[Scenario, SrTrace]:
    """Runs the long-term stage (a no-op trace if placement is disabled)."""
    if not config.placement_enabled:
        return scenario, SrTrace()
    return sr_optimize(scenario, config.placement)


def _key_row(spec: ExperimentSpec, value: Optional[float], seed: int) -> dict:
    return {
        "sweep_variable": spec.sweep.value,
        "sweep_value": value,
        "seed": seed,
        "path": spec.path.value,
        "utility": spec.utility.value,
        "baseline": spec.baseline.value,
        "status": STATUS_OK,
        "error": "",
    }


def run_pipeline(
    spec: ExperimentSpec, value: Optional[float], seed: int
) -> dict[str, Union[str, int, float, None]]:
    """Runs the two-stage pipeline for one sweep point and seed.

    :returns: the result row (RAW_COLUMNS); all metrics 0 when there are no
        users.

    :raises HapNetError: if a stage fails (infeasible BH capacity,
        invalid geometry...).
    """
    config = spec.config_at(value)
    row = _key_row(spec, value, seed)
    if config.counts.users == 0:
        row.update(dict.fromkeys(METRIC_COLUMNS, 0))
        return row

    scenario = build_scenario(config, seed)
    scenario, trace = place(scenario, config)
    realization = draw_realization(
        scenario, rng_streams.stream(seed, rng_streams.FADING)
    )
    outcome = solve_short_term(
        scenario,
        realization,
        spec.path,
        spec.utility,
        spec.baseline,
        association=config.association,
        power=config.power,
        rng=rng_streams.stream(seed, rng_streams.BASELINE),
    )
    summary = outcome.report.summary()
    del summary["utility_kind"]
    row.update(summary)
    row["hap_fh_load_bps"] = float(outcome.report.fh_load.sum())
    row["hap_bh_rate_bps"] = float(outcome.report.bh_rates.sum())
    row["placement_objective"] = trace.objectives[-1]
    row["placement_iterations"] = len(trace.iterations)
    _LOGGER.info(
        "Seed %d, %s=%s: utility %g, %d users served",
        seed,
        spec.sweep.value,
        value,
        row["utility"],
        row["served_users"],
    )
    return row


def _run_task(task: tuple[ExperimentSpec, Optional[float], int]) -> dict:
    spec, value, seed = task
    try:
        return run_pipeline(spec, value, seed)
    except Exception as e:  # pylint: disable=broad-exception-caught
        _LOGGER.error(
            "Row %s=%s seed %d failed. Error: %s\n%s",
            spec.sweep.value,
            value,
            seed,
            e,
            traceback.format_exc(),
        )
        row = _key_row(spec, value, seed)
        row.update(dict.fromkeys(METRIC_COLUMNS, math.nan))
        row["status"] = STATUS_FAILED
        row["error"] = f"{type(e).__name__}: {e}"
        return row


# endregion

# region Sweep


@dataclass
class SweepResult:
    """The raw rows and the summary of a sweep."""

    raw: pd.DataFrame
    summary: pd.DataFrame
    files: dict[str, Path] = field(default_factory=dict)

    @property
    def failed(self) -> int:
        """Returns the number of failed rows."""
        return int((self.raw["status"] != STATUS_OK).sum())

    @property
    def succeeded(self) -> bool:
        """True if every row succeeded."""
        return self.failed == 0


def summarize(raw: pd.DataFrame) -> pd.DataFrame:
    """Mean and sample standard deviation (0 for a single row) of every
    metric over the successful rows of each sweep point."""
    records = []
    for value, group in raw.groupby("sweep_value", dropna=False, sort=False):
        ok = group[group["status"] == STATUS_OK]
        record = {
            "sweep_variable": group["sweep_variable"].iloc[0],
            "sweep_value": value,
            "rows": len(ok),
            "failed": len(group) - len(ok),
        }
        for column in METRIC_COLUMNS:
            values = ok[column].astype(float)
            record[f"{column}_mean"] = float(values.mean()) if len(ok) else math.nan
            record[f"{column}_std"] = float(values.std()) if len(ok) > 1 else 0.0
        records.append(record)
    return pd.DataFrame(records, columns=SUMMARY_COLUMNS)


def write_csv(frame: pd.DataFrame, path: Path, schema: str) -> Path:
    """Writes a CSV preceded by the '# schema: <name> v<version>' line."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# schema: {schema} v{SCHEMA_VERSION}\n")
        frame.to_csv(f, index=False, lineterminator="\n")
    return path


def read_csv(path: Union[str, Path]) -> pd.DataFrame:
    """Reads a CSV written by write_csv."""
    return pd.read_csv(path, skiprows=1)


def sweep(
    spec: ExperimentSpec, out_dir: Union[str, Path], workers: int = 1
) -> SweepResult:
    """Runs the pipeline over every (sweep value, seed) pair.

    Failed rows are recorded with status 'failed' and the run goes on. With
    workers > 1 the rows run in a process pool; the output order is always
    (sweep value, seed).

    :raises ValueError: if workers is lower than 1.
    """
    if workers < 1:
        raise ValueError("The number of workers must be at least 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(spec, value, seed) for value in spec.points for seed in spec.seeds]
    _LOGGER.info(
        "Sweep of %s: %d points x %d seeds, %d workers",
        spec.sweep.value,
        len(spec.points),
        len(spec.seeds),
        workers,
    )

    if workers == 1:
        rows = [_run_task(task) for task in tasks]
    else:
        with multiprocessing.Pool(processes=workers) as pool:
            rows = pool.map(_run_task, tasks)

    raw = pd.DataFrame(rows, columns=RAW_COLUMNS)
    result = SweepResult(raw, summarize(raw))
    result.files["raw"] = write_csv(raw, out / RAW_FILE, "hapnet-raw")
    result.files["summary"] = write_csv(
        result.summary, out / SUMMARY_FILE, "hapnet-summary"
    )
    result.files["manifest"] = write_manifest(out, spec, "sweep", result.files)
    if not result.succeeded:
        _LOGGER.error("%d of %d rows failed", result.failed, len(rows))
    return result


# endregion

# region Convergence


def convergence(
    spec: ExperimentSpec, out_dir: Union[str, Path]
) -> dict[str, Path]:
    """Records the placement and SCA histories of every seed (first sweep
    point): per-iteration SR summary, every SR candidate evaluation and the
    SCA objective/surrogate history of the short-term MSU allocation."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = spec.config_at(spec.points[0])
    sr_frames, candidate_frames, sca_frames = [], [], []

    for seed in spec.seeds:
        scenario, trace = place(build_scenario(config, seed), config)
        sr_frames.append(trace.iterations_frame().assign(seed=seed))
        candidate_frames.append(trace.to_frame().assign(seed=seed))

        realization = draw_realization(
            scenario, rng_streams.stream(seed, rng_streams.FADING)
        )
        assoc = associate(scenario, realization, spec.path, config.association)
        _, state = sca_msu(
            scenario,
            realization,
            assoc,
            tol=config.power.sca_tolerance,
            max_iter=config.power.sca_max_iterations,
            omega_bandwidth=config.power.omega_bandwidth,
        )
        sca_frames.append(state.to_frame().assign(seed=seed, start=state.start))
        _LOGGER.info(
            "Seed %d: SR stopped after %d iterations (%s), SCA after %d",
            seed,
            len(trace.iterations),
            trace.stop_reason,
            state.iteration,
        )

    files = {
        "sr_trace": write_csv(
            _seed_first(sr_frames), out / SR_TRACE_FILE, "hapnet-sr-trace"
        ),
        "sr_candidates": write_csv(
            _seed_first(candidate_frames),
            out / SR_CANDIDATES_FILE,
            "hapnet-sr-candidates",
        ),
        "sca_trace": write_csv(
            _seed_first(sca_frames), out / SCA_TRACE_FILE, "hapnet-sca-trace"
        ),
    }
    files["manifest"] = write_manifest(out, spec, "convergence", files)
    return files


def _seed_first(frames: list[pd.DataFrame]) -> pd.DataFrame:
    frame = pd.concat(frames, ignore_index=True)
    return frame[["seed"] + [c for c in frame.columns if c != "seed"]]


# endregion

# region Manifest


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def inputs_hash(spec: ExperimentSpec) -> str:
    """Returns the SHA-256 of the resolved configuration and the experiment."""
    payload = json.dumps(
        {"config": spec.config.resolved, "experiment": spec.describe()},
        sort_keys=True,
        separators=(",", ":"),
    )
    return _sha256(payload.encode("utf-8"))


def package_version() -> str:
    """Returns the installed package version ('unknown' if not installed)."""
    try:
        return metadata.version(__package__ or "hap_network_optimizer")
    except metadata.PackageNotFoundError:
        return "unknown"


def write_manifest(
    out_dir: Union[str, Path],
    spec: ExperimentSpec,
    command: str,
    files: Optional[dict[str, Path]] = None,
) -> Path:
    """Writes manifest.json: command, package version, UTC creation time,
    resolved configuration, experiment, input hash and output hashes."""
    files = files or {}
    manifest = {
        "command": command,
        "version": package_version(),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": spec.config.resolved,
        "experiment": spec.describe(),
        "inputs_sha256": inputs_hash(spec),
        "outputs": {
            name: {"file": path.name, "sha256": _sha256(path.read_bytes())}
            for name, path in files.items()
        },
    }
    path = Path(out_dir) / MANIFEST_FILE
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return path


# endregion
