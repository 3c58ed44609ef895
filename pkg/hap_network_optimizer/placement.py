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
This module contains the long-term stage: HAP placement by recursive
shrink-and-realign search.

At every iteration each HAP evaluates the candidates of a ring around its
current position (the current position itself is candidate 0), adopting the
best one only if it strictly increases the number of HAP-served users under
average channel statistics. The ring radius halves at every iteration.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import pandas as pd

from .association import (
    default_threshold,
    solve_bh,
    solve_fh_fp,
    solve_fh_near_optimal,
)
from .models.channel import ChannelRealization, average_realization
from .models.enums import SolverPath, TierTag
from .models.geometry import Position3D, Rectangle
from .models.rates import POWER_TOLERANCE
from .models.scenario import Scenario
from .power import sca_msu

_LOGGER = logging.getLogger(__package__)

EXHAUSTIVE_HAP_LIMIT = 3


@dataclass(frozen=True)
class SrConfig:
    """Settings of the shrink-and-realign search.

    :param candidates: ring points T per HAP and iteration (0: center only).
    :param initial_radius: r_init (m).
    :param max_iterations: I_max.
    :param min_radius: the search stops before an iteration whose radius is
        below this value (0 disables the check).
    :param exhaustive: evaluate every candidate combination (L <= 3) instead
        of the HAP-by-HAP sweep.
    :param optimize_power: count only the HAP users keeping a positive power
        after the MSU allocation, instead of assuming uniform power.
    :param path: the association solver of the objective.
    :param center_threshold: center/edge radius of the FP path (m), None for
        0.8 times the TBS cell radius.
    """

    candidates: int = 8
    initial_radius: float = 45.0e3
    max_iterations: int = 15
    min_radius: float = 0.0
    exhaustive: bool = False
    optimize_power: bool = False
    path: SolverPath = SolverPath.FREQUENCY_PARTITIONING
    center_threshold: Optional[float] = None

    def __post_init__(self):
        if self.candidates < 0:
            raise ValueError("The number of candidates must be non-negative")
        if self.initial_radius <= 0:
            raise ValueError("The initial radius must be positive")
        if self.max_iterations < 1:
            raise ValueError("At least one iteration is required")
        if self.min_radius < 0:
            raise ValueError("The minimum radius must be non-negative")

    def radius(self, iteration: int) -> float:
        """Returns r(i) = r_init / 2^(i-1), iterations counted from 1."""
        return self.initial_radius / 2 ** (iteration - 1)


@dataclass
class SrTrace:
    """The history of a shrink-and-realign search.

    :param iterations: one record per iteration (iteration, radius, best
        candidate per HAP, objective of the iteration, cumulative best).
    :param evaluations: one record per candidate evaluation.
    :param initial_objective: the objective of the starting positions.
    :param stop_reason: "no-improvement", "max-iterations" or "min-radius".
    """

    iterations: list[dict] = field(default_factory=list)
    evaluations: list[dict] = field(default_factory=list)
    initial_objective: int = 0
    stop_reason: str = "max-iterations"

    @property
    def objectives(self) -> list[int]:
        """Returns the cumulative best objective, initial value first."""
        return [self.initial_objective] + [row["best"] for row in self.iterations]

    @property
    def radii(self) -> list[float]:
        """Returns the radius of every iteration."""
        return [row["radius"] for row in self.iterations]

    @property
    def converged(self) -> bool:
        """True if the search stopped because nothing improved."""
        return self.stop_reason == "no-improvement"

    def to_frame(self) -> pd.DataFrame:
        """Returns the candidate evaluations (iteration, hap, candidate, x, y,
        objective)."""
        return pd.DataFrame(
            self.evaluations,
            columns=["iteration", "hap", "candidate", "x", "y", "objective"],
        )

    def iterations_frame(self) -> pd.DataFrame:
        """Returns the per-iteration summary."""
        return pd.DataFrame(
            [
                {
                    "iteration": row["iteration"],
                    "radius": row["radius"],
                    "chosen": " ".join(str(k) for k in row["chosen"]),
                    "objective": row["objective"],
                    "best": row["best"],
                }
                for row in self.iterations
            ],
            columns=["iteration", "radius", "chosen", "objective", "best"],
        )


def candidate_ring(
    center: Position3D,
    r: float,
    t: int,
    area: Optional[Rectangle] = None,
) -> list[Position3D]:
    """Returns the center followed by t points equally spaced on the circle of
    radius r (bearing 2 pi k / t from the +x axis), same altitude.

    :param area: if given, the points are clipped to it.

    :raises ValueError: if r is not positive or t is negative.
    """
    if r <= 0:
        raise ValueError("The ring radius must be positive")
    if t < 0:
        raise ValueError("The number of candidates must be non-negative")

    points = [center]
    for k in range(t):
        angle = 2.0 * math.pi * k / t
        x = center.x + r * math.cos(angle)
        y = center.y + r * math.sin(angle)
        if area is not None:
            x, y = area.clip(x, y)
        points.append(center.moved_to(x, y))
    return points


def coverage_objective(
    scenario: Scenario,
    realization: Optional[ChannelRealization] = None,
    cfg: Optional[SrConfig] = None,
) -> int:
    """Returns the number of users served by HAPs under average statistics.

    :param realization: average-statistics gains of the scenario (computed if
        not given).
    """
    cfg = cfg if cfg is not None else SrConfig()
    if scenario.hap_count == 0 or scenario.user_count == 0:
        return 0
    if realization is None:
        realization = average_realization(scenario)

    if cfg.path == SolverPath.NEAR_OPTIMAL:
        assoc = solve_fh_near_optimal(scenario, realization)
    else:
        threshold = (
            cfg.center_threshold
            if cfg.center_threshold is not None
            else default_threshold(scenario)
        )
        assoc = solve_fh_fp(scenario, realization, threshold)

    hap_links = assoc.links(TierTag.AIR)
    if not cfg.optimize_power:
        return len(hap_links)

    assoc = assoc.with_bh(solve_bh(scenario, realization))
    power, _ = sca_msu(scenario, realization, assoc)
    return sum(1 for link in hap_links if power.power(link) > POWER_TOLERANCE)


def _evaluate(scenario: Scenario, positions: list[Position3D], cfg: SrConfig) -> int:
    return coverage_objective(scenario.with_haps(positions), None, cfg)


def _displacement(a: Position3D, b: Position3D) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def _sweep_iteration(scenario, positions, best, radius, iteration, cfg, trace):
    """HAP-by-HAP sweep; returns (positions, objective, chosen candidates)."""
    area = scenario.area()
    chosen = []
    for hap in range(len(positions)):
        candidates = candidate_ring(positions[hap], radius, cfg.candidates, area)
        ranked = []
        for index, candidate in enumerate(candidates):
            if index == 0:
                value = best
            else:
                trial = list(positions)
                trial[hap] = candidate
                value = _evaluate(scenario, trial, cfg)
            trace.evaluations.append(
                {
                    "iteration": iteration,
                    "hap": hap,
                    "candidate": index,
                    "x": candidate.x,
                    "y": candidate.y,
                    "objective": value,
                }
            )
            ranked.append(
                (-value, _displacement(candidate, positions[hap]), index, candidate)
            )
        top_value, _, top_index, top_candidate = min(ranked, key=lambda r: r[:3])
        if -top_value > best:
            positions = list(positions)
            positions[hap] = top_candidate
            best = -top_value
            chosen.append(top_index)
        else:
            chosen.append(0)
    return positions, best, chosen


def _exhaustive_iteration(scenario, positions, best, radius, iteration, cfg, trace):
    """Every candidate combination; returns (positions, objective, chosen)."""
    area = scenario.area()
    rings = [candidate_ring(p, radius, cfg.candidates, area) for p in positions]
    ranked = []
    for combo in itertools.product(*(range(len(ring)) for ring in rings)):
        trial = [ring[k] for ring, k in zip(rings, combo)]
        value = best if not any(combo) else _evaluate(scenario, trial, cfg)
        for hap, k in enumerate(combo):
            trace.evaluations.append(
                {
                    "iteration": iteration,
                    "hap": hap,
                    "candidate": k,
                    "x": trial[hap].x,
                    "y": trial[hap].y,
                    "objective": value,
                }
            )
        moved = sum(_displacement(a, b) for a, b in zip(trial, positions))
        ranked.append((-value, moved, combo, trial))
    top_value, _, combo, trial = min(ranked, key=lambda r: r[:3])
    if -top_value > best:
        return trial, -top_value, list(combo)
    return list(positions), best, [0] * len(positions)


def sr_optimize(scenario: Scenario, cfg: Optional[SrConfig] = None):
    """Places the HAPs by recursive shrink-and-realign search.

    :returns: (scenario with the final HAP positions, SrTrace).

    :raises ValueError: if the exhaustive mode is requested for more than
        three HAPs.
    """
    cfg = cfg if cfg is not None else SrConfig()
    if cfg.exhaustive and scenario.hap_count > EXHAUSTIVE_HAP_LIMIT:
        raise ValueError(
            f"The exhaustive mode supports up to {EXHAUSTIVE_HAP_LIMIT} HAPs"
        )

    positions = list(scenario.haps)
    best = _evaluate(scenario, positions, cfg) if positions else 0
    trace = SrTrace(initial_objective=best)
    if not positions or cfg.candidates == 0:
        trace.stop_reason = "no-improvement"
        return scenario, trace

    step = _exhaustive_iteration if cfg.exhaustive else _sweep_iteration
    for iteration in range(1, cfg.max_iterations + 1):
        radius = cfg.radius(iteration)
        if radius < cfg.min_radius:
            trace.stop_reason = "min-radius"
            break
        previous = best
        positions, best, chosen = step(
            scenario, positions, best, radius, iteration, cfg, trace
        )
        trace.iterations.append(
            {
                "iteration": iteration,
                "radius": radius,
                "chosen": chosen,
                "objective": best,
                "best": best,
            }
        )
        _LOGGER.debug(
            "SR iteration %d (r = %g m): %d HAP users", iteration, radius, best
        )
        if best <= previous:
            trace.stop_reason = "no-improvement"
            break

    _LOGGER.info(
        "HAP placement: %d -> %d HAP users in %d iterations (%s)",
        trace.initial_objective,
        best,
        len(trace.iterations),
        trace.stop_reason,
    )
    return scenario.with_haps(positions), trace

