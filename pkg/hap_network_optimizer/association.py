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
This module contains the short-term association solvers.

FH association is a linear assignment between users (rows) and
(station, RB) slots (columns) valued at uniform power P_S / N^S:

- solve_fh_fp neglects the inter-cell interference by letting the TBSs serve
  only the users close to them (frequency partitioning) and solves a single
  assignment.
- solve_fh_near_optimal keeps every user eligible everywhere and re-solves the
  assignment with the interference of the previous round (worst case at round
  0) until the assignment repeats, then polishes the best iterate with single
  user relocations.

BH association maps every HAP to the satellite or a gateway, maximizing the
total BH rate under the station capacities.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .models.channel import ChannelRealization, hap_coverage
from .models.enums import TierTag, UserGroup
from .models.exceptions import HapNetInfeasibleError, HapNetSolverError
from .models.geometry import horizontal_distances
from .models.rates import (
    TIER_ORDER,
    Association,
    FhLink,
    bh_rate_matrix,
    link_rates,
    uniform_power,
)
from .models.scenario import Scenario

_LOGGER = logging.getLogger(__package__)

DEFAULT_MAX_ROUNDS = 10
EXHAUSTIVE_BH_LIMIT = 8  # HAPs
EXHAUSTIVE_BH_COMBINATIONS = 1_000_000
CENTER_THRESHOLD_FACTOR = 0.8  # of the TBS cell radius
POLISH_TOP_K = 8
POLISH_FULL_SCAN = 64  # candidate slots
POLISH_SWAP_LIMIT = 12  # served users
POLISH_MAX_PASSES = 20
IMPROVEMENT = 1e-9  # relative

# region Hungarian


@dataclass(frozen=True)
class AssignmentResult:
    """A one-to-one matching of a value matrix.

    :param row_to_col: the matched column of every matched row.
    :param value: the total value of the matching.
    """

    row_to_col: dict[int, int]
    value: float


def _min_cost_assignment(cost: np.ndarray) -> np.ndarray:
    """Shortest augmenting path assignment of a (n, m) cost matrix, n <= m.

    Returns the column of every row. Among equal alternatives the lowest
    column index wins.
    """
    n, m = cost.shape
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=int)  # p[j]: row (1-based) matched to column j
    way = np.zeros(m + 1, dtype=int)

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            reduced = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0

            candidates = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]

            matched = np.flatnonzero(used)
            u[p[matched]] += delta
            v[matched] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if p[j0] == 0:
                break

        # Augment along the alternating path
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    columns = np.full(n, -1, dtype=int)
    for j in range(1, m + 1):
        if p[j]:
            columns[p[j] - 1] = j - 1
    return columns


def hungarian(values) -> AssignmentResult:
    """Finds the one-to-one matching maximizing the total value.

    Rectangular matrices are allowed: with more rows than columns some rows
    stay unmatched (and vice versa).

    :param values: a 2D array-like of finite values.

    :raises ValueError: if the matrix is not 2-dimensional.
    :raises HapNetSolverError: if the matrix contains NaN or infinite values.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError("The value matrix must be 2-dimensional")
    if not np.all(np.isfinite(values)):
        raise HapNetSolverError("The value matrix contains NaN or infinite values")

    rows, cols = values.shape
    if rows == 0 or cols == 0:
        return AssignmentResult({}, 0.0)

    if rows > cols:
        row_of_col = _min_cost_assignment(-values.T)
        row_to_col = {int(r): c for c, r in enumerate(row_of_col)}
    else:
        col_of_row = _min_cost_assignment(-values)
        row_to_col = {r: int(c) for r, c in enumerate(col_of_row)}

    row_to_col = dict(sorted(row_to_col.items()))
    value = float(sum(values[r, c] for r, c in row_to_col.items()))
    return AssignmentResult(row_to_col, value)


# endregion

# region Center/edge split


@dataclass(frozen=True)
class CenterEdgeSplit:
    """The frequency-partitioning user groups.

    :param labels: the UserGroup of every user.
    :param threshold: the radius (m) around the TBSs defining the center users.
    """

    labels: tuple[UserGroup, ...]
    threshold: float

    @property
    def center_mask(self) -> np.ndarray:
        """Returns the (U,) boolean mask of the center users."""
        return np.array([label == UserGroup.CENTER for label in self.labels], dtype=bool)


def default_threshold(scenario: Scenario) -> float:
    """Returns the default center/edge radius, 0.8 times the TBS cell radius."""
    return CENTER_THRESHOLD_FACTOR * scenario.tbs_cell_radius()


def split_center_edge(scenario: Scenario, threshold: float) -> CenterEdgeSplit:
    """Labels as center users those within `threshold` (horizontal) of a TBS.

    :raises ValueError: if the threshold is negative.
    """
    if threshold < 0:
        raise ValueError("The center/edge threshold must be non-negative")

    tbs = scenario.station_coords(TierTag.GROUND)
    if tbs.shape[0] == 0 or scenario.user_count == 0:
        center = np.zeros(scenario.user_count, dtype=bool)
    else:
        center = (
            horizontal_distances(tbs, scenario.user_coords).min(axis=0) <= threshold
        )
    labels = tuple(UserGroup.CENTER if flag else UserGroup.EDGE for flag in center)
    _LOGGER.debug(
        "%d center users, %d edge users (threshold %g m)",
        int(center.sum()),
        len(labels) - int(center.sum()),
        threshold,
    )
    return CenterEdgeSplit(labels, float(threshold))


# endregion

# region Assignment problem


class AssignmentProblem:
    """The user x slot value matrix of the FH association.

    Column k is the slot (tier, station, RB) given by slot_tier[k],
    slot_station[k] and slot_rb[k]; values[u, k] is the rate user u would
    get on slot k at uniform power, 0 where the user is not eligible.

    :property values: (U, C) values (bit/s).
    :property eligible: (U, C) eligibility mask.
    """

    def __init__(
        self,
        values: np.ndarray,
        eligible: np.ndarray,
        slot_tier: np.ndarray,
        slot_station: np.ndarray,
        slot_rb: np.ndarray,
    ):
        self._values = np.where(eligible, values, 0.0)
        self._eligible = eligible
        self.slot_tier = slot_tier
        self.slot_station = slot_station
        self.slot_rb = slot_rb

    @property
    def values(self) -> np.ndarray:
        """Returns the value matrix."""
        return self._values

    @property
    def eligible(self) -> np.ndarray:
        """Returns the eligibility mask."""
        return self._eligible

    @property
    def shape(self) -> tuple[int, int]:
        """Returns (users, slots)."""
        return self._values.shape  # type: ignore[return-value]

    def slot_link(self, user: int, column: int) -> FhLink:
        """Returns the FhLink of a user on a slot."""
        return FhLink(
            TIER_ORDER[self.slot_tier[column]],
            int(self.slot_station[column]),
            int(user),
            int(self.slot_rb[column]),
        )

    def solve(self) -> dict[int, int]:
        """Solves the assignment, returning the eligible user -> slot matches."""
        result = hungarian(self._values)
        return {
            user: column
            for user, column in result.row_to_col.items()
            if self._eligible[user, column]
        }

    def to_association(self, assignment: dict[int, int]) -> Association:
        """Converts user -> slot matches to an Association (FH only)."""
        return Association(
            self.slot_link(user, column) for user, column in assignment.items()
        )


def _station_eligibility(
    scenario: Scenario, center_mask: Optional[np.ndarray]
) -> dict[TierTag, np.ndarray]:
    """Returns, per tier, the (S, U) mask of the users each station may serve."""
    users = scenario.user_count
    everyone = np.ones(users, dtype=bool)
    center = everyone if center_mask is None else center_mask
    edge = everyone if center_mask is None else ~center_mask
    return {
        TierTag.GROUND: np.tile(center, (scenario.station_count(TierTag.GROUND), 1)),
        TierTag.AIR: hap_coverage(scenario) & edge[None, :],
        TierTag.SPACE: np.tile(edge, (scenario.station_count(TierTag.SPACE), 1)),
    }


def ground_interference(
    scenario: Scenario,
    realization: ChannelRealization,
    occupancy: np.ndarray,
) -> np.ndarray:
    """Returns the (M, U, N^M) interference each ground slot would see.

    :param occupancy: (M, N^M) 0/1 array of the busy TBS RBs, transmitting
        at uniform power.
    """
    gains = realization.fh[TierTag.GROUND]
    powers = scenario.tier(TierTag.GROUND).uniform_power * np.asarray(
        occupancy, dtype=float
    )
    total = np.einsum("mn,mun->un", powers, gains)
    return np.maximum(total[None, :, :] - powers[:, None, :] * gains, 0.0)


def build_assignment_problem(
    scenario: Scenario,
    realization: ChannelRealization,
    *,
    center_mask: Optional[np.ndarray] = None,
    occupancy: Optional[np.ndarray] = None,
) -> AssignmentProblem:
    """Builds the FH value matrix at uniform power.

    :param center_mask: (U,) mask of the center users. Center users may only
        use TBS slots, the others only HAP and satellite slots. None lets
        every user use every slot.
    :param occupancy: (M, N^M) busy TBS RBs the ground slots are interfered
        by. None means no inter-cell interference.

    With average-statistics gains all the RBs of a station are identical, so
    each station only offers as many RBs as it has eligible users.
    """
    eligibility = _station_eligibility(scenario, center_mask)
    blocks_value, blocks_eligible = [], []
    tiers, stations, rbs = [], [], []

    for code, tag in enumerate(TIER_ORDER):
        settings = scenario.tier(tag)
        gains = realization.fh[tag]
        noise = scenario.noise_psd * settings.rb_bandwidth
        interference: np.ndarray | float = 0.0
        if tag == TierTag.GROUND and occupancy is not None:
            interference = ground_interference(scenario, realization, occupancy)
        rates = settings.rb_bandwidth * np.log2(
            1.0 + settings.uniform_power * gains / (interference + noise)
        )  # (S, U, N)

        for s in range(gains.shape[0]):
            mask = eligibility[tag][s]
            count = settings.rb_count
            if realization.is_average:
                count = min(count, int(mask.sum()))
            if count == 0:
                continue
            blocks_value.append(rates[s, :, :count])
            blocks_eligible.append(np.repeat(mask[:, None], count, axis=1))
            tiers.append(np.full(count, code))
            stations.append(np.full(count, s))
            rbs.append(np.arange(count))

    users = scenario.user_count
    if not blocks_value:
        empty = np.zeros((users, 0))
        none = np.zeros(0, dtype=int)
        return AssignmentProblem(empty, empty.astype(bool), none, none, none)
    return AssignmentProblem(
        np.hstack(blocks_value),
        np.hstack(blocks_eligible),
        np.concatenate(tiers),
        np.concatenate(stations),
        np.concatenate(rbs),
    )


# endregion

# region FH association


def solve_fh_fp(
    scenario: Scenario,
    realization: ChannelRealization,
    threshold: Optional[float] = None,
) -> Association:
    """Low-complexity FH association with frequency partitioning.

    :param threshold: center/edge radius (m). None disables the split: every
        user is eligible for every slot (HAP slots still require coverage).
    """
    center_mask = (
        None
        if threshold is None
        else split_center_edge(scenario, threshold).center_mask
    )
    problem = build_assignment_problem(
        scenario, realization, center_mask=center_mask
    )
    assoc = problem.to_association(problem.solve())
    _LOGGER.debug("FP association: %s", assoc)
    return assoc


class _UniformRates:
    """True uniform-power sum-rate of user -> slot states (interference included)."""

    def __init__(
        self,
        scenario: Scenario,
        realization: ChannelRealization,
        problem: AssignmentProblem,
    ):
        self.problem = problem
        self.ground_code = TIER_ORDER.index(TierTag.GROUND)
        ground = scenario.tier(TierTag.GROUND)
        self.gains = realization.fh[TierTag.GROUND]
        self.power = ground.uniform_power
        self.bandwidth = ground.rb_bandwidth
        self.noise = scenario.noise_psd * ground.rb_bandwidth
        # Isolated values are computed on the full slot list: map the columns.
        self.isolated = self._align(scenario, realization)

    def _align(self, scenario, realization) -> np.ndarray:
        full = build_assignment_problem(scenario, realization)
        index = {
            (t, s, n): k
            for k, (t, s, n) in enumerate(
                zip(full.slot_tier, full.slot_station, full.slot_rb)
            )
        }
        columns = [
            index[(t, s, n)]
            for t, s, n in zip(
                self.problem.slot_tier, self.problem.slot_station, self.problem.slot_rb
            )
        ]
        return full.values[:, columns] if columns else full.values[:, :0]

    def __call__(self, state: np.ndarray) -> float:
        """Sum-rate of a state (slot column of every user, -1 if unserved)."""
        served = np.flatnonzero(state >= 0)
        if served.size == 0:
            return 0.0
        columns = state[served]
        is_ground = self.problem.slot_tier[columns] == self.ground_code
        total = float(self.isolated[served[~is_ground], columns[~is_ground]].sum())
        if is_ground.any():
            users = served[is_ground]
            m = self.problem.slot_station[columns[is_ground]]
            n = self.problem.slot_rb[columns[is_ground]]
            busy = np.zeros((self.gains.shape[0], self.gains.shape[2]))
            busy[m, n] = self.power
            cross = self.gains[:, users, n] * busy[:, n]
            own = self.gains[m, users, n] * self.power
            cross[m, np.arange(users.size)] = 0.0
            total += float(
                np.sum(
                    self.bandwidth
                    * np.log2(1.0 + own / (cross.sum(axis=0) + self.noise))
                )
            )
        return total


def _state(assignment: dict[int, int], users: int) -> np.ndarray:
    state = np.full(users, -1, dtype=int)
    for user, column in assignment.items():
        state[user] = column
    return state


def _polish(
    state: np.ndarray, problem: AssignmentProblem, objective: _UniformRates
) -> np.ndarray:
    """Single-user relocations (and pair swaps on small instances) accepted
    only when they strictly increase the true sum-rate."""
    state = state.copy()
    best = objective(state)
    users = state.size
    eligible = problem.eligible
    ground_code = objective.ground_code

    for sweep_index in range(POLISH_MAX_PASSES):
        improved = False
        for user in range(users):
            taken = np.zeros(problem.shape[1], dtype=bool)
            taken[state[state >= 0]] = True
            free = np.flatnonzero(eligible[user] & ~taken)
            if free.size > POLISH_FULL_SCAN:
                order = free[np.argsort(-objective.isolated[user, free], kind="stable")]
                picks = set(order[:POLISH_TOP_K].tolist())
                current = state[user]
                if current >= 0 and problem.slot_tier[current] == ground_code:
                    station = problem.slot_station[current]
                    same = free[
                        (problem.slot_tier[free] == ground_code)
                        & (problem.slot_station[free] == station)
                    ]
                    picks.update(same.tolist())
                non_ground = order[problem.slot_tier[order] != ground_code]
                if non_ground.size:
                    picks.add(int(non_ground[0]))
                free = np.array(sorted(picks), dtype=int)

            choice, value = state[user], best
            for column in (-1, *free.tolist()):
                if column == state[user]:
                    continue
                trial = state.copy()
                trial[user] = column
                trial_value = objective(trial)
                if trial_value > value + IMPROVEMENT * max(abs(value), 1.0):
                    choice, value = column, trial_value
            if choice != state[user]:
                state[user] = choice
                best = value
                improved = True

        served = np.flatnonzero(state >= 0)
        if served.size <= POLISH_SWAP_LIMIT:
            for i, first in enumerate(served):
                for second in served[i + 1 :]:
                    a, b = state[first], state[second]
                    if not (eligible[first, b] and eligible[second, a]):
                        continue
                    trial = state.copy()
                    trial[first], trial[second] = b, a
                    trial_value = objective(trial)
                    if trial_value > best + IMPROVEMENT * max(abs(best), 1.0):
                        state, best, improved = trial, trial_value, True

        _LOGGER.debug("Polish pass %d: sum-rate %g", sweep_index, best)
        if not improved:
            break
    return state


def solve_fh_near_optimal(
    scenario: Scenario,
    realization: ChannelRealization,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    *,
    trace: Optional[list[float]] = None,
) -> Association:
    """Interference-aware FH association.

    Round 0 assumes every other TBS busy on every RB; each following round
    re-solves the assignment with the interference of the previous round's
    occupancy. The loop stops when an assignment repeats or after
    `max_rounds` rounds; the best iterate (true uniform-power sum-rate) is
    then polished.

    :param trace: if given, the per-round sum-rates are appended to it.

    :raises ValueError: if max_rounds is lower than 1.
    """
    if max_rounds < 1:
        raise ValueError("At least one round is required")

    ground = scenario.tier(TierTag.GROUND)
    occupancy = np.ones((scenario.station_count(TierTag.GROUND), ground.rb_count))
    seen: set[tuple[int, ...]] = set()
    best_state: Optional[np.ndarray] = None
    best_value = -math.inf
    problem: Optional[AssignmentProblem] = None
    objective: Optional[_UniformRates] = None

    for round_index in range(max_rounds):
        problem = build_assignment_problem(
            scenario, realization, occupancy=occupancy
        )
        if objective is None:
            objective = _UniformRates(scenario, realization, problem)
        state = _state(problem.solve(), scenario.user_count)
        value = objective(state)
        if trace is not None:
            trace.append(value)
        _LOGGER.debug("Near-optimal round %d: sum-rate %g", round_index, value)
        if value > best_value:
            best_state, best_value = state, value

        key = tuple(state.tolist())
        if key in seen:
            break
        seen.add(key)
        occupancy = np.zeros_like(occupancy)
        ground_columns = state[state >= 0]
        ground_columns = ground_columns[
            problem.slot_tier[ground_columns] == objective.ground_code
        ]
        occupancy[
            problem.slot_station[ground_columns], problem.slot_rb[ground_columns]
        ] = 1.0

    assert problem is not None and objective is not None and best_state is not None
    if scenario.tbs_count > 1:
        best_state = _polish(best_state, problem, objective)
    assignment = {
        int(user): int(column)
        for user, column in enumerate(best_state)
        if column >= 0
    }
    assoc = problem.to_association(assignment)
    _LOGGER.debug("Near-optimal association: %s", assoc)
    return assoc


def uniform_sum_rate(
    scenario: Scenario, realization: ChannelRealization, assoc: Association
) -> float:
    """Returns the true sum-rate of an FH association at uniform power."""
    links = assoc.links()
    return float(
        link_rates(scenario, links, uniform_power(scenario, assoc), realization).sum()
    )


# endregion

# region BH association


def solve_bh(scenario: Scenario, realization: ChannelRealization) -> dict[int, int]:
    """Assigns every HAP to one BH station maximizing the total BH rate.

    Station 0 is the satellite, stations 1..W the gateways; station w
    backhauls at most L̄_w HAPs. Small instances are solved by enumeration,
    larger ones by assignment on a matrix where station w offers
    min(L̄_w, L) identical columns.

    :raises HapNetInfeasibleError: if the capacities cannot host every HAP.
    """
    haps = scenario.hap_count
    if haps == 0:
        return {}
    capacities = np.minimum(scenario.station_capacities, haps)
    if capacities.sum() < haps:
        raise HapNetInfeasibleError(
            f"The BH stations can host {int(capacities.sum())} HAPs, {haps} deployed"
        )
    rates = bh_rate_matrix(scenario, realization)  # (W+1, L)
    stations = rates.shape[0]

    if haps <= EXHAUSTIVE_BH_LIMIT and stations**haps <= EXHAUSTIVE_BH_COMBINATIONS:
        combos = np.indices((stations,) * haps).reshape(haps, -1).T
        totals = rates[combos, np.arange(haps)].sum(axis=1)
        for w in range(stations):
            overloaded = (combos == w).sum(axis=1) > capacities[w]
            totals[overloaded] = -np.inf
        best = combos[int(np.argmax(totals))]
        bh = {l: int(w) for l, w in enumerate(best)}
    else:
        owners = np.repeat(np.arange(stations), capacities)
        result = hungarian(rates[owners].T)
        bh = {l: int(owners[column]) for l, column in result.row_to_col.items()}

    _LOGGER.debug("BH association: %s", bh)
    return bh


# endregion

# region Random baseline


def random_association(scenario: Scenario, rng: np.random.Generator) -> Association:
    """Random feasible FH and BH association.

    Users, in random order, take a uniformly chosen free slot among those
    they are eligible for (HAP slots need coverage); HAPs, in random order,
    take a uniformly chosen station with residual capacity.

    :raises HapNetInfeasibleError: if the capacities cannot host every HAP.
    """
    eligibility = _station_eligibility(scenario, None)
    slots = [
        (tag, s, n)
        for tag in TIER_ORDER
        for s in range(scenario.station_count(tag))
        for n in range(scenario.tier(tag).rb_count)
    ]
    allowed = np.array(
        [eligibility[tag][s] for tag, s, _ in slots], dtype=bool
    ).reshape(len(slots), scenario.user_count)
    taken = np.zeros(len(slots), dtype=bool)
    links = []
    for user in rng.permutation(scenario.user_count):
        free = np.flatnonzero(allowed[:, user] & ~taken)
        if free.size == 0:
            continue
        k = int(free[int(rng.integers(free.size))])
        taken[k] = True
        tag, s, n = slots[k]
        links.append(FhLink(tag, s, int(user), n))

    residual = scenario.station_capacities.copy()
    if residual.sum() < scenario.hap_count:
        raise HapNetInfeasibleError(
            f"The BH stations can host {int(residual.sum())} HAPs, "
            f"{scenario.hap_count} deployed"
        )
    bh = {}
    for hap in rng.permutation(scenario.hap_count):
        open_stations = np.flatnonzero(residual > 0)
        w = int(open_stations[int(rng.integers(open_stations.size))])
        residual[w] -= 1
        bh[int(hap)] = w
    return Association(links, bh)


# endregion
