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

# pylint: disable=missing-function-docstring
# pylint: disable=import-error

"""
Unit tests for the FH and BH association solvers.

The optimality checks compare the solvers with exhaustive enumeration on
tiny instances (at most 4 users, 2 TBSs, 1 HAP and 2 RBs per station).
"""

import itertools

import numpy as np
import pytest
from hap_network_optimizer.association import (
    build_assignment_problem,
    default_threshold,
    random_association,
    solve_bh,
    solve_fh_fp,
    solve_fh_near_optimal,
    split_center_edge,
    uniform_sum_rate,
)
from hap_network_optimizer.models import (
    HapNetInfeasibleError,
    Position3D,
    Scenario,
    TierTag,
    UserGroup,
    average_realization,
    check_feasibility,
)
from hap_network_optimizer.models.rates import bh_rate_matrix
from instances import (
    brute_force_assignment,
    exhaustive_uniform_sum_rate,
    random_instance,
    random_realization,
    tiny_scenario,
    unit_parameters,
)

INSTANCES = 200


def link_value(realization, link):
    return float(
        np.log2(1.0 + realization.fh_gain(link.tier, link.station, link.user, link.rb))
    )


# region Center/edge split


def test_split_center_edge():
    scenario = tiny_scenario(4, 2, 1)  # users at 100, 350, 600, 850 m

    split = split_center_edge(scenario, 500.0)

    assert split.labels == (
        UserGroup.CENTER,
        UserGroup.CENTER,
        UserGroup.EDGE,
        UserGroup.EDGE,
    )
    assert split.center_mask.tolist() == [True, True, False, False]
    assert split.threshold == 500.0


def test_split_center_edge_without_tbs():
    scenario = tiny_scenario(3, 0, 1)

    assert split_center_edge(scenario, 1e6).labels == (UserGroup.EDGE,) * 3


def test_split_center_edge_negative_threshold():
    with pytest.raises(ValueError) as exc_info:
        split_center_edge(tiny_scenario(2, 1, 1), -1.0)
    assert str(exc_info.value) == "The center/edge threshold must be non-negative"


def test_default_threshold():
    scenario = tiny_scenario(2, 4, 1)

    assert default_threshold(scenario) == pytest.approx(
        0.8 * scenario.tbs_cell_radius()
    )


# endregion

# region Assignment problem


def test_assignment_problem_eligibility():
    scenario = tiny_scenario(4, 2, 1)
    realization = random_realization(scenario, np.random.default_rng(0))
    center = split_center_edge(scenario, 500.0).center_mask

    problem = build_assignment_problem(scenario, realization, center_mask=center)

    ground = problem.slot_tier == 0
    assert problem.shape == (4, 8)
    assert np.all(problem.eligible[:2, ground]) and not problem.eligible[:2, ~ground].any()
    assert np.all(problem.eligible[2:, ~ground]) and not problem.eligible[2:, ground].any()
    assert np.all(problem.values[~problem.eligible] == 0.0)


def test_assignment_problem_average_gains_trim_rbs():
    scenario = tiny_scenario(1, 2, 1)

    problem = build_assignment_problem(scenario, average_realization(scenario))

    # One eligible user: one RB per station
    assert problem.shape == (1, 4)


def test_assignment_problem_hap_coverage():
    scenario = Scenario(
        users=[Position3D(0.0, 0.0), Position3D(100e3, 0.0)],
        tbs=[Position3D(0.0, 0.0, 25.0)],
        haps=[Position3D(0.0, 0.0, 18e3)],
        gateways=[Position3D(0.0, 0.0)],
        parameters=unit_parameters(),
    )
    realization = random_realization(scenario, np.random.default_rng(1))

    problem = build_assignment_problem(scenario, realization)

    air = problem.slot_tier == 1
    assert problem.eligible[0, air].all()
    assert not problem.eligible[1, air].any()


# endregion

# region FH association


@pytest.mark.parametrize("seed", range(INSTANCES))
def test_fp_matches_enumeration(seed):
    scenario, realization = random_instance(seed)
    threshold = None if seed % 2 else 500.0
    center = (
        None if threshold is None else split_center_edge(scenario, threshold).center_mask
    )
    problem = build_assignment_problem(scenario, realization, center_mask=center)

    assoc = solve_fh_fp(scenario, realization, threshold)

    value = sum(link_value(realization, link) for link in assoc.links())
    assert value == pytest.approx(brute_force_assignment(problem.values), rel=1e-9)
    if center is not None:
        for link in assoc.links():
            assert (link.tier == TierTag.GROUND) == bool(center[link.user])


@pytest.mark.parametrize("seed", range(INSTANCES))
def test_near_optimal_close_to_enumeration(seed):
    scenario, realization = random_instance(seed)

    assoc = solve_fh_near_optimal(scenario, realization)

    optimum = exhaustive_uniform_sum_rate(scenario, realization)
    assert uniform_sum_rate(scenario, realization, assoc) >= 0.95 * optimum - 1e-12


@pytest.mark.parametrize("seed", range(20))
def test_near_optimal_single_tbs_is_fp(seed):
    scenario, realization = random_instance(seed, max_tbs=1)

    assert solve_fh_near_optimal(scenario, realization) == solve_fh_fp(
        scenario, realization
    )


def test_near_optimal_trace():
    scenario, realization = random_instance(7)
    trace: list[float] = []

    assoc = solve_fh_near_optimal(scenario, realization, max_rounds=4, trace=trace)

    assert 1 <= len(trace) <= 4
    assert uniform_sum_rate(scenario, realization, assoc) >= max(trace) * (1 - 1e-9)


def test_near_optimal_is_feasible():
    scenario, realization = random_instance(11)

    assoc = solve_fh_near_optimal(scenario, realization)

    users = [link.user for link in assoc.links()]
    slots = [(link.tier, link.station, link.rb) for link in assoc.links()]
    assert len(users) == len(set(users))
    assert len(slots) == len(set(slots))


def test_near_optimal_invalid_rounds():
    scenario, realization = random_instance(0)

    with pytest.raises(ValueError) as exc_info:
        solve_fh_near_optimal(scenario, realization, max_rounds=0)
    assert str(exc_info.value) == "At least one round is required"


# endregion

# region BH association


def bh_instance(haps: int, seed: int):
    scenario = tiny_scenario(
        1, 1, haps, gateways=2, satellite_capacity=3, gateway_capacity=(3, 4)
    )
    return scenario, random_realization(scenario, np.random.default_rng(seed))


@pytest.mark.parametrize("haps", [1, 3, 8, 9])
def test_solve_bh_matches_enumeration(haps):
    scenario, realization = bh_instance(haps, haps)
    rates = bh_rate_matrix(scenario, realization)
    capacities = scenario.station_capacities

    bh = solve_bh(scenario, realization)

    assert sorted(bh) == list(range(haps))
    counts = np.bincount(list(bh.values()), minlength=capacities.size)
    assert np.all(counts <= capacities)

    best = max(
        sum(rates[w, l] for l, w in enumerate(combo))
        for combo in itertools.product(range(capacities.size), repeat=haps)
        if np.all(np.bincount(combo, minlength=capacities.size) <= capacities)
    )
    assert sum(rates[w, l] for l, w in bh.items()) == pytest.approx(best)


def test_solve_bh_without_haps():
    scenario, realization = bh_instance(0, 0)

    assert solve_bh(scenario, realization) == {}


def test_solve_bh_not_enough_capacity():
    scenario = tiny_scenario(1, 1, 3)  # one satellite and one gateway slot
    realization = random_realization(scenario, np.random.default_rng(0))

    with pytest.raises(HapNetInfeasibleError) as exc_info:
        solve_bh(scenario, realization)
    assert str(exc_info.value) == "The BH stations can host 2 HAPs, 3 deployed"

    with pytest.raises(HapNetInfeasibleError):
        random_association(scenario, np.random.default_rng(0))


# endregion

# region Random baseline


@pytest.mark.parametrize("seed", range(30))
def test_random_association_is_feasible(seed):
    scenario, realization = random_instance(seed)

    assoc = random_association(scenario, np.random.default_rng(seed))

    assert not check_feasibility(scenario, assoc, {}, realization)
    # Every tiny instance has more slots than users
    assert assoc.served_users() == list(range(scenario.user_count))


def test_random_association_reproducible():
    scenario, _ = random_instance(3)

    first = random_association(scenario, np.random.default_rng(42))
    second = random_association(scenario, np.random.default_rng(42))

    assert first == second


def test_random_association_respects_coverage():
    scenario = Scenario(
        users=[Position3D(0.0, 0.0), Position3D(100e3, 0.0)],
        tbs=[],
        haps=[Position3D(0.0, 0.0, 18e3)],
        gateways=[Position3D(0.0, 0.0)],
        parameters=unit_parameters(rb_count=4),
    )

    for seed in range(20):
        assoc = random_association(scenario, np.random.default_rng(seed))
        link = assoc.link_of(1)
        assert link is not None and link.tier == TierTag.SPACE


# endregion
