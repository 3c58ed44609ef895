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
# pylint: disable=redefined-outer-name

"""
Unit tests for the HAP placement search.

The fixture puts five users far from the only TBS and the HAP 50 km away
from them, outside its 30 km coverage radius: a single ring step of 45 km
brings all of them under the HAP.
"""

import pytest
from hap_network_optimizer.models import (
    Position3D,
    Scenario,
    SolverPath,
    SubareaLayout,
)
from hap_network_optimizer.placement import (
    SrConfig,
    SrTrace,
    candidate_ring,
    coverage_objective,
    sr_optimize,
)

CLUSTER = 150e3


def make_scenario(haps):
    return Scenario(
        users=[Position3D(CLUSTER + 100.0 * k, CLUSTER) for k in range(5)],
        tbs=[Position3D(30e3, 30e3, 25.0)],
        haps=haps,
        gateways=[Position3D(0.0, 0.0)],
    )


@pytest.fixture
def scenario():
    return make_scenario([Position3D(100e3, CLUSTER, 18e3)])


@pytest.fixture
def quick():
    return SrConfig(max_iterations=4)


# region Candidate ring


def test_candidate_ring():
    center = Position3D(90e3, 90e3, 18e3)

    ring = candidate_ring(center, 1e3, 4)

    assert ring[0] == center
    assert [(p.x, p.y) for p in ring[1:]] == [
        (pytest.approx(91e3), pytest.approx(90e3)),
        (pytest.approx(90e3), pytest.approx(91e3)),
        (pytest.approx(89e3), pytest.approx(90e3)),
        (pytest.approx(90e3), pytest.approx(89e3)),
    ]
    assert all(p.z == 18e3 for p in ring)


def test_candidate_ring_clipped_to_area():
    area = SubareaLayout.default().area

    ring = candidate_ring(Position3D(179e3, 90e3, 18e3), 5e3, 4, area)

    assert ring[1].x == 180e3
    assert all(area.contains(p.x, p.y) for p in ring)


def test_candidate_ring_center_only():
    center = Position3D(0.0, 0.0, 18e3)

    assert candidate_ring(center, 1e3, 0) == [center]


def test_candidate_ring_invalid():
    with pytest.raises(ValueError) as exc_info:
        candidate_ring(Position3D(0.0, 0.0, 18e3), 0.0, 4)
    assert str(exc_info.value) == "The ring radius must be positive"

    with pytest.raises(ValueError):
        candidate_ring(Position3D(0.0, 0.0, 18e3), 1.0, -1)


# endregion

# region Settings


def test_sr_config_radius():
    cfg = SrConfig()

    assert cfg.radius(1) == 45e3
    assert cfg.radius(3) == pytest.approx(11.25e3)


@pytest.mark.parametrize(
    "changes, message",
    [
        ({"candidates": -1}, "The number of candidates must be non-negative"),
        ({"initial_radius": 0.0}, "The initial radius must be positive"),
        ({"max_iterations": 0}, "At least one iteration is required"),
        ({"min_radius": -1.0}, "The minimum radius must be non-negative"),
    ],
)
def test_sr_config_validation(changes, message):
    with pytest.raises(ValueError) as exc_info:
        SrConfig(**changes)
    assert str(exc_info.value) == message


# endregion

# region Objective


def test_coverage_objective(scenario):
    above = make_scenario([Position3D(CLUSTER, CLUSTER, 18e3)])

    assert coverage_objective(scenario) == 0
    assert coverage_objective(above) == 5
    assert coverage_objective(above, cfg=SrConfig(path=SolverPath.NEAR_OPTIMAL)) == 5


def test_coverage_objective_with_power_optimization():
    above = make_scenario([Position3D(CLUSTER, CLUSTER, 18e3)])

    assert coverage_objective(above, cfg=SrConfig(optimize_power=True)) <= 5


def test_coverage_objective_without_haps():
    assert coverage_objective(make_scenario([])) == 0


# endregion

# region Search


def test_sr_optimize_moves_hap(scenario, quick):
    placed, trace = sr_optimize(scenario, quick)

    assert trace.initial_objective == 0
    assert trace.objectives[-1] == 5
    assert coverage_objective(placed) == 5
    assert placed.haps[0].z == 18e3
    assert placed.users == scenario.users


def test_sr_trace_is_nondecreasing(scenario, quick):
    _, trace = sr_optimize(scenario, quick)

    objectives = trace.objectives
    assert all(b >= a for a, b in zip(objectives, objectives[1:]))
    assert trace.radii == [45e3 / 2**k for k in range(len(trace.radii))]
    assert trace.converged
    assert trace.stop_reason == "no-improvement"


def test_sr_trace_frames(scenario, quick):
    _, trace = sr_optimize(scenario, quick)

    evaluations = trace.to_frame()
    assert list(evaluations.columns) == [
        "iteration",
        "hap",
        "candidate",
        "x",
        "y",
        "objective",
    ]
    assert (evaluations["iteration"] == 1).sum() == 9
    assert len(trace.iterations_frame()) == len(trace.iterations)


def test_sr_optimize_min_radius(scenario):
    _, trace = sr_optimize(scenario, SrConfig(min_radius=30e3))

    assert trace.stop_reason == "min-radius"
    assert len(trace.iterations) == 1


def test_sr_optimize_without_candidates(scenario):
    placed, trace = sr_optimize(scenario, SrConfig(candidates=0))

    assert placed is scenario
    assert trace.iterations == []
    assert trace.objectives == [0]


def test_sr_optimize_without_haps():
    scenario = make_scenario([])

    placed, trace = sr_optimize(scenario)

    assert placed is scenario
    assert trace == SrTrace(stop_reason="no-improvement")


def test_exhaustive_matches_sweep_for_one_hap(scenario, quick):
    swept, sweep_trace = sr_optimize(scenario, quick)
    exhaustive = SrConfig(max_iterations=4, exhaustive=True)

    searched, search_trace = sr_optimize(scenario, exhaustive)

    assert searched.haps == swept.haps
    assert search_trace.objectives == sweep_trace.objectives


def test_exhaustive_limit():
    haps = [Position3D(90e3, 90e3, 18e3)] * 4

    with pytest.raises(ValueError) as exc_info:
        sr_optimize(make_scenario(haps), SrConfig(exhaustive=True))
    assert str(exc_info.value) == "The exhaustive mode supports up to 3 HAPs"


# endregion
