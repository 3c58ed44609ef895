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

"""Tiny synthetic instances and brute-force oracles for the solver tests.

Every tier uses 1 Hz RBs, a 1 W/Hz noise density and 2 RBs at 2 W, so the
uniform power is 1 W and every value is log2(1 + SINR). Gains are drawn
log-normal around 1, which keeps the three tiers comparable.
"""

# pylint: disable=import-error

import itertools

import numpy as np
from hap_network_optimizer.models import (
    ChannelRealization,
    Position3D,
    Scenario,
    SystemParameters,
    TierTag,
)

G, A, S = TierTag.GROUND, TierTag.AIR, TierTag.SPACE


def unit_parameters(rb_count: int = 2, peak_power: float = 2.0, **changes):
    changes.setdefault("satellite_capacity", 1)
    changes.setdefault("gateway_capacity", 1)
    parameters = SystemParameters(
        noise_psd=1.0, bh_bandwidth=1.0, bh_power=1.0, **changes
    )
    for tier in (parameters.ground, parameters.air, parameters.space):
        parameters = parameters.with_tier(
            tier.replace(rb_bandwidth=1.0, rb_count=rb_count, peak_power=peak_power)
        )
    return parameters


def tiny_scenario(users: int, tbs: int, haps: int, gateways: int = 1, **changes):
    """Users on a 1 km line, TBSs 2 km apart, HAPs above the users."""
    return Scenario(
        users=[Position3D(100.0 + 250.0 * u, 0.0) for u in range(users)],
        tbs=[Position3D(2e3 * m, 0.0, 25.0) for m in range(tbs)],
        haps=[Position3D(500.0, 0.0, 18e3) for _ in range(haps)],
        gateways=[Position3D(0.0, 0.0) for _ in range(gateways)],
        parameters=unit_parameters(**changes),
    )


def random_realization(scenario: Scenario, rng: np.random.Generator, sigma=1.0):
    users = scenario.user_count

    def draw(*shape):
        return rng.lognormal(0.0, sigma, size=shape)

    fh = {
        tag: draw(scenario.station_count(tag), users, scenario.tier(tag).rb_count)
        for tag in TierTag
    }
    return ChannelRealization(fh, draw(scenario.gateway_count + 1, scenario.hap_count))


def random_instance(seed: int, max_users: int = 4, max_tbs: int = 2, max_haps: int = 1):
    rng = np.random.default_rng(seed)
    scenario = tiny_scenario(
        int(rng.integers(1, max_users + 1)),
        int(rng.integers(1, max_tbs + 1)),
        int(rng.integers(0, max_haps + 1)),
    )
    return scenario, random_realization(scenario, rng)


def brute_force_assignment(values: np.ndarray) -> float:
    """Best value over the matchings of min(rows, cols) pairs."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] > values.shape[1]:
        values = values.T
    rows, cols = values.shape
    return max(
        (
            float(values[np.arange(rows), list(columns)].sum())
            for columns in itertools.permutations(range(cols), rows)
        ),
        default=0.0,
    )


def slots(scenario: Scenario) -> list[tuple[TierTag, int, int]]:
    return [
        (tag, s, n)
        for tag in (G, A, S)
        for s in range(scenario.station_count(tag))
        for n in range(scenario.tier(tag).rb_count)
    ]


def exhaustive_uniform_sum_rate(
    scenario: Scenario, realization: ChannelRealization
) -> float:
    """Best uniform-power sum-rate over every FH association (interference
    included), evaluated on all the states at once."""
    table = slots(scenario)
    users = scenario.user_count
    power = 1.0
    columns = len(table)
    states = np.array(
        [
            state
            for state in itertools.product(range(-1, columns), repeat=users)
            if len([c for c in state if c >= 0]) == len({c for c in state if c >= 0})
        ]
    ).reshape(-1, users)

    # A sentinel column for the unserved users
    code = {G: 0, A: 1, S: 2}
    tier = np.array([code[tag] for tag, _, _ in table] + [-1])
    station = np.array([s for _, s, _ in table] + [0])
    rb = np.array([n for _, _, n in table] + [0])
    isolated = np.zeros((users, columns + 1))
    for k, (tag, s, n) in enumerate(table):
        isolated[:, k] = np.log2(1.0 + power * realization.fh[tag][s, :, n])

    index = np.where(states < 0, columns, states)
    t, m, n = tier[index], station[index], rb[index]
    ground = t == 0
    user = np.arange(users)
    gains = realization.fh[G]

    total = np.where(ground | (t < 0), 0.0, isolated[user[None, :], index]).sum(axis=1)
    if gains.shape[0]:
        # cross[k, u, v]: gain from the TBS of user v to user u on user u's RB
        m_safe = np.where(ground, m, 0)
        n_safe = np.where(ground, n, 0)
        cross = gains[m_safe[:, None, :], user[None, :, None], n_safe[:, :, None]]
        interferes = (
            ground[:, :, None]
            & ground[:, None, :]
            & (n_safe[:, :, None] == n_safe[:, None, :])
            & ~np.eye(users, dtype=bool)[None, :, :]
        )
        interference = power * np.where(interferes, cross, 0.0).sum(axis=2)
        own = gains[m_safe, user[None, :], n_safe]
        rates = np.log2(1.0 + power * own / (1.0 + interference))
        total += np.where(ground, rates, 0.0).sum(axis=1)
    return float(total.max())
