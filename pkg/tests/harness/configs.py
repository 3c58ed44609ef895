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

"""Small run configurations shared by the harness and CLI tests."""

import copy

from hap_network_optimizer.config import RunConfig, parse_config

SMALL = {
    "counts": {"users": 10, "tbs": 4, "haps": 2, "gateways": 2},
    "tiers": {
        "ground": {"rb_count": 6, "rb_bandwidth_khz": 180},
        "air": {"rb_count": 8},
        "space": {"rb_count": 8},
    },
    "placement": {"candidates": 4, "max_iterations": 2},
    "experiment": {"seeds": [0, 1]},
}

SMALL_TOML = """
[counts]
users = 10
tbs = 4
haps = 2
gateways = 2

[tiers.ground]
rb_count = 6
rb_bandwidth_khz = 180

[tiers.air]
rb_count = 8

[tiers.space]
rb_count = 8

[placement]
candidates = 4
max_iterations = 2

[experiment]
sweep = "users"
grid = [4, 6]
seeds = [0, 1]
"""


def merged(base: dict, changes: dict) -> dict:
    result = copy.deepcopy(base)
    for key, value in changes.items():
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = merged(result[key], value)
        else:
            result[key] = value
    return result


def small_config(**sections) -> RunConfig:
    return parse_config(merged(SMALL, sections))


def unhostable_config(**sections) -> RunConfig:
    """Two HAPs and no BH capacity at all."""
    return small_config(
        backhaul={"satellite_capacity": 0, "gateway_capacity": 0}, **sections
    )
