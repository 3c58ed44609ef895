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
This module contains all the enums used by the HAP network optimizer.
"""

from enum import Enum


class HapNetEnum(Enum):
    """Base class for all the network-related enums."""


class TierTag(HapNetEnum):
    """Enum listing the three network tiers.

    The :value of each member is the short tag used in CSV files and in the
    configuration file ("tiers.<value>").
    """

    GROUND = "ground"
    AIR = "air"
    SPACE = "space"


class FadingKind(HapNetEnum):
    """Enum listing the supported small-scale fading distributions."""

    RAYLEIGH = "rayleigh"
    RICIAN = "rician"
    SHADOWED_RICIAN = "shadowed_rician"


class UtilityKind(HapNetEnum):
    """Enum listing the utility metrics."""

    MSU = "msu"  # max-sum
    MMU = "mmu"  # max-min


class SolverPath(HapNetEnum):
    """Enum listing the short-term association solvers."""

    NEAR_OPTIMAL = "near-optimal"
    FREQUENCY_PARTITIONING = "fp"


class Baseline(HapNetEnum):
    """Enum listing the benchmark schemes compared against the proposed ones."""

    NONE = "none"
    UNIFORM_POWER = "uniform-power"
    RANDOM_ASSOCIATION = "random-association"


class UserGroup(HapNetEnum):
    """Enum listing the frequency-partitioning user groups."""

    CENTER = "center"
    EDGE = "edge"


class SweepVariable(HapNetEnum):
    """Enum listing the parameters an experiment can sweep.

    The :value of each member is the column name used in the result tables.
    """

    NONE = "none"
    USERS = "users"
    BH_BANDWIDTH = "bh_bandwidth_hz"
    HAP_POWER = "hap_peak_power_w"
    BH_POWER = "bh_power_w"


class Constraint(HapNetEnum):
    """Enum listing the constraints checked on every solver output."""

    POWER_BUDGET = "power-budget"
    BACKHAUL_RATE = "backhaul-rate"
    BACKHAUL_CAP = "backhaul-cap"
    USER_EXCLUSIVITY = "user-exclusivity"
    RB_EXCLUSIVITY = "rb-exclusivity"
    BACKHAUL_SINGLE = "backhaul-single"
    BACKHAUL_CAPACITY = "backhaul-capacity"
    POWER_COUPLING = "power-coupling"
    LINK_RANGE = "link-range"
