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

# pylint: disable=unused-import

"""This module contains the domain types and the physics of the network."""

from .exceptions import (
    HapNetError,
    HapNetConfigError,
    HapNetGeometryError,
    HapNetInfeasibleError,
    HapNetSolverError,
)
from .enums import (
    Baseline,
    Constraint,
    FadingKind,
    SolverPath,
    SweepVariable,
    TierTag,
    UserGroup,
    UtilityKind,
)
from .geometry import (
    Position3D,
    Rectangle,
    distance,
    horizontal_distances,
    pairwise_distances,
)
from .channel import (
    ChannelRealization,
    FadingModel,
    attenuation_gain,
    average_realization,
    bh_gain,
    draw_realization,
    fh_gain,
    hap_coverage,
    path_loss,
    sample_fading,
)
from .scenario import (
    NodeCounts,
    Scenario,
    Subarea,
    SubareaLayout,
    SystemParameters,
    Tier,
    apportion,
    dbm_to_watt,
    generate_scenario,
)
from .rates import (
    Association,
    FhLink,
    FhLinkSet,
    PowerAllocation,
    RateReport,
    Violation,
    bh_rate,
    check_feasibility,
    evaluate,
    fh_rate,
    intercell_interference,
    uniform_power,
    utility,
)
