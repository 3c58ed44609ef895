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
This library simulates and optimizes the downlink of an integrated
satellite - HAP - terrestrial network.

The short-term stage associates users to stations and resource blocks (RBs)
and allocates the transmit powers for one fading realization; the long-term
stage places the HAPs using average channel statistics. The harness runs both
stages over parameter sweeps and random seeds and writes CSV results.

Usage:
    import numpy as np
    from hap_network_optimizer import (
        NodeCounts, SubareaLayout, draw_realization, generate_scenario,
        solve_short_term,
    )

    scenario = generate_scenario(SubareaLayout.default(), NodeCounts(100, 9, 5, 4), 7)
    realization = draw_realization(scenario, np.random.default_rng(7))
    outcome = solve_short_term(scenario, realization)
    print(outcome.report.summary())
"""

# pylint: disable=unused-import

import sys
import logging
from importlib.metadata import version, PackageNotFoundError

# Get the package version
try:
    __version__ = version(__name__)
except PackageNotFoundError:
    # package is not installed
    __version__ = "unknown"


# Create a logger for the package
_LOGGER = logging.getLogger(__package__)
_formatter = logging.Formatter(
    "%(asctime)s - %(name)s - %(levelname)s - %(message)s - "
    "%(module)s:%(lineno)d (%(funcName)s)"
)
_console_handler = logging.StreamHandler(sys.stdout)
_console_handler.setFormatter(_formatter)
_LOGGER.addHandler(_console_handler)
_LOGGER.setLevel(logging.INFO)


def get_logger():
    """
    Allows to set the log level and other properties from the calling code.

    Returns:
        Logger: The package logger
    """
    return _LOGGER


from .models import *  # noqa: E402,F401,F403  pylint: disable=wildcard-import,wrong-import-position
from .association import (  # noqa: E402  pylint: disable=wrong-import-position
    hungarian,
    random_association,
    solve_bh,
    solve_fh_fp,
    solve_fh_near_optimal,
    split_center_edge,
)
from .power import (  # noqa: E402  pylint: disable=wrong-import-position
    bh_cap,
    mmu_power,
    sca_msu,
    taylor_bound,
    waterfilling,
)
from .placement import (  # noqa: E402  pylint: disable=wrong-import-position
    SrConfig,
    SrTrace,
    candidate_ring,
    coverage_objective,
    sr_optimize,
)
from .harness import (  # noqa: E402  pylint: disable=wrong-import-position
    ExperimentSpec,
    ShortTermOutcome,
    convergence,
    run_pipeline,
    solve_short_term,
    sweep,
)
from .config import RunConfig, load_config  # noqa: E402  pylint: disable=wrong-import-position
