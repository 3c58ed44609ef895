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
Named random streams.

Every stochastic subsystem (user drop, fading, baselines) draws
from its own numpy Generator derived from the master seed and the subsystem
name, so that results don't depend on the order the subsystems run in.
"""

import zlib

import numpy as np

USERS = "users"
FADING = "fading"
BASELINE = "baseline"


def stream(seed: int, name: str, *extra: int) -> np.random.Generator:
    """Returns the independent random stream `name` of the master `seed`.

    :param seed: the master seed (64-bit non-negative integer).
    :param name: the subsystem name.
    :param extra: optional integers further splitting the stream.

    :raises TypeError: if the seed is not an integer.
    :raises ValueError: if the seed is negative.
    """
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError("The seed must be an integer")
    if seed < 0:
        raise ValueError("The seed must be non-negative")

    key = (zlib.crc32(name.encode("utf-8")), *(int(value) for value in extra))
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))
