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
HAP network optimizer exceptions.
"""


class HapNetError(Exception):
    """Base exception class for the HAP network optimizer package."""


class HapNetGeometryError(HapNetError):
    """Raised when a link geometry is singular (zero distance or altitude)."""


class HapNetInfeasibleError(HapNetError):
    """Raised when a problem instance or a solver output violates a constraint."""


class HapNetSolverError(HapNetError):
    """Raised when a solver receives inputs it cannot work with."""


class HapNetConfigError(HapNetError):
    """Raised when a configuration value is missing, unknown or out of range.

    :param key: the dotted configuration key (e.g. "tiers.air.rb_count").
    :param reason: why the value was rejected."""

    def __init__(self, key=None, reason=None):
        """Constructor for the HapNetConfigError class.

        :param key: the dotted configuration key.
        :param reason: why the value was rejected (optional).
        """

        self.key = key
        # Any key or reason type is formatted with str()
        super().__init__(
            f"Invalid configuration key: {str(key) if key else 'N/A'} - "
            f"Reason: {str(reason) if reason else 'N/A'}"
        )
