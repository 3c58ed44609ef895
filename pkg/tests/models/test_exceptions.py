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
Unit tests for the HapNetError class and its subclasses.
"""

import pytest
from hap_network_optimizer.models import (
    HapNetConfigError,
    HapNetError,
    HapNetGeometryError,
    HapNetInfeasibleError,
    HapNetSolverError,
)


def test_hap_net_error():
    """
    Test if the HapNetError can be raised correctly.
    """
    with pytest.raises(HapNetError) as exc_info:
        raise HapNetError("Test error message")

    assert isinstance(exc_info.value, Exception)
    assert str(exc_info.value) == "Test error message"


@pytest.mark.parametrize(
    "error_type", [HapNetGeometryError, HapNetInfeasibleError, HapNetSolverError]
)
def test_hap_net_error_subclasses(error_type):
    """
    Test if the HapNetError subclasses can be raised and caught as HapNetError.
    """
    with pytest.raises(HapNetError) as exc_info:
        raise error_type("Test error message")

    assert isinstance(exc_info.value, error_type)
    assert str(exc_info.value) == "Test error message"


def test_hap_net_config_error():
    """
    Test if the HapNetConfigError names the key and the reason.
    """
    with pytest.raises(HapNetError) as exc_info:
        raise HapNetConfigError("tiers.air.rb_count", "must be at least 1")

    assert exc_info.value.key == "tiers.air.rb_count"
    assert (
        str(exc_info.value)
        == "Invalid configuration key: tiers.air.rb_count - Reason: must be at least 1"
    )


def test_hap_net_config_error_defaults():
    """
    Test the HapNetConfigError message without key and reason.
    """
    error = HapNetConfigError()

    assert error.key is None
    assert str(error) == "Invalid configuration key: N/A - Reason: N/A"


def test_hap_net_config_error_non_string_values():
    """
    Test the HapNetConfigError message with a non-string key and reason.
    """
    error = HapNetConfigError(("tiers", "air"), ValueError("must be positive"))

    assert error.key == ("tiers", "air")
    assert (
        str(error)
        == "Invalid configuration key: ('tiers', 'air') - Reason: must be positive"
    )
