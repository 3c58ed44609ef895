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

"""
Unit tests for the TOML run configuration.
"""

import logging

import pytest
from hap_network_optimizer.config import (
    AssociationSettings,
    ExperimentSettings,
    PowerSettings,
    RunConfig,
    load_config,
    parse_config,
)
from hap_network_optimizer.models import (
    Baseline,
    HapNetConfigError,
    NodeCounts,
    SolverPath,
    SubareaLayout,
    SweepVariable,
    SystemParameters,
    UtilityKind,
    dbm_to_watt,
)

RUN_TOML = """
[counts]
users = 30
haps = 2

[tiers.air]
carrier_ghz = 2.0
rb_bandwidth_khz = 500

[backhaul]
bandwidth_mhz = 8
gateway_capacity = [1, 2, 3, 4]

[power]
utility = "mmu"

[experiment]
sweep = "users"
grid = [10, 20]
seeds = [3, 5]
"""


def reason(exc_info) -> str:
    return str(exc_info.value)


# region Defaults


def test_default_configuration():
    config = parse_config({})

    assert config.counts == NodeCounts(100, 9, 5, 4)
    assert config.layout == SubareaLayout.default()
    assert config.parameters == SystemParameters()
    assert config.association == AssociationSettings()
    assert config.power == PowerSettings()
    assert config.placement_enabled
    assert config.experiment == ExperimentSettings()
    assert config.experiment.seeds == tuple(range(20))
    assert config.placement.path == SolverPath.FREQUENCY_PARTITIONING


def test_default_configuration_is_resolved():
    resolved = parse_config({}).resolved

    assert resolved["counts"] == {"users": 100, "tbs": 9, "haps": 5, "gateways": 4}
    assert resolved["tiers"]["air"]["carrier_hz"] == 3.0e9
    assert resolved["channel"]["coverage_radius_km"] == 30.0
    assert resolved["experiment"]["seeds"] == list(range(20))
    assert [subarea["name"] for subarea in resolved["subareas"]] == [
        "urban-tbs",
        "urban-no-tbs",
        "rural",
    ]


def test_reference_ground_bandwidth_warning(caplog):
    with caplog.at_level(logging.WARNING):
        parse_config({})
    assert "1.8 kHz" in caplog.text

    caplog.clear()
    with caplog.at_level(logging.WARNING):
        parse_config({"tiers": {"ground": {"rb_bandwidth_khz": 180}}})
    assert "1.8 kHz" not in caplog.text


def test_noise_reading_warning(caplog):
    with caplog.at_level(logging.WARNING):
        parse_config({"channel": {"noise_psd_dbm_hz": -170}})

    records = [r for r in caplog.records if "spectral density" in r.getMessage()]
    assert len(records) == 1
    assert records[0].levelno == logging.WARNING
    assert "-170 dBm/Hz" in records[0].getMessage()


def test_load_config_without_path():
    assert load_config().counts == parse_config({}).counts


# endregion

# region Values


def test_unit_conversion():
    config = parse_config(
        {
            "tiers": {"air": {"carrier_ghz": 2.0, "rb_bandwidth_khz": 500}},
            "backhaul": {"bandwidth_mhz": 8, "power_w": 20},
            "channel": {"coverage_radius_km": 20, "noise_psd_dbm_hz": -170},
            "nodes": {"tbs_height_m": 30},
            "placement": {"initial_radius_km": 10, "min_radius_km": 1},
        }
    )

    assert config.parameters.air.carrier_frequency == 2.0e9
    assert config.parameters.air.rb_bandwidth == 5.0e5
    assert config.parameters.bh_bandwidth == 8.0e6
    assert config.parameters.bh_power == 20.0
    assert config.parameters.coverage_radius == 20e3
    assert config.parameters.noise_psd == pytest.approx(dbm_to_watt(-170.0))
    assert config.parameters.tbs_height == 30.0
    assert config.placement.initial_radius == 10e3
    assert config.placement.min_radius == 1e3


def test_fading_settings():
    config = parse_config(
        {
            "tiers": {
                "ground": {"fading": "rician", "kappa": 3.0},
                "space": {"fading": "shadowed_rician", "omegas": [0.5, 0.1, 2.0]},
            }
        }
    )

    assert config.parameters.ground.fading.kappa == 3.0
    assert config.parameters.space.fading.omegas == (0.5, 0.1, 2.0)


def test_node_positions():
    config = parse_config(
        {
            "counts": {"haps": 1, "gateways": 1},
            "nodes": {
                "hap_positions_km": [[10, 20, 18]],
                "gateway_positions_km": [[0, 0]],
            },
        }
    )

    assert config.parameters.hap_initial_positions[0].as_array().tolist() == [
        10e3,
        20e3,
        18e3,
    ]
    assert config.parameters.gateway_positions[0].z == 0.0


def test_gateway_capacity_list():
    config = parse_config({"backhaul": {"gateway_capacity": [1, 2, 3, 4]}})

    assert config.parameters.gateway_capacity == (1, 2, 3, 4)
    assert config.parameters.station_capacities(4).tolist() == [5, 1, 2, 3, 4]


def test_association_and_placement_settings():
    config = parse_config(
        {
            "association": {"path": "fp", "max_rounds": 3, "center_threshold_km": 5},
            "placement": {"enabled": False, "path": "near-optimal", "candidates": 4},
        }
    )

    assert config.association == AssociationSettings(SolverPath.FREQUENCY_PARTITIONING, 3, 5e3)
    assert config.placement.center_threshold == 5e3
    assert config.placement.path == SolverPath.NEAR_OPTIMAL
    assert config.placement.candidates == 4
    assert not config.placement_enabled


def test_experiment_settings():
    config = parse_config(
        {
            "experiment": {
                "baseline": "random-association",
                "sweep": "bh_power_w",
                "grid": [10, 20.5],
                "seed_count": 3,
                "first_seed": 5,
            }
        }
    )

    assert config.experiment == ExperimentSettings(
        Baseline.RANDOM_ASSOCIATION, SweepVariable.BH_POWER, (10.0, 20.5), (5, 6, 7)
    )


def test_experiment_grid_with_frequency_unit():
    config = parse_config(
        {"experiment": {"sweep": "bh_bandwidth_hz", "grid_mhz": [1, 4, 16.5]}}
    )

    assert config.experiment.grid == (1e6, 4e6, 16.5e6)
    assert config.resolved["experiment"]["grid_mhz"] == [1, 4, 16.5]
    assert "grid" not in config.resolved["experiment"]


def test_custom_subareas():
    config = parse_config(
        {
            "area": {"x_km": [0, 100], "y_km": [0, 100]},
            "subareas": [
                {"name": "city", "x_km": [40, 60], "y_km": [40, 60], "fraction": 0.5},
                {"name": "rest", "fraction": 0.5, "exclude": ["city"]},
            ],
        }
    )

    layout = config.layout
    assert layout.area.x_max == 100e3
    assert [subarea.name for subarea in layout.subareas] == ["city", "rest"]
    assert layout.subareas[1].exclude == (layout.subareas[0].rect,)
    assert layout.tbs_subarea == 0


# endregion

# region Errors


@pytest.mark.parametrize(
    "data, key, message",
    [
        ({"foo": {}}, "foo", "unknown section"),
        ({"counts": {"userz": 5}}, "counts.userz", "unknown key"),
        ({"counts": {"users": -1}}, "counts.users", "must be at least 0"),
        ({"counts": {"users": "ten"}}, "counts.users", "an integer is expected"),
        ({"counts": {"users": True}}, "counts.users", "an integer is expected"),
        ({"tiers": {"ground": {"rb_count": 0}}}, "tiers.ground.rb_count", "must be at least 1"),
        ({"tiers": {"air": {"peak_power_w": 0}}}, "tiers.air.peak_power_w", "must be positive"),
        (
            {"tiers": {"air": {"carrier_ghz": 2, "carrier_mhz": 2000}}},
            "tiers.air.carrier",
            "the value is given with more than one unit",
        ),
        ({"counts": {"haps": 6}}, "counts.haps", "more HAPs than nodes.hap_positions_km entries"),
        (
            {"backhaul": {"gateway_capacity": [1, 2]}},
            "backhaul.gateway_capacity",
            "one capacity per gateway is expected",
        ),
        ({"placement": {"enabled": "yes"}}, "placement.enabled", "true or false is expected"),
        ({"experiment": {"seeds": [1, 1]}}, "experiment.seeds", "the seeds must be distinct"),
        ({"experiment": {"sweep": "users"}}, "experiment.grid", "the sweep grid is empty"),
        (
            {"experiment": {"sweep": "users", "grid": [10, 20.5]}},
            "experiment.grid",
            "a list of positive user counts is expected",
        ),
        (
            {"experiment": {"sweep": "bh_power_w", "grid_mhz": [1, 2]}},
            "experiment.grid_mhz",
            "a frequency unit only applies to the bh_bandwidth_hz sweep",
        ),
        (
            {"experiment": {"sweep": "bh_bandwidth_hz", "grid": [1e6], "grid_mhz": [1]}},
            "experiment.grid",
            "the value is given with more than one unit",
        ),
        (
            {"nodes": {"satellite_position_km": [[0, 0, 2000], [1, 1, 2000]]}},
            "nodes.satellite_position_km",
            "exactly one position is expected",
        ),
        (
            {"subareas": [{"name": "a", "fraction": 0.5}, {"name": "a", "fraction": 0.5}]},
            "subareas[1].name",
            "duplicate subarea name",
        ),
    ],
)
def test_invalid_values(data, key, message):
    with pytest.raises(HapNetConfigError) as exc_info:
        parse_config(data)

    assert exc_info.value.key == key
    assert reason(exc_info) == f"Invalid configuration key: {key} - Reason: {message}"


def test_invalid_choice():
    with pytest.raises(HapNetConfigError) as exc_info:
        parse_config({"power": {"utility": "max"}})

    assert exc_info.value.key == "power.utility"
    assert "'max' is not one of: msu, mmu" in reason(exc_info)


def test_invalid_seeds():
    for seeds in ([], [-1], [1.5], "0-3"):
        with pytest.raises(HapNetConfigError) as exc_info:
            parse_config({"experiment": {"seeds": seeds}})
        assert exc_info.value.key == "experiment.seeds"


# endregion

# region Files


def test_load_config_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(RUN_TOML, encoding="utf-8")

    config = load_config(path)

    assert config.counts == NodeCounts(30, 9, 2, 4)
    assert config.parameters.air.rb_bandwidth == 5e5
    assert config.parameters.gateway_capacity == (1, 2, 3, 4)
    assert config.power.utility == UtilityKind.MMU
    assert config.experiment.grid == (10.0, 20.0)
    assert config.experiment.seeds == (3, 5)
    assert config.resolved["counts"]["users"] == 30


def test_load_config_invalid_toml(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("[counts\nusers = 1\n", encoding="utf-8")

    with pytest.raises(HapNetConfigError) as exc_info:
        load_config(path)
    assert "invalid TOML" in reason(exc_info)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(HapNetConfigError) as exc_info:
        load_config(tmp_path / "missing.toml")
    assert "cannot read the file" in reason(exc_info)


# endregion

# region Sweep values


@pytest.mark.parametrize(
    "variable, value, check",
    [
        (SweepVariable.USERS, 50, lambda c: c.counts.users == 50),
        (SweepVariable.BH_BANDWIDTH, 8e6, lambda c: c.parameters.bh_bandwidth == 8e6),
        (SweepVariable.BH_POWER, 10.0, lambda c: c.parameters.bh_power == 10.0),
        (SweepVariable.HAP_POWER, 50.0, lambda c: c.parameters.air.peak_power == 50.0),
    ],
)
def test_with_sweep_value(variable, value, check):
    config = RunConfig()

    updated = config.with_sweep_value(variable, value)

    assert check(updated)
    assert config == RunConfig()


def test_with_sweep_value_none():
    config = RunConfig()

    assert config.with_sweep_value(SweepVariable.NONE, 1.0) is config


# endregion
