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
This module reads the TOML run configuration.

Every key is optional and defaults to the reference scenario (180 km x 180 km
area, 100 users, 9 TBSs, 5 HAPs, 4 gateways). Keys carry their unit
(carrier_ghz, peak_power_w, coverage_radius_km...) and the values are
converted to SI at parse time. Frequency keys accept any of the _hz, _khz,
_mhz and _ghz suffixes. The [experiment] grid is given in the unit of the
swept variable (user counts, Hz or W); the bandwidth sweep also accepts
grid_khz, grid_mhz and grid_ghz.

Usage:
    config = load_config("run.toml")
    config.counts.users  # 100
"""

from __future__ import annotations

import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace
from numbers import Integral, Real
from pathlib import Path
from typing import Any, Optional, Union

from .models.channel import FadingModel
from .models.enums import Baseline, FadingKind, SolverPath, SweepVariable, TierTag, UtilityKind
from .models.exceptions import HapNetConfigError
from .models.geometry import Position3D, Rectangle
from .models.scenario import (
    NodeCounts,
    Subarea,
    SubareaLayout,
    SystemParameters,
    Tier,
    dbm_to_watt,
)
from .placement import SrConfig

_LOGGER = logging.getLogger(__package__)

REFERENCE_GROUND_RB_BANDWIDTH = 1.8e3  # Hz
DEFAULT_SEED_COUNT = 20

_FREQUENCY_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
_SECTIONS = (
    "counts",
    "area",
    "subareas",
    "nodes",
    "tiers",
    "backhaul",
    "channel",
    "association",
    "power",
    "placement",
    "experiment",
)


@dataclass(frozen=True)
class AssociationSettings:
    """Short-term association settings."""

    path: SolverPath = SolverPath.NEAR_OPTIMAL
    max_rounds: int = 10
    center_threshold: Optional[float] = None  # m, None: 0.8 x TBS cell radius


@dataclass(frozen=True)
class PowerSettings:
    """Power allocation settings."""

    utility: UtilityKind = UtilityKind.MSU
    sca_tolerance: float = 1e-6
    sca_max_iterations: int = 50
    mmu_tolerance: float = 1e-6
    omega_bandwidth: Optional[float] = None  # Hz, None: B^L


@dataclass(frozen=True)
class ExperimentSettings:
    """Experiment settings: baseline, swept parameter and seeds."""

    baseline: Baseline = Baseline.NONE
    sweep: SweepVariable = SweepVariable.NONE
    grid: tuple[float, ...] = ()  # users, Hz or W, as named by the sweep
    seeds: tuple[int, ...] = tuple(range(DEFAULT_SEED_COUNT))


@dataclass(frozen=True)
class RunConfig:
    """The resolved run configuration.

    :param resolved: every configuration key with the value actually used
        (defaults included), in configuration units.
    """

    counts: NodeCounts = NodeCounts(100, 9, 5, 4)
    layout: SubareaLayout = field(default_factory=SubareaLayout.default)
    parameters: SystemParameters = field(default_factory=SystemParameters)
    association: AssociationSettings = AssociationSettings()
    power: PowerSettings = PowerSettings()
    placement: SrConfig = SrConfig()
    placement_enabled: bool = True
    experiment: ExperimentSettings = ExperimentSettings()
    resolved: dict = field(default_factory=dict, compare=False)

    def with_sweep_value(self, variable: SweepVariable, value: float) -> "RunConfig":
        """Returns a copy with the swept parameter set to `value` (SI units)."""
        if variable == SweepVariable.USERS:
            return replace(self, counts=replace(self.counts, users=int(value)))
        if variable == SweepVariable.BH_BANDWIDTH:
            parameters = replace(self.parameters, bh_bandwidth=float(value))
        elif variable == SweepVariable.BH_POWER:
            parameters = replace(self.parameters, bh_power=float(value))
        elif variable == SweepVariable.HAP_POWER:
            parameters = self.parameters.with_tier(
                self.parameters.air.replace(peak_power=float(value))
            )
        else:
            return self
        return replace(self, parameters=parameters)


class _Section:
    """A configuration table: typed reads with defaults, unknown key detection
    and recording of the resolved values."""

    def __init__(self, data: Any, prefix: str, resolved: dict):
        if not isinstance(data, dict):
            raise HapNetConfigError(prefix, "a table is expected")
        self._data = data
        self._prefix = prefix
        self._used: set[str] = set()
        self.resolved = resolved

    def key(self, name: str) -> str:
        return f"{self._prefix}.{name}" if self._prefix else name

    def __contains__(self, name: str) -> bool:
        return name in self._data

    def raw(self, name: str, default: Any = None) -> Any:
        self._used.add(name)
        return self._data.get(name, default)

    def section(self, name: str) -> "_Section":
        self._used.add(name)
        child = self.resolved.setdefault(name, {})
        return _Section(self._data.get(name, {}), self.key(name), child)

    def number(
        self,
        name: str,
        default: float,
        *,
        minimum: Optional[float] = None,
        positive: bool = False,
    ) -> float:
        value = self.raw(name, default)
        if isinstance(value, bool) or not isinstance(value, Real):
            raise HapNetConfigError(self.key(name), "a number is expected")
        if positive and value <= 0:
            raise HapNetConfigError(self.key(name), "must be positive")
        if minimum is not None and value < minimum:
            raise HapNetConfigError(self.key(name), f"must be at least {minimum}")
        self.resolved[name] = value
        return float(value)

    def integer(self, name: str, default: int, *, minimum: int = 0) -> int:
        value = self.raw(name, default)
        if isinstance(value, bool) or not isinstance(value, Integral):
            raise HapNetConfigError(self.key(name), "an integer is expected")
        if value < minimum:
            raise HapNetConfigError(self.key(name), f"must be at least {minimum}")
        self.resolved[name] = value
        return int(value)

    def flag(self, name: str, default: bool) -> bool:
        value = self.raw(name, default)
        if not isinstance(value, bool):
            raise HapNetConfigError(self.key(name), "true or false is expected")
        self.resolved[name] = value
        return value

    def choice(self, name: str, default, enum_type):
        value = self.raw(name, default.value)
        try:
            member = enum_type(value)
        except ValueError as e:
            allowed = ", ".join(str(m.value) for m in enum_type)
            raise HapNetConfigError(
                self.key(name), f"'{value}' is not one of: {allowed}"
            ) from e
        self.resolved[name] = member.value
        return member

    def frequency(self, stem: str, default_hz: Optional[float]) -> Optional[float]:
        """Reads stem_hz / stem_khz / stem_mhz / stem_ghz, returning Hz."""
        given = [unit for unit in _FREQUENCY_UNITS if f"{stem}_{unit}" in self._data]
        if len(given) > 1:
            raise HapNetConfigError(
                self.key(stem), "the value is given with more than one unit"
            )
        if not given:
            if default_hz is not None:
                self.resolved[f"{stem}_hz"] = default_hz
            return default_hz
        name = f"{stem}_{given[0]}"
        return self.number(name, 0.0, positive=True) * _FREQUENCY_UNITS[given[0]]

    def km_list(self, name: str, default: list, length: Optional[int] = None):
        """Reads a list of numbers (km), returning meters."""
        value = self.raw(name, default)
        if not isinstance(value, list) or not all(
            isinstance(item, Real) and not isinstance(item, bool) for item in value
        ):
            raise HapNetConfigError(self.key(name), "a list of numbers is expected")
        if length is not None and len(value) != length:
            raise HapNetConfigError(self.key(name), f"{length} values are expected")
        self.resolved[name] = value
        return [float(item) * 1000.0 for item in value]

    def positions(self, name: str, default: list) -> tuple[Position3D, ...]:
        """Reads a list of [x, y] or [x, y, z] points (km)."""
        value = self.raw(name, default)
        if not isinstance(value, list):
            raise HapNetConfigError(self.key(name), "a list of points is expected")
        try:
            points = tuple(Position3D.from_km(point) for point in value)
        except (TypeError, ValueError) as e:
            raise HapNetConfigError(self.key(name), str(e)) from e
        self.resolved[name] = value
        return points

    def finish(self, *nested: str):
        """Raises on any key that was never read."""
        for name in self._data:
            if name not in self._used and name not in nested:
                raise HapNetConfigError(self.key(name), "unknown key")


def _km_point(position: Position3D) -> list[float]:
    return [position.x / 1000.0, position.y / 1000.0, position.z / 1000.0]


def _fading(section: _Section, default: FadingModel) -> FadingModel:
    kind = section.choice("fading", default.kind, FadingKind)
    try:
        if kind == FadingKind.RICIAN:
            return FadingModel.rician(
                section.number("kappa", default.kappa or 10.0, minimum=0.0)
            )
        if kind == FadingKind.SHADOWED_RICIAN:
            omegas = section.raw("omegas", list(default.omegas or (0.372, 0.0129, 7.64)))
            if not isinstance(omegas, list) or len(omegas) != 3:
                raise HapNetConfigError(section.key("omegas"), "3 values are expected")
            section.resolved["omegas"] = omegas
            return FadingModel.shadowed_rician(*omegas)
    except (TypeError, ValueError) as e:
        raise HapNetConfigError(section.key("fading"), str(e)) from e
    return FadingModel.rayleigh()


def _tier(section: _Section, default: Tier) -> Tier:
    carrier = section.frequency("carrier", default.carrier_frequency)
    bandwidth = section.frequency("rb_bandwidth", default.rb_bandwidth)
    rb_count = section.integer("rb_count", default.rb_count, minimum=1)
    peak_power = section.number("peak_power_w", default.peak_power, positive=True)
    fading = _fading(section, default.fading)
    section.finish()
    return Tier(default.tag, carrier, bandwidth, rb_count, peak_power, fading)


def _rectangle(section: _Section, prefix: str, default: Rectangle) -> Rectangle:
    x_range = section.km_list(
        f"{prefix}x_km", [default.x_min / 1000.0, default.x_max / 1000.0], 2
    )
    y_range = section.km_list(
        f"{prefix}y_km", [default.y_min / 1000.0, default.y_max / 1000.0], 2
    )
    try:
        return Rectangle(x_range[0], x_range[1], y_range[0], y_range[1])
    except ValueError as e:
        raise HapNetConfigError(section.key(f"{prefix}x_km"), str(e)) from e


def _layout(root: _Section) -> SubareaLayout:
    default = SubareaLayout.default()
    area = _rectangle(root.section("area"), "", default.area)
    if "subareas" not in root:
        root.raw("subareas")
        root.resolved["subareas"] = [
            {
                "name": subarea.name,
                "x_km": [subarea.rect.x_min / 1e3, subarea.rect.x_max / 1e3],
                "y_km": [subarea.rect.y_min / 1e3, subarea.rect.y_max / 1e3],
                "fraction": subarea.fraction,
                "exclude": [
                    other.name
                    for other in default.subareas
                    if other.rect in subarea.exclude
                ],
                "tbs": index == default.tbs_subarea,
            }
            for index, subarea in enumerate(default.subareas)
        ]
        try:
            return SubareaLayout(area, default.subareas, default.tbs_subarea)
        except ValueError as e:
            raise HapNetConfigError("area", str(e)) from e

    tables = root.raw("subareas")
    if not isinstance(tables, list) or not tables:
        raise HapNetConfigError("subareas", "a non-empty array of tables is expected")
    root.resolved["subareas"] = []
    sections = []
    for index, table in enumerate(tables):
        resolved: dict = {}
        root.resolved["subareas"].append(resolved)
        sections.append(_Section(table, f"subareas[{index}]", resolved))

    rects = {}
    for index, section in enumerate(sections):
        name = section.raw("name", f"subarea-{index}")
        resolved_name = str(name)
        if resolved_name in rects:
            raise HapNetConfigError(section.key("name"), "duplicate subarea name")
        section.resolved["name"] = resolved_name
        rects[resolved_name] = _rectangle(section, "", area)

    subareas, tbs_subarea = [], 0
    for index, section in enumerate(sections):
        name = section.resolved["name"]
        exclude = section.raw("exclude", [])
        if not isinstance(exclude, list) or any(item not in rects for item in exclude):
            raise HapNetConfigError(
                section.key("exclude"), "a list of subarea names is expected"
            )
        section.resolved["exclude"] = exclude
        fraction = section.number("fraction", 0.0, minimum=0.0)
        if section.flag("tbs", index == 0):
            tbs_subarea = index
        section.finish()
        try:
            subareas.append(
                Subarea(
                    name,
                    rects[name],
                    fraction,
                    tuple(rects[item] for item in exclude),
                )
            )
        except ValueError as e:
            raise HapNetConfigError(section.key("fraction"), str(e)) from e
    try:
        return SubareaLayout(area, tuple(subareas), tbs_subarea)
    except ValueError as e:
        raise HapNetConfigError("subareas", str(e)) from e


def _parameters(root: _Section) -> SystemParameters:
    default = SystemParameters()

    tiers = root.section("tiers")
    ground = _tier(tiers.section("ground"), default.ground)
    air = _tier(tiers.section("air"), default.air)
    space = _tier(tiers.section("space"), default.space)
    tiers.finish()
    if ground.rb_bandwidth == REFERENCE_GROUND_RB_BANDWIDTH:
        _LOGGER.warning(
            "Ground RB bandwidth is the literal 1.8 kHz of the reference table "
            "(an LTE RB is 180 kHz): set tiers.ground.rb_bandwidth_khz to change it"
        )

    backhaul = root.section("backhaul")
    capacity: Union[int, tuple[int, ...]]
    raw_capacity = backhaul.raw("gateway_capacity", default.gateway_capacity)
    if isinstance(raw_capacity, list):
        if not all(
            isinstance(item, Integral) and not isinstance(item, bool) and item >= 0
            for item in raw_capacity
        ):
            raise HapNetConfigError(
                backhaul.key("gateway_capacity"), "non-negative integers are expected"
            )
        capacity = tuple(int(item) for item in raw_capacity)
        backhaul.resolved["gateway_capacity"] = raw_capacity
    else:
        capacity = backhaul.integer("gateway_capacity", default.gateway_capacity)  # type: ignore[arg-type]
    bh = {
        "bh_bandwidth": backhaul.frequency("bandwidth", default.bh_bandwidth),
        "bh_power": backhaul.number("power_w", default.bh_power, positive=True),
        "bh_carrier": backhaul.frequency("carrier", default.bh_carrier),
        "bh_kappa_gateway": backhaul.number(
            "kappa_gateway", default.bh_kappa_gateway, minimum=0.0
        ),
        "bh_kappa_satellite": backhaul.number(
            "kappa_satellite", default.bh_kappa_satellite, minimum=0.0
        ),
        "satellite_capacity": backhaul.integer(
            "satellite_capacity", default.satellite_capacity
        ),
    }
    backhaul.finish()

    channel = root.section("channel")
    noise_dbm = channel.number("noise_psd_dbm_hz", -174.0)
    chi = channel.number("attenuation_factor", default.attenuation_factor, minimum=0.0)
    coverage = channel.number(
        "coverage_radius_km", default.coverage_radius / 1000.0, positive=True
    )
    channel.finish()
    _LOGGER.warning(
        "Noise read as a power spectral density: %g dBm/Hz, noise power N0 * B",
        noise_dbm,
    )

    nodes = root.section("nodes")
    satellite = nodes.positions(
        "satellite_position_km", [_km_point(default.satellite_position)]
    )
    haps = nodes.positions(
        "hap_positions_km", [_km_point(p) for p in default.hap_initial_positions]
    )
    gateways = nodes.positions(
        "gateway_positions_km", [_km_point(p) for p in default.gateway_positions]
    )
    tbs_height = nodes.number("tbs_height_m", default.tbs_height, minimum=0.0)
    nodes.finish()
    if len(satellite) != 1:
        raise HapNetConfigError(
            nodes.key("satellite_position_km"), "exactly one position is expected"
        )

    try:
        return SystemParameters(
            ground=ground,
            air=air,
            space=space,
            gateway_capacity=capacity,
            noise_psd=dbm_to_watt(noise_dbm),
            attenuation_factor=chi,
            coverage_radius=coverage * 1000.0,
            tbs_height=tbs_height,
            satellite_position=satellite[0],
            hap_initial_positions=haps,
            gateway_positions=gateways,
            **bh,
        )
    except ValueError as e:
        raise HapNetConfigError("backhaul", str(e)) from e


def _grid(section: _Section, sweep: SweepVariable) -> tuple[float, ...]:
    """Reads the sweep grid in the unit of the swept variable (a user count,
    Hz or W), the bandwidth sweep also taking grid_khz, grid_mhz or grid_ghz."""
    names = ["grid", *(f"grid_{unit}" for unit in _FREQUENCY_UNITS)]
    given = [name for name in names if name in section]
    if len(given) > 1:
        raise HapNetConfigError(
            section.key("grid"), "the value is given with more than one unit"
        )
    name = given[0] if given else "grid"
    scale = 1.0
    if name != "grid":
        if sweep != SweepVariable.BH_BANDWIDTH:
            raise HapNetConfigError(
                section.key(name),
                f"a frequency unit only applies to the "
                f"{SweepVariable.BH_BANDWIDTH.value} sweep",
            )
        scale = _FREQUENCY_UNITS[name.removeprefix("grid_")]

    grid = section.raw(name, [])
    if not isinstance(grid, list) or not all(
        isinstance(item, Real) and not isinstance(item, bool) for item in grid
    ):
        raise HapNetConfigError(section.key(name), "a list of numbers is expected")
    if sweep == SweepVariable.USERS and not all(
        isinstance(item, Integral) and item > 0 for item in grid
    ):
        raise HapNetConfigError(
            section.key(name), "a list of positive user counts is expected"
        )
    if sweep != SweepVariable.NONE and not grid:
        raise HapNetConfigError(section.key(name), "the sweep grid is empty")
    section.resolved[name] = grid
    return tuple(float(item) * scale for item in grid)


def parse_config(data: dict) -> RunConfig:
    """Builds a RunConfig from the parsed TOML document.

    :raises HapNetConfigError: on unknown keys and invalid values, naming the
        dotted key.
    """
    resolved: dict = {}
    root = _Section(data, "", resolved)
    for name in data:
        if name not in _SECTIONS:
            raise HapNetConfigError(name, "unknown section")

    counts_section = root.section("counts")
    counts = NodeCounts(
        counts_section.integer("users", 100),
        counts_section.integer("tbs", 9),
        counts_section.integer("haps", 5),
        counts_section.integer("gateways", 4),
    )
    counts_section.finish()

    layout = _layout(root)
    parameters = _parameters(root)
    if counts.haps > len(parameters.hap_initial_positions):
        raise HapNetConfigError(
            "counts.haps", "more HAPs than nodes.hap_positions_km entries"
        )
    if counts.gateways > len(parameters.gateway_positions):
        raise HapNetConfigError(
            "counts.gateways", "more gateways than nodes.gateway_positions_km entries"
        )
    if isinstance(parameters.gateway_capacity, tuple) and (
        len(parameters.gateway_capacity) < counts.gateways
    ):
        raise HapNetConfigError(
            "backhaul.gateway_capacity", "one capacity per gateway is expected"
        )

    section = root.section("association")
    threshold = section.raw("center_threshold_km")
    if threshold is not None:
        threshold = section.number("center_threshold_km", 0.0, minimum=0.0) * 1000.0
    association = AssociationSettings(
        path=section.choice("path", SolverPath.NEAR_OPTIMAL, SolverPath),
        max_rounds=section.integer("max_rounds", 10, minimum=1),
        center_threshold=threshold,
    )
    section.finish()

    section = root.section("power")
    power = PowerSettings(
        utility=section.choice("utility", UtilityKind.MSU, UtilityKind),
        sca_tolerance=section.number("sca_tolerance", 1e-6, positive=True),
        sca_max_iterations=section.integer("sca_max_iterations", 50, minimum=1),
        mmu_tolerance=section.number("mmu_tolerance", 1e-6, positive=True),
        omega_bandwidth=section.frequency("omega_bandwidth", None),
    )
    section.finish()

    section = root.section("placement")
    enabled = section.flag("enabled", True)
    try:
        placement = SrConfig(
            candidates=section.integer("candidates", 8),
            initial_radius=section.number("initial_radius_km", 45.0, positive=True)
            * 1000.0,
            max_iterations=section.integer("max_iterations", 15, minimum=1),
            min_radius=section.number("min_radius_km", 0.0, minimum=0.0) * 1000.0,
            exhaustive=section.flag("exhaustive", False),
            optimize_power=section.flag("optimize_power", False),
            path=section.choice(
                "path", SolverPath.FREQUENCY_PARTITIONING, SolverPath
            ),
            center_threshold=association.center_threshold,
        )
    except ValueError as e:
        raise HapNetConfigError("placement", str(e)) from e
    section.finish()

    section = root.section("experiment")
    sweep = section.choice("sweep", SweepVariable.NONE, SweepVariable)
    grid = _grid(section, sweep)
    seeds = section.raw("seeds")
    if seeds is None:
        count = section.integer("seed_count", DEFAULT_SEED_COUNT, minimum=1)
        first = section.integer("first_seed", 0)
        seeds = list(range(first, first + count))
    if (
        not isinstance(seeds, list)
        or not seeds
        or not all(isinstance(s, Integral) and not isinstance(s, bool) and s >= 0 for s in seeds)
    ):
        raise HapNetConfigError(
            section.key("seeds"), "a non-empty list of non-negative integers is expected"
        )
    if len(set(seeds)) != len(seeds):
        raise HapNetConfigError(section.key("seeds"), "the seeds must be distinct")
    section.resolved["seeds"] = seeds
    experiment = ExperimentSettings(
        baseline=section.choice("baseline", Baseline.NONE, Baseline),
        sweep=sweep,
        grid=grid,
        seeds=tuple(int(seed) for seed in seeds),
    )
    section.finish()

    return RunConfig(
        counts=counts,
        layout=layout,
        parameters=parameters,
        association=association,
        power=power,
        placement=placement,
        placement_enabled=enabled,
        experiment=experiment,
        resolved=resolved,
    )


def load_config(path: Union[str, Path, None] = None) -> RunConfig:
    """Reads and validates a TOML configuration file (defaults if no path).

    :raises HapNetConfigError: if the file cannot be parsed or a key is invalid.
    """
    if path is None:
        return parse_config({})
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise HapNetConfigError(str(path), f"invalid TOML: {e}") from e
    except OSError as e:
        raise HapNetConfigError(str(path), f"cannot read the file: {e}") from e
    _LOGGER.info("Configuration loaded from %s", path)
    return parse_config(data)
