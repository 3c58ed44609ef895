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
This module contains the network topology: tiers, system parameters, the
subarea layout of the users and the Scenario itself, with the reproducible
scenario generator.

All the values are SI (m, Hz, W). Scenarios are immutable: the placement
stage creates new scenarios with moved HAPs (see Scenario.with_haps).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from numbers import Integral
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import pandas as pd

from . import rng as rng_streams
from .channel import FadingModel
from .enums import TierTag
from .geometry import Position3D, Rectangle

_LOGGER = logging.getLogger(__package__)


def dbm_to_watt(value_dbm: float) -> float:
    """Converts dBm (or dBm/Hz) to W (or W/Hz)."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


class Tier:
    """Represents the per-tier constants of the FH (ground, air or space tier).

    The three tiers use disjoint spectrum.

    :property tag: the tier (TierTag).
    :property carrier_frequency: f_c^S (Hz).
    :property rb_bandwidth: B^S (Hz).
    :property rb_count: N^S.
    :property peak_power: P_S, the per-station power budget (W).
    :property fading: the small-scale fading model of the tier FH links.
    """

    def __init__(
        self,
        tag: TierTag,
        carrier_frequency: float,
        rb_bandwidth: float,
        rb_count: int,
        peak_power: float,
        fading: FadingModel,
    ):
        """Constructor for the Tier class.

        :raises TypeError: if the tag, the RB count or the fading are invalid.
        :raises ValueError: if a constant is out of range.
        """
        # Validate the input.
        if not isinstance(tag, TierTag):
            raise TypeError("The tier tag must be a valid TierTag")
        if isinstance(rb_count, bool) or not isinstance(rb_count, Integral):
            raise TypeError("The RB count must be an integer")
        if not isinstance(fading, FadingModel):
            raise TypeError("The fading must be a FadingModel")
        if rb_count < 1:
            raise ValueError("The RB count must be at least 1")
        if not (carrier_frequency > 0 and rb_bandwidth > 0 and peak_power > 0):
            raise ValueError(
                "Carrier frequency, RB bandwidth and peak power must be positive"
            )

        self._tag = tag
        self._carrier_frequency = float(carrier_frequency)
        self._rb_bandwidth = float(rb_bandwidth)
        self._rb_count = int(rb_count)
        self._peak_power = float(peak_power)
        self._fading = fading

    @property
    def tag(self) -> TierTag:
        """Returns the tier tag."""
        return self._tag

    @property
    def carrier_frequency(self) -> float:
        """Returns the carrier frequency (Hz)."""
        return self._carrier_frequency

    @property
    def rb_bandwidth(self) -> float:
        """Returns the RB bandwidth (Hz)."""
        return self._rb_bandwidth

    @property
    def rb_count(self) -> int:
        """Returns the number of RBs per station."""
        return self._rb_count

    @property
    def peak_power(self) -> float:
        """Returns the per-station power budget (W)."""
        return self._peak_power

    @property
    def fading(self) -> FadingModel:
        """Returns the fading model."""
        return self._fading

    @property
    def uniform_power(self) -> float:
        """Returns the uniform per-RB power P_S / N^S (W)."""
        return self._peak_power / self._rb_count

    def replace(self, **changes) -> "Tier":
        """Returns a copy of the tier with some constants changed."""
        values = {
            "tag": self._tag,
            "carrier_frequency": self._carrier_frequency,
            "rb_bandwidth": self._rb_bandwidth,
            "rb_count": self._rb_count,
            "peak_power": self._peak_power,
            "fading": self._fading,
        }
        values.update(changes)
        return Tier(**values)

    def __str__(self) -> str:
        return (
            f"{type(self).__name__} {self.tag.name}: f_c={self.carrier_frequency:g} Hz"
            f" - B={self.rb_bandwidth:g} Hz - N={self.rb_count}"
            f" - P={self.peak_power:g} W"
        )

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}({self.tag},{self.carrier_frequency!r},"
            f"{self.rb_bandwidth!r},{self.rb_count},{self.peak_power!r},"
            f"{self.fading!r})"
        )

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.__repr__() == other.__repr__()

    def __hash__(self) -> int:
        return hash((type(self), self.__repr__()))


def _km(x: float, y: float, z: float = 0.0) -> Position3D:
    return Position3D(x * 1000.0, y * 1000.0, z * 1000.0)


@dataclass(frozen=True)
class SystemParameters:
    """Bundle of the static constants of the network (reference defaults).

    The ground RB bandwidth default is the literal 1.8 kHz of the parameter
    table (180 kHz is the usual LTE RB): override it from the configuration.
    The noise value is a power spectral density, N_0 * B^S being the noise power.
    """

    ground: Tier = Tier(TierTag.GROUND, 1.8e9, 1.8e3, 50, 40.0, FadingModel.rayleigh())
    air: Tier = Tier(TierTag.AIR, 3.0e9, 1.0e6, 100, 100.0, FadingModel.rician(10.0))
    space: Tier = Tier(
        TierTag.SPACE,
        5.0e9,
        2.0e6,
        200,
        250.0,
        FadingModel.shadowed_rician(0.372, 0.0129, 7.64),
    )
    bh_bandwidth: float = 4.0e6
    bh_power: float = 40.0
    bh_carrier: float = 3.4e9
    bh_kappa_gateway: float = 10.0
    bh_kappa_satellite: float = 10.0
    satellite_capacity: int = 5
    gateway_capacity: Union[int, tuple[int, ...]] = 2
    noise_psd: float = dbm_to_watt(-174.0)
    attenuation_factor: float = 2.0
    coverage_radius: float = 30.0e3
    tbs_height: float = 25.0
    satellite_position: Position3D = _km(90, 90, 2000)
    hap_initial_positions: tuple[Position3D, ...] = (
        _km(90, 90, 18),
        _km(30, 30, 18),
        _km(150, 30, 18),
        _km(30, 150, 18),
        _km(150, 150, 18),
    )
    gateway_positions: tuple[Position3D, ...] = (
        _km(0, 0),
        _km(180, 0),
        _km(0, 180),
        _km(180, 180),
    )

    def __post_init__(self):
        if self.bh_bandwidth <= 0 or self.bh_power <= 0 or self.bh_carrier <= 0:
            raise ValueError("BH bandwidth, power and carrier must be positive")
        if self.noise_psd <= 0:
            raise ValueError("The noise power spectral density must be positive")
        if self.attenuation_factor < 0 or self.coverage_radius <= 0:
            raise ValueError("Invalid attenuation factor or coverage radius")
        if self.bh_kappa_gateway < 0 or self.bh_kappa_satellite < 0:
            raise ValueError("The BH Rician factors must be non-negative")
        capacities = (
            self.gateway_capacity
            if isinstance(self.gateway_capacity, tuple)
            else (self.gateway_capacity,)
        )
        if self.satellite_capacity < 0 or min(capacities, default=0) < 0:
            raise ValueError("The BH station capacities must be non-negative")

    def tier(self, tag: TierTag) -> Tier:
        """Returns the constants of a tier."""
        return {TierTag.GROUND: self.ground, TierTag.AIR: self.air}.get(
            tag, self.space
        )

    def with_tier(self, tier: Tier) -> "SystemParameters":
        """Returns a copy with the constants of one tier replaced."""
        return replace(self, **{_TIER_FIELD[tier.tag]: tier})

    def station_capacities(self, gateways: int) -> np.ndarray:
        """Returns the (W+1,) array of BH capacities (index 0: satellite)."""
        if isinstance(self.gateway_capacity, tuple):
            if len(self.gateway_capacity) < gateways:
                raise ValueError("Not enough gateway capacities for the gateways")
            per_gateway = list(self.gateway_capacity[:gateways])
        else:
            per_gateway = [self.gateway_capacity] * gateways
        return np.array([self.satellite_capacity, *per_gateway], dtype=int)


_TIER_FIELD = {TierTag.GROUND: "ground", TierTag.AIR: "air", TierTag.SPACE: "space"}


@dataclass(frozen=True)
class NodeCounts:
    """Number of users (U), TBSs (M), HAPs (L) and gateways (W)."""

    users: int
    tbs: int
    haps: int
    gateways: int

    def __post_init__(self):
        for name in ("users", "tbs", "haps", "gateways"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, Integral):
                raise TypeError("The node counts must be integers")
            if value < 0:
                raise ValueError("The node counts must be non-negative")


@dataclass(frozen=True)
class Subarea:
    """A rectangle of the ground plane hosting a fraction of the users.

    Users are dropped uniformly in `rect`, outside the `exclude` rectangles.
    """

    name: str
    rect: Rectangle
    fraction: float
    exclude: tuple[Rectangle, ...] = ()

    def __post_init__(self):
        if not 0 <= self.fraction <= 1:
            raise ValueError("The user fraction must be between 0 and 1")
        excluded = sum(
            _overlap_area(self.rect, other) for other in self.exclude
        )
        if excluded >= self.rect.area:
            raise ValueError("The excluded rectangles cover the whole subarea")

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Returns (count, 2) uniform points of the subarea (rejection sampling)."""
        points = np.empty((0, 2))
        while points.shape[0] < count:
            batch = max(2 * (count - points.shape[0]), 16)
            x = rng.uniform(self.rect.x_min, self.rect.x_max, batch)
            y = rng.uniform(self.rect.y_min, self.rect.y_max, batch)
            keep = np.ones(batch, dtype=bool)
            for other in self.exclude:
                keep &= ~other.contains(x, y)
            points = np.vstack([points, np.column_stack([x[keep], y[keep]])])
        return points[:count]


def _overlap_area(a: Rectangle, b: Rectangle) -> float:
    width = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    height = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    return max(width, 0.0) * max(height, 0.0)


@dataclass(frozen=True)
class SubareaLayout:
    """The simulation area, the user subareas and the TBS grid.

    TBSs lie on a uniform grid (half-cell margins) inside the subarea
    `tbs_subarea`, the grid being square (3 x 3 for M = 9).
    """

    area: Rectangle
    subareas: tuple[Subarea, ...]
    tbs_subarea: int = 0

    def __post_init__(self):
        if not self.subareas:
            raise ValueError("The layout needs at least one subarea")
        if not math.isclose(
            sum(subarea.fraction for subarea in self.subareas), 1.0, abs_tol=1e-9
        ):
            raise ValueError("The user fractions must sum to 1")
        for subarea in self.subareas:
            rect = subarea.rect
            if not (
                self.area.contains(rect.x_min, rect.y_min)
                and self.area.contains(rect.x_max, rect.y_max)
            ):
                raise ValueError(f"Subarea '{subarea.name}' exceeds the global area")
        if not 0 <= self.tbs_subarea < len(self.subareas):
            raise ValueError("The TBS subarea index is out of range")

    @property
    def fractions(self) -> list[float]:
        """Returns the user fractions of the subareas."""
        return [subarea.fraction for subarea in self.subareas]

    def tbs_grid(self, count: int, height: float) -> list[Position3D]:
        """Returns `count` TBS positions on the grid of the TBS subarea."""
        if count == 0:
            return []
        rect = self.subareas[self.tbs_subarea].rect
        side = math.ceil(math.sqrt(count))
        cell_w = (rect.x_max - rect.x_min) / side
        cell_h = (rect.y_max - rect.y_min) / side
        grid = [
            Position3D(
                rect.x_min + (col + 0.5) * cell_w,
                rect.y_min + (row + 0.5) * cell_h,
                height,
            )
            for row in range(side)
            for col in range(side)
        ]
        return grid[:count]

    def tbs_cell_radius(self, count: int) -> float:
        """Returns half the TBS grid spacing (m), the nominal cell radius."""
        rect = self.subareas[self.tbs_subarea].rect
        side = math.ceil(math.sqrt(max(count, 1)))
        return min(rect.x_max - rect.x_min, rect.y_max - rect.y_min) / side / 2.0

    @staticmethod
    def default() -> "SubareaLayout":
        """The 180 km x 180 km layout with the 40/30/30 % subareas."""
        area = Rectangle.from_km((0, 180), (0, 180))
        urban = Rectangle.from_km((75, 105), (0, 30))
        unserved = Rectangle.from_km((75, 105), (150, 180))
        return SubareaLayout(
            area=area,
            subareas=(
                Subarea("urban-tbs", urban, 0.4),
                Subarea("urban-no-tbs", unserved, 0.3),
                Subarea("rural", area, 0.3, exclude=(urban, unserved)),
            ),
        )


def apportion(total: int, fractions: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment of `total` over `fractions`.

    Ties between equal remainders go to the lower index. The result always
    sums exactly to `total`.
    """
    quotas = [total * fraction for fraction in fractions]
    counts = [int(math.floor(quota)) for quota in quotas]
    remainders = sorted(
        range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i)
    )
    for i in remainders[: total - sum(counts)]:
        counts[i] += 1
    return counts


class Scenario:
    """Represents one network topology.

    Scenarios are immutable: coordinates are exposed as read-only arrays and
    with_haps() returns a new scenario.

    :property users: the user positions (z = 0).
    :property tbs: the TBS positions.
    :property haps: the HAP positions.
    :property satellite: the satellite position.
    :property gateways: the gateway positions.
    :property parameters: the SystemParameters.
    :property seed: the master seed the scenario was generated with.
    """

    def __init__(
        self,
        users: Iterable[Position3D],
        tbs: Iterable[Position3D],
        haps: Iterable[Position3D],
        gateways: Iterable[Position3D],
        parameters: Optional[SystemParameters] = None,
        *,
        layout: Optional[SubareaLayout] = None,
        seed: int = 0,
    ):
        """Constructor for the Scenario class.

        :raises TypeError: if a node is not a Position3D.
        :raises ValueError: if a user is above ground or a HAP is on the ground.
        """
        self._parameters = parameters if parameters is not None else SystemParameters()
        self._users = tuple(users)
        self._tbs = tuple(tbs)
        self._haps = tuple(haps)
        self._gateways = tuple(gateways)
        self._layout = layout
        self._seed = int(seed)

        # Validate the input.
        for node in (*self._users, *self._tbs, *self._haps, *self._gateways):
            if not isinstance(node, Position3D):
                raise TypeError("The nodes must be Position3D instances")
        if any(user.z != 0 for user in self._users):
            raise ValueError("Users must lie on the ground (z = 0)")
        if any(hap.z <= 0 for hap in self._haps):
            raise ValueError("HAPs must fly at a positive altitude")
        satellite = self._parameters.satellite_position
        if self._haps and satellite.z <= max(hap.z for hap in self._haps):
            raise ValueError("The satellite must fly above the HAPs")

        self._coords = {
            TierTag.GROUND: self._array(self._tbs),
            TierTag.AIR: self._array(self._haps),
            TierTag.SPACE: self._array([satellite]),
        }
        self._user_coords = self._array(self._users)
        self._bh_coords = self._array([satellite, *self._gateways])
        self._capacities = self._parameters.station_capacities(len(self._gateways))
        self._capacities.flags.writeable = False

    @staticmethod
    def _array(nodes: Sequence[Position3D]) -> np.ndarray:
        array = np.array([node.as_array() for node in nodes]).reshape(-1, 3)
        array.flags.writeable = False
        return array

    # region Properties

    @property
    def users(self) -> tuple[Position3D, ...]:
        """Returns the user positions."""
        return self._users

    @property
    def tbs(self) -> tuple[Position3D, ...]:
        """Returns the TBS positions."""
        return self._tbs

    @property
    def haps(self) -> tuple[Position3D, ...]:
        """Returns the HAP positions."""
        return self._haps

    @property
    def satellite(self) -> Position3D:
        """Returns the satellite position."""
        return self._parameters.satellite_position

    @property
    def gateways(self) -> tuple[Position3D, ...]:
        """Returns the gateway positions."""
        return self._gateways

    @property
    def parameters(self) -> SystemParameters:
        """Returns the system parameters."""
        return self._parameters

    @property
    def layout(self) -> Optional[SubareaLayout]:
        """Returns the layout the users were dropped with (if any)."""
        return self._layout

    @property
    def seed(self) -> int:
        """Returns the master seed."""
        return self._seed

    @property
    def user_count(self) -> int:
        """Returns U."""
        return len(self._users)

    @property
    def tbs_count(self) -> int:
        """Returns M."""
        return len(self._tbs)

    @property
    def hap_count(self) -> int:
        """Returns L."""
        return len(self._haps)

    @property
    def gateway_count(self) -> int:
        """Returns W."""
        return len(self._gateways)

    @property
    def user_coords(self) -> np.ndarray:
        """Returns the (U, 3) user coordinates."""
        return self._user_coords

    @property
    def bh_station_coords(self) -> np.ndarray:
        """Returns the (W+1, 3) BH station coordinates (row 0: satellite)."""
        return self._bh_coords

    @property
    def station_capacities(self) -> np.ndarray:
        """Returns the (W+1,) maximum number of HAPs per BH station."""
        return self._capacities

    # Shortcuts to the most used parameters

    @property
    def bh_bandwidth(self) -> float:
        """Returns B_0 (Hz)."""
        return self._parameters.bh_bandwidth

    @property
    def bh_power(self) -> float:
        """Returns P_0 (W)."""
        return self._parameters.bh_power

    @property
    def noise_psd(self) -> float:
        """Returns N_0 (W/Hz)."""
        return self._parameters.noise_psd

    # endregion

    def tier(self, tag: TierTag) -> Tier:
        """Returns the constants of a tier."""
        return self._parameters.tier(tag)

    def station_coords(self, tag: TierTag) -> np.ndarray:
        """Returns the (S, 3) station coordinates of a tier."""
        return self._coords[tag]

    def station_count(self, tag: TierTag) -> int:
        """Returns the number of stations of a tier (1 for the space tier)."""
        return self._coords[tag].shape[0]

    def tbs_cell_radius(self) -> float:
        """Returns the nominal TBS cell radius (m)."""
        layout = self._layout if self._layout is not None else SubareaLayout.default()
        return layout.tbs_cell_radius(self.tbs_count)

    def area(self) -> Rectangle:
        """Returns the simulation area."""
        layout = self._layout if self._layout is not None else SubareaLayout.default()
        return layout.area

    def with_haps(self, positions: Iterable[Position3D]) -> "Scenario":
        """Returns a new scenario with the HAPs moved to `positions`.

        :raises ValueError: if the number of HAPs changes.
        """
        positions = tuple(positions)
        if len(positions) != self.hap_count:
            raise ValueError("The number of HAPs cannot change")
        return Scenario(
            self._users,
            self._tbs,
            positions,
            self._gateways,
            self._parameters,
            layout=self._layout,
            seed=self._seed,
        )

    def with_parameters(self, parameters: SystemParameters) -> "Scenario":
        """Returns a new scenario with the same nodes and other parameters."""
        return Scenario(
            self._users,
            self._tbs,
            self._haps,
            self._gateways,
            parameters,
            layout=self._layout,
            seed=self._seed,
        )

    def to_frame(self) -> pd.DataFrame:
        """Returns the node table (kind, index, x, y, z) in meters."""
        rows = []
        for kind, nodes in (
            ("user", self._users),
            ("tbs", self._tbs),
            ("hap", self._haps),
            ("satellite", (self.satellite,)),
            ("gateway", self._gateways),
        ):
            rows.extend(
                (kind, index, node.x, node.y, node.z) for index, node in enumerate(nodes)
            )
        return pd.DataFrame(rows, columns=["kind", "index", "x", "y", "z"])

    def __str__(self) -> str:
        return (
            f"{type(self).__name__} #{self.seed}: U={self.user_count}, "
            f"M={self.tbs_count}, L={self.hap_count}, W={self.gateway_count}"
        )

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(users={self._users!r},tbs={self._tbs!r},"
            f"haps={self._haps!r},gateways={self._gateways!r},"
            f"parameters={self._parameters!r},seed={self._seed})"
        )

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.__repr__() == other.__repr__()

    def __hash__(self) -> int:
        return hash((type(self), self.__repr__()))


def generate_scenario(
    layout: SubareaLayout,
    counts: NodeCounts,
    seed: int,
    parameters: Optional[SystemParameters] = None,
) -> Scenario:
    """Generates a reproducible random scenario.

    Users are apportioned over the subareas (largest remainder) and dropped
    uniformly inside each of them; TBSs lie on the grid of the TBS subarea,
    HAPs at their initial positions and gateways at the configured positions
    (the area corners by default).

    :raises ValueError: if the parameters list fewer HAP/gateway positions
        than requested.
    """
    parameters = parameters if parameters is not None else SystemParameters()
    if counts.haps > len(parameters.hap_initial_positions):
        raise ValueError(
            f"{counts.haps} HAPs requested, only "
            f"{len(parameters.hap_initial_positions)} initial positions available"
        )
    if counts.gateways > len(parameters.gateway_positions):
        raise ValueError(
            f"{counts.gateways} gateways requested, only "
            f"{len(parameters.gateway_positions)} positions available"
        )

    stream = rng_streams.stream(seed, rng_streams.USERS)
    users: list[Position3D] = []
    for subarea, count in zip(
        layout.subareas, apportion(counts.users, layout.fractions)
    ):
        users.extend(Position3D(x, y, 0.0) for x, y in subarea.sample(count, stream))

    scenario = Scenario(
        users,
        layout.tbs_grid(counts.tbs, parameters.tbs_height),
        parameters.hap_initial_positions[: counts.haps],
        parameters.gateway_positions[: counts.gateways],
        parameters,
        layout=layout,
        seed=seed,
    )
    _LOGGER.debug("Scenario generated: %s", scenario)
    return scenario
