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
This module contains the channel model: deterministic link budgets (path loss
and environment attenuation) and the small-scale fading samplers producing
the front-haul (FH) and back-haul (BH) channel gains.

All the gains are linear power gains. Fading is constant over the subcarriers
of a resource block (RB) and i.i.d. over RBs.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, Optional

import numpy as np
import pandas as pd

from .enums import FadingKind, TierTag
from .exceptions import HapNetGeometryError
from .geometry import horizontal_distances, pairwise_distances

if TYPE_CHECKING:  # pragma: no cover
    from .scenario import Scenario

_LOGGER = logging.getLogger(__package__)

SPEED_OF_LIGHT = 299_792_458.0  # m/s
MIN_LINK_DISTANCE = 1.0  # m


# region Fading


class FadingModel:
    """Represents a small-scale fading distribution of the power gain F.

    Use the rayleigh(), rician() and shadowed_rician() factories.

    :property kind: the fading kind (FadingKind).
    :property kappa: the Rician factor (linear), RICIAN only.
    :property omegas: (LoS average power, half multipath average power,
        Nakagami shape), SHADOWED_RICIAN only.
    """

    def __init__(
        self,
        kind: FadingKind,
        *,
        kappa: Optional[float] = None,
        omegas: Optional[tuple[float, float, float]] = None,
    ):
        """Constructor for the FadingModel class.

        :raises TypeError: if the kind is not a valid FadingKind.
        :raises ValueError: if the parameters of the kind are missing or invalid.
        """
        if not isinstance(kind, FadingKind):
            raise TypeError("The fading kind must be a valid FadingKind")

        if kind == FadingKind.RICIAN:
            if kappa is None or not math.isfinite(kappa) or kappa < 0:
                raise ValueError("The Rician factor must be a non-negative number")
        if kind == FadingKind.SHADOWED_RICIAN:
            if omegas is None or len(omegas) != 3 or min(omegas) <= 0:
                raise ValueError("The shadowed Rician parameters must be positive")

        self._kind = kind
        self._kappa = float(kappa) if kind == FadingKind.RICIAN else None
        self._omegas = (
            tuple(float(value) for value in omegas)
            if kind == FadingKind.SHADOWED_RICIAN and omegas is not None
            else None
        )

    @property
    def kind(self) -> FadingKind:
        """Returns the fading kind."""
        return self._kind

    @property
    def kappa(self) -> Optional[float]:
        """Returns the Rician factor (None if not Rician)."""
        return self._kappa

    @property
    def omegas(self) -> Optional[tuple]:
        """Returns the shadowed Rician parameters (None if not shadowed Rician)."""
        return self._omegas

    def mean(self) -> float:
        """Returns the analytic first moment E{F}."""
        if self._kind == FadingKind.SHADOWED_RICIAN:
            omega_los, omega_half_scatter, _ = self._omegas  # type: ignore
            return omega_los + 2.0 * omega_half_scatter
        return 1.0

    def sample(self, rng: np.random.Generator, size=None):
        """Draws fading power gains, see sample_fading()."""
        return sample_fading(self, rng, size)

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}({self.kind},kappa={self.kappa},"
            f"omegas={self.omegas})"
        )

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.__repr__() == other.__repr__()

    def __hash__(self) -> int:
        return hash((type(self), self.__repr__()))

    @staticmethod
    def rayleigh() -> "FadingModel":
        """Rayleigh fading, exponential power with unit mean."""
        return FadingModel(FadingKind.RAYLEIGH)

    @staticmethod
    def rician(kappa: float) -> "FadingModel":
        """Rician fading with LoS/scatter power ratio kappa, unit mean power."""
        return FadingModel(FadingKind.RICIAN, kappa=kappa)

    @staticmethod
    def shadowed_rician(
        omega_los: float, omega_half_scatter: float, nakagami_shape: float
    ) -> "FadingModel":
        """Shadowed Rician fading (Nakagami-distributed LoS amplitude)."""
        return FadingModel(
            FadingKind.SHADOWED_RICIAN,
            omegas=(omega_los, omega_half_scatter, nakagami_shape),
        )


def sample_fading(model: FadingModel, rng: np.random.Generator, size=None):
    """Draws the fading power gain F of a link.

    - Rayleigh: exponential with unit mean.
    - Rician: |LoS + scatter|^2 with LoS power kappa/(kappa+1) and scatter
      power 1/(kappa+1).
    - Shadowed Rician: LoS amplitude with Nakagami(shape, Omega_0) distribution
      plus a complex Gaussian scatter of power 2 * Omega_1.

    :param model: the fading model.
    :param rng: the random stream (owned by the caller).
    :param size: numpy output shape (None for a scalar).
    """
    if model.kind == FadingKind.RAYLEIGH:
        return rng.exponential(1.0, size)

    if model.kind == FadingKind.RICIAN:
        kappa = model.kappa
        los = math.sqrt(kappa / (kappa + 1.0))  # type: ignore[operator]
        sigma = math.sqrt(0.5 / (kappa + 1.0))  # type: ignore[operator]
        real = los + sigma * rng.standard_normal(size)
        imag = sigma * rng.standard_normal(size)
        return real * real + imag * imag

    omega_los, omega_half_scatter, shape = model.omegas  # type: ignore[misc]
    # The squared Nakagami amplitude is Gamma(shape, omega / shape).
    los = np.sqrt(rng.gamma(shape, omega_los / shape, size))
    sigma = math.sqrt(omega_half_scatter)
    real = los + sigma * rng.standard_normal(size)
    imag = sigma * rng.standard_normal(size)
    return real * real + imag * imag


# endregion

# region Link budget


def path_loss(d, f):
    """Free-space propagation factor (C / (4 pi d f))^2.

    Works on scalars and numpy arrays.

    :param d: the link distance (m), strictly positive.
    :param f: the carrier frequency (Hz), strictly positive.

    :raises HapNetGeometryError: if a distance is zero or negative.
    :raises ValueError: if a frequency is zero or negative.
    """
    d = np.asarray(d, dtype=float)
    f = np.asarray(f, dtype=float)
    if np.any(d <= 0):
        raise HapNetGeometryError("Singular link: the distance must be positive")
    if np.any(f <= 0):
        raise ValueError("The carrier frequency must be positive")

    result = (SPEED_OF_LIGHT / (4.0 * math.pi * d * f)) ** 2
    return float(result) if result.ndim == 0 else result


def attenuation_gain(tier: TierTag, d, z, chi: float):
    """Environment attenuation factor A of a link.

    Ground links have A = 1; air and space links have
    A = 10^(3 d chi / (10 z)), z being the HAP (or satellite) altitude.

    :raises HapNetGeometryError: if an air/space altitude is not positive.
    """
    d = np.asarray(d, dtype=float)
    if tier == TierTag.GROUND:
        result = np.ones_like(d)
    else:
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0):
            raise HapNetGeometryError(
                "The altitude of an air/space station must be positive"
            )
        result = 10.0 ** (3.0 * d * chi / (10.0 * z))
    return float(result) if result.ndim == 0 else result


def _fh_link_budget(scenario: "Scenario", tier: TierTag) -> np.ndarray:
    """Returns the (S, U) deterministic part path_loss * A of the FH gains."""
    stations = scenario.station_coords(tier)
    users = scenario.user_coords
    if stations.shape[0] == 0 or users.shape[0] == 0:
        return np.zeros((stations.shape[0], users.shape[0]))

    d = np.maximum(pairwise_distances(stations, users), MIN_LINK_DISTANCE)
    settings = scenario.tier(tier)
    altitudes = stations[:, 2:3]
    return path_loss(d, settings.carrier_frequency) * attenuation_gain(
        tier, d, altitudes, scenario.parameters.attenuation_factor
    )


def _bh_link_budget(scenario: "Scenario") -> np.ndarray:
    """Returns the (W+1, L) deterministic part of the BH gains.

    Row 0 is the satellite (space-tier attenuation with the satellite altitude),
    rows 1..W are the gateways (air-tier attenuation with the HAP altitude).
    """
    parameters = scenario.parameters
    stations = scenario.bh_station_coords
    haps = scenario.station_coords(TierTag.AIR)
    if haps.shape[0] == 0:
        return np.zeros((stations.shape[0], 0))

    d = np.maximum(pairwise_distances(stations, haps), MIN_LINK_DISTANCE)
    budget = path_loss(d, parameters.bh_carrier)
    attenuation = np.empty_like(d)
    attenuation[0] = attenuation_gain(
        TierTag.SPACE, d[0], stations[0, 2], parameters.attenuation_factor
    )
    if d.shape[0] > 1:
        attenuation[1:] = attenuation_gain(
            TierTag.AIR, d[1:], haps[None, :, 2], parameters.attenuation_factor
        )
    return budget * attenuation


def bh_fading_model(scenario: "Scenario", w: int) -> FadingModel:
    """Returns the Rician model of the BH link class of station w."""
    parameters = scenario.parameters
    return FadingModel.rician(
        parameters.bh_kappa_satellite if w == 0 else parameters.bh_kappa_gateway
    )


def fh_gain(
    scenario: "Scenario",
    tier: TierTag,
    s: int,
    u: int,
    n: int,
    rng: Optional[np.random.Generator] = None,
    *,
    fading: Optional[float] = None,
) -> float:
    """FH channel gain h = path_loss(d, f_c) * A * F of one (station, user, RB).

    :param fading: pins F to a value instead of sampling it from the tier model.

    :raises IndexError: if an index is out of range.
    :raises ValueError: if neither rng nor fading are provided.
    """
    settings = scenario.tier(tier)
    if not 0 <= n < settings.rb_count:
        raise IndexError("RB index out of range")
    if not 0 <= s < scenario.station_count(tier):
        raise IndexError("Station index out of range")
    if not 0 <= u < scenario.user_count:
        raise IndexError("User index out of range")

    if fading is None:
        if rng is None:
            raise ValueError("Either a random stream or a pinned fading is needed")
        fading = float(sample_fading(settings.fading, rng))

    station = scenario.station_coords(tier)[s : s + 1]
    d = max(
        float(pairwise_distances(station, scenario.user_coords[u : u + 1])[0, 0]),
        MIN_LINK_DISTANCE,
    )
    attenuation = attenuation_gain(
        tier, d, station[0, 2], scenario.parameters.attenuation_factor
    )
    return path_loss(d, settings.carrier_frequency) * attenuation * fading


def bh_gain(
    scenario: "Scenario",
    w: int,
    l: int,  # noqa: E741
    rng: Optional[np.random.Generator] = None,
    *,
    fading: Optional[float] = None,
) -> float:
    """BH channel gain g = path_loss(d, f_c) * A * F between station w and HAP l.

    w = 0 is the satellite, w = 1..W the gateways.

    :raises IndexError: if an index is out of range.
    """
    if not 0 <= w <= scenario.gateway_count:
        raise IndexError("BH station index out of range")
    if not 0 <= l < scenario.hap_count:
        raise IndexError("HAP index out of range")

    if fading is None:
        if rng is None:
            raise ValueError("Either a random stream or a pinned fading is needed")
        fading = float(sample_fading(bh_fading_model(scenario, w), rng))

    return float(_bh_link_budget(scenario)[w, l]) * fading


def hap_coverage(scenario: "Scenario") -> np.ndarray:
    """Returns the (L, U) mask of the users inside each HAP coverage area."""
    haps = scenario.station_coords(TierTag.AIR)
    return (
        horizontal_distances(haps, scenario.user_coords)
        <= scenario.parameters.coverage_radius
    )


# endregion

# region Realizations


class ChannelRealization:
    """Represents the channel gains of one fading draw.

    :property fh: dict TierTag -> array (S, U, N^S) of FH gains h^S_{su,n}.
    :property bh: array (W+1, L) of BH gains g_{wl} (row 0: satellite).
    :property is_average: True if the fading has been replaced by its mean
        (long-term statistics, identical RBs).
    """

    def __init__(
        self,
        fh: dict[TierTag, np.ndarray],
        bh: np.ndarray,
        *,
        is_average: bool = False,
    ):
        """Constructor for the ChannelRealization class.

        :raises ValueError: if a gain is not positive and finite.
        """
        for tag in TierTag:
            if tag not in fh:
                raise ValueError(f"Missing FH gains for the {tag.value} tier")
        for gains in (*fh.values(), bh):
            if gains.size and not (np.all(np.isfinite(gains)) and np.all(gains > 0)):
                raise ValueError("Channel gains must be positive and finite")

        self._fh = {tag: self._freeze(fh[tag]) for tag in TierTag}
        self._bh = self._freeze(bh)
        self._is_average = is_average

    @staticmethod
    def _freeze(array: np.ndarray) -> np.ndarray:
        array = np.asarray(array, dtype=float)
        if array.flags.writeable:
            array = array.copy()
            array.flags.writeable = False
        return array

    @property
    def fh(self) -> dict[TierTag, np.ndarray]:
        """Returns the FH gains per tier (read-only arrays)."""
        return dict(self._fh)

    @property
    def bh(self) -> np.ndarray:
        """Returns the BH gains (read-only array)."""
        return self._bh

    @property
    def is_average(self) -> bool:
        """True for average-statistics realizations."""
        return self._is_average

    def fh_gain(self, tier: TierTag, s: int, u: int, n: int) -> float:
        """Returns h^S_{su,n}."""
        return float(self._fh[tier][s, u, n])

    def bh_gain(self, w: int, l: int) -> float:  # noqa: E741
        """Returns g_{wl}."""
        return float(self._bh[w, l])

    def to_frame(self) -> pd.DataFrame:
        """Returns a flat table (tier, s, u, n, gain) followed by the BH rows.

        BH rows use tier "backhaul", s = station w, u = HAP l and n = -1.
        """
        frames = []
        for tag in TierTag:
            gains = self._fh[tag]
            s_idx, u_idx, n_idx = np.indices(gains.shape)
            frames.append(
                pd.DataFrame(
                    {
                        "tier": tag.value,
                        "s": s_idx.ravel(),
                        "u": u_idx.ravel(),
                        "n": n_idx.ravel(),
                        "gain": gains.ravel(),
                    }
                )
            )
        w_idx, l_idx = np.indices(self._bh.shape)
        frames.append(
            pd.DataFrame(
                {
                    "tier": "backhaul",
                    "s": w_idx.ravel(),
                    "u": l_idx.ravel(),
                    "n": -1,
                    "gain": self._bh.ravel(),
                }
            )
        )
        return pd.concat(frames, ignore_index=True)

    def __repr__(self) -> str:
        shapes = ",".join(f"{tag.value}={self._fh[tag].shape}" for tag in TierTag)
        return (
            f"{type(self).__name__}({shapes},bh={self._bh.shape},"
            f"is_average={self._is_average})"
        )


def draw_realization(
    scenario: "Scenario", rng: np.random.Generator
) -> ChannelRealization:
    """Draws the FH gains of every (station, user, RB) and the BH gains.

    The draw order (ground, air, space, back-haul) is fixed, so identical
    streams give identical realizations.
    """
    fh = {}
    for tag in TierTag:
        budget = _fh_link_budget(scenario, tag)
        settings = scenario.tier(tag)
        fading = sample_fading(
            settings.fading, rng, (*budget.shape, settings.rb_count)
        )
        fh[tag] = budget[:, :, None] * fading

    budget = _bh_link_budget(scenario)
    bh = np.empty_like(budget)
    for w in range(budget.shape[0]):
        bh[w] = budget[w] * sample_fading(
            bh_fading_model(scenario, w), rng, budget.shape[1]
        )

    _LOGGER.debug("Channel realization drawn for %s", scenario)
    return ChannelRealization(fh, bh)


def average_realization(scenario: "Scenario") -> ChannelRealization:
    """Returns the average-statistics gains (fading replaced by its mean)."""
    fh = {}
    for tag in TierTag:
        settings = scenario.tier(tag)
        budget = _fh_link_budget(scenario, tag) * settings.fading.mean()
        fh[tag] = np.repeat(budget[:, :, None], settings.rb_count, axis=2)

    budget = _bh_link_budget(scenario)
    bh = np.array(
        [
            budget[w] * bh_fading_model(scenario, w).mean()
            for w in range(budget.shape[0])
        ]
    ).reshape(budget.shape)
    return ChannelRealization(fh, bh, is_average=True)


# endregion
