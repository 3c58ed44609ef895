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
This module contains the association and power types and the rate model:
FH rates with inter-cell interference, BH rates, utilities and the
constraint checks every solver output must pass.

Only the ground tier suffers inter-cell interference: HAP and satellite beams
are assumed orthogonal, so their interference term is always 0.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping, Optional, Union

import numpy as np
import pandas as pd

from .channel import ChannelRealization
from .enums import Constraint, TierTag, UtilityKind
from .exceptions import HapNetSolverError

if TYPE_CHECKING:
    from .scenario import Scenario

_LOGGER = logging.getLogger(__package__)

POWER_TOLERANCE = 1e-9  # W
RATE_TOLERANCE = 1e-9  # relative
DEGENERATE_GAIN = 1e-30
MAX_EXPONENT = 1000.0

TIER_ORDER = (TierTag.GROUND, TierTag.AIR, TierTag.SPACE)


# region Association


@dataclass(frozen=True)
class FhLink:
    """One FH association ε^S_{su,n} = 1: station s of a tier serves user u on RB n."""

    tier: TierTag
    station: int
    user: int
    rb: int

    def __post_init__(self):
        if not isinstance(self.tier, TierTag):
            raise TypeError("The tier must be a valid TierTag")
        for value in (self.station, self.user, self.rb):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError("Link indexes must be integers")
            if value < 0:
                raise ValueError("Link indexes must be non-negative")
        for name in ("station", "user", "rb"):
            object.__setattr__(self, name, int(getattr(self, name)))

    def __lt__(self, other: "FhLink") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> tuple[int, int, int, int]:
        """Deterministic ordering key (tier, station, RB, user)."""
        return (TIER_ORDER.index(self.tier), self.station, self.rb, self.user)

    def __str__(self) -> str:
        return f"{self.tier.value}:{self.station} -> user {self.user} on RB {self.rb}"


class FhLinkSet(set):
    """Represents a set of FH links.

    :param links: the links to add to the set (optional).

    :method add: adds a FhLink object to the set, validating its type.

    :raises TypeError: if the item is not of type FhLink.
    """

    def __init__(self, links=None):
        super().__init__()

        if links is not None:
            for link in links:
                self.add(link)

    def add(self, item):
        if not isinstance(item, FhLink):
            raise TypeError("Item must be of type 'FhLink'")
        super().add(item)

    def sorted(self) -> list[FhLink]:
        """Returns the links in deterministic order."""
        return sorted(self, key=FhLink.sort_key)


class Association:
    """Represents the FH association ε and the BH association δ.

    :property fh: the FhLinkSet of active FH links.
    :property bh: dict HAP l -> BH station w (0: satellite, 1..W: gateways).
    """

    def __init__(
        self,
        fh: Optional[Iterable[FhLink]] = None,
        bh: Optional[Mapping[int, int]] = None,
    ):
        self._fh = FhLinkSet(fh)
        self._bh = {int(l): int(w) for l, w in (bh or {}).items()}

    @property
    def fh(self) -> FhLinkSet:
        """Returns the FH links."""
        return self._fh

    @property
    def bh(self) -> dict[int, int]:
        """Returns the BH association (HAP -> station)."""
        return dict(self._bh)

    def links(self, tier: Optional[TierTag] = None) -> list[FhLink]:
        """Returns the links (of a tier, if given) in deterministic order."""
        return [
            link for link in self._fh.sorted() if tier is None or link.tier == tier
        ]

    def link_of(self, user: int) -> Optional[FhLink]:
        """Returns the link serving a user, None if the user is unserved."""
        for link in self.links():
            if link.user == user:
                return link
        return None

    def served_users(self) -> list[int]:
        """Returns the sorted list of served users."""
        return sorted({link.user for link in self._fh})

    def with_bh(self, bh: Mapping[int, int]) -> "Association":
        """Returns a copy with another BH association."""
        return Association(self._fh, bh)

    def to_frame(self) -> pd.DataFrame:
        """Returns the FH table (user, tier, station, rb) sorted by user."""
        frame = pd.DataFrame(
            [(l.user, l.tier.value, l.station, l.rb) for l in self.links()],
            columns=["user", "tier", "station", "rb"],
        )
        return frame.sort_values("user", kind="stable").reset_index(drop=True)

    def bh_frame(self) -> pd.DataFrame:
        """Returns the BH table (hap, station) sorted by HAP."""
        return pd.DataFrame(
            sorted(self._bh.items()), columns=["hap", "station"]
        )

    def __str__(self) -> str:
        return (
            f"{type(self).__name__}: {len(self._fh)} FH links, "
            f"{len(self._bh)} BH links"
        )

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(fh={self.links()!r},"
            f"bh={sorted(self._bh.items())!r})"
        )

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.__repr__() == other.__repr__()

    def __hash__(self) -> int:
        return hash((type(self), self.__repr__()))


class PowerAllocation(dict):
    """Represents the transmit powers P^S_{su,n} (W), keyed by FhLink.

    Missing links have zero power.

    :raises TypeError: if a key is not a FhLink.
    :raises ValueError: if a power is negative or not finite.
    """

    def __init__(self, powers=None):
        super().__init__()

        if powers is not None:
            for link, value in dict(powers).items():
                self[link] = value

    def __setitem__(self, key, value):
        if not isinstance(key, FhLink):
            raise TypeError("Key must be of type 'FhLink'")
        value = float(value)
        if not np.isfinite(value) or value < 0:
            raise ValueError("Powers must be non-negative and finite")
        super().__setitem__(key, value)

    def power(self, link: FhLink) -> float:
        """Returns the power of a link (0 if missing)."""
        return self.get(link, 0.0)

    def station_totals(self) -> dict[tuple[TierTag, int], float]:
        """Returns the total power per (tier, station)."""
        totals: dict[tuple[TierTag, int], float] = defaultdict(float)
        for link, value in self.items():
            totals[(link.tier, link.station)] += value
        return dict(totals)

    @staticmethod
    def from_arrays(
        links: list[FhLink], values: Union[np.ndarray, list[float]]
    ) -> "PowerAllocation":
        """Builds an allocation from parallel lists of links and powers."""
        return PowerAllocation(
            {link: max(float(value), 0.0) for link, value in zip(links, values)}
        )


# endregion

# region Rates


def shannon_rate(bandwidth, signal, interference_plus_noise):
    """Returns B log2(1 + S / (I + N)) (bit/s), vectorized."""
    return bandwidth * np.log2(1.0 + np.asarray(signal) / interference_plus_noise)


def intercell_interference(
    link: FhLink,
    assoc: Association,
    power: Mapping[FhLink, float],
    realization: ChannelRealization,
) -> float:
    """Returns the inter-cell interference (W) at the user of a link.

    The sum runs over the other TBSs transmitting on the same RB. Air and
    space links see no interference.
    """
    if link.tier != TierTag.GROUND:
        return 0.0
    gains = realization.fh[TierTag.GROUND]
    return float(
        sum(
            power.get(other, 0.0) * gains[other.station, link.user, link.rb]
            for other in assoc.fh
            if other.tier == TierTag.GROUND
            and other.rb == link.rb
            and other.station != link.station
        )
    )


def fh_rate(
    scenario: "Scenario",
    link: FhLink,
    assoc: Association,
    power: Mapping[FhLink, float],
    realization: ChannelRealization,
) -> float:
    """Returns the FH rate (bit/s) of a link, 0 if the link is not associated."""
    if link not in assoc.fh:
        return 0.0
    tier = scenario.tier(link.tier)
    noise = scenario.noise_psd * tier.rb_bandwidth
    interference = intercell_interference(link, assoc, power, realization)
    gain = realization.fh_gain(link.tier, link.station, link.user, link.rb)
    return float(
        shannon_rate(
            tier.rb_bandwidth, power.get(link, 0.0) * gain, interference + noise
        )
    )


def bh_rate_matrix(
    scenario: "Scenario", realization: ChannelRealization
) -> np.ndarray:
    """Returns the (W+1, L) matrix of the BH rates R̄_{wl} every link would get."""
    noise = scenario.noise_psd * scenario.bh_bandwidth
    return shannon_rate(
        scenario.bh_bandwidth, scenario.bh_power * realization.bh, noise
    )


def bh_rate(
    scenario: "Scenario",
    w: int,
    l: int,  # noqa: E741
    assoc: Association,
    realization: ChannelRealization,
) -> float:
    """Returns the BH rate (bit/s) from station w to HAP l, 0 if not associated."""
    if assoc.bh.get(l) != w:
        return 0.0
    return float(bh_rate_matrix(scenario, realization)[w, l])


def active_bh_rates(
    scenario: "Scenario", assoc: Association, realization: ChannelRealization
) -> np.ndarray:
    """Returns the (L,) BH rate of every HAP over its active BH link.

    HAPs without a BH link get 0.
    """
    rates = bh_rate_matrix(scenario, realization)
    active = np.zeros(scenario.hap_count)
    for l, w in assoc.bh.items():
        if 0 <= l < scenario.hap_count and 0 <= w < rates.shape[0]:
            active[l] = rates[w, l]
    return active


def bh_power_caps(
    scenario: "Scenario",
    assoc: Association,
    realization: ChannelRealization,
    bh_rates: Optional[np.ndarray] = None,
    bandwidth: Optional[float] = None,
) -> tuple[dict[int, float], dict[FhLink, float], float]:
    """Returns the per-user BH power caps of the HAP links.

    With w = 2^(R̄_l / B) a HAP link with k RBs of the same user must keep
    k (1 + SNR) <= w / k, i.e. P <= (w / k^2 - 1) N / h.

    :param bh_rates: (L,) active BH rates, computed from the association if
        not given.
    :param bandwidth: the exponent bandwidth B, B^L by default.

    :returns: (w per HAP, cap per HAP link, B).
    """
    air = scenario.tier(TierTag.AIR)
    bandwidth = air.rb_bandwidth if bandwidth is None else float(bandwidth)
    if bh_rates is None:
        bh_rates = active_bh_rates(scenario, assoc, realization)
    noise = scenario.noise_psd * air.rb_bandwidth

    omega = {
        l: float(np.exp2(min(rate / bandwidth, MAX_EXPONENT)))
        for l, rate in enumerate(bh_rates)
    }
    links = [
        link
        for link in assoc.links(TierTag.AIR)
        if _link_in_range(scenario, link)
    ]
    per_user: Counter = Counter((link.station, link.user) for link in links)

    caps = {}
    for link in links:
        k = per_user[(link.station, link.user)]
        gain = realization.fh_gain(TierTag.AIR, link.station, link.user, link.rb)
        snr_cap = max(omega.get(link.station, 1.0) / (k * k) - 1.0, 0.0)
        caps[link] = snr_cap * noise / gain if gain > DEGENERATE_GAIN else 0.0
    return omega, caps, bandwidth


def link_rates(
    scenario: "Scenario",
    links: list[FhLink],
    power: Mapping[FhLink, float],
    realization: ChannelRealization,
) -> np.ndarray:
    """Returns the rates of `links` (vectorized fh_rate, links assumed valid)."""
    rates = np.zeros(len(links))
    for tag in TierTag:
        index = [k for k, link in enumerate(links) if link.tier == tag]
        if not index:
            continue
        tier = scenario.tier(tag)
        gains = realization.fh[tag]
        s = np.array([links[k].station for k in index])
        u = np.array([links[k].user for k in index])
        n = np.array([links[k].rb for k in index])
        p = np.array([power.get(links[k], 0.0) for k in index])
        interference = np.zeros(len(index))
        if tag == TierTag.GROUND:
            grid = np.zeros((gains.shape[0], tier.rb_count))
            np.add.at(grid, (s, n), p)
            cross = gains[:, u, n] * grid[:, n]
            cross[s, np.arange(len(index))] = 0.0
            interference = cross.sum(axis=0)
        rates[index] = shannon_rate(
            tier.rb_bandwidth,
            p * gains[s, u, n],
            interference + scenario.noise_psd * tier.rb_bandwidth,
        )
    return rates


def utility(
    rates: Union["RateReport", Iterable[float]], kind: UtilityKind
) -> float:
    """Returns the MSU (sum) or MMU (minimum) utility of the user rates.

    :raises HapNetSolverError: if there are no users.
    """
    values = np.asarray(
        rates.user_rates if isinstance(rates, RateReport) else list(rates),
        dtype=float,
    )
    if values.size == 0:
        raise HapNetSolverError("The utility of an empty user set is undefined")
    if kind == UtilityKind.MSU:
        return float(values.sum())
    return float(values.min())


# endregion

# region Feasibility


@dataclass(frozen=True)
class Violation:
    """A violated constraint, with a human readable description."""

    constraint: Constraint
    message: str

    def __str__(self) -> str:
        return f"{self.constraint.value}: {self.message}"


def _link_in_range(scenario: "Scenario", link: FhLink) -> bool:
    return (
        link.station < scenario.station_count(link.tier)
        and link.user < scenario.user_count
        and link.rb < scenario.tier(link.tier).rb_count
    )


def check_feasibility(
    scenario: "Scenario",
    assoc: Association,
    power: Mapping[FhLink, float],
    realization: ChannelRealization,
    omega_bandwidth: Optional[float] = None,
) -> list[Violation]:
    """Checks every constraint of the formulation on (assoc, power).

    Returns the list of violations, empty iff the pair is feasible. Power
    checks use an absolute tolerance of 1e-9 W, rate checks a relative one
    of 1e-9.

    :param omega_bandwidth: the bandwidth of the BH cap exponent, B^L by
        default.
    """
    violations: list[Violation] = []

    # Links must exist in the scenario.
    valid = [link for link in assoc.fh if _link_in_range(scenario, link)]
    for link in assoc.fh:
        if not _link_in_range(scenario, link):
            violations.append(
                Violation(Constraint.LINK_RANGE, f"Link {link} is out of range")
            )

    # One link per user, one user per (station, RB).
    for user, count in sorted(Counter(link.user for link in assoc.fh).items()):
        if count > 1:
            violations.append(
                Violation(
                    Constraint.USER_EXCLUSIVITY, f"User {user} has {count} FH links"
                )
            )
    slots = Counter((link.tier, link.station, link.rb) for link in assoc.fh)
    for (tag, station, rb), count in slots.items():
        if count > 1:
            violations.append(
                Violation(
                    Constraint.RB_EXCLUSIVITY,
                    f"{tag.value}:{station} serves {count} users on RB {rb}",
                )
            )

    # Power only on associated links, within the station budgets.
    for link, value in power.items():
        if value > POWER_TOLERANCE and link not in assoc.fh:
            violations.append(
                Violation(
                    Constraint.POWER_COUPLING,
                    f"{value:g} W on the unassociated link {link}",
                )
            )
    totals: dict[tuple[TierTag, int], float] = defaultdict(float)
    for link, value in power.items():
        totals[(link.tier, link.station)] += value
    for (tag, station), total in sorted(
        totals.items(), key=lambda item: (TIER_ORDER.index(item[0][0]), item[0][1])
    ):
        budget = scenario.tier(tag).peak_power
        if total > budget + POWER_TOLERANCE:
            violations.append(
                Violation(
                    Constraint.POWER_BUDGET,
                    f"{tag.value}:{station} transmits {total:g} W > {budget:g} W",
                )
            )

    # Exactly one BH link per HAP, within the station capacities.
    capacities = scenario.station_capacities
    bh = assoc.bh
    for l in range(scenario.hap_count):  # noqa: E741
        if l not in bh or not 0 <= bh[l] < capacities.size:
            violations.append(
                Violation(Constraint.BACKHAUL_SINGLE, f"HAP {l} has no BH link")
            )
    for l in bh:  # noqa: E741
        if not 0 <= l < scenario.hap_count:
            violations.append(
                Violation(Constraint.BACKHAUL_SINGLE, f"Unknown HAP {l} in BH links")
            )
    for w, count in sorted(Counter(bh.values()).items()):
        if 0 <= w < capacities.size and count > capacities[w]:
            violations.append(
                Violation(
                    Constraint.BACKHAUL_CAPACITY,
                    f"Station {w} backhauls {count} HAPs > {capacities[w]}",
                )
            )

    # FH load of every HAP within its BH rate.
    air = [link for link in valid if link.tier == TierTag.AIR]
    if air:
        load = np.zeros(scenario.hap_count)
        np.add.at(
            load,
            [link.station for link in air],
            link_rates(scenario, air, power, realization),
        )
        capacity = active_bh_rates(scenario, assoc, realization)
        for l in range(scenario.hap_count):  # noqa: E741
            if load[l] > capacity[l] * (1 + RATE_TOLERANCE) + RATE_TOLERANCE:
                violations.append(
                    Violation(
                        Constraint.BACKHAUL_RATE,
                        f"HAP {l} FH load {load[l]:g} bit/s > BH rate "
                        f"{capacity[l]:g} bit/s",
                    )
                )

        # Per-user BH power cap of every HAP link.
        _, caps, _ = bh_power_caps(
            scenario, assoc, realization, capacity, omega_bandwidth
        )
        for link, cap in caps.items():
            value = power.get(link, 0.0)
            if value > cap + POWER_TOLERANCE:
                violations.append(
                    Violation(
                        Constraint.BACKHAUL_CAP,
                        f"{value:g} W on {link} > BH cap {cap:g} W",
                    )
                )
    return violations


# endregion

# region Reports


class RateReport:
    """Represents the evaluation of an (association, power) pair.

    :property user_rates: (U,) array of user rates R_u (bit/s), 0 if unserved.
    :property fh_load: (L,) array of the FH sum-rate of every HAP.
    :property bh_rates: (L,) array of the active BH rate of every HAP.
    :property kind: the UtilityKind the utility value refers to.
    :property utility: the utility value (0 with no users).
    :property violations: the constraint violations (empty if feasible).
    """

    def __init__(
        self,
        links: list[FhLink],
        link_rates_: np.ndarray,
        power: PowerAllocation,
        user_count: int,
        fh_load: np.ndarray,
        bh_rates: np.ndarray,
        kind: UtilityKind,
        violations: list[Violation],
    ):
        self._links = list(links)
        self._link_rates = np.asarray(link_rates_, dtype=float)
        self._power = power
        self._user_rates = np.zeros(user_count)
        for link, rate in zip(self._links, self._link_rates):
            self._user_rates[link.user] += rate
        self._fh_load = fh_load
        self._bh_rates = bh_rates
        self._kind = kind
        self._violations = list(violations)
        self._utility = utility(self._user_rates, kind) if user_count else 0.0

    @property
    def user_rates(self) -> np.ndarray:
        """Returns the per-user rates (bit/s)."""
        return self._user_rates

    @property
    def fh_load(self) -> np.ndarray:
        """Returns the FH load of every HAP (bit/s)."""
        return self._fh_load

    @property
    def bh_rates(self) -> np.ndarray:
        """Returns the active BH rate of every HAP (bit/s)."""
        return self._bh_rates

    @property
    def kind(self) -> UtilityKind:
        """Returns the utility kind."""
        return self._kind

    @property
    def utility(self) -> float:
        """Returns the utility value."""
        return self._utility

    @property
    def violations(self) -> list[Violation]:
        """Returns the constraint violations."""
        return list(self._violations)

    @property
    def is_feasible(self) -> bool:
        """True if no constraint is violated."""
        return not self._violations

    def served_min_rate(self) -> float:
        """Returns the minimum rate over the served users (0 if none)."""
        served = {link.user for link in self._links}
        if not served:
            return 0.0
        return float(min(self._user_rates[u] for u in served))

    def tier_stats(self, tier: TierTag) -> dict[str, float]:
        """Returns users, mean/max/min rate and max/min power of a tier."""
        index = [k for k, link in enumerate(self._links) if link.tier == tier]
        rates = self._link_rates[index]
        powers = np.array([self._power.power(self._links[k]) for k in index])
        if not index:
            return dict.fromkeys(
                ("users", "mean_rate", "max_rate", "min_rate", "max_power", "min_power"),
                0.0,
            ) | {"users": 0}
        return {
            "users": len(index),
            "mean_rate": float(rates.mean()),
            "max_rate": float(rates.max()),
            "min_rate": float(rates.min()),
            "max_power": float(powers.max()),
            "min_power": float(powers.min()),
        }

    def summary(self) -> dict[str, Union[str, int, float]]:
        """Returns the summary row: utility, rate statistics and per-tier stats."""
        rates = self._user_rates
        row: dict[str, Union[str, int, float]] = {
            "utility_kind": self._kind.value,
            "utility": self._utility,
            "sum_rate": float(rates.sum()),
            "mean_rate": float(rates.mean()) if rates.size else 0.0,
            "min_rate": float(rates.min()) if rates.size else 0.0,
            "max_rate": float(rates.max()) if rates.size else 0.0,
            "served_users": len({link.user for link in self._links}),
            "served_min_rate": self.served_min_rate(),
        }
        for tag in TIER_ORDER:
            for key, value in self.tier_stats(tag).items():
                row[f"{tag.value}_{key}"] = value
        return row

    def to_frame(self) -> pd.DataFrame:
        """Returns the per-user table (user, tier, station, rb, power, rate)."""
        by_user = {link.user: link for link in self._links}
        rows = []
        for user, rate in enumerate(self._user_rates):
            link = by_user.get(user)
            rows.append(
                (
                    user,
                    link.tier.value if link else "",
                    link.station if link else -1,
                    link.rb if link else -1,
                    self._power.power(link) if link else 0.0,
                    float(rate),
                )
            )
        return pd.DataFrame(
            rows, columns=["user", "tier", "station", "rb", "power_w", "rate_bps"]
        )

    def __str__(self) -> str:
        return (
            f"{type(self).__name__}: {self._kind.name}={self._utility:.6g} "
            f"({len(self._violations)} violations)"
        )


def evaluate(
    scenario: "Scenario",
    realization: ChannelRealization,
    assoc: Association,
    power: Mapping[FhLink, float],
    kind: UtilityKind = UtilityKind.MSU,
    omega_bandwidth: Optional[float] = None,
) -> RateReport:
    """Computes rates, HAP loads, utility and violations in one pass."""
    violations = check_feasibility(
        scenario, assoc, power, realization, omega_bandwidth
    )
    links = [link for link in assoc.links() if _link_in_range(scenario, link)]
    rates = link_rates(scenario, links, power, realization)

    load = np.zeros(scenario.hap_count)
    for link, rate in zip(links, rates):
        if link.tier == TierTag.AIR:
            load[link.station] += rate

    allocation = power if isinstance(power, PowerAllocation) else PowerAllocation(power)
    report = RateReport(
        links,
        rates,
        allocation,
        scenario.user_count,
        load,
        active_bh_rates(scenario, assoc, realization),
        kind,
        violations,
    )
    _LOGGER.debug("Evaluated %s: %s", assoc, report)
    return report


def uniform_power(scenario: "Scenario", assoc: Association) -> PowerAllocation:
    """Returns P̄_S / N^S on every associated link."""
    return PowerAllocation(
        {link: scenario.tier(link.tier).uniform_power for link in assoc.fh}
    )


# endregion
