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
This module contains the power allocation solvers for a fixed association.

MSU (sca_msu): stations without inter-cell coupling (HAPs, the satellite and
TBSs with no co-channel neighbour) solve their concave problem exactly by
capped waterfilling; co-channel TBSs are solved by successive convex
approximation (SCA), replacing the interference term with its first-order
Taylor bound and maximizing the concave surrogate by projected gradient.

MMU (mmu_power): bisection on the common user rate, every link using the
minimum power that reaches it.

Every solver output goes through check_feasibility (see ensure_feasible).
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import wraps
from typing import Optional

import numpy as np
import pandas as pd

from .models.channel import ChannelRealization
from .models.enums import TierTag
from .models.exceptions import HapNetInfeasibleError
from .models.rates import (
    DEGENERATE_GAIN,
    Association,
    FhLink,
    PowerAllocation,
    active_bh_rates,
    bh_power_caps,
    check_feasibility,
    uniform_power,
)
from .models.scenario import Scenario

_LOGGER = logging.getLogger(__package__)

SCA_TOLERANCE = 1e-6
SCA_MAX_ITERATIONS = 50
INNER_TOLERANCE = 1e-6
INNER_MAX_STEPS = 500
MMU_TOLERANCE = 1e-6
ARMIJO = 1e-4
BISECTION_STEPS = 200

# region Wrappers


def ensure_feasible(func):
    """
    Ensures that the allocation returned by the decorated solver satisfies
    every constraint.

    The solver takes (scenario, realization, assoc, ...) and returns either
    a PowerAllocation or a tuple whose first item is the PowerAllocation.
    """

    @wraps(func)
    def wrapper(scenario, realization, assoc, *args, **kwargs):
        result = func(scenario, realization, assoc, *args, **kwargs)
        power = result[0] if isinstance(result, tuple) else result
        violations = check_feasibility(
            scenario, assoc, power, realization, kwargs.get("omega_bandwidth")
        )
        if violations:
            for violation in violations:
                _LOGGER.error("%s output rejected: %s", func.__name__, violation)
            raise HapNetInfeasibleError(
                f"{func.__name__} returned an infeasible allocation: {violations[0]}"
            )
        return result

    return wrapper


# endregion

# region Waterfilling


def _floors(gains: np.ndarray, noise) -> np.ndarray:
    """Returns N / h per link, +inf for degenerate links."""
    gains = np.asarray(gains, dtype=float)
    noise = np.broadcast_to(np.asarray(noise, dtype=float), gains.shape)
    floors = np.full(gains.shape, np.inf)
    valid = gains > DEGENERATE_GAIN
    floors[valid] = noise[valid] / gains[valid]
    return floors


def _fill(level: float, floors: np.ndarray, caps: np.ndarray) -> np.ndarray:
    return np.clip(level - floors, 0.0, caps)


def _level_for(total, floors: np.ndarray, caps: np.ndarray, lo: float, hi: float):
    """Largest water level in [lo, hi] with total(_fill(level)) <= target.

    `total` is a callable returning the excess (positive if infeasible).
    """
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if total(_fill(mid, floors, caps)) > 0:
            hi = mid
        else:
            lo = mid
    return lo


def waterfilling(gains, noise, budget: float, caps=None) -> np.ndarray:
    """Maximizes sum log2(1 + P h / N) s.t. sum P <= budget, 0 <= P <= caps.

    The solution is P = clip(mu - N / h, 0, caps), with the water level mu
    found by bisection. Links with h below 1e-30 get zero power.

    :param gains: (K,) channel gains h.
    :param noise: noise power N (scalar or (K,)).
    :param budget: the total power budget (W).
    :param caps: optional (K,) per-link power caps (W).
    """
    gains = np.asarray(gains, dtype=float)
    floors = _floors(gains, noise)
    caps = (
        np.full(gains.shape, np.inf)
        if caps is None
        else np.asarray(caps, dtype=float).copy()
    )
    caps[~np.isfinite(floors)] = 0.0
    if budget <= 0 or not np.any(caps > 0):
        return np.zeros(gains.shape)
    if np.all(np.isfinite(caps)) and caps.sum() <= budget:
        return caps

    finite = floors[np.isfinite(floors)]
    level = _level_for(
        lambda powers: powers.sum() - budget,
        floors,
        caps,
        float(finite.min()),
        float(finite.max()) + budget,
    )
    return _fill(level, floors, caps)


def _hap_powers(
    gains: np.ndarray,
    noise: float,
    bandwidth: float,
    budget: float,
    caps: np.ndarray,
    bh_rate: float,
) -> np.ndarray:
    """Capped waterfilling, with the water level lowered until the FH
    sum-rate fits in the BH rate."""
    if bh_rate <= 0:
        return np.zeros(gains.shape)
    powers = waterfilling(gains, noise, budget, caps)

    def excess(candidate: np.ndarray) -> float:
        return float(
            np.sum(bandwidth * np.log2(1.0 + candidate * gains / noise)) - bh_rate
        )

    if excess(powers) <= 0:
        return powers
    floors = _floors(gains, noise)
    caps = np.where(np.isfinite(floors), caps, 0.0)
    finite = floors[np.isfinite(floors)]
    hi = float(np.max(np.where(powers > 0, floors + powers, finite.min())))
    level = _level_for(excess, floors, caps, float(finite.min()), hi)
    return _fill(level, floors, caps)


# endregion

# region BH cap


class BhCap:
    """The per-user BH cap of the HAP links.

    With w = 2^(R̄_l / B) the SNR of a HAP link with k RBs of the same user
    must satisfy k (1 + SNR) <= w / k, i.e. P <= (w / k^2 - 1) N / h.

    :property omega: dict HAP -> w.
    :property caps: dict FhLink -> maximum power (W).
    :property bandwidth: the bandwidth B used in the exponent.
    """

    def __init__(self, omega: dict[int, float], caps: dict[FhLink, float], bandwidth):
        self._omega = omega
        self._caps = caps
        self._bandwidth = bandwidth

    @property
    def omega(self) -> dict[int, float]:
        """Returns w per HAP."""
        return dict(self._omega)

    @property
    def caps(self) -> dict[FhLink, float]:
        """Returns the power cap of every HAP link."""
        return dict(self._caps)

    @property
    def bandwidth(self) -> float:
        """Returns the exponent bandwidth (Hz)."""
        return self._bandwidth

    def cap(self, link: FhLink) -> float:
        """Returns the power cap of a link (+inf for non-HAP links)."""
        return self._caps.get(link, math.inf)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(omega={sorted(self._omega.items())!r})"


def bh_cap(
    scenario: Scenario,
    realization: ChannelRealization,
    assoc: Association,
    bh_rates: Optional[np.ndarray] = None,
    bandwidth: Optional[float] = None,
) -> BhCap:
    """Computes the per-user BH caps of the HAP links.

    :param bh_rates: (L,) active BH rates, computed from the association if
        not given.
    :param bandwidth: the exponent bandwidth, B^L by default.
    """
    return BhCap(*bh_power_caps(scenario, assoc, realization, bh_rates, bandwidth))


# endregion

# region SCA


def interference_term(
    power, cross_gains, bandwidth: float, noise: float, associated: bool = True
) -> float:
    """Returns -ε B log2(N + sum h P), the exact negative interference term."""
    total = noise + float(np.dot(cross_gains, power))
    return -float(associated) * bandwidth * math.log2(total)


def taylor_bound(
    power,
    expansion,
    cross_gains,
    bandwidth: float,
    noise: float,
    associated: bool = True,
) -> float:
    """First-order lower bound of interference_term around `expansion`.

    value = -ε B log2(ψ) - ε B sum h (P - P_r) / (ln2 ψ), ψ = N + sum h P_r.

    :param power: the co-channel TBS powers P.
    :param expansion: the expansion point P_r.
    :param cross_gains: the co-channel gains h towards the user.

    :raises ValueError: if ψ is not positive.
    """
    power = np.asarray(power, dtype=float)
    expansion = np.asarray(expansion, dtype=float)
    cross_gains = np.asarray(cross_gains, dtype=float)
    psi = noise + float(np.dot(cross_gains, expansion))
    if psi <= 0:
        raise ValueError("The interference-plus-noise must be positive")
    slope = float(np.dot(cross_gains, power - expansion)) / (math.log(2.0) * psi)
    return -float(associated) * bandwidth * (math.log2(psi) + slope)


@dataclass
class ScaState:
    """The state and the history of an SCA run.

    :param iteration: the last outer iteration r.
    :param expansion: the expansion point P(r) of the coupled links.
    :param psi: interference-plus-noise ψ(r) of the coupled links.
    :param history: true objective (bit/s) at every iterate, start included.
    :param surrogate: surrogate optimum of every iteration.
    :param converged: False if max_iter was reached first.
    :param start: the initialization the run started from.
    """

    iteration: int = 0
    expansion: np.ndarray = field(default_factory=lambda: np.zeros(0))
    psi: np.ndarray = field(default_factory=lambda: np.zeros(0))
    history: list[float] = field(default_factory=list)
    surrogate: list[float] = field(default_factory=list)
    converged: bool = True
    start: str = "uniform"

    def to_frame(self) -> pd.DataFrame:
        """Returns the trace table (iteration, surrogate, objective)."""
        surrogate = [math.nan, *self.surrogate] if self.history else []
        return pd.DataFrame(
            {
                "iteration": np.arange(len(self.history)),
                "surrogate": surrogate[: len(self.history)],
                "objective": self.history,
            },
            columns=["iteration", "surrogate", "objective"],
        )


def _project(values: np.ndarray, budget: float) -> np.ndarray:
    """Euclidean projection onto {P >= 0, sum P <= budget}."""
    clipped = np.maximum(values, 0.0)
    if clipped.sum() <= budget:
        return clipped
    ordered = np.sort(values)[::-1]
    cumulative = np.cumsum(ordered) - budget
    rho = np.flatnonzero(ordered * np.arange(1, values.size + 1) > cumulative)[-1]
    theta = cumulative[rho] / (rho + 1.0)
    return np.maximum(values - theta, 0.0)


class _CoupledLinks:
    """The co-channel TBS links solved jointly by SCA."""

    def __init__(
        self,
        scenario: Scenario,
        realization: ChannelRealization,
        links: list[FhLink],
    ):
        ground = scenario.tier(TierTag.GROUND)
        gains = realization.fh[TierTag.GROUND]
        s = np.array([link.station for link in links])
        u = np.array([link.user for link in links])
        n = np.array([link.rb for link in links])

        self.own = gains[s, u, n]
        # cross[k, j]: gain from the transmitter of link j to the user of link k
        cross = gains[s[None, :], u[:, None], n[:, None]]
        co_channel = (n[:, None] == n[None, :]) & (s[:, None] != s[None, :])
        self.cross = np.where(co_channel, cross, 0.0)
        self.active = self.own > DEGENERATE_GAIN
        self.bandwidth = ground.rb_bandwidth
        self.noise = scenario.noise_psd * ground.rb_bandwidth
        self.budget = ground.peak_power
        self.rbs = n
        self.groups = [np.flatnonzero(s == station) for station in np.unique(s)]
        self.uniform = np.where(self.active, ground.uniform_power, 0.0)

    def objective(self, powers: np.ndarray) -> float:
        interference = self.noise + self.cross @ powers
        return float(
            self.bandwidth * np.sum(np.log2(1.0 + self.own * powers / interference))
        )

    def surrogate(self, powers, expansion, psi) -> float:
        total = self.noise + self.cross @ powers + self.own * powers
        linear = (self.cross @ (powers - expansion)) / (math.log(2.0) * psi)
        return float(
            self.bandwidth * np.sum(np.log2(total) - np.log2(psi) - linear)
        )

    def gradient(self, powers, psi) -> np.ndarray:
        total = self.noise + self.cross @ powers + self.own * powers
        return (self.bandwidth / math.log(2.0)) * (
            self.cross.T @ (1.0 / total) + self.own / total - self.cross.T @ (1.0 / psi)
        )

    def project(self, powers: np.ndarray) -> np.ndarray:
        projected = np.where(self.active, powers, 0.0)
        for group in self.groups:
            projected[group] = _project(projected[group], self.budget)
        return np.where(self.active, projected, 0.0)

    def silenced(self) -> np.ndarray:
        """Uniform start with only the strongest link active on each shared RB."""
        start = self.uniform.copy()
        for rb in np.unique(self.rbs):
            sharing = np.flatnonzero(self.rbs == rb)
            if sharing.size > 1:
                keep = sharing[int(np.argmax(self.own[sharing]))]
                start[sharing[sharing != keep]] = 0.0
        return start

    def maximize_surrogate(self, expansion, psi, tol, max_steps):
        """Projected gradient ascent with backtracking, started at the expansion
        point (every accepted step increases the surrogate)."""
        powers = expansion.copy()
        value = self.surrogate(powers, expansion, psi)
        step = None
        for _ in range(max_steps):
            grad = self.gradient(powers, psi)
            if step is None:
                step = self.budget / max(float(np.max(np.abs(grad))), 1e-300)
            while True:
                candidate = self.project(powers + step * grad)
                candidate_value = self.surrogate(candidate, expansion, psi)
                if candidate_value >= value + ARMIJO * float(
                    grad @ (candidate - powers)
                ):
                    break
                step *= 0.5
                if step < 1e-300:
                    return powers, value
            improvement = candidate_value - value
            powers, value = candidate, candidate_value
            step *= 2.0
            if improvement <= tol * max(abs(value), 1.0):
                break
        return powers, value

    def run(self, start, name, tol, max_iter) -> tuple[np.ndarray, ScaState]:
        powers = self.project(start)
        state = ScaState(start=name, history=[self.objective(powers)])
        state.converged = False
        for iteration in range(1, max_iter + 1):
            psi = self.noise + self.cross @ powers
            candidate, surrogate_value = self.maximize_surrogate(
                powers, psi, INNER_TOLERANCE, INNER_MAX_STEPS
            )
            value = self.objective(candidate)
            previous = state.history[-1]
            state.iteration, state.expansion, state.psi = iteration, powers, psi
            if value < previous:
                # No ascent left within floating point accuracy
                state.converged = True
                break
            powers = candidate
            state.history.append(value)
            state.surrogate.append(surrogate_value)
            _LOGGER.debug("SCA (%s) iteration %d: %g bit/s", name, iteration, value)
            if value - previous <= tol * max(abs(previous), 1.0):
                state.converged = True
                break
        state.expansion = powers
        return powers, state

    def solve(self, tol, max_iter) -> tuple[np.ndarray, ScaState]:
        best_powers, best_state = self.run(self.uniform, "uniform", tol, max_iter)
        silenced = self.silenced()
        if not np.array_equal(silenced, self.uniform):
            powers, state = self.run(silenced, "silencing", tol, max_iter)
            if state.history[-1] > best_state.history[-1]:
                best_powers, best_state = powers, state
        if not best_state.converged:
            _LOGGER.warning(
                "SCA stopped after %d iterations without converging", max_iter
            )
        return best_powers, best_state


def _station_groups(links: list[FhLink]) -> dict[tuple[TierTag, int], list[int]]:
    groups: dict[tuple[TierTag, int], list[int]] = defaultdict(list)
    for k, link in enumerate(links):
        groups[(link.tier, link.station)].append(k)
    return groups


def coupled_stations(links: list[FhLink]) -> set[int]:
    """Returns the TBSs sharing at least one RB with another TBS."""
    by_rb: dict[int, set[int]] = defaultdict(set)
    for link in links:
        if link.tier == TierTag.GROUND:
            by_rb[link.rb].add(link.station)
    return {
        station for stations in by_rb.values() if len(stations) > 1 for station in stations
    }


@ensure_feasible
def sca_msu(
    scenario: Scenario,
    realization: ChannelRealization,
    assoc: Association,
    *,
    tol: float = SCA_TOLERANCE,
    max_iter: int = SCA_MAX_ITERATIONS,
    omega_bandwidth: Optional[float] = None,
) -> tuple[PowerAllocation, ScaState]:
    """Max-sum power allocation for a fixed association.

    :param tol: relative objective improvement stopping the SCA loop.
    :param max_iter: maximum number of SCA iterations.
    :param omega_bandwidth: the bandwidth of the BH cap exponent (B^L).

    :returns: the allocation and the state of the SCA run on the co-channel
        TBSs (empty history when no TBS is coupled).
    """
    links = assoc.links()
    powers = np.zeros(len(links))
    bh_rates = active_bh_rates(scenario, assoc, realization)
    caps = bh_cap(scenario, realization, assoc, bh_rates, omega_bandwidth)
    coupled = coupled_stations(links)

    for (tag, station), index in _station_groups(links).items():
        if tag == TierTag.GROUND and station in coupled:
            continue
        tier = scenario.tier(tag)
        gains = np.array(
            [
                realization.fh_gain(tag, station, links[k].user, links[k].rb)
                for k in index
            ]
        )
        noise = scenario.noise_psd * tier.rb_bandwidth
        if tag == TierTag.AIR:
            powers[index] = _hap_powers(
                gains,
                noise,
                tier.rb_bandwidth,
                tier.peak_power,
                np.array([caps.cap(links[k]) for k in index]),
                float(bh_rates[station]),
            )
        else:
            powers[index] = waterfilling(gains, noise, tier.peak_power)

    state = ScaState(history=[])
    index = [
        k
        for k, link in enumerate(links)
        if link.tier == TierTag.GROUND and link.station in coupled
    ]
    if index:
        problem = _CoupledLinks(scenario, realization, [links[k] for k in index])
        powers[index], state = problem.solve(tol, max_iter)
        _LOGGER.debug(
            "SCA on %d co-channel links: %d iterations (%s start)",
            len(index),
            state.iteration,
            state.start,
        )
    return PowerAllocation.from_arrays(links, powers), state


# endregion

# region MMU


class _RateDemand:
    """Minimum powers giving every link the same rate R."""

    def __init__(
        self,
        scenario: Scenario,
        realization: ChannelRealization,
        links: list[FhLink],
        bh_rates: np.ndarray,
        caps: BhCap,
    ):
        self.links = links
        self.gains = np.array(
            [realization.fh_gain(l.tier, l.station, l.user, l.rb) for l in links]
        )
        self.bandwidth = np.array(
            [scenario.tier(link.tier).rb_bandwidth for link in links]
        )
        self.noise = scenario.noise_psd * self.bandwidth
        self.groups = _station_groups(links)
        self.budgets = {
            key: scenario.tier(key[0]).peak_power for key in self.groups
        }
        self.bh_rates = bh_rates
        self.caps = np.array([caps.cap(link) for link in links])
        self.ground_fh = realization.fh[TierTag.GROUND]
        by_rb: dict[int, list[int]] = defaultdict(list)
        for k, link in enumerate(links):
            if link.tier == TierTag.GROUND:
                by_rb[link.rb].append(k)
        self.ground_by_rb = {rb: np.array(index) for rb, index in by_rb.items()}

    def upper_bound(self) -> float:
        """Best rate each link could get alone at full budget or at its BH cap
        (the minimum)."""
        bound = math.inf
        for (tag, station), index in self.groups.items():
            index = np.array(index)
            single = self.bandwidth[index] * np.log2(
                1.0 + self.budgets[(tag, station)] * self.gains[index] / self.noise[index]
            )
            bound = min(bound, float(single.min()))
            if tag == TierTag.AIR:
                capped = self.bandwidth[index] * np.log2(
                    1.0 + self.caps[index] * self.gains[index] / self.noise[index]
                )
                bound = min(bound, float(capped.min()))
                bound = min(bound, float(self.bh_rates[station]) / index.size)
        return bound

    def powers(self, rate: float) -> Optional[np.ndarray]:
        """Returns the minimum powers reaching `rate` on every link, None if
        the budgets, the BH rates or the BH caps don't allow it."""
        if np.any(self.gains <= DEGENERATE_GAIN):
            return None
        gamma = np.expm1(rate * math.log(2.0) / self.bandwidth)
        powers = gamma * self.noise / self.gains

        for rb, index in self.ground_by_rb.items():
            if index.size < 2:
                continue
            stations = np.array([self.links[k].station for k in index])
            users = np.array([self.links[k].user for k in index])
            cross = self.ground_fh[stations[None, :], users[:, None], rb]
            np.fill_diagonal(cross, 0.0)
            coupling = gamma[index, None] * cross / self.gains[index, None]
            if np.max(np.abs(np.linalg.eigvals(coupling))) >= 1.0:
                return None
            solution = np.linalg.solve(
                np.eye(index.size) - coupling, powers[index]
            )
            if np.any(solution < 0):
                return None
            powers[index] = solution

        if np.any(powers > self.caps):
            return None
        for key, index in self.groups.items():
            if powers[index].sum() > self.budgets[key]:
                return None
            if key[0] == TierTag.AIR and rate * len(index) > self.bh_rates[key[1]]:
                return None
        return powers


@ensure_feasible
def mmu_power(
    scenario: Scenario,
    realization: ChannelRealization,
    assoc: Association,
    *,
    tol: float = MMU_TOLERANCE,
    omega_bandwidth: Optional[float] = None,
) -> tuple[PowerAllocation, float]:
    """Max-min power allocation for a fixed association.

    Bisection on the common rate R_min of the served users: the demand of
    HAP and satellite links is inverted in closed form, co-channel TBS links
    solve the linear system (I - γF) P = γη per RB.

    :param tol: relative bisection tolerance.
    :param omega_bandwidth: the bandwidth of the BH cap exponent (B^L).

    :returns: the allocation and R_min (0 with zero powers if no positive
        rate is feasible).
    """
    links = assoc.links()
    if not links:
        return PowerAllocation(), 0.0
    bh_rates = active_bh_rates(scenario, assoc, realization)
    demand = _RateDemand(
        scenario,
        realization,
        links,
        bh_rates,
        bh_cap(scenario, realization, assoc, bh_rates, omega_bandwidth),
    )

    hi = demand.upper_bound()
    lo, best = 0.0, np.zeros(len(links))
    if hi > 0 and math.isfinite(hi):
        while hi - lo > tol * hi:
            mid = 0.5 * (lo + hi)
            powers = demand.powers(mid)
            if powers is None:
                hi = mid
            else:
                lo, best = mid, powers
    _LOGGER.debug("MMU: R_min = %g bit/s over %d links", lo, len(links))
    return PowerAllocation.from_arrays(links, best), lo


# endregion

# region Uniform power


@ensure_feasible
def uniform_allocation(
    scenario: Scenario,
    realization: ChannelRealization,
    assoc: Association,
    *,
    omega_bandwidth: Optional[float] = None,
) -> PowerAllocation:
    """Uniform power P_S / N^S on every link, each HAP scaled down (bisection)
    until its FH load fits in its BH rate, then clipped to the BH caps.

    :param omega_bandwidth: the bandwidth of the BH cap exponent (B^L).
    """
    power = uniform_power(scenario, assoc)
    bh_rates = active_bh_rates(scenario, assoc, realization)
    caps = bh_cap(scenario, realization, assoc, bh_rates, omega_bandwidth)
    air = scenario.tier(TierTag.AIR)
    noise = scenario.noise_psd * air.rb_bandwidth

    for l in range(scenario.hap_count):  # noqa: E741
        links = [link for link in assoc.links(TierTag.AIR) if link.station == l]
        if not links:
            continue
        snr = np.array(
            [
                air.uniform_power
                * realization.fh_gain(TierTag.AIR, l, link.user, link.rb)
                / noise
                for link in links
            ]
        )

        def load(scale: float) -> float:
            return float(np.sum(air.rb_bandwidth * np.log2(1.0 + scale * snr)))

        if load(1.0) <= bh_rates[l]:
            continue
        lo, hi = 0.0, 1.0
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if load(mid) > bh_rates[l]:
                hi = mid
            else:
                lo = mid
        for link in links:
            power[link] = lo * air.uniform_power
        _LOGGER.debug("HAP %d uniform power scaled by %g for its BH rate", l, lo)

    for link, cap in caps.caps.items():
        if power[link] > cap:
            _LOGGER.debug("%s uniform power clipped to its BH cap %g W", link, cap)
            power[link] = cap
    return power


# endregion
