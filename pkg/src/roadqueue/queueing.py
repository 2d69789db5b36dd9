"""Stationary law and performance measures of a finite-capacity section.

A section holding at most c vehicles with Poisson arrivals (rate lambda,
blocked and lost at capacity) and state-dependent exponential service is
a birth-death chain on {0, .., c} with birth rate lambda and death rate
q_n in state n.  Its stationary law has the product form

    P_n  proportional to  prod_{i=1..n} (lambda / q_i)

computed here by the ratio recursion in log space so that large
capacities cannot overflow, then normalized.

Two rate families are provided: the speed-ratio form q_n = n * f(n) *
v_f / L driven by a congestion model, and the flow form q_n built from a
triangular fundamental diagram.  Under the "exact" diagram convention
q_c = 0, which traps the chain at capacity for any positive arrival
rate; solvers reject that as a SingularModelError rather than returning
a law that does not exist.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .congestion import CongestionModel, speed
from .fundamental import SHIFTED, RoadSection, service_rates


class SingularModelError(ValueError):
    """The requested stationary law does not exist (a zero service rate)."""


@dataclass(frozen=True, eq=False)
class OccupancyDistribution:
    """Probability law of the vehicle count, indexed n = 0..capacity."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size < 2:
            raise ValueError("probs must be a 1-D vector of length >= 2")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @property
    def capacity(self) -> int:
        return self.probs.size - 1

    @property
    def blocking(self) -> float:
        """Probability of finding the section full, P_c."""
        return float(self.probs[-1])

    def mean(self) -> float:
        """Expected vehicle count."""
        return float(np.arange(self.probs.size) @ self.probs)

    def __getitem__(self, n: int) -> float:
        return float(self.probs[n])


@dataclass(frozen=True)
class PerformanceMeasures:
    """Steady-state summary of a solved section.

    free_flow_fallback marks the zero-throughput case where the travel
    time cannot come from Little's law and is reported as the free-flow
    transit time instead.
    """

    blocking: float
    throughput: float
    expected_count: float
    expected_travel_time: float
    free_flow_fallback: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.blocking <= 1:
            raise ValueError(f"blocking {self.blocking!r} outside [0, 1]")
        if self.throughput < 0:
            raise ValueError(f"throughput {self.throughput!r} negative")
        if self.expected_count < 0:
            raise ValueError(f"expected_count {self.expected_count!r} negative")
        if not self.expected_travel_time > 0:
            raise ValueError(
                f"expected_travel_time {self.expected_travel_time!r} not positive"
            )


def _check_rates(lam: float, rates: np.ndarray) -> None:
    if lam < 0:
        raise ValueError(f"arrival rate must be nonnegative, got {lam!r}")
    if rates.ndim != 1 or rates.size < 1:
        raise ValueError("rates must be a nonempty 1-D vector")
    if np.any(rates < 0):
        raise ValueError("service rates must be nonnegative")
    zero = np.flatnonzero(rates == 0)
    if zero.size and lam > 0:
        # state indices are 1-based: rates[i] serves state i+1
        raise SingularModelError(
            f"service rate is zero at state n={zero[0] + 1}; the stationary "
            "law does not exist (use the shifted convention)"
        )


def birth_death_log_weights(lam: float, rates) -> np.ndarray:
    """Log of the unnormalized product-form weights, log P~_n, n = 0..c.

    Requires lam > 0 and strictly positive rates.
    """
    rates = np.asarray(rates, dtype=float)
    _check_rates(lam, rates)
    if lam == 0:
        raise ValueError("log weights are undefined for lam=0; P_0 = 1")
    steps = np.log(lam) - np.log(rates)
    return np.concatenate(([0.0], np.cumsum(steps)))


def solve_birth_death(lam: float, rates) -> OccupancyDistribution:
    """Stationary law of the loss chain with birth lam and deaths q_1..q_c."""
    rates = np.asarray(rates, dtype=float)
    _check_rates(lam, rates)
    if lam == 0:
        probs = np.zeros(rates.size + 1)
        probs[0] = 1.0
        return OccupancyDistribution(probs)
    logw = birth_death_log_weights(lam, rates)
    w = np.exp(logw - logw.max())
    return OccupancyDistribution(w / w.sum())


def jain_smith_rates(L: float, model: CongestionModel) -> np.ndarray:
    """Speed-ratio service rates q_n = n * v_n / L for n = 1..c."""
    if not L > 0:
        raise ValueError(f"L must be positive, got {L!r}")
    return np.array([n * speed(model, n) / L for n in range(1, model.c + 1)])


def solve_jain_smith(
    lam: float, L: float, model: CongestionModel
) -> OccupancyDistribution:
    """Stationary law under a congestion-model service rate."""
    return solve_birth_death(lam, jain_smith_rates(L, model))


def solve_triangular(
    lam: float, section: RoadSection, convention: str = SHIFTED
) -> OccupancyDistribution:
    """Stationary law under the triangular-diagram service rate."""
    return solve_birth_death(lam, service_rates(section, convention))


def measures(
    dist: OccupancyDistribution, lam: float, rates
) -> PerformanceMeasures:
    """Blocking, throughput, mean count, and Little's-law travel time.

    Throughput is the accepted arrival rate lam * (1 - P_c).  When it is
    zero (lam = 0) the travel time is reported as the lone-vehicle
    transit time 1 / q_1 and flagged, so sweeps stay plottable.
    """
    rates = np.asarray(rates, dtype=float)
    if rates.size != dist.capacity:
        raise ValueError(
            f"got {rates.size} rates for capacity {dist.capacity}"
        )
    blocking = dist.blocking
    throughput = lam * (1.0 - blocking)
    expected_count = dist.mean()
    if throughput > 0:
        return PerformanceMeasures(
            blocking=blocking,
            throughput=throughput,
            expected_count=expected_count,
            expected_travel_time=expected_count / throughput,
        )
    if not rates[0] > 0:
        raise SingularModelError(
            "cannot report a free-flow fallback time with q_1 = 0"
        )
    return PerformanceMeasures(
        blocking=blocking,
        throughput=throughput,
        expected_count=expected_count,
        expected_travel_time=1.0 / rates[0],
        free_flow_fallback=True,
    )


def throughput_departure(dist: OccupancyDistribution, rates) -> float:
    """Departure-side throughput sum_n q_n * P_n [veh/s].

    Equals lam * (1 - P_c) on any solved law (flow balance).
    """
    rates = np.asarray(rates, dtype=float)
    if rates.size != dist.capacity:
        raise ValueError(
            f"got {rates.size} rates for capacity {dist.capacity}"
        )
    return float(rates @ dist.probs[1:])
