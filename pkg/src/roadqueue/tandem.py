"""Two sections in tandem: upstream service limited by downstream supply.

Vehicles leave section 1 at the coupled rate

    q12(n1, n2) = min(v_f1 * n1 / L1, q1_max, q2_max, supply2(n2))

so a filling downstream section throttles the upstream one.  The joint
chain is approximated by a decomposition: section 2 is solved alone at
its arrival rate theta (the upstream outflow), section 1 is solved
conditionally on each frozen downstream count n2, and the two couple
through the marginal mixture

    P1(n1) = sum_n2  P(n1 | n2) * P2(n2; theta).

theta itself satisfies the throughput fixed point

    theta = lam * (1 - P1_c1(lam, theta))

solved here by bisection on [0, lam], where the right-hand side minus
theta is continuous with opposite signs at the ends.  Uniqueness is not
guaranteed in general; scan_roots surfaces any additional sign changes
on a grid instead of hiding them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fundamental import EXACT, SHIFTED, RoadSection, check_convention
from .queueing import OccupancyDistribution, PerformanceMeasures, solve_birth_death, solve_triangular


class ConvergenceError(RuntimeError):
    """Fixed-point iteration exhausted its budget before reaching tolerance."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(message)
        self.bracket = bracket


@dataclass(frozen=True)
class TandemConfig:
    """Upstream and downstream sections under a shared rate convention."""

    section1: RoadSection
    section2: RoadSection
    convention: str = SHIFTED

    def __post_init__(self) -> None:
        check_convention(self.convention)


@dataclass(frozen=True, eq=False)
class FixedPointResult:
    """Converged throughput fixed point with both section laws at theta."""

    theta: float
    residual: float
    iterations: int
    marginal: OccupancyDistribution
    downstream: OccupancyDistribution
    config: TandemConfig


def coupled_rate(config: TandemConfig, n1: int, n2: int) -> float:
    """Transfer rate q12 from section 1 to section 2 [veh/s]."""
    s1, s2 = config.section1, config.section2
    if not 0 <= n1 <= s1.c:
        raise ValueError(f"count n1={n1!r} outside [0, c1={s1.c}]")
    if not 0 <= n2 <= s2.c:
        raise ValueError(f"count n2={n2!r} outside [0, c2={s2.c}]")
    if n1 == 0:
        return 0.0
    offset = 0 if config.convention == EXACT else 1
    return min(
        s1.diagram.v_f * n1 / s1.L,
        s1.diagram.q_max,
        s2.diagram.q_max,
        s2.diagram.w * (s2.c - n2 + offset) / s2.L,
    )


def _transfer_rates(config: TandemConfig, n2: int) -> np.ndarray:
    """Rates q12(i, n2) for i = 1..c1."""
    return np.array(
        [coupled_rate(config, i, n2) for i in range(1, config.section1.c + 1)]
    )


def downstream_distribution(
    config: TandemConfig, theta: float
) -> OccupancyDistribution:
    """Section-2 occupancy law when fed at rate theta."""
    return solve_triangular(theta, config.section2, config.convention)


def conditional_distribution(
    config: TandemConfig, lam: float, n2: int
) -> OccupancyDistribution:
    """Section-1 occupancy law with the downstream count frozen at n2.

    With zero supply (exact convention, n2 = c2) and lam > 0 every
    arrival is trapped, so the law degenerates to a point mass at c1;
    that limit is returned rather than raised.
    """
    if lam < 0:
        raise ValueError(f"arrival rate must be nonnegative, got {lam!r}")
    c1 = config.section1.c
    rates = _transfer_rates(config, n2)
    if lam == 0:
        probs = np.zeros(c1 + 1)
        probs[0] = 1.0
        return OccupancyDistribution(probs)
    if not rates.any():
        probs = np.zeros(c1 + 1)
        probs[-1] = 1.0
        return OccupancyDistribution(probs)
    return solve_birth_death(lam, rates)


def conditional_matrix(config: TandemConfig, lam: float) -> np.ndarray:
    """All conditionals stacked as rows, shape (c2 + 1, c1 + 1).

    The conditionals do not depend on theta, so a fixed-point solve
    computes this once and reuses it across bisection steps.
    """
    return np.vstack(
        [
            conditional_distribution(config, lam, n2).probs
            for n2 in range(config.section2.c + 1)
        ]
    )


def marginal_distribution(
    config: TandemConfig, lam: float, theta: float
) -> OccupancyDistribution:
    """Section-1 law mixing the conditionals over the downstream law."""
    matrix = conditional_matrix(config, lam)
    weights = downstream_distribution(config, theta).probs
    return OccupancyDistribution(weights @ matrix)


def solve_fixed_point(
    config: TandemConfig,
    lam: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> FixedPointResult:
    """Solve theta = lam * (1 - P1_c1(lam, theta)) by bisection on [0, lam].

    Stops when |theta - lam * (1 - P1_c1)| <= tol.  Deterministic: the
    same inputs always bisect the same sequence.
    """
    if lam < 0:
        raise ValueError(f"arrival rate must be nonnegative, got {lam!r}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if lam == 0:
        empty = conditional_distribution(config, 0.0, 0)
        return FixedPointResult(
            theta=0.0,
            residual=0.0,
            iterations=0,
            marginal=empty,
            downstream=downstream_distribution(config, 0.0),
            config=config,
        )

    matrix = conditional_matrix(config, lam)

    def residual_at(theta: float):
        down = downstream_distribution(config, theta)
        marginal = down.probs @ matrix
        return theta - lam * (1.0 - marginal[-1]), marginal, down

    h_lo, _, _ = residual_at(0.0)
    h_hi, _, _ = residual_at(lam)
    # blocking in [0, 1] forces h(0) <= 0 <= h(lam); anything else is a bug
    if h_lo > 0 or h_hi < 0:
        raise AssertionError(
            f"fixed-point bracket lost: h(0)={h_lo!r}, h(lam)={h_hi!r}"
        )
    lo, hi = 0.0, lam
    iterations = 0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        iterations += 1
        h_mid, marginal, down = residual_at(mid)
        if abs(h_mid) <= tol:
            return FixedPointResult(
                theta=mid,
                residual=abs(h_mid),
                iterations=iterations,
                marginal=OccupancyDistribution(marginal),
                downstream=down,
                config=config,
            )
        if h_mid > 0:
            hi = mid
        else:
            lo = mid
    raise ConvergenceError(
        f"no theta with residual <= {tol} after {iterations} bisection "
        f"steps; best bracket [{lo}, {hi}]",
        bracket=(lo, hi),
    )


def scan_roots(
    config: TandemConfig, lam: float, points: int = 1000
) -> list[tuple[float, float]]:
    """Brackets of every sign change of the fixed-point residual.

    Evaluates theta -> theta - lam * (1 - P1_c1) on a grid over [0, lam]
    and returns the bracketing intervals, surfacing any root multiplicity
    the bisection solve would silently pick one root from.
    """
    if lam <= 0:
        return []
    if points < 2:
        raise ValueError(f"points must be at least 2, got {points!r}")
    matrix = conditional_matrix(config, lam)
    grid = np.linspace(0.0, lam, points)
    values = []
    for theta in grid:
        weights = downstream_distribution(config, theta).probs
        values.append(theta - lam * (1.0 - float(weights @ matrix[:, -1])))
    brackets = []
    for i in range(points - 1):
        if values[i] == 0.0 or (values[i] < 0) != (values[i + 1] < 0):
            brackets.append((float(grid[i]), float(grid[i + 1])))
    return brackets


def tandem_measures(result: FixedPointResult, lam: float) -> PerformanceMeasures:
    """Performance of section 1 at the converged fixed point.

    Travel time is Little's law on the marginal count over theta; at
    theta = 0 it falls back, flagged, to section 1's free-flow time.
    """
    blocking = result.marginal.blocking
    expected_count = result.marginal.mean()
    if result.theta > 0:
        return PerformanceMeasures(
            blocking=blocking,
            throughput=result.theta,
            expected_count=expected_count,
            expected_travel_time=expected_count / result.theta,
        )
    return PerformanceMeasures(
        blocking=blocking,
        throughput=0.0,
        expected_count=expected_count,
        expected_travel_time=result.config.section1.free_flow_time,
        free_flow_fallback=True,
    )
