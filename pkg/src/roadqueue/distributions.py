"""Speed and travel-time laws induced by an occupancy distribution.

Every occupancy state n carries a deterministic speed v_n (and transit
time L / v_n), so the stationary count law pushes forward to discrete
speed and travel-time laws.  Two evaluation modes exist for the linear
congestion model:

* "pushforward" (default): relabel each occupancy atom by its exact
  speed or time, merge equal values, drop zero-mass atoms.  This is a
  proper probability law; it sums to 1 exactly.
* "paper-grid": evaluate the classical histogram construction on the
  integer grids v = 1..v_f and t = floor(L/v_f)..L, mapping each grid
  cell to a state through floor(1 + c(1 - v/v_f)) and using the
  product-form weights with a normalization constant recomputed over
  the grid.  Distinct cells can map to the same state and off-grid
  states are dropped, so the result is a visualization table whose
  total is generally not 1; it is marked normalized=False.

The triangular-diagram variants are always exact pushforwards: counts
up to the critical count n_cr travel at the free speed v_f, congested
counts at v_n = service_rate(n) * L / n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .congestion import LinearCongestionModel, linear_speed
from .fundamental import EXACT, SHIFTED, RoadSection, check_convention
from .queueing import (
    OccupancyDistribution,
    birth_death_log_weights,
    jain_smith_rates,
    solve_jain_smith,
)

PUSHFORWARD = "pushforward"
PAPER_GRID = "paper-grid"
MODES = (PUSHFORWARD, PAPER_GRID)


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Atoms on a strictly increasing support of speeds [m/s] or times [s].

    normalized=False marks grid-mode tables, which are not probability
    measures; everything else must sum to 1.
    """

    support: np.ndarray
    probs: np.ndarray
    normalized: bool = True

    def __post_init__(self) -> None:
        support = np.asarray(self.support, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if support.ndim != 1 or support.shape != probs.shape:
            raise ValueError("support and probs must be matching 1-D vectors")
        if support.size == 0:
            raise ValueError("distribution must have at least one atom")
        if np.any(np.diff(support) <= 0):
            raise ValueError("support values must be strictly increasing")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        if self.normalized:
            total = float(probs.sum())
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"probabilities sum to {total!r}, not 1")
        for name, value in (("support", support), ("probs", probs)):
            value = value.copy()
            value.flags.writeable = False
            object.__setattr__(self, name, value)

    def mean(self) -> float:
        return float(self.support @ self.probs)


def mean(dist: DiscreteDistribution) -> float:
    """Expectation sum(value * probability)."""
    return dist.mean()


def _round12(x: float) -> float:
    """Round to 12 significant digits; guards float near-duplicates."""
    if x == 0 or not math.isfinite(x):
        return x
    return round(x, 11 - int(math.floor(math.log10(abs(x)))))


def _floor12(x: float) -> int:
    """Floor after 12-significant-digit rounding.

    The classical inverse index maps are exact in real arithmetic but
    can land one ulp below an integer in floats; rounding first keeps
    the floor faithful to the algebra.
    """
    return int(math.floor(_round12(x)))


def _merge_atoms(values, probs) -> DiscreteDistribution:
    """Group equal values (after 12-digit rounding), drop zero mass."""
    merged: dict[float, float] = {}
    for value, prob in zip(values, probs):
        key = _round12(value)
        merged[key] = merged.get(key, 0.0) + prob
    support = sorted(key for key, prob in merged.items() if prob > 0)
    return DiscreteDistribution(
        support=np.array(support),
        probs=np.array([merged[key] for key in support]),
    )


def _triangular_speeds(section: RoadSection, convention: str) -> list[float]:
    """Per-state speeds: v_f up to n_cr, supply-limited above."""
    check_convention(convention)
    d = section.diagram
    offset = 0 if convention == EXACT else 1
    speeds = []
    for n in range(section.c + 1):
        if n <= section.n_cr:
            speeds.append(d.v_f)
        else:
            speeds.append(min(d.v_f, d.w * (section.c - n + offset) / n))
    return speeds


def speed_dist_triangular(
    dist: OccupancyDistribution, section: RoadSection, convention: str = SHIFTED
) -> DiscreteDistribution:
    """Pushforward of an occupancy law to per-state speeds."""
    if dist.capacity != section.c:
        raise ValueError(
            f"distribution capacity {dist.capacity} does not match c={section.c}"
        )
    return _merge_atoms(_triangular_speeds(section, convention), dist.probs)


def travel_time_dist_triangular(
    dist: OccupancyDistribution, section: RoadSection, convention: str = SHIFTED
) -> DiscreteDistribution:
    """Pushforward of an occupancy law to transit times L / v_n."""
    if dist.capacity != section.c:
        raise ValueError(
            f"distribution capacity {dist.capacity} does not match c={section.c}"
        )
    times = [section.L / v for v in _triangular_speeds(section, convention)]
    return _merge_atoms(times, dist.probs)


def speed_index(section: RoadSection, v: float) -> int:
    """Inverse map floor(w c / (v + w)) from a congested speed to its count.

    Recovers n exactly for speeds produced under the exact convention;
    shifted-convention speeds land one state off (documented, the maps
    are diagnostics only).
    """
    d = section.diagram
    return _floor12(d.w * section.c / (v + d.w))


def travel_time_index(section: RoadSection, t: float) -> int:
    """Inverse map floor(w c t / (L + w t)) from a congested transit time."""
    d = section.diagram
    return _floor12(d.w * section.c * t / (section.L + d.w * t))


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _linear_pushforward(
    lam: float, model: LinearCongestionModel, L: float, times: bool
) -> DiscreteDistribution:
    occupancy = solve_jain_smith(lam, L, model)
    values = [model.v_f] + [linear_speed(model, n) for n in range(1, model.c + 1)]
    if times:
        values = [L / v for v in values]
    return _merge_atoms(values, occupancy.probs)


def _grid_cell_weights(
    lam: float, model: LinearCongestionModel, L: float, indices: list[int]
) -> np.ndarray:
    """Probabilities assigned to grid cells mapping to the given states.

    Cell probability is weight(index) / (1 + sum of all cell weights),
    with weight the unnormalized product form, weight(0) = 1 for the
    empty state and 0 for indices outside [0, c].
    """
    if lam == 0:
        logw = np.full(model.c + 1, -np.inf)
        logw[0] = 0.0
    else:
        logw = birth_death_log_weights(lam, jain_smith_rates(L, model))
    cell_logs = np.array(
        [logw[i] if 0 <= i <= model.c else -np.inf for i in indices]
    )
    shift = max(float(np.max(cell_logs, initial=-np.inf)), 0.0)
    cell_w = np.exp(cell_logs - shift)
    empty = math.exp(-shift)  # the "1 +" term, same shift
    return cell_w / (empty + float(cell_w.sum()))


def speed_dist_linear(
    lam: float,
    model: LinearCongestionModel,
    L: float,
    mode: str = PUSHFORWARD,
) -> DiscreteDistribution:
    """Speed law of the linear-model section at arrival rate lam."""
    _check_mode(mode)
    if not L > 0:
        raise ValueError(f"L must be positive, got {L!r}")
    if mode == PUSHFORWARD:
        return _linear_pushforward(lam, model, L, times=False)
    if model.v_f != math.floor(model.v_f):
        warnings.warn(
            f"speed grid truncated at floor(v_f) = {math.floor(model.v_f)}",
            stacklevel=2,
        )
    grid = list(range(1, int(math.floor(model.v_f)) + 1))
    indices = [_floor12(1 + model.c * (1 - v / model.v_f)) for v in grid]
    return DiscreteDistribution(
        support=np.array(grid, dtype=float),
        probs=_grid_cell_weights(lam, model, L, indices),
        normalized=False,
    )


def travel_time_dist_linear(
    lam: float,
    model: LinearCongestionModel,
    L: float,
    mode: str = PUSHFORWARD,
) -> DiscreteDistribution:
    """Travel-time law of the linear-model section at arrival rate lam."""
    _check_mode(mode)
    if not L > 0:
        raise ValueError(f"L must be positive, got {L!r}")
    if mode == PUSHFORWARD:
        return _linear_pushforward(lam, model, L, times=True)
    if model.v_f != math.floor(model.v_f):
        warnings.warn(
            "time grid anchored at floor(L/v_f) with non-integer v_f",
            stacklevel=2,
        )
    grid = [
        t
        for t in range(int(math.floor(L / model.v_f)), int(math.floor(L)) + 1)
        if t > 0
    ]
    indices = [
        _floor12(1 + model.c * (1 - L / (t * model.v_f))) for t in grid
    ]
    return DiscreteDistribution(
        support=np.array(grid, dtype=float),
        probs=_grid_cell_weights(lam, model, L, indices),
        normalized=False,
    )
