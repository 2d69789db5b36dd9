"""Speed-density congestion laws for occupancy-dependent service.

Two classical forms relate the per-vehicle speed v_n to the number of
occupants n of a section with capacity c and free speed v_f:

    linear:       v_n = v_f * (c - n + 1) / c
    exponential:  v_n = v_f * exp(-((n - 1) / beta) ** gamma)

Both satisfy v_1 = v_f and decrease in n.  The exponential shape and
scale parameters are fitted from two anchor points (a, v_a), (b, v_b)
on an empirical speed-density curve via the closed forms

    gamma = ln( ln(v_a/v_f) / ln(v_b/v_f) ) / ln( (a-1)/(b-1) )
    beta  = (a-1) / ln(v_f/v_a)**(1/gamma)
          = (b-1) / ln(v_f/v_b)**(1/gamma)

The fit is unit-agnostic: speeds and counts only need to be mutually
consistent with v_f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class LinearCongestionModel:
    """Linearly decreasing speed, v_f at n=1 down to v_f/c at n=c."""

    v_f: float
    c: int

    def __post_init__(self) -> None:
        if not self.v_f > 0:
            raise ValueError(f"v_f must be positive, got {self.v_f!r}")
        if self.c < 1:
            raise ValueError(f"c must be at least 1, got {self.c!r}")


@dataclass(frozen=True)
class ExponentialCongestionModel:
    """Exponentially decreasing speed with scale beta and shape gamma."""

    v_f: float
    beta: float
    gamma: float
    c: int

    def __post_init__(self) -> None:
        if not self.v_f > 0:
            raise ValueError(f"v_f must be positive, got {self.v_f!r}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if self.c < 1:
            raise ValueError(f"c must be at least 1, got {self.c!r}")


@dataclass(frozen=True)
class FitAnchors:
    """Two anchor points (a, v_a), (b, v_b) below the free speed v_f."""

    a: float
    v_a: float
    b: float
    v_b: float
    v_f: float

    def __post_init__(self) -> None:
        if not 1 < self.a < self.b:
            raise ValueError(
                f"anchors need 1 < a < b, got a={self.a!r}, b={self.b!r}"
            )
        if not 0 < self.v_b < self.v_a < self.v_f:
            raise ValueError(
                "anchor speeds need 0 < v_b < v_a < v_f, got "
                f"v_a={self.v_a!r}, v_b={self.v_b!r}, v_f={self.v_f!r}"
            )


CongestionModel = Union[LinearCongestionModel, ExponentialCongestionModel]


def _check_count(model: CongestionModel, n: int) -> None:
    if not 1 <= n <= model.c:
        raise ValueError(f"count n={n!r} outside [1, c={model.c}]")


def linear_speed(model: LinearCongestionModel, n: int) -> float:
    """Speed with n occupants under the linear law [m/s]."""
    _check_count(model, n)
    return model.v_f * (model.c - n + 1) / model.c


def exponential_speed(model: ExponentialCongestionModel, n: int) -> float:
    """Speed with n occupants under the exponential law [m/s]."""
    _check_count(model, n)
    return model.v_f * math.exp(-(((n - 1) / model.beta) ** model.gamma))


def speed(model: CongestionModel, n: int) -> float:
    """Dispatch to the model's speed law."""
    if isinstance(model, LinearCongestionModel):
        return linear_speed(model, n)
    if isinstance(model, ExponentialCongestionModel):
        return exponential_speed(model, n)
    raise TypeError(f"unsupported congestion model {type(model).__name__}")


def normalized_rate(model: CongestionModel, n: int) -> float:
    """Speed ratio f(n) = v_n / v_f, in (0, 1]."""
    return speed(model, n) / model.v_f


def fit_exponential(anchors: FitAnchors) -> tuple[float, float]:
    """Fit (beta, gamma) so the exponential law passes through both anchors.

    Raises ValueError for degenerate anchors (any speed equal to v_f, or
    an anchor count of 1) where the logarithms are singular.  The two
    closed forms for beta, via (a, v_a) and via (b, v_b), agree to
    rounding error; the (a, v_a) form is returned.
    """
    la = math.log(anchors.v_a / anchors.v_f)
    lb = math.log(anchors.v_b / anchors.v_f)
    # la, lb < 0 strictly by the anchor invariants; la/lb in (0, 1)
    gamma = math.log(la / lb) / math.log((anchors.a - 1) / (anchors.b - 1))
    beta = (anchors.a - 1) / (-la) ** (1.0 / gamma)
    return beta, gamma
