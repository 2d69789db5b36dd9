"""Triangular fundamental diagram and road-section geometry.

Flow: q [veh/s]
Density: rho [veh/m]
Speed: v [m/s]

The triangular diagram rises with slope v_f (free speed) up to the
critical density rho_cr and falls with slope -w (backward wave speed)
down to zero at the jam density rho_j:

    Q(rho) = min(v_f * rho, w * (rho_j - rho))

All quantities are SI: meters, seconds, veh/s, veh/m.  The vertex flow
q_max = rho_j / (1/v_f + 1/w) and rho_cr = q_max / v_f are always derived
from (v_f, w, rho_j), never supplied directly.

A road section of length L holds at most c = round(rho_j * L) vehicles.
With n vehicles present the section density is n / L and the section
moves vehicles at the state-dependent rate

    q_n = min(v_f * n / L, w * (c - n) / L)        ("exact")
    q_n = min(v_f * n / L, w * (c - n + 1) / L)    ("shifted")

The exact supply term vanishes at n = c, which makes a loss queue built
on these rates singular; the shifted variant keeps q_c > 0 and is the
default convention throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

EXACT = "exact"
SHIFTED = "shifted"
CONVENTIONS = (EXACT, SHIFTED)


def check_convention(convention: str) -> str:
    """Validate a service-rate convention name and return it."""
    if convention not in CONVENTIONS:
        raise ValueError(
            f"convention must be one of {CONVENTIONS}, got {convention!r}"
        )
    return convention


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class TriangularDiagram:
    """Triangular flow-density relation.

    v_f: free speed [m/s]
    w: backward wave speed [m/s]
    rho_j: jam density [veh/m]
    """

    v_f: float
    w: float
    rho_j: float

    def __post_init__(self) -> None:
        for name in ("v_f", "w", "rho_j"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")

    @property
    def q_max(self) -> float:
        """Capacity flow at the diagram vertex [veh/s]."""
        return self.rho_j / (1.0 / self.v_f + 1.0 / self.w)

    @property
    def rho_cr(self) -> float:
        """Critical density separating the free and congested branches."""
        return self.q_max / self.v_f


@dataclass(frozen=True)
class RoadSection:
    """A road section of length L governed by a triangular diagram.

    The vehicle capacity c defaults to round(rho_j * L); an explicit
    value is accepted (configs often state it) but rejected if it
    disagrees with the derived one by more than one vehicle.  The
    critical count n_cr = round(rho_cr * L) (ties round half up) marks
    the last state served at the free-flow rate.
    """

    L: float
    diagram: TriangularDiagram
    c: int = None  # type: ignore[assignment]  # derived when omitted
    n_cr: int = field(init=False)

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L!r}")
        derived_c = _round_half_up(self.diagram.rho_j * self.L)
        if self.c is None:
            object.__setattr__(self, "c", derived_c)
        else:
            if self.c != int(self.c):
                raise ValueError(f"c must be an integer, got {self.c!r}")
            object.__setattr__(self, "c", int(self.c))
            if abs(self.c - derived_c) > 1:
                raise ValueError(
                    f"c={self.c} inconsistent with rho_j*L={derived_c} "
                    "by more than one vehicle"
                )
        if self.c < 2:
            raise ValueError(f"capacity c must be at least 2, got {self.c}")
        n_cr = _round_half_up(self.diagram.rho_cr * self.L)
        if not 1 <= n_cr < self.c:
            raise ValueError(
                f"critical count n_cr={n_cr} outside [1, c) for c={self.c}"
            )
        object.__setattr__(self, "n_cr", n_cr)

    @property
    def free_flow_time(self) -> float:
        """Transit time of an unimpeded vehicle, L / v_f [s]."""
        return self.L / self.diagram.v_f


def _check_density(diagram: TriangularDiagram, rho: float) -> None:
    if not 0 <= rho <= diagram.rho_j:
        raise ValueError(
            f"density {rho!r} outside [0, rho_j={diagram.rho_j}]"
        )


def flow(diagram: TriangularDiagram, rho: float) -> float:
    """Equilibrium flow Q(rho) = min(v_f*rho, w*(rho_j - rho)) [veh/s]."""
    _check_density(diagram, rho)
    return min(diagram.v_f * rho, diagram.w * (diagram.rho_j - rho))


def demand(diagram: TriangularDiagram, rho: float) -> float:
    """Sending flow: min(v_f*rho, q_max), nondecreasing in rho."""
    _check_density(diagram, rho)
    return min(diagram.v_f * rho, diagram.q_max)


def supply(diagram: TriangularDiagram, rho: float) -> float:
    """Receiving flow: min(q_max, w*(rho_j - rho)), nonincreasing in rho."""
    _check_density(diagram, rho)
    return min(diagram.q_max, diagram.w * (diagram.rho_j - rho))


def service_rate(
    section: RoadSection, n: int, convention: str = SHIFTED
) -> float:
    """Total service rate q_n of a section holding n vehicles [veh/s].

    Under "exact" the supply term is w*(c-n)/L and vanishes at n = c;
    under "shifted" it is w*(c-n+1)/L and stays positive at capacity.
    """
    check_convention(convention)
    if not 0 <= n <= section.c:
        raise ValueError(f"count n={n!r} outside [0, c={section.c}]")
    if n == 0:
        return 0.0
    d = section.diagram
    offset = 0 if convention == EXACT else 1
    return min(
        d.v_f * n / section.L,
        d.w * (section.c - n + offset) / section.L,
    )


def normalized_rate(
    section: RoadSection, n: int, convention: str = SHIFTED
) -> float:
    """Service rate scaled by the diagram capacity, in [0, 1]."""
    return service_rate(section, n, convention) / section.diagram.q_max


def service_rates(section: RoadSection, convention: str = SHIFTED):
    """Rates q_1..q_c as a list, ready for a birth-death solve."""
    return [service_rate(section, n, convention) for n in range(1, section.c + 1)]
