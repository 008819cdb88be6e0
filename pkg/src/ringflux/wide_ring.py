"""Inner/outer perimeter currents of a wide ring with trapped flux.

In a ring wider than the penetration depth, the junction current splits
into a sheet current on the inner perimeter and one on the outer
perimeter.  With n flux quanta trapped, the total vanishes at the critical
applied field (the phase sits at a zero crossing of the sine), the two
sheets exactly cancelling; as the applied field is removed, the inner
current must hold the quantized interior flux while the outer screening
current dies with the field:

    I_inner(n) = n*Phi0/L   for every H,
    I_outer(n) = -I_inner   at H = H_c,    0 at H = 0.

Only the endpoints are physically pinned; in between, the outer current is
interpolated linearly in H/H_c (the screening current tracks the ramped
field) - a modeling convention, documented, not derived.  The field left
inside the inner perimeter at zero applied field is n*Phi0/area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ring_model import TWO_PI, RingParams


@dataclass(frozen=True)
class WideRingState:
    """Sheet currents of a wide ring holding n flux quanta at H/H_c."""

    n: int
    H_over_Hc: float
    I_inner: float
    I_outer: float

    @classmethod
    def at(cls, n: int, H_over_Hc: float, params: RingParams) -> "WideRingState":
        inner, outer = currents_at(n, H_over_Hc, params)
        return cls(n=n, H_over_Hc=H_over_Hc, I_inner=inner, I_outer=outer)


def currents_at(n: int, H_over_Hc: float, params: RingParams) -> tuple[float, float]:
    """(I_inner, I_outer) in amperes for n trapped quanta at H/H_c in [0, 1]."""
    if not (0.0 <= H_over_Hc <= 1.0):
        raise ValueError(f"H_over_Hc must lie in [0, 1], got {H_over_Hc}")
    inner = n * params.Phi0 / params.L
    return inner, -inner * H_over_Hc


def remnant_field(n: int, params: RingParams) -> float:
    """Trapped field n*Phi0/area_A [T] left inside the inner perimeter at H = 0."""
    return n * params.Phi0 / params.area_A


def quantized_phase(n: int) -> float:
    """Junction phase 2*pi*n of the n-quantum trapped state [rad]."""
    return TWO_PI * n


def phase_sine(phase: float) -> float:
    """sin(phase) evaluated after range reduction, so that the zero crossings
    at quantized phases stay clean for large n."""
    turns = phase / TWO_PI
    return math.sin(TWO_PI * (turns - round(turns)))
