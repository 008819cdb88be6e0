"""Roots and stability of the flux-balance equation at fixed applied flux.

The self-consistent flux states of the ring solve

    phi = phi_ext + phi_fe + lambda * i(phi),      i(phi) = sin(2*pi*phi),

written here as roots of the residual

    g(phi) = phi - phi_ext - phi_fe - lambda * sin(2*pi*phi).

Geometrically these are the intersections of the straight line
i = (phi - phi_ext - phi_fe)/lambda with the current-phase sinusoid.  All
roots lie in |phi - (phi_ext + phi_fe)| <= lambda.  A root is stable when
the line crosses the sinusoid from below, i.e. g'(phi) > 0; g'(phi) < 0 is
the runaway ("anti-Lenz") case.  For beta <= 1, g is nondecreasing and the
root is unique; for beta > 1 stable and unstable roots alternate and
coalesce pairwise at fold (tangency) points where g = g' = 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .ring_model import TWO_PI, ReducedParams

#: Margin added beyond the analytic root window |phi - c| <= lambda, guarding
#: boundary roots against rounding.
WINDOW_MARGIN = 1e-9

#: Default |g| tolerance for accepted roots.
DEFAULT_ROOT_TOL = 1e-12

#: Default |g'| band classified as Marginal (fold tangency vs roundoff).
DEFAULT_MARGINAL_TOL = 1e-9

_MAX_BISECT = 220


class NumericsError(RuntimeError):
    """A solver failed to meet its numerical contract."""


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class FixedPoint:
    """One solution (phi, i) of the flux balance with its stability class."""

    phi: float
    i: float
    stability: Stability


class FoldPoint(NamedTuple):
    phi_fold: float
    phi_ext_fold: float


def residual(phi: float, phi_ext: float, p: ReducedParams,
             cpr: Callable[[float], float] | None = None) -> float:
    """g(phi) = phi - phi_ext - phi_fe - lambda*i(phi); roots are flux states.

    `cpr` overrides the sinusoidal current-phase relation with any reduced
    relation |i(phi)| <= 1 (e.g. one derived from a free-energy model).
    """
    i = math.sin(TWO_PI * phi) if cpr is None else cpr(phi)
    return phi - phi_ext - p.phi_fe - p.lam * i


def residual_derivative(phi: float, p: ReducedParams,
                        cpr_prime: Callable[[float], float] | None = None) -> float:
    """g'(phi) = 1 - lambda*i'(phi); its sign classifies stability."""
    di = TWO_PI * math.cos(TWO_PI * phi) if cpr_prime is None else cpr_prime(phi)
    return 1.0 - p.lam * di


def classify_stability(phi_star: float, p: ReducedParams,
                       marginal_tol: float = DEFAULT_MARGINAL_TOL,
                       cpr_prime: Callable[[float], float] | None = None) -> Stability:
    """Stability of a root from the sign of g', with a Marginal dead band."""
    s = residual_derivative(phi_star, p, cpr_prime)
    if s > marginal_tol:
        return Stability.STABLE
    if s < -marginal_tol:
        return Stability.UNSTABLE
    return Stability.MARGINAL


# ---------------------------------------------------------------------------
# Branch geometry of the sinusoidal relation.
#
# g'(phi) = 1 - beta*cos(2*pi*phi) vanishes at phi = +/-phi_a + k where
# cos(2*pi*phi_a) = 1/beta (beta > 1 only).  Between consecutive critical
# points g is strictly monotone, so each such segment holds at most one root.
# The increasing segments [k + phi_a, k + 1 - phi_a] carry the stable roots;
# segment k exists for c = phi_ext + phi_fe in [k + c_lo, k + c_hi].
# ---------------------------------------------------------------------------

def tangency_offset(beta: float) -> float:
    """phi_a in (0, 1/4): distance from an integer flux to the fold tangency.

    Defined by cos(2*pi*phi_a) = 1/beta; requires beta > 1.
    """
    if beta <= 1.0:
        raise ValueError(f"tangency offset requires beta > 1, got {beta}")
    return math.acos(1.0 / beta) / TWO_PI


def stable_branch_interval(k: int, beta: float) -> tuple[float, float]:
    """Flux interval [k + phi_a, k + 1 - phi_a] of stable branch k (beta > 1)."""
    phi_a = tangency_offset(beta)
    return k + phi_a, k + 1.0 - phi_a


def branch_flux_range(k: int, beta: float) -> tuple[float, float]:
    """Total-flux levels c = phi_ext + phi_fe over which stable branch k exists.

    The endpoints are the fold levels: the branch is born at k + c_lo on a
    descending sweep and dies at k + c_hi on an ascending one.
    """
    phi_a = tangency_offset(beta)
    lam = beta / TWO_PI
    s_a = math.sqrt(1.0 - 1.0 / (beta * beta))  # sin(2*pi*phi_a)
    c_lo = phi_a - lam * s_a
    c_hi = 1.0 - phi_a + lam * s_a
    return k + c_lo, k + c_hi


def branch_index(phi: float, beta: float) -> int:
    """Index k of the stable branch containing the flux value phi.

    Meaningful for stable roots (which always lie inside a stable segment);
    for beta <= 1 there is a single global branch 0.
    """
    if beta <= 1.0:
        return 0
    return int(math.floor(phi - tangency_offset(beta)))


def fold_locations(p: ReducedParams) -> list[FoldPoint]:
    """Fold (tangency) points within one flux period.

    Solves g = g' = 0 simultaneously: cos(2*pi*phi_fold) = 1/beta, with the
    applied flux at tangency phi_ext_fold = phi_fold - phi_fe
    - lambda*sin(2*pi*phi_fold).  Both folds of the period [0, 1) are
    returned; empty for beta <= 1 where g' never changes sign.
    """
    if p.beta <= 1.0:
        return []
    phi_a = tangency_offset(p.beta)
    s_a = math.sqrt(1.0 - 1.0 / (p.beta * p.beta))
    out = []
    for phi_fold, sin_fold in ((phi_a, s_a), (1.0 - phi_a, -s_a)):
        out.append(FoldPoint(phi_fold, phi_fold - p.phi_fe - p.lam * sin_fold))
    return out


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def _bisect(f: Callable[[float], float], a: float, b: float,
            fa: float, fb: float) -> float:
    """Bisection to machine width on a sign-changing bracket; returns the
    endpoint with the smaller |f|."""
    for _ in range(_MAX_BISECT):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fa < 0.0) == (fm < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return a if abs(fa) <= abs(fb) else b


def _scan_boundaries(c: float, p: ReducedParams) -> list[float]:
    """Segment boundaries inside the root window: window edges plus every
    critical point of g (analytic for the sinusoid)."""
    lo = c - p.lam - WINDOW_MARGIN
    hi = c + p.lam + WINDOW_MARGIN
    pts = [lo]
    if p.beta > 1.0:
        phi_a = tangency_offset(p.beta)
        k = math.floor(lo)
        while k <= math.ceil(hi):
            for cp in (k + phi_a, k + 1.0 - phi_a):
                if lo < cp < hi:
                    pts.append(cp)
            k += 1
    pts.append(hi)
    pts.sort()
    # collapse near-degenerate boundaries (phi_a -> 0 or 1/4 limits)
    out = [pts[0]]
    for x in pts[1:]:
        if x - out[-1] > 1e-12:
            out.append(x)
    return out


def _grid_boundaries(c: float, p: ReducedParams, slope_bound: float) -> list[float]:
    """Uniform bracket grid for a non-sinusoidal relation: step fine enough
    (h <= 1/(8*(1 + lambda*max|i'|))) that no root pair hides in one cell."""
    lo = c - p.lam - WINDOW_MARGIN
    hi = c + p.lam + WINDOW_MARGIN
    h = 1.0 / (8.0 * (1.0 + p.lam * slope_bound))
    n = max(2, int(math.ceil((hi - lo) / h)))
    return [lo + (hi - lo) * j / n for j in range(n + 1)]


def find_fixed_points(phi_ext: float, p: ReducedParams,
                      tol: float = DEFAULT_ROOT_TOL,
                      marginal_tol: float = DEFAULT_MARGINAL_TOL,
                      cpr: Callable[[float], float] | None = None,
                      cpr_prime: Callable[[float], float] | None = None,
                      cpr_slope_bound: float = TWO_PI) -> list[FixedPoint]:
    """All flux states at a given applied flux, sorted ascending in phi.

    Parameters
    ----------
    phi_ext : float
        Applied flux in units of Phi0.
    p : ReducedParams
        Ring parameters.
    tol : float
        Acceptance tolerance on |g| at each root.
    marginal_tol : float
        Dead band on g' for the Marginal classification.
    cpr, cpr_prime, cpr_slope_bound :
        Optional reduced current-phase relation (|i| <= 1), its derivative,
        and a bound on max|i'|, replacing the sinusoid.  With a custom
        relation the roots are bracketed by a uniform scan at the contract
        step instead of the analytic monotone partition.

    Returns
    -------
    list[FixedPoint]
        Every root in the window [c - lambda - eps, c + lambda + eps] with
        c = phi_ext + phi_fe.  Never empty: g(lo) < 0 < g(hi) by |i| <= 1.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    c = phi_ext + p.phi_fe

    def f(x: float) -> float:
        return residual(x, phi_ext, p, cpr)

    if cpr is None:
        bounds = _scan_boundaries(c, p)
    else:
        bounds = _grid_boundaries(c, p, cpr_slope_bound)

    vals = [f(x) for x in bounds]
    roots: list[float] = []

    def push(root: float) -> None:
        if not roots or root - roots[-1] > 1e-12 * max(1.0, abs(root)):
            roots.append(root)

    for (a, b), (fa, fb) in zip(zip(bounds, bounds[1:]), zip(vals, vals[1:])):
        if fa == 0.0:
            push(a)
        elif fb == 0.0:
            continue  # owned by the next segment's left endpoint
        elif (fa < 0.0) != (fb < 0.0):
            push(_bisect(f, a, b, fa, fb))
    if vals[-1] == 0.0:
        push(bounds[-1])

    out = []
    for root in roots:
        r = f(root)
        if abs(r) > tol:
            raise NumericsError(
                f"root at phi={root!r} has residual {r:.3e} > tol {tol:.3e}")
        i = math.sin(TWO_PI * root) if cpr is None else cpr(root)
        out.append(FixedPoint(root, i, classify_stability(root, p, marginal_tol, cpr_prime)))
    return out
