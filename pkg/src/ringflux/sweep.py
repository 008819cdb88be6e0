"""Quasi-static continuation of the occupied flux state under a varying drive.

A sweep follows the stable root of the flux balance as the applied flux
moves through a schedule of waypoints.  While the occupied stable branch
exists the state tracks it continuously; when the drive crosses a fold the
branch vanishes and the state jumps to the nearest surviving stable root
("the flux quantum is admitted").  Folds are located by bisecting the
applied flux between the last surviving and first lost step, then snapped
onto the analytic tangency, so remnant values do not depend on the step
size.

Hysteresis loops run the cycle 0 -> +amplitude -> -amplitude -> 0 and
report the two zero-drive crossings (descending and ascending remnants)
plus the signed loop area of the (phi_ext, i) cycle as traversed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .fixed_points import (
    DEFAULT_MARGINAL_TOL,
    DEFAULT_ROOT_TOL,
    WINDOW_MARGIN,
    FixedPoint,
    NumericsError,
    Stability,
    branch_flux_range,
    branch_index,
    find_fixed_points,
    stable_branch_interval,
)
from .ring_model import TWO_PI, ReducedParams, RingParams

#: Applied-flux resolution of the fold bisection.
FOLD_BISECT_TOL = 1e-12

_MAX_JUMPS_PER_STEP = 64


@dataclass(frozen=True)
class SweepSchedule:
    """Ordered applied-flux waypoints and the maximal sub-step between them."""

    waypoints: tuple[float, ...]
    step: float

    def __post_init__(self) -> None:
        if len(self.waypoints) < 1:
            raise ValueError("schedule needs at least one waypoint")
        if not all(math.isfinite(w) for w in self.waypoints):
            raise ValueError(f"waypoints must be finite, got {self.waypoints}")
        if not (self.step > 0.0 and math.isfinite(self.step)):
            raise ValueError(f"step must be positive and finite, got {self.step}")
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            if a == b:
                raise ValueError(f"consecutive waypoints must differ, got repeated {a}")


@dataclass(frozen=True)
class BranchState:
    """Occupied stable fixed point during a sweep."""

    phi_ext: float
    phi: float
    i: float
    branch_id: int


@dataclass(frozen=True)
class FoldSignal:
    """Raised state of a continuation step that lost its branch.

    The bracket [phi_ext_last_good, phi_ext_first_bad] contains the fold.
    refine_fold() fills in the refined fields (phi_ext_at_jump, phi_before).
    """

    phi_ext_last_good: float
    phi_ext_first_bad: float
    phi_last_good: float
    branch_id: int
    ascending: bool
    phi_ext_at_jump: float | None = None
    phi_before: float | None = None
    fold_refined: bool = False


@dataclass(frozen=True)
class TrajectorySample:
    phi_ext: float
    phi: float
    i: float
    branch_id: int


@dataclass(frozen=True)
class JumpEvent:
    """One branch loss: drive value, departing and landing flux."""

    phi_ext_at_jump: float
    phi_before: float
    phi_after: float
    fold_refined: bool
    landing_index: int


@dataclass(frozen=True)
class SweepTrajectory:
    """Time-ordered stable samples with the jump events between them.

    waypoint_indices[k] is the sample index at schedule waypoint k.
    """

    samples: tuple[TrajectorySample, ...]
    events: tuple[JumpEvent, ...]
    waypoint_indices: tuple[int, ...]


@dataclass(frozen=True)
class HysteresisLoop:
    """Full drive cycle 0 -> +amp -> -amp -> 0 and its summary numbers.

    `up` holds the ascending passes (initial 0 -> +amp and final -amp -> 0),
    `down` the descending pass +amp -> -amp, `cycle` everything in time
    order.  Remnants are the flux at the two zero-drive crossings after the
    start; loop_area is the trapezoidal integral of i d(phi_ext) over the
    cycle as traversed, with jump verticals contributing nothing.
    """

    up: SweepTrajectory
    down: SweepTrajectory
    remnant_up: float
    remnant_down: float
    loop_area: float
    cycle: SweepTrajectory


class RemnantReport(NamedTuple):
    n_up: int
    n_down: int
    B_remnant_up: float
    B_remnant_down: float
    phi_up: float
    phi_down: float


# ---------------------------------------------------------------------------
# Single-branch continuation
# ---------------------------------------------------------------------------

def _branch_bounds(p: ReducedParams, k: int, c: float) -> tuple[float, float]:
    """Flux interval on which the occupied branch is solved."""
    if p.beta > 1.0:
        return stable_branch_interval(k, p.beta)
    return c - p.lam - WINDOW_MARGIN, c + p.lam + WINDOW_MARGIN


def _branch_alive(p: ReducedParams, k: int, c: float) -> bool:
    if p.beta <= 1.0:
        return True
    c_lo, c_hi = branch_flux_range(k, p.beta)
    return c_lo <= c <= c_hi


def _solve_on_branch(p: ReducedParams, k: int, c: float, x0: float,
                     tol: float) -> float:
    """Root of phi - lam*sin(2*pi*phi) = c on the (monotone) branch segment.

    Safeguarded Newton: every iterate stays inside the shrinking sign
    bracket, falling back to bisection whenever Newton leaves it, so the
    solve converges for any branch position including fold-adjacent ones.
    """
    lam = p.lam
    a, b = _branch_bounds(p, k, c)

    def f(x: float) -> float:
        return x - lam * math.sin(TWO_PI * x) - c

    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa > 0.0 or fb < 0.0:
        raise NumericsError(
            f"branch {k} does not bracket c={c!r} (f(a)={fa:.3e}, f(b)={fb:.3e})")

    x = min(max(x0, a), b)
    fx = f(x)
    for _ in range(160):
        if fx == 0.0:
            return x
        if fx < 0.0:
            a = x
        else:
            b = x
        d = 1.0 - p.beta * math.cos(TWO_PI * x)
        xn = x - fx / d if d > 0.0 else 0.5 * (a + b)
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        if xn == x or not (a < xn < b):
            break  # position converged to machine width
        x, fx = xn, f(xn)
    if abs(fx) > tol:
        raise NumericsError(f"branch solve stalled at |g|={abs(fx):.3e} > {tol:.3e}")
    return x


def continue_branch(state: BranchState, phi_ext_next: float, p: ReducedParams,
                    tol: float = DEFAULT_ROOT_TOL) -> BranchState | FoldSignal:
    """Advance the occupied stable root to the next applied flux.

    Returns the new BranchState while the occupied branch still exists at
    phi_ext_next (the stable root nearest the current flux), otherwise a
    FoldSignal bracketing the drive value at which the branch vanishes.
    For beta <= 1 the branch exists for every drive, so a fold is never
    signalled.
    """
    if phi_ext_next == state.phi_ext:
        return state
    c_next = phi_ext_next + p.phi_fe
    if not _branch_alive(p, state.branch_id, c_next):
        return FoldSignal(
            phi_ext_last_good=state.phi_ext,
            phi_ext_first_bad=phi_ext_next,
            phi_last_good=state.phi,
            branch_id=state.branch_id,
            ascending=phi_ext_next > state.phi_ext,
        )
    phi = _solve_on_branch(p, state.branch_id, c_next, state.phi, tol)
    return BranchState(phi_ext_next, phi, math.sin(TWO_PI * phi), state.branch_id)


def refine_fold(fold: FoldSignal, p: ReducedParams,
                tol: float = DEFAULT_ROOT_TOL) -> FoldSignal:
    """Locate the fold drive value inside the signal's bracket.

    Bisects the applied flux between the last surviving and first lost step
    down to FOLD_BISECT_TOL, then snaps onto the analytic tangency of the
    branch (where the fold sits exactly); the snap is what makes remnants
    independent of the sweep step.
    """
    if fold.fold_refined:
        return fold
    good, bad = fold.phi_ext_last_good, fold.phi_ext_first_bad
    while abs(bad - good) > FOLD_BISECT_TOL:
        mid = 0.5 * (good + bad)
        if mid == good or mid == bad:
            break
        if _branch_alive(p, fold.branch_id, mid + p.phi_fe):
            good = mid
        else:
            bad = mid

    c_lo, c_hi = branch_flux_range(fold.branch_id, p.beta)
    seg_lo, seg_hi = stable_branch_interval(fold.branch_id, p.beta)
    if fold.ascending:
        phi_ext_fold, phi_fold = c_hi - p.phi_fe, seg_hi
    else:
        phi_ext_fold, phi_fold = c_lo - p.phi_fe, seg_lo

    snap_tol = 16.0 * FOLD_BISECT_TOL * max(1.0, abs(phi_ext_fold))
    if abs(phi_ext_fold - good) <= snap_tol:
        return replace(fold, phi_ext_at_jump=phi_ext_fold, phi_before=phi_fold,
                       fold_refined=True)
    # analytic tangency unexpectedly far from the bisected bracket: keep the
    # bisected value and the last surviving flux
    return replace(fold, phi_ext_at_jump=good, phi_before=fold.phi_last_good,
                   fold_refined=False)


def resolve_jump(fold: FoldSignal, p: ReducedParams,
                 tol: float = DEFAULT_ROOT_TOL) -> FixedPoint:
    """Stable root the system falls onto when the occupied branch vanishes.

    Among all stable roots at the fold drive, excluding the vanishing
    branch, picks the one nearest in flux to the departing state; ties break
    toward smaller |i|, then smaller phi.  A stable root always survives a
    fold, so this never comes up empty.
    """
    if fold.phi_ext_at_jump is None:
        fold = refine_fold(fold, p, tol)
    roots = find_fixed_points(fold.phi_ext_at_jump, p, tol)
    candidates = [
        r for r in roots
        if r.stability is Stability.STABLE
        and branch_index(r.phi, p.beta) != fold.branch_id
    ]
    if not candidates:
        raise NumericsError(
            f"no stable root survives the fold at phi_ext={fold.phi_ext_at_jump!r}")
    phi_before = fold.phi_before
    return min(candidates, key=lambda r: (abs(r.phi - phi_before), abs(r.i), r.phi))


# ---------------------------------------------------------------------------
# Schedules and loops
# ---------------------------------------------------------------------------

def _initial_state(p: ReducedParams, phi_ext: float, tol: float,
                   marginal_tol: float, phi_hint: float) -> BranchState:
    roots = find_fixed_points(phi_ext, p, tol, marginal_tol)
    stable = [r for r in roots if r.stability is Stability.STABLE]
    if not stable:  # beta == 1 tangency corner: accept the marginal root
        stable = [r for r in roots if r.stability is Stability.MARGINAL]
    if not stable:
        raise NumericsError(f"no stable root at phi_ext={phi_ext!r}")
    pick = min(stable, key=lambda r: (abs(r.phi - phi_hint), abs(r.i), r.phi))
    return BranchState(phi_ext, pick.phi, pick.i, branch_index(pick.phi, p.beta))


def run_schedule(p: ReducedParams, schedule: SweepSchedule,
                 tol: float = DEFAULT_ROOT_TOL,
                 marginal_tol: float = DEFAULT_MARGINAL_TOL,
                 init_phi_hint: float = 0.0) -> SweepTrajectory:
    """Sweep the applied flux through the schedule, recording every sub-step.

    The sweep starts on the stable root nearest `init_phi_hint` at the first
    waypoint (the virgin state for hysteresis runs).  Samples are appended
    at every sub-step and at every jump landing; each sample is a stable
    fixed point at its drive value.
    """
    w = schedule.waypoints
    state = _initial_state(p, w[0], tol, marginal_tol, init_phi_hint)
    samples = [TrajectorySample(state.phi_ext, state.phi, state.i, state.branch_id)]
    events: list[JumpEvent] = []
    waypoint_indices = [0]

    for w0, w1 in zip(w, w[1:]):
        nsub = max(1, math.ceil(abs(w1 - w0) / schedule.step))
        delta = (w1 - w0) / nsub
        for j in range(1, nsub + 1):
            pe = w1 if j == nsub else w0 + j * delta
            for _ in range(_MAX_JUMPS_PER_STEP):
                nxt = continue_branch(state, pe, p, tol)
                if nxt is state:
                    break  # a jump landed exactly on this sub-step's drive
                if isinstance(nxt, BranchState):
                    state = nxt
                    samples.append(TrajectorySample(pe, state.phi, state.i,
                                                    state.branch_id))
                    break
                fold = refine_fold(nxt, p, tol)
                landing = resolve_jump(fold, p, tol)
                lb = branch_index(landing.phi, p.beta)
                samples.append(TrajectorySample(fold.phi_ext_at_jump, landing.phi,
                                                landing.i, lb))
                events.append(JumpEvent(fold.phi_ext_at_jump, fold.phi_before,
                                        landing.phi, fold.fold_refined,
                                        landing_index=len(samples) - 1))
                state = BranchState(fold.phi_ext_at_jump, landing.phi, landing.i, lb)
            else:
                raise NumericsError(
                    f"more than {_MAX_JUMPS_PER_STEP} folds inside one sub-step; "
                    f"step {schedule.step} is too coarse")
        waypoint_indices.append(len(samples) - 1)

    return SweepTrajectory(tuple(samples), tuple(events), tuple(waypoint_indices))


def loop_area(traj: SweepTrajectory) -> float:
    """Trapezoidal integral of i d(phi_ext) along the trajectory.

    Jump verticals (current discontinuities at fixed drive) are inserted
    explicitly so they contribute zero area instead of a spurious smear.
    """
    by_landing = {e.landing_index: e for e in traj.events}
    xs: list[float] = []
    ys: list[float] = []
    for idx, s in enumerate(traj.samples):
        e = by_landing.get(idx)
        if e is not None:
            xs.append(e.phi_ext_at_jump)
            ys.append(math.sin(TWO_PI * e.phi_before))
        xs.append(s.phi_ext)
        ys.append(s.i)
    x = np.asarray(xs)
    y = np.asarray(ys)
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def _slice_trajectory(traj: SweepTrajectory, lo: int, hi: int) -> SweepTrajectory:
    samples = traj.samples[lo:hi + 1]
    events = tuple(
        replace(e, landing_index=e.landing_index - lo)
        for e in traj.events if lo < e.landing_index <= hi
    )
    return SweepTrajectory(samples, events, (0, len(samples) - 1))


def _concat_trajectories(a: SweepTrajectory, b: SweepTrajectory) -> SweepTrajectory:
    offset = len(a.samples)
    events = a.events + tuple(
        replace(e, landing_index=e.landing_index + offset) for e in b.events)
    return SweepTrajectory(a.samples + b.samples, events,
                           a.waypoint_indices + tuple(i + offset for i in b.waypoint_indices))


def run_hysteresis(p: ReducedParams, amplitude: float, step: float,
                   tol: float = DEFAULT_ROOT_TOL,
                   marginal_tol: float = DEFAULT_MARGINAL_TOL) -> HysteresisLoop:
    """Drive the cycle 0 -> +amplitude -> -amplitude -> 0 and summarize it.

    Starts from the virgin state (stable root nearest phi = 0 at zero
    drive).  Returns the loop with both remnant crossings and the signed
    cycle area; for beta < 1 the passes retrace each other and the area
    vanishes to roundoff.
    """
    if not (amplitude > 0.0 and math.isfinite(amplitude)):
        raise ValueError(f"amplitude must be positive and finite, got {amplitude}")
    if not (step > 0.0 and math.isfinite(step)):
        raise ValueError(f"step must be positive and finite, got {step}")

    schedule = SweepSchedule((0.0, amplitude, 0.0, -amplitude, 0.0), step)
    traj = run_schedule(p, schedule, tol, marginal_tol, init_phi_hint=0.0)
    i0, i1, i2, i3, i4 = traj.waypoint_indices

    up = _concat_trajectories(_slice_trajectory(traj, i0, i1),
                              _slice_trajectory(traj, i3, i4))
    down = _slice_trajectory(traj, i1, i3)
    return HysteresisLoop(
        up=up,
        down=down,
        remnant_up=traj.samples[i4].phi,
        remnant_down=traj.samples[i2].phi,
        loop_area=loop_area(traj),
        cycle=traj,
    )


def remnant_report(loop: HysteresisLoop, params: RingParams) -> RemnantReport:
    """Quantized remnant indices and the corresponding trapped fields.

    n is the nearest integer to each raw remnant flux; the reported field is
    the quantized one, n*Phi0/area_A.  The raw (unrounded) remnant fluxes
    ride along so the two are never conflated.
    """
    n_up = int(np.rint(loop.remnant_up))
    n_down = int(np.rint(loop.remnant_down))
    scale = params.Phi0 / params.area_A
    return RemnantReport(
        n_up=n_up,
        n_down=n_down,
        B_remnant_up=n_up * scale,
        B_remnant_down=n_down * scale,
        phi_up=loop.remnant_up,
        phi_down=loop.remnant_down,
    )
