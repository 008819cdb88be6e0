"""Quasi-static flux dynamics of a superconducting ring with an effective
Josephson junction, self-inductance, and a shielded ferromagnetic bias flux.

Work in reduced units (flux in quanta, current in units of the critical
current): build a ReducedParams, find flux states with find_fixed_points,
drive hysteresis loops with run_hysteresis, and invert measured remnants
with fit_parameters.  SI in and out goes through RingParams / reduce /
unreduce.
"""

from .bloch_cpr import (
    FreeEnergyModel,
    SymmetryReport,
    current,
    finite_difference_current_error,
    free_energy,
    fundamental_harmonic,
    reduced_cpr,
    validate_symmetries,
)
from .fit import (
    FitBounds,
    FitResult,
    Observation,
    ObservationKind,
    fit_parameters,
    simulate_observables,
)
from .fixed_points import (
    FixedPoint,
    FoldPoint,
    NumericsError,
    Stability,
    classify_stability,
    find_fixed_points,
    fold_locations,
    residual,
    residual_derivative,
)
from .ring_model import (
    COOPER_PAIR_CHARGE,
    COOPER_PAIR_MASS,
    FLUX_QUANTUM,
    FluxoidState,
    ReducedParams,
    RingParams,
    fluxoid,
    josephson_current,
    quantization_index,
    reduce,
    unreduce,
)
from .sweep import (
    BranchState,
    FoldSignal,
    HysteresisLoop,
    JumpEvent,
    RemnantReport,
    SweepSchedule,
    SweepTrajectory,
    TrajectorySample,
    continue_branch,
    loop_area,
    refine_fold,
    remnant_report,
    resolve_jump,
    run_hysteresis,
    run_schedule,
)
from .wide_ring import (
    WideRingState,
    currents_at,
    phase_sine,
    quantized_phase,
    remnant_field,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
