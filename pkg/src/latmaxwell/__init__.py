"""Coupled integer-lattice iteration and the discretized vacuum Maxwell equations."""

from .analysis import (
    GrowthEstimate,
    MaximaReport,
    Series,
    SubspaceSpec,
    detect_maxima,
    growth_factor,
    probe_series,
    significant_digit_agreement,
    slice_along_x,
    subspace_statistic,
    subspace_sum,
)
from .engine import (
    NO_PRUNING,
    CouplingEntry,
    EngineState,
    NonFiniteError,
    PrunePolicy,
    RunRecord,
    ValidationError,
    run,
    step,
    validate_table,
)
from .lattice import DenseLattice, PruneReport, SparseLattice
from .maxwell import (
    ORIGIN,
    SQRT_ALPHA,
    CouplingFactor,
    FieldState,
    PhysicalScale,
    build_maxwell_table,
    canonical_initial_state,
    coupling_factor,
    run_maxwell,
    sqrt_alpha,
    step_maxwell_direct,
)

__version__ = "0.1.0"
