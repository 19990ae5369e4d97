"""Hybrid simulation and stroboscopic-map analysis of periodically reset ODEs."""

from ._core import (
    DimensionMismatch,
    DomainError,
    FixedPointReport,
    HybridTrajectory,
    IntegratorConfig,
    InvalidTarget,
    Model,
    NegativePopulation,
    NoConvergence,
    ParseError,
    ResetlabError,
    ResetRule,
    SingularJacobian,
    StepUnderflow,
    StroboscopicMap,
    Unsupported,
    ValidationError,
    apply_reset,
    basin_scan,
    estimate_contraction,
    find_fixed_point,
    integrate,
    model_names,
    parameter_sweep,
    run_command,
    simulate_hybrid,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
