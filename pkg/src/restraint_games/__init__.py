"""Equilibrium computation for two-player restraint-signaling games."""

from .game import (
    TOL,
    Mechanism,
    MechanismSpec,
    ModelParams,
    Outcome,
    ParameterError,
    PayoffPair,
    TypeLabel,
    Variant,
    payoff,
)
from .conditions import (
    Clause,
    ConditionReport,
    EquilibriumReport,
    classify,
    pooling_exists,
    separating_exists,
    type_shift_refrain,
)
from .oracle import (
    BeliefAssignment,
    BudgetExceededError,
    DiscreteGame,
    Discrepancy,
    DiscrepancyError,
    DiscrepancyReport,
    PBECertificate,
    PBEClass,
    StrategyProfile,
    find_all_pbe,
    is_weak_pbe,
    supporting_belief_interval,
    verify_against_closed_form,
)
from .sweep import (
    Axis,
    BoundaryPoint,
    Classification,
    GridSpec,
    RegionRow,
    boundary_trace,
    run_sweep,
    write_rows_csv,
    write_rows_json,
)
from .montecarlo import (
    DriftMode,
    SimConfig,
    SimResult,
    pooling_profile,
    simulate,
)

__all__ = [
    "TOL",
    "Mechanism",
    "MechanismSpec",
    "ModelParams",
    "Outcome",
    "ParameterError",
    "PayoffPair",
    "TypeLabel",
    "Variant",
    "payoff",
    "Clause",
    "ConditionReport",
    "EquilibriumReport",
    "classify",
    "pooling_exists",
    "separating_exists",
    "type_shift_refrain",
    "BeliefAssignment",
    "BudgetExceededError",
    "DiscreteGame",
    "Discrepancy",
    "DiscrepancyError",
    "DiscrepancyReport",
    "PBECertificate",
    "PBEClass",
    "StrategyProfile",
    "find_all_pbe",
    "is_weak_pbe",
    "supporting_belief_interval",
    "verify_against_closed_form",
    "Axis",
    "BoundaryPoint",
    "Classification",
    "GridSpec",
    "RegionRow",
    "boundary_trace",
    "run_sweep",
    "write_rows_csv",
    "write_rows_json",
    "DriftMode",
    "SimConfig",
    "SimResult",
    "pooling_profile",
    "simulate",
]

__version__ = "0.1.0"
