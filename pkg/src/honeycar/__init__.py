"""Honeypot configuration games for connected-vehicle networks."""
from .kernels import BACKEND
from .model import (
    Complexity,
    AccessVector,
    HoneypotKind,
    Variant,
    PenaltyMode,
    SolveMode,
    DomainError,
    VulnerabilityRecord,
    GameVulnerability,
    HoneypotProfile,
    GameInstance,
    Equilibrium,
    BudgetContext,
)
from .solver import GameParams, SolverOptions, ConvergenceError, make_instance, solve, cardinality_sweep
from .economics import evaluate_configuration, invest_decision, residual_budget

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Complexity",
    "AccessVector",
    "HoneypotKind",
    "Variant",
    "PenaltyMode",
    "SolveMode",
    "DomainError",
    "VulnerabilityRecord",
    "GameVulnerability",
    "HoneypotProfile",
    "GameInstance",
    "Equilibrium",
    "BudgetContext",
    "GameParams",
    "SolverOptions",
    "ConvergenceError",
    "make_instance",
    "solve",
    "cardinality_sweep",
    "evaluate_configuration",
    "invest_decision",
    "residual_budget",
    "__version__",
]
