"""Domain types for honeypot configuration games.

All types are frozen dataclasses; vectors are stored as tuples so that
instances are hashable and safe to share between threads.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

SUPPORT_EPSILON = 1e-3
SIMPLEX_TOL = 1e-9


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a model equation."""


class Complexity(enum.Enum):
    LOW = 1
    MEDIUM = 2
    HIGH = 3

    @property
    def rank(self) -> int:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Complexity":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown complexity {text!r}") from None


class AccessVector(enum.Enum):
    REMOTE = "REMOTE"
    LOCAL = "LOCAL"

    @classmethod
    def parse(cls, text: str) -> "AccessVector":
        key = text.strip().upper()
        if key in ("REMOTE", "NETWORK"):
            return cls.REMOTE
        if key == "LOCAL":
            return cls.LOCAL
        raise ValueError(f"unknown access vector {text!r}")


class HoneypotKind(enum.Enum):
    LIH = "lih"
    HIH = "hih"


class Variant(enum.Enum):
    A = "a"  # no reconfiguration cost
    B = "b"  # reconfiguration penalty in the objective


class PenaltyMode(enum.Enum):
    LITERAL = "literal"  # beta*max + (1-beta)*penalty
    SIGNED = "signed"  # beta*max - (1-beta)*penalty

    @property
    def sign(self) -> float:
        return 1.0 if self is PenaltyMode.LITERAL else -1.0


class SolveMode(enum.Enum):
    CLOSED_FORM = "closed_form"
    PROJECTED_SUBGRADIENT = "projected_subgradient"
    LOCAL_FROM_UNIFORM = "local_from_uniform"
    MULTISTART_BEST = "multistart_best"
    GRID_ORACLE = "grid_oracle"
    PINNED = "pinned"


@dataclass(frozen=True)
class VulnerabilityRecord:
    cve_id: str
    cvss_score: float
    access_vector: AccessVector
    complexity: Complexity
    patch_available: bool

    def __post_init__(self):
        if not self.cve_id or not self.cve_id.strip():
            raise ValueError("cve_id must be non-empty")
        if not (0.0 <= self.cvss_score <= 10.0) or math.isnan(self.cvss_score):
            raise ValueError(f"cvss_score {self.cvss_score} outside [0, 10]")


@dataclass(frozen=True)
class GameVulnerability:
    """A vulnerability as the game sees it: exploit time plus open/patch costs."""

    id: str
    exploit_time: float
    open_cost: float
    patch_cost: float

    def __post_init__(self):
        if not self.exploit_time > 0:
            raise ValueError(f"{self.id}: exploit_time must be positive")
        if self.open_cost < 0 or self.patch_cost < 0:
            raise ValueError(f"{self.id}: switch costs must be >= 0")
        if not self.open_cost + self.patch_cost > 0:
            raise ValueError(f"{self.id}: open_cost + patch_cost must be > 0")

    @property
    def switch_cost(self) -> float:
        return self.open_cost + self.patch_cost


@dataclass(frozen=True)
class HoneypotProfile:
    kind: HoneypotKind
    implementation_cost: float
    learning_rate: float
    monitoring_factor: float
    max_complexity: Complexity

    def __post_init__(self):
        if self.implementation_cost < 0:
            raise ValueError("implementation_cost must be >= 0")
        if not 0.0 < self.learning_rate < 1.0:
            raise ValueError("learning_rate must lie in (0, 1)")
        if not 0.0 < self.monitoring_factor < 1.0:
            raise ValueError("monitoring_factor must lie in (0, 1)")
        if self.kind is HoneypotKind.LIH and self.max_complexity is Complexity.HIGH:
            raise ValueError("a low-interaction honeypot cannot host high-complexity vulnerabilities")
        if self.kind is HoneypotKind.HIH and self.max_complexity is not Complexity.HIGH:
            raise ValueError("a high-interaction honeypot hosts every complexity level")

    @classmethod
    def lih(cls, cost=0.0, learning_rate=0.4, monitoring_factor=0.5):
        return cls(HoneypotKind.LIH, cost, learning_rate, monitoring_factor, Complexity.MEDIUM)

    @classmethod
    def hih(cls, cost=0.0, learning_rate=0.6, monitoring_factor=0.7):
        return cls(HoneypotKind.HIH, cost, learning_rate, monitoring_factor, Complexity.HIGH)


def residual_time(T: float, t_j: float) -> float:
    """Attacker payoff coefficient ``T - t_j``; requires ``T > t_j``."""
    if not T > t_j:
        raise DomainError(f"time constant T={T} must exceed exploit time {t_j}")
    return T - t_j


@dataclass(frozen=True)
class GameInstance:
    offered: tuple[GameVulnerability, ...]
    time_constant: float
    gamma: tuple[float, ...]
    psi: tuple[float, ...]
    beta: float = 0.5
    variant: Variant = Variant.A
    penalty_mode: PenaltyMode = PenaltyMode.LITERAL

    def __post_init__(self):
        m = len(self.offered)
        if m < 1:
            raise ValueError("a game needs at least one offered vulnerability")
        if len(self.gamma) != m or len(self.psi) != m:
            raise ValueError("gamma and psi must have one entry per offered vulnerability")
        if not self.time_constant > max(v.exploit_time for v in self.offered):
            raise DomainError("time constant must exceed every exploit time")
        if min(self.gamma) <= 0 or min(self.psi) <= 0:
            raise ValueError("gamma and psi entries must be positive")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")

    @property
    def size(self) -> int:
        return len(self.offered)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.offered)

    @property
    def exploit_times(self) -> np.ndarray:
        return np.array([v.exploit_time for v in self.offered], dtype=float)

    def gamma_array(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=float)

    def psi_array(self) -> np.ndarray:
        return np.asarray(self.psi, dtype=float)


@dataclass(frozen=True)
class Equilibrium:
    """Defender mixed strategy with the value and the attacker's pure reply.

    ``value`` is the solved game value. For pinned regression points it is
    the externally supplied scalar and may differ from ``response_value``.
    """

    x: tuple[float, ...]
    value: float
    response_index: int
    response_value: float
    mode: SolveMode
    iterations: int = 0

    def __post_init__(self):
        if min(self.x) < 0:
            raise ValueError("strategy has negative entries")
        if abs(math.fsum(self.x) - 1.0) > SIMPLEX_TOL:
            raise ValueError("strategy does not sum to 1")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, p in enumerate(self.x) if p > SUPPORT_EPSILON)

    def x_array(self) -> np.ndarray:
        return np.asarray(self.x, dtype=float)


@dataclass(frozen=True)
class UtilityBreakdown:
    gain: float
    monitoring: float
    reconfig_spend: float
    utility: float


@dataclass(frozen=True)
class BudgetContext:
    budget: float
    expected_loss: float
    lih_profile: HoneypotProfile
    hih_profile: HoneypotProfile

    def __post_init__(self):
        if self.budget < 0 or self.expected_loss < 0:
            raise ValueError("budget and expected loss must be >= 0")

    def profile(self, kind: HoneypotKind) -> HoneypotProfile:
        return self.lih_profile if kind is HoneypotKind.LIH else self.hih_profile


@dataclass(frozen=True)
class SweepRow:
    variant: Variant
    penalty_mode: Optional[PenaltyMode]
    kind: Optional[HoneypotKind]
    m: int
    subset: tuple[str, ...]
    equilibrium: Equilibrium
    breakdown: Optional[UtilityBreakdown]
    heuristic: bool = False

    def __post_init__(self):
        if len(self.subset) != self.m:
            raise ValueError("subset size must equal m")


@dataclass(frozen=True)
class KindOutcome:
    utility: float
    breakdown: UtilityBreakdown
    equilibrium: Equilibrium
    m: int
    subset: tuple[str, ...]


@dataclass(frozen=True)
class DecisionReport:
    invest: bool
    chosen_kind: Optional[HoneypotKind] = None
    residual_budget: Optional[float] = None
    tie: bool = False
    per_type: dict = field(default_factory=dict)
