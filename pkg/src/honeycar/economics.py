"""Utilities, budget arithmetic and the honeypot investment decision."""
from __future__ import annotations

import math
from typing import Mapping, NamedTuple, Optional, Sequence

from . import solver
from .model import (
    BudgetContext,
    DecisionReport,
    DomainError,
    Equilibrium,
    GameInstance,
    GameVulnerability,
    HoneypotKind,
    HoneypotProfile,
    KindOutcome,
    SolveMode,
    UtilityBreakdown,
    Variant,
)


def intelligence_gain(nu: float, learning_rate: float) -> float:
    """Threat intelligence gained, ``exp(1 / (1 + lambda * nu))``."""
    if not nu > 0:
        raise DomainError(f"game value must be positive, got {nu}")
    return math.exp(1.0 / (1.0 + learning_rate * nu))


def monitoring_cost(nu: float, monitoring_factor: float, m: int) -> float:
    """Monitoring cost ``exp(-1 / (alpha * m * nu))``.

    The exponent is negative; with a positive exponent the published worked
    examples (c = 0.418 and 0.429) cannot be reproduced.
    """
    if not nu > 0:
        raise DomainError(f"game value must be positive, got {nu}")
    if m < 1:
        raise DomainError(f"offered set size must be >= 1, got {m}")
    if not monitoring_factor > 0:
        raise DomainError("monitoring factor must be positive")
    return math.exp(-1.0 / (monitoring_factor * m * nu))


def game_utility(g: float, c: float, S: float, variant: Variant) -> UtilityBreakdown:
    if g < 0 or c < 0:
        raise DomainError("gain and monitoring cost must be non-negative")
    if variant is Variant.A:
        if S != 0:
            raise ValueError("variant A carries no reconfiguration spend")
        return UtilityBreakdown(g, c, 0.0, g - c)
    return UtilityBreakdown(g, c, S, g - c - S)


def breakdown_for(eq: Equilibrium, instance: GameInstance,
                  profile: HoneypotProfile) -> Optional[UtilityBreakdown]:
    """Utility of a solved configuration; ``None`` when the value is not positive.

    A non-positive value (possible in signed penalty mode) leaves the gain and
    cost functions undefined.
    """
    nu = eq.value
    if not nu > 0:
        return None
    g = intelligence_gain(nu, profile.learning_rate)
    c = monitoring_cost(nu, profile.monitoring_factor, instance.size)
    if instance.variant is Variant.A:
        return game_utility(g, c, 0.0, Variant.A)
    return game_utility(g, c, solver.reconfig_penalty(eq.x, instance.psi), Variant.B)


class ResidualBudget(NamedTuple):
    value: float
    kind: HoneypotKind
    tie: bool


def residual_budget(B: float, C_l: float, U_l: float, C_h: float, U_h: float) -> ResidualBudget:
    """Budget left after the better honeypot choice; ties go to the cheaper LIH."""
    lih = B - C_l + U_l
    hih = B - C_h + U_h
    if hih > lih:
        return ResidualBudget(hih, HoneypotKind.HIH, False)
    return ResidualBudget(lih, HoneypotKind.LIH, lih == hih)


def invest_decision(context: BudgetContext, per_type_utility: Mapping[HoneypotKind, float],
                    utility_rounds: float = 1.0,
                    per_type: Optional[Mapping[HoneypotKind, KindOutcome]] = None) -> DecisionReport:
    """Root of the decision tree: no honeypot when ``L < B``, else pick the type.

    ``utility_rounds`` scales the single-round utilities before they enter the
    residual budget.
    """
    if context.expected_loss < context.budget:
        return DecisionReport(invest=False, per_type=dict(per_type or {}))
    missing = [k.name for k in HoneypotKind if k not in per_type_utility]
    if missing:
        raise ValueError(f"missing utility for {', '.join(missing)}")
    res = residual_budget(
        context.budget,
        context.lih_profile.implementation_cost,
        utility_rounds * per_type_utility[HoneypotKind.LIH],
        context.hih_profile.implementation_cost,
        utility_rounds * per_type_utility[HoneypotKind.HIH],
    )
    return DecisionReport(
        invest=True,
        chosen_kind=res.kind,
        residual_budget=res.value,
        tie=res.tie,
        per_type=dict(per_type or {}),
    )


def evaluate_configuration(eligible: Sequence[GameVulnerability], profile: HoneypotProfile,
                           params, options=None, *, pinned_x=None,
                           pinned_value: Optional[float] = None) -> tuple[Equilibrium, UtilityBreakdown]:
    """Solve, read off the attacker's reply, and price the configuration.

    Steps: solve for ``x`` (or take ``pinned_x``), compute the attacker's best
    response, then the reconfiguration spend at ``x`` and the utility. A pinned
    point may carry an externally reported value via ``pinned_value``, which is
    then used for the gain and cost.
    """
    if not eligible:
        raise ValueError("no eligible vulnerabilities")
    options = options or solver.SolverOptions()
    instance = solver.make_instance(eligible, params)
    if pinned_x is not None:
        x = solver._check_distribution(pinned_x, instance.size)
        j, response = solver.attacker_best_response(x, instance)
        value = response if pinned_value is None else float(pinned_value)
        eq = Equilibrium(tuple(float(p) for p in x), value, j, response, SolveMode.PINNED)
    else:
        eq = solver.solve(instance, options)
    breakdown = breakdown_for(eq, instance, profile)
    if breakdown is None:
        raise DomainError(f"solved value {eq.value} is not positive; utility undefined")
    return eq, breakdown


def inclusion_report(eq: Equilibrium, ids: Sequence[str], epsilon: float = 1e-3) -> list[dict]:
    """Per-vulnerability inclusion probabilities with the support threshold applied."""
    return [
        {"id": vid, "probability": p, "offered": p > epsilon}
        for vid, p in zip(ids, eq.x)
    ]
