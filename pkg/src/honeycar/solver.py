"""Equilibrium computation for honeypot configuration games.

Variant A (no reconfiguration cost) has an equalizer optimum in closed form;
a projected-subgradient solver is kept as an independent numeric check.
Variant B adds a concave switching penalty, which makes the defender's
problem nonconvex in literal mode, so it is solved by local descents from
one or many starting points. A lattice grid search validates both on small
instances.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .model import (
    Equilibrium,
    GameInstance,
    GameVulnerability,
    HoneypotProfile,
    PenaltyMode,
    SolveMode,
    SweepRow,
    Variant,
    residual_time,
)

ENUMERATION_LIMIT = 10_000
GRID_MAX_DIMENSION = 4


class ConvergenceError(RuntimeError):
    """A numeric solver hit its iteration budget; carries the best iterate."""

    def __init__(self, message, best_x, best_value, iterations):
        super().__init__(message)
        self.best_x = best_x
        self.best_value = best_value
        self.iterations = iterations


@dataclass(frozen=True)
class SolverOptions:
    multistart_count: int = 32
    max_iterations: int = 5000
    convergence_tol: float = 1e-9
    grid_step: float = 0.01
    seed: int = 0
    multistart: bool = True  # False: a single descent from the uniform point

    def __post_init__(self):
        if self.multistart_count < 1:
            raise ValueError("multistart_count must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.grid_step <= 1.0:
            raise ValueError("grid_step must lie in (0, 1]")


@dataclass(frozen=True)
class GameParams:
    """Parameters shared by every game built from one vulnerability pool."""

    time_constant: float = 4.0
    beta: float = 0.5
    variant: Variant = Variant.A
    penalty_mode: PenaltyMode = PenaltyMode.LITERAL


def build_payoff_diag(offered: Sequence[GameVulnerability], T: float) -> np.ndarray:
    return np.array([residual_time(T, v.exploit_time) for v in offered], dtype=float)


def build_switch_diag(offered: Sequence[GameVulnerability]) -> np.ndarray:
    return np.array([v.open_cost + v.patch_cost for v in offered], dtype=float)


def make_instance(offered: Sequence[GameVulnerability], params: GameParams) -> GameInstance:
    offered = tuple(offered)
    if not offered:
        raise ValueError("offered set is empty")
    return GameInstance(
        offered=offered,
        time_constant=params.time_constant,
        gamma=tuple(build_payoff_diag(offered, params.time_constant).tolist()),
        psi=tuple(build_switch_diag(offered).tolist()),
        beta=params.beta,
        variant=params.variant,
        penalty_mode=params.penalty_mode,
    )


def _check_distribution(x, n=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or (n is not None and x.shape[0] != n):
        raise ValueError(f"strategy must be a vector of length {n}")
    if np.any(x < -1e-12) or abs(math.fsum(x) - 1.0) > 1e-6:
        raise ValueError("strategy is not a probability vector")
    return x


def attacker_payoff(x, gamma, j: int) -> float:
    """Expected attacker payoff ``p_j * gamma_j``; zero for an unoffered ``j``."""
    if not 0 <= j < len(gamma):
        raise IndexError(f"vulnerability index {j} out of range")
    p = float(x[j])
    if p == 0.0:
        return 0.0
    return p * float(gamma[j])


def attacker_payoff_naive(x, t, j: int) -> float:
    """Payoff ``p_j * t_j`` before the residual-time rewrite; ``inf`` if unoffered."""
    p = float(x[j])
    if p > 0.0:
        return p * float(t[j])
    return math.inf


def reconfig_penalty(x, psi) -> float:
    """Expected per-round switching spend ``sum_j psi_j p_j (1 - p_j)``."""
    x = np.asarray(x, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if x.shape != psi.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} probabilities, {psi.shape[0]} costs")
    return float(np.dot(x, psi * (1.0 - x)))


def _objective_coefficients(instance: GameInstance) -> tuple[float, float]:
    if instance.variant is Variant.A:
        return 1.0, 0.0
    return instance.beta, instance.penalty_mode.sign * (1.0 - instance.beta)


def constraint_values(x, instance: GameInstance) -> np.ndarray:
    """Per-vulnerability right-hand sides of the defender's epigraph constraints."""
    x = np.asarray(x, dtype=float)
    beta, coef = _objective_coefficients(instance)
    payoff = x * instance.gamma_array()
    if coef == 0.0:
        return beta * payoff
    return beta * payoff + coef * reconfig_penalty(x, instance.psi_array())


def attacker_best_response(x, instance: GameInstance) -> tuple[int, float]:
    """Attacker's pure reply (lowest index on ties) and the value it attains."""
    x = _check_distribution(x, instance.size)
    values = constraint_values(x, instance)
    j = int(np.argmax(values))
    return j, float(values[j])


def _equilibrium(x, instance, value, mode, iterations=0) -> Equilibrium:
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    x = x / x.sum()
    j, response = attacker_best_response(x, instance)
    return Equilibrium(
        x=tuple(x.tolist()),
        value=float(value),
        response_index=j,
        response_value=response,
        mode=mode,
        iterations=iterations,
    )


def solve_hcg_a(instance: GameInstance) -> Equilibrium:
    """Closed-form equalizer: ``nu = 1 / sum(1/gamma)``, ``p_j = nu / gamma_j``."""
    if instance.variant is not Variant.A:
        raise ValueError("solve_hcg_a needs a variant-A instance")
    inv = 1.0 / instance.gamma_array()
    nu = 1.0 / math.fsum(inv)
    return _equilibrium(inv * nu, instance, nu, SolveMode.CLOSED_FORM)


def solve_hcg_a_numeric(instance: GameInstance, options: SolverOptions = SolverOptions()) -> Equilibrium:
    """Projected subgradient descent on ``min_x max_j p_j gamma_j``."""
    if instance.variant is not Variant.A:
        raise ValueError("solve_hcg_a_numeric needs a variant-A instance")
    n = instance.size
    if n == 1:
        return _equilibrium(np.ones(1), instance, instance.gamma[0], SolveMode.PROJECTED_SUBGRADIENT)
    x, value, iterations, converged = kernels.subgradient_descent(
        instance.gamma_array(), np.full(n, 1.0 / n), options.max_iterations, options.convergence_tol
    )
    if not converged:
        raise ConvergenceError(
            f"subgradient descent did not converge in {iterations} iterations", x, value, iterations
        )
    return _equilibrium(x, instance, value, SolveMode.PROJECTED_SUBGRADIENT, iterations)


def _starting_points(n: int, options: SolverOptions) -> list[np.ndarray]:
    starts = [np.full(n, 1.0 / n)]
    starts.extend(np.eye(n))
    rng = np.random.default_rng(options.seed)
    starts.extend(rng.dirichlet(np.ones(n), size=options.multistart_count))
    return starts


SNAP_THRESHOLDS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)


def _kkt_residual(x, gamma, psi, beta, coef, active, free, zero) -> float:
    """First-order optimality residual of ``x`` for the epigraph form.

    The epigraph problem is ``min beta*s + coef*pen(x)`` subject to
    ``gamma_j x_j <= s`` on the simplex. Multipliers of the active caps must be
    non-negative and sum to ``beta``; free coordinates must share one simplex
    multiplier; zero coordinates must not want to grow. Returns the largest
    violation (0 at a stationary point).
    """
    c = coef * psi * (1.0 - 2.0 * x)
    inv = 1.0 / gamma[active]
    lam = -(beta + float(np.dot(c[active], inv))) / float(inv.sum())
    mu = -(lam + c[active]) * inv
    worst = max(0.0, -float(mu.min()))
    if free.size:
        worst = max(worst, float(np.abs(c[free] + lam).max()))
    if zero.size:
        worst = max(worst, max(0.0, -float((c[zero] + lam).min())))
    return worst


def _partition(x, gamma, eps):
    """Boolean masks of the active and zero coordinates at threshold ``eps``."""
    prod = x * gamma
    is_active = prod >= prod.max() * (1.0 - eps)
    return is_active, (x <= eps) & ~is_active


def _snap(gamma, psi, beta, coef, active, free, zero):
    """Solve the reduced stationarity system for a given active set.

    Active coordinates are pinned to ``s / gamma_j``, zero coordinates stay at
    0 and free coordinates are interior. Returns the new point, or ``None``
    when the system is singular or its solution leaves the feasible region.
    """
    n = gamma.shape[0]
    if free.size and coef == 0.0:
        return None
    inv = 1.0 / gamma[active]
    s_a = float(inv.sum())
    if free.size:
        h = float(np.sum(1.0 / (2.0 * coef * psi[free])))
        a = np.array([
            [s_a, h],
            [-2.0 * coef * float(np.sum(psi[active] * inv * inv)), s_a],
        ])
        b = np.array([1.0 - free.size / 2.0, -beta - coef * float(np.dot(psi[active], inv))])
        try:
            s, lam = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            return None
    else:
        s, lam = 1.0 / s_a, 0.0
    y = np.zeros(n)
    y[active] = s * inv
    if free.size:
        y[free] = 0.5 * (1.0 + lam / (coef * psi[free]))
        if y[free].min() <= 0.0 or np.any(y[free] * gamma[free] >= s):
            return None
    if not s > 0.0 or abs(math.fsum(y) - 1.0) > 1e-9:
        return None
    return y


def _polish(x, gamma, psi, beta, coef, tol):
    """Best stationary point reachable by snapping ``x`` to an active set.

    Returns ``(x, value)`` of the best certified candidate, or ``None``.
    """
    scale = max(beta * gamma.max(), abs(coef) * psi.max(), 1e-12)
    best = None
    seen = set()
    for eps in SNAP_THRESHOLDS:
        is_active, is_zero = _partition(x, gamma, eps)
        key = (is_active.tobytes(), is_zero.tobytes())
        if key in seen:
            continue
        seen.add(key)
        active = np.flatnonzero(is_active)
        zero = np.flatnonzero(is_zero)
        free = np.flatnonzero(~(is_active | is_zero))
        y = _snap(gamma, psi, beta, coef, active, free, zero)
        if y is None:
            continue
        if _kkt_residual(y, gamma, psi, beta, coef, active, free, zero) > max(tol, 1e-12) * scale * 1e3:
            continue
        value = kernels.objective(y, gamma, psi, beta, coef)
        if best is None or value < best[1]:
            best = (y, value)
    return best


def solve_hcg_b(instance: GameInstance, options: SolverOptions = SolverOptions()) -> Equilibrium:
    """Minimize ``beta*max_j p_j gamma_j +/- (1-beta)*penalty(x)`` over the simplex.

    With ``options.multistart`` the best of the uniform point, every vertex and
    ``multistart_count`` seeded Dirichlet draws is returned (earliest start wins
    ties). Otherwise a single descent from the uniform point is run. Each
    descent is finished by snapping to the active set it identified and
    certifying first-order optimality there, since plain gradient steps crawl
    along the ridges where several products ``p_j gamma_j`` tie. Only local
    optimality is guaranteed per start.
    """
    if instance.variant is not Variant.B:
        raise ValueError("solve_hcg_b needs a variant-B instance")
    n = instance.size
    mode = SolveMode.MULTISTART_BEST if options.multistart else SolveMode.LOCAL_FROM_UNIFORM
    gamma = instance.gamma_array()
    psi = instance.psi_array()
    beta, coef = _objective_coefficients(instance)
    if n == 1:
        return _equilibrium(np.ones(1), instance, beta * gamma[0], mode)

    starts = _starting_points(n, options) if options.multistart else [np.full(n, 1.0 / n)]
    best = None
    total_iterations = 0
    last_failure = None
    for x0 in starts:
        x, value, iterations, converged = kernels.local_descent(
            gamma, psi, beta, coef, x0, options.max_iterations, options.convergence_tol
        )
        total_iterations += iterations
        polished = _polish(x, gamma, psi, beta, coef, options.convergence_tol)
        if polished is not None and polished[1] <= value + 1e-12 * max(1.0, abs(value)):
            x, value = polished
            converged = True
        if not converged:
            last_failure = (x, value, iterations)
            continue
        if best is None or value < best[1]:
            best = (x, value)
    if best is None:
        x, value, iterations = last_failure
        raise ConvergenceError(
            f"no local descent converged within {options.max_iterations} iterations",
            x, value, iterations,
        )
    return _equilibrium(best[0], instance, best[1], mode, total_iterations)


def grid_oracle(instance: GameInstance, step: float = 0.01) -> tuple[tuple[float, ...], float]:
    """Exhaustive search of the variant objective on the lattice ``p_j = k_j * step``."""
    n = instance.size
    if n > GRID_MAX_DIMENSION:
        raise ValueError(f"grid oracle supports at most {GRID_MAX_DIMENSION} vulnerabilities, got {n}")
    K = int(round(1.0 / step))
    if not math.isclose(K * step, 1.0, rel_tol=1e-9):
        raise ValueError("grid step must divide 1")
    beta, coef = _objective_coefficients(instance)
    counts, value = kernels.grid_search(instance.gamma_array(), instance.psi_array(), beta, coef, K)
    return tuple((np.asarray(counts) / K).tolist()), float(value)


def grid_equilibrium(instance: GameInstance, step: float = 0.01) -> Equilibrium:
    x, value = grid_oracle(instance, step)
    return _equilibrium(x, instance, value, SolveMode.GRID_ORACLE)


def solve(instance: GameInstance, options: SolverOptions = SolverOptions()) -> Equilibrium:
    if instance.variant is Variant.A:
        return solve_hcg_a(instance)
    return solve_hcg_b(instance, options)


def subset_switch_cost(from_subset: Iterable[str], to_subset: Iterable[str],
                       costs: Mapping[str, tuple[float, float]]) -> float:
    """Cost of reconfiguring from one offered set to another: opens plus patches."""
    src, dst = set(from_subset), set(to_subset)
    unknown = (src | dst) - set(costs)
    if unknown:
        raise KeyError(f"no switch costs for {sorted(unknown)}")
    opened = math.fsum(costs[k][0] for k in sorted(dst - src))
    patched = math.fsum(costs[k][1] for k in sorted(src - dst))
    return opened + patched


def _better(value, ids, best_value, best_ids) -> bool:
    if best_value is None:
        return True
    tol = 1e-12 * max(1.0, abs(best_value))
    if value < best_value - tol:
        return True
    return abs(value - best_value) <= tol and ids < best_ids


def _greedy_subsets(eligible, m_max, params, options):
    """Grow the offered set by the element whose addition lowers the value most."""
    chosen: list[int] = []
    out = {}
    for m in range(1, m_max + 1):
        best = None
        for j in range(len(eligible)):
            if j in chosen:
                continue
            idx = sorted(chosen + [j])
            eq = solve(make_instance([eligible[i] for i in idx], params), options)
            ids = tuple(eligible[i].id for i in idx)
            if best is None or _better(eq.value, ids, best[1].value, best[2]):
                best = (j, eq, ids)
        chosen.append(best[0])
        out[m] = (tuple(sorted(chosen)), best[1])
    return out


def cardinality_sweep(eligible: Sequence[GameVulnerability], m_max: int, params: GameParams,
                      options: SolverOptions = SolverOptions(),
                      profile: Optional[HoneypotProfile] = None) -> list[SweepRow]:
    """Best offered subset for every size ``m = 1..m_max``.

    The defender minimizes the solved value. Subsets are enumerated when
    ``C(n, m) <= 10000``; larger sizes fall back to greedy growth and the row
    is marked heuristic. When ``profile`` is given each row carries its
    utility breakdown.
    """
    from .economics import breakdown_for

    eligible = list(eligible)
    n = len(eligible)
    if not 1 <= m_max <= n:
        raise ValueError(f"m_max={m_max} outside 1..{n}")
    greedy = None
    rows = []
    for m in range(1, m_max + 1):
        heuristic = math.comb(n, m) > ENUMERATION_LIMIT
        if heuristic:
            if greedy is None:
                greedy = _greedy_subsets(eligible, m_max, params, options)
            idx, eq = greedy[m]
        else:
            best = None
            for idx in itertools.combinations(range(n), m):
                ids = tuple(eligible[i].id for i in idx)
                eq = solve(make_instance([eligible[i] for i in idx], params), options)
                if best is None or _better(eq.value, ids, best[1].value, best[2]):
                    best = (idx, eq, ids)
            idx, eq = best[0], best[1]
        offered = [eligible[i] for i in idx]
        instance = make_instance(offered, params)
        breakdown = breakdown_for(eq, instance, profile) if profile is not None else None
        rows.append(SweepRow(
            variant=params.variant,
            penalty_mode=params.penalty_mode if params.variant is Variant.B else None,
            kind=profile.kind if profile is not None else None,
            m=m,
            subset=tuple(v.id for v in offered),
            equilibrium=eq,
            breakdown=breakdown,
            heuristic=heuristic,
        ))
    return rows


def support_report(eq: Equilibrium, epsilon: float = 1e-3) -> dict:
    x = eq.x_array()
    return {
        "size": int(x.size),
        "positive": int(np.count_nonzero(x > 0.0)),
        "below_epsilon": int(np.count_nonzero(x < epsilon)),
        "support": len(eq.support),
        "epsilon": epsilon,
    }

