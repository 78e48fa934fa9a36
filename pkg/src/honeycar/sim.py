"""Monte Carlo engine for the repeated configuration game.

Each round includes vulnerability ``j`` independently with probability
``p_j``; the attacker then picks one included vulnerability according to a
policy. Between consecutive rounds the defender pays ``s_j^+`` to open and
``s_j^-`` to patch, so the long-run mean spend per transition estimates
``sum_j psi_j p_j (1 - p_j)``.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

import numpy as np

from . import kernels
from .model import GameInstance
from .solver import attacker_payoff, reconfig_penalty

Z_THRESHOLD = 3.0
MIN_CONCLUSIVE = 30
TRACE_HEADER = ("round", "offered", "opened", "patched", "attacked", "engagement", "reconfig_spend")


class AttackerPolicy(enum.Enum):
    BEST_RESPONSE = "best-response"
    EASIEST_FIRST = "easiest-first"
    UNIFORM_RANDOM = "uniform"

    @property
    def code(self) -> int:
        return {
            AttackerPolicy.BEST_RESPONSE: kernels.BEST_RESPONSE,
            AttackerPolicy.EASIEST_FIRST: kernels.EASIEST_FIRST,
            AttackerPolicy.UNIFORM_RANDOM: kernels.UNIFORM_RANDOM,
        }[self]


@dataclass(frozen=True)
class RoundEvent:
    round_index: int
    offered_now: tuple[int, ...]
    opened: tuple[int, ...]
    patched: tuple[int, ...]
    open_spend: float
    patch_spend: float
    attacked: Optional[int]
    engagement: float

    @property
    def reconfig_spend(self) -> float:
        return self.open_spend + self.patch_spend


@dataclass(frozen=True)
class SimulationStats:
    rounds: int
    mean_reconfig_spend: float
    reconfig_spend_se: float
    mean_engagement: float
    engagement_se: float
    empirical_attack_frequency: tuple[float, ...]
    empirical_value: float
    offer_frequency: tuple[float, ...]
    empirical_payoff: tuple[float, ...]
    idle_rounds: int
    seed: int
    policy: AttackerPolicy

    @property
    def standard_errors_defined(self) -> bool:
        return not (math.isnan(self.reconfig_spend_se) or math.isnan(self.engagement_se))


@dataclass(frozen=True)
class ValidationReport:
    expected_reconfig_spend: float
    reconfig_z: float
    expected_payoff: tuple[float, ...]
    payoff_z: tuple[float, ...]
    flagged: bool
    inconclusive: bool
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def max_abs_z(self) -> float:
        zs = [abs(self.reconfig_z), *map(abs, self.payoff_z)]
        finite = [z for z in zs if not math.isnan(z)]
        return max(finite) if finite else math.nan


def _validated_x(x, n) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"strategy must have length {n}")
    if np.any(x < 0) or abs(math.fsum(x) - 1.0) > 1e-6:
        raise ValueError("strategy is not a probability vector")
    return x


def _one_dependent_se(series: np.ndarray) -> float:
    """Standard error of the mean of a 1-dependent stationary series."""
    n = series.size
    if n < 2:
        return math.nan
    centered = series - series.mean()
    var = float(np.dot(centered, centered)) / n
    lag1 = float(np.dot(centered[1:], centered[:-1])) / n
    long_run = var + 2.0 * lag1
    if long_run < 0.0:
        long_run = var
    return math.sqrt(long_run / n)


def simulate_arrays(instance: GameInstance, x, policy: AttackerPolicy, rounds: int, seed: int):
    """Raw simulation output: inclusion matrix, attacked indices, spend splits."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    n = instance.size
    p = _validated_x(x, n)
    rng = np.random.default_rng(seed)
    u_incl = rng.random((rounds, n))
    u_choice = rng.random(rounds)
    inc, attacked = kernels.sample_rounds(
        p, instance.gamma_array(), instance.exploit_times, u_incl, u_choice, policy.code
    )
    inc = inc.astype(bool)
    open_cost = np.array([v.open_cost for v in instance.offered])
    patch_cost = np.array([v.patch_cost for v in instance.offered])
    opened = np.zeros_like(inc)
    patched = np.zeros_like(inc)
    opened[1:] = inc[1:] & ~inc[:-1]
    patched[1:] = ~inc[1:] & inc[:-1]
    return inc, attacked, opened, patched, opened @ open_cost, patched @ patch_cost


def run_rounds(instance: GameInstance, x, policy: AttackerPolicy = AttackerPolicy.BEST_RESPONSE,
               rounds: int = 10_000, seed: int = 0,
               with_events: bool = True) -> tuple[list[RoundEvent], SimulationStats]:
    inc, attacked, opened, patched, open_spend, patch_spend = simulate_arrays(
        instance, x, policy, rounds, seed
    )
    n = instance.size
    t = instance.exploit_times
    gamma = instance.gamma_array()
    hit = attacked >= 0
    engagement = np.where(hit, t[np.maximum(attacked, 0)], 0.0)
    attacker_gain = np.where(hit, gamma[np.maximum(attacked, 0)], 0.0)
    spend = open_spend + patch_spend

    transitions = spend[1:]
    mean_spend = float(transitions.mean()) if transitions.size else math.nan
    counts = np.bincount(attacked[hit], minlength=n).astype(float)
    attacks = counts.sum()
    freq = counts / attacks if attacks else counts
    offer_freq = inc.mean(axis=0)
    stats = SimulationStats(
        rounds=rounds,
        mean_reconfig_spend=mean_spend,
        reconfig_spend_se=_one_dependent_se(transitions),
        mean_engagement=float(engagement.mean()),
        engagement_se=float(engagement.std(ddof=1) / math.sqrt(rounds)) if rounds > 1 else math.nan,
        empirical_attack_frequency=tuple(freq.tolist()),
        empirical_value=float(attacker_gain.mean()),
        offer_frequency=tuple(offer_freq.tolist()),
        empirical_payoff=tuple((offer_freq * gamma).tolist()),
        idle_rounds=int((~hit).sum()),
        seed=seed,
        policy=policy,
    )
    events = []
    if with_events:
        for r in range(rounds):
            a = int(attacked[r])
            events.append(RoundEvent(
                round_index=r,
                offered_now=tuple(np.flatnonzero(inc[r]).tolist()),
                opened=tuple(np.flatnonzero(opened[r]).tolist()),
                patched=tuple(np.flatnonzero(patched[r]).tolist()),
                open_spend=float(open_spend[r]),
                patch_spend=float(patch_spend[r]),
                attacked=a if a >= 0 else None,
                engagement=float(engagement[r]),
            ))
    return events, stats


def _z(observed, expected, se) -> float:
    diff = observed - expected
    if math.isnan(se):
        return math.nan
    if se == 0.0:
        return 0.0 if abs(diff) <= 1e-12 else math.copysign(math.inf, diff)
    return float(diff / se)


def compare_to_analytic(stats: SimulationStats, instance: GameInstance, x) -> ValidationReport:
    """z-scores of simulated spend and per-vulnerability payoff against the model."""
    p = _validated_x(x, instance.size)
    gamma = instance.gamma_array()
    expected_spend = reconfig_penalty(p, instance.psi_array())
    spend_z = _z(stats.mean_reconfig_spend, expected_spend, stats.reconfig_spend_se)

    expected_payoff = tuple(attacker_payoff(p, gamma, j) for j in range(instance.size))
    payoff_z = []
    for j, expected in enumerate(expected_payoff):
        se = gamma[j] * math.sqrt(p[j] * (1.0 - p[j]) / stats.rounds)
        payoff_z.append(_z(stats.empirical_payoff[j], expected, se))

    notes = []
    inconclusive = False
    if stats.rounds - 1 < MIN_CONCLUSIVE:
        inconclusive = True
        notes.append(f"only {stats.rounds} rounds; standard errors are too wide to conclude")
    if math.isnan(spend_z):
        inconclusive = True
        notes.append("reconfiguration spend standard error undefined (fewer than 3 rounds)")
    flagged = any(abs(z) > Z_THRESHOLD for z in [spend_z, *payoff_z] if not math.isnan(z))
    if flagged:
        notes.append(f"a z-score exceeds {Z_THRESHOLD:g}")
    return ValidationReport(
        expected_reconfig_spend=expected_spend,
        reconfig_z=spend_z,
        expected_payoff=expected_payoff,
        payoff_z=tuple(payoff_z),
        flagged=flagged,
        inconclusive=inconclusive,
        notes=tuple(notes),
    )


def _fmt(value: float) -> str:
    return repr(float(value))


def write_trace_csv(events: Sequence[RoundEvent], ids: Sequence[str], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for ev in events:
        writer.writerow([
            ev.round_index,
            ";".join(ids[j] for j in ev.offered_now),
            ";".join(ids[j] for j in ev.opened),
            ";".join(ids[j] for j in ev.patched),
            "" if ev.attacked is None else ids[ev.attacked],
            _fmt(ev.engagement),
            _fmt(ev.reconfig_spend),
        ])
