import itertools
import math

import numpy as np
import pytest

from honeycar import solver
from honeycar.model import GameVulnerability, HoneypotProfile, PenaltyMode, SolveMode, Variant
from honeycar.ingest import filter_candidates, game_vulnerabilities

from conftest import instance_from_times
from oracle_values import (
    BR_EQUILIBRIUM,
    BR_PINNED,
    HCG_A_VALUE,
    HCG_A_X,
    LITERAL_GRID_VALUE,
    LITERAL_GRID_X,
    PINNED_PENALTY,
    PINNED_X,
    SIGNED_GRID_VALUE,
    SIGNED_GRID_X,
)


def worked(variant=Variant.A, mode=PenaltyMode.LITERAL, beta=0.5):
    return instance_from_times((2, 1, 3), variant, mode, beta)


def test_payoff_and_switch_diagonals(worked_offered):
    assert list(solver.build_payoff_diag(worked_offered, 4)) == [2, 3, 1]
    assert list(solver.build_switch_diag(worked_offered)) == [2, 1, 3]
    with pytest.raises(ValueError):
        solver.build_payoff_diag(worked_offered, 3)


def test_table_diagonals(case_study_catalog):
    lih = game_vulnerabilities(filter_candidates(case_study_catalog, HoneypotProfile.lih()))
    assert sorted(solver.build_payoff_diag(lih, 4)) == [2, 2, 2, 2, 3, 3]
    hih = [v for v in game_vulnerabilities(case_study_catalog.records) if v.id != "CVE-2018-9311"]
    assert sorted(solver.build_switch_diag(hih)) == [1, 2, 2, 2, 2, 3]


def test_attacker_payoffs():
    g = (2.0, 3.0, 1.0)
    assert solver.attacker_payoff((0.273, 0.182, 0.545), g, 2) == pytest.approx(0.545)
    assert solver.attacker_payoff((0.0, 1.0, 0.0), g, 0) == 0.0
    assert solver.attacker_payoff((1.0,), (3.0,), 0) == 3.0
    with pytest.raises(IndexError):
        solver.attacker_payoff((1.0,), (3.0,), 1)
    assert solver.attacker_payoff_naive((0.5, 0.5), (1, 2), 1) == 1.0
    assert solver.attacker_payoff_naive((1.0, 0.0), (1, 2), 1) == math.inf


@pytest.mark.parametrize("x, index, value", [BR_EQUILIBRIUM, BR_PINNED, ((1.0, 0.0), 0, 2.0)])
def test_best_response(x, index, value):
    inst = worked() if len(x) == 3 else instance_from_times((2, 1))
    j, v = solver.attacker_best_response(x, inst)
    assert j == index and v == pytest.approx(value, abs=1e-9)


def test_reconfig_penalty():
    assert solver.reconfig_penalty(PINNED_X, (2, 1, 3)) == pytest.approx(PINNED_PENALTY, abs=1e-9)
    assert solver.reconfig_penalty((1, 0, 0), (5, 6, 7)) == 0
    assert solver.reconfig_penalty((0.5, 0.5), (2, 2)) == 1.0
    with pytest.raises(ValueError):
        solver.reconfig_penalty((0.5, 0.5), (1, 2, 3))


def test_closed_form():
    eq = solver.solve_hcg_a(worked())
    assert eq.value == pytest.approx(HCG_A_VALUE, abs=1e-12)
    np.testing.assert_allclose(eq.x, HCG_A_X, atol=1e-12)
    assert eq.mode is SolveMode.CLOSED_FORM
    eq = solver.solve_hcg_a(instance_from_times((1, 1)))
    assert eq.value == 1.5 and eq.x == (0.5, 0.5)
    eq = solver.solve_hcg_a(instance_from_times((1, 1, 2, 2, 2, 2)))
    assert eq.value == pytest.approx(0.375)
    np.testing.assert_allclose(eq.x, [0.125, 0.125] + [0.1875] * 4)
    with pytest.raises(ValueError):
        solver.solve_hcg_a(worked(Variant.B))


def test_numeric_matches_closed_form():
    eq = solver.solve_hcg_a_numeric(worked())
    assert eq.value == pytest.approx(HCG_A_VALUE, abs=1e-4)
    assert eq.mode is SolveMode.PROJECTED_SUBGRADIENT
    single = solver.make_instance([GameVulnerability("z", 1.0, 1, 1)], solver.GameParams(time_constant=6))
    eq = solver.solve_hcg_a_numeric(single)
    assert eq.value == 5 and eq.x == (1.0,)


def test_numeric_raises_with_best_iterate():
    with pytest.raises(solver.ConvergenceError) as err:
        solver.solve_hcg_a_numeric(instance_from_times((1, 2, 3, 1, 2)), solver.SolverOptions(max_iterations=3))
    assert err.value.best_x is not None and err.value.iterations == 3


def test_hcg_b_literal_global_optimum():
    eq = solver.solve_hcg_b(worked(Variant.B))
    assert eq.value == pytest.approx(LITERAL_GRID_VALUE, abs=1e-9)
    np.testing.assert_allclose(eq.x, LITERAL_GRID_X, atol=1e-9)
    assert eq.mode is SolveMode.MULTISTART_BEST


def test_hcg_b_signed_near_grid():
    eq = solver.solve_hcg_b(worked(Variant.B, PenaltyMode.SIGNED))
    assert eq.value <= SIGNED_GRID_VALUE + 1e-9
    np.testing.assert_allclose(eq.x, SIGNED_GRID_X, atol=0.02)


def test_hcg_b_signed_ridge_instance():
    # Several products tie along a ridge here; plain descent stalls short of the
    # optimum and the active-set snap has to certify the point.
    eq = solver.solve_hcg_b(instance_from_times((1, 3), Variant.B, PenaltyMode.SIGNED, beta=0.25))
    np.testing.assert_allclose(eq.x, (0.375, 0.625), atol=1e-12)
    assert eq.value == pytest.approx(-0.421875, abs=1e-12)


def _best_subset_equalizer(gamma, psi, beta):
    gamma = np.asarray(gamma, dtype=float)
    best = math.inf
    for r in range(1, gamma.size + 1):
        for support in itertools.combinations(range(gamma.size), r):
            idx = list(support)
            nu = 1.0 / np.sum(1.0 / gamma[idx])
            x = np.zeros(gamma.size)
            x[idx] = nu / gamma[idx]
            best = min(best, beta * nu + (1 - beta) * float(np.dot(psi, x * (1 - x))))
    return best


@pytest.mark.parametrize("seed", range(5))
def test_hcg_b_literal_matches_subset_equalizers(seed):
    # In literal mode the optimum sits at a vertex of a capped simplex, i.e. an
    # equalizer on some support, so enumeration is an exact oracle at any n.
    rng = np.random.default_rng(seed)
    for _ in range(20):
        t = rng.integers(1, 4, size=int(rng.integers(1, 8))).astype(float)
        beta = float(rng.uniform(0.05, 1.0))
        instance = instance_from_times(t, Variant.B, beta=beta)
        eq = solver.solve_hcg_b(instance)
        oracle = _best_subset_equalizer(instance.gamma, instance.psi, beta)
        assert eq.value <= oracle + 1e-9


def test_hcg_b_beta_one_reduces_to_a():
    eq = solver.solve_hcg_b(worked(Variant.B, beta=1.0))
    assert eq.value == pytest.approx(HCG_A_VALUE, abs=1e-6)


def test_hcg_b_single():
    eq = solver.solve_hcg_b(instance_from_times((1,), Variant.B))
    assert eq.x == (1.0,) and eq.value == 1.5


def test_uniform_only_mode():
    eq = solver.solve_hcg_b(worked(Variant.B), solver.SolverOptions(multistart=False))
    assert eq.mode is SolveMode.LOCAL_FROM_UNIFORM
    assert eq.value >= LITERAL_GRID_VALUE - 1e-9


def test_grid_oracle():
    x, v = solver.grid_oracle(worked())
    assert abs(v - HCG_A_VALUE) < 0.02
    x, v = solver.grid_oracle(worked(Variant.B))
    assert x == LITERAL_GRID_X and v == pytest.approx(0.5)
    x, v = solver.grid_oracle(instance_from_times((3,)), 0.25)
    assert x == (1.0,) and v == 1.0
    with pytest.raises(ValueError):
        solver.grid_oracle(instance_from_times((1, 1, 1, 1, 1)))
    with pytest.raises(ValueError):
        solver.grid_oracle(worked(), 0.3)


def test_solver_determinism():
    opts = solver.SolverOptions(seed=7)
    a = solver.solve_hcg_b(worked(Variant.B, PenaltyMode.SIGNED), opts)
    b = solver.solve_hcg_b(worked(Variant.B, PenaltyMode.SIGNED), opts)
    assert a == b


def test_subset_switch_cost():
    costs = {"v1": (0.5, 0.5), "v2": (0.5, 0.5), "v7": (1.5, 1.5)}
    assert solver.subset_switch_cost({"v1", "v2"}, {"v1", "v2"}, costs) == 0
    assert solver.subset_switch_cost({"v1"}, {"v2"}, costs) == 1.0
    assert solver.subset_switch_cost(set(), {"v7"}, costs) == 1.5
    with pytest.raises(KeyError):
        solver.subset_switch_cost({"x"}, set(), costs)


def test_sweep_case_study(case_study_catalog):
    lih = game_vulnerabilities(filter_candidates(case_study_catalog, HoneypotProfile.lih()))
    rows = solver.cardinality_sweep(lih, 6, solver.GameParams(), profile=HoneypotProfile.lih())
    assert rows[0].equilibrium.value == 2.0  # min gamma among LIH-eligible
    assert rows[-1].equilibrium.value == pytest.approx(0.375)
    assert len(rows[-1].subset) == 6
    hih = [v for v in game_vulnerabilities(case_study_catalog.records) if v.id != "CVE-2018-9311"]
    rows = solver.cardinality_sweep(hih, 6, solver.GameParams())
    assert rows[-1].equilibrium.value == pytest.approx(0.3)
    assert all(r.breakdown is None for r in rows)


def test_sweep_range_and_heuristic():
    pool = [GameVulnerability(f"V{i:02d}", 1 + i % 3, 0.5, 0.5) for i in range(20)]
    with pytest.raises(ValueError):
        solver.cardinality_sweep(pool[:3], 4, solver.GameParams())
    rows = solver.cardinality_sweep(pool, 5, solver.GameParams())
    assert [r.heuristic for r in rows] == [False] * 4 + [True]  # C(20, 5) > 10000
    assert rows[-1].equilibrium.value == pytest.approx(0.2)  # five gamma=1 entries


def test_sweep_tie_breaks_lexicographically():
    pool = [GameVulnerability(i, 2.0, 1, 1) for i in ("c", "a", "b")]
    rows = solver.cardinality_sweep(pool, 2, solver.GameParams())
    assert rows[0].subset == ("a",)
    assert rows[1].subset == ("a", "b")


def test_support_report():
    eq = solver.solve_hcg_a(instance_from_times((1, 2, 3)))
    rep = solver.support_report(eq)
    assert rep["size"] == 3 and rep["below_epsilon"] == 0 and rep["support"] == 3
