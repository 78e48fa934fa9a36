"""Reference values computed by independent brute force before the solvers existed.

The numbers come from plain-Python lattice enumeration and hand arithmetic
that share no code with the package. They are frozen here; tests compare the
package against them rather than recomputing them.
"""
import itertools
import math

WORKED_GAMMA = (2.0, 3.0, 1.0)
WORKED_PSI = (2.0, 1.0, 3.0)
WORKED_T = (2.0, 1.0, 3.0)

# Variant A on the worked example: equalizer value 6/11.
HCG_A_VALUE = 6.0 / 11.0
HCG_A_X = (3.0 / 11.0, 2.0 / 11.0, 6.0 / 11.0)
HCG_A_GRID_VALUE = 0.55  # at (0.27, 0.18, 0.55), 0.01 lattice

# Variant B, beta = 0.5, on the worked example, 0.01 lattice.
LITERAL_GRID_VALUE = 0.5
LITERAL_GRID_X = (0.0, 0.0, 1.0)
SIGNED_GRID_VALUE = -0.368
SIGNED_GRID_X = (0.28, 0.18, 0.54)

# Published pinned point and the quantities that are consistent with it.
PINNED_X = (0.332, 0.304, 0.364)
PINNED_PENALTY = 1.349648
PINNED_LITERAL_OBJECTIVE = 1.130824
PINNED_NU = 0.562

# Economics at the worked-example values (lambda=0.6, alpha=0.7, m=3).
ECON_A = {"nu": 0.545, "g": 2.12459, "c": 0.41739, "u": 1.70721}
ECON_B = {"nu": 0.562, "g": 2.11241, "c": 0.42856, "u": 1.68385, "u_minus_s": 0.33420}

# Case study, variant A.
LIH_A_UTILITY = (1.375, 1.675, 1.834, 1.933, 1.955, 1.975)  # m = 1..6, 3 decimals
LIH_A_NU_M6 = 0.375
HIH_A_NU = (1.0, 2 / 3, 0.5, 0.4, 1 / 3, 0.3, 3 / 11)  # m = 1..7

# Best responses, 0-based index (lowest index on ties).
BR_EQUILIBRIUM = ((0.273, 0.182, 0.545), 0, 0.546)
BR_PINNED = (PINNED_X, 1, 0.912)


def brute_grid(gamma, psi, beta, sign, K=100):
    """Plain-Python lattice minimum; first minimum in lexicographic order wins."""
    n = len(gamma)
    best = None
    for head in itertools.product(range(K + 1), repeat=n - 1):
        rest = K - sum(head)
        if rest < 0:
            continue
        x = [k / K for k in head] + [rest / K]
        worst = max(p * g for p, g in zip(x, gamma))
        pen = sum(s * p * (1 - p) for s, p in zip(psi, x))
        value = beta * worst + sign * (1 - beta) * pen
        if best is None or value < best[1]:
            best = (tuple(x), value)
    return best


def equalizer(gamma):
    nu = 1.0 / math.fsum(1.0 / g for g in gamma)
    return nu, tuple(nu / g for g in gamma)
