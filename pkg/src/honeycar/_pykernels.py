"""Pure-Python/numpy implementations of the numerical kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Arithmetic is ordered identically in both so that grid-search ties and
simulation draws resolve the same way regardless of backend.
"""
import math

import numpy as np

BEST_RESPONSE = 0
EASIEST_FIRST = 1
UNIFORM_RANDOM = 2
STALL_LIMIT = 3
INITIAL_TEMPERATURE = 0.01


def project_simplex(v):
    """Euclidean projection of ``v`` onto the probability simplex (sort based)."""
    v = np.asarray(v, dtype=np.float64)
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = 0
    for i in range(n):
        if u[i] - (css[i] - 1.0) / (i + 1) > 0.0:
            rho = i
    theta = (css[rho] - 1.0) / (rho + 1)
    return np.maximum(v - theta, 0.0)


def objective(x, gamma, psi, beta, coef):
    """``beta * max_j x_j gamma_j + coef * sum_j psi_j x_j (1 - x_j)``."""
    m = -math.inf
    pen = 0.0
    for j in range(x.shape[0]):
        prod = x[j] * gamma[j]
        if prod > m:
            m = prod
        pen += psi[j] * x[j] * (1.0 - x[j])
    return beta * m + coef * pen


def _smoothed(x, gamma, psi, beta, coef, tau):
    z = beta * x * gamma
    zmax = z.max()
    e = np.exp((z - zmax) / tau)
    s = e.sum()
    f = zmax + tau * math.log(s) + coef * float(np.dot(psi, x * (1.0 - x)))
    grad = beta * gamma * (e / s) + coef * psi * (1.0 - 2.0 * x)
    return f, grad


def _smoothed_value(x, gamma, psi, beta, coef, tau):
    z = beta * x * gamma
    zmax = z.max()
    s = np.exp((z - zmax) / tau).sum()
    return zmax + tau * math.log(s) + coef * float(np.dot(psi, x * (1.0 - x)))


def local_descent(gamma, psi, beta, coef, x0, max_iter, tol):
    """Projected gradient on a log-sum-exp smoothing of the objective.

    The temperature is annealed geometrically; each stage is warm-started
    from the previous one. A stage ends when the step falls below its
    tolerance or when ``STALL_LIMIT`` consecutive steps fail to lower the
    smoothed value measurably (the iterate is then at round-off level, which
    for interior optima sits near sqrt(machine epsilon)). Returns ``(x_best, f_best, iterations, converged)``
    where ``f_best`` is the unsmoothed objective.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.float64)
    x = project_simplex(np.asarray(x0, dtype=np.float64))
    scale = max(beta * gamma.max(), (1.0 - beta) * psi.max(), 1e-12)
    tau = INITIAL_TEMPERATURE * scale
    tau_min = 1e-9 * scale
    step = 1.0 / scale
    step_max = 1e3 / scale
    best_x = x.copy()
    best_f = objective(x, gamma, psi, beta, coef)
    it = 0
    while True:
        stage_tol = max(tol, 1e-2 * tau / scale)
        stalls = 0
        while True:
            if it >= max_iter:
                return best_x, best_f, it, False
            f, grad = _smoothed(x, gamma, psi, beta, coef, tau)
            t = min(2.0 * step, step_max)
            while True:
                y = project_simplex(x - t * grad)
                d = y - x
                fy = _smoothed_value(y, gamma, psi, beta, coef, tau)
                dd = float(np.dot(d, d))
                gap = fy - (f + float(np.dot(grad, d)) + dd / (2.0 * t))
                if gap <= 0.0 or t < 1e-20:
                    break
                if gap <= 1e-12 * max(1.0, abs(f)):
                    # Value differences are at round-off level; test curvature
                    # along d with gradients instead.
                    _, grad_y = _smoothed(y, gamma, psi, beta, coef, tau)
                    if float(np.dot(grad_y - grad, d)) <= dd / t:
                        break
                t *= 0.5
            step = t
            it += 1
            dmax = float(np.abs(d).max())
            x = y
            fx = objective(x, gamma, psi, beta, coef)
            if fx < best_f:
                best_f = fx
                best_x = x.copy()
            if fy < f - 1e-15 * max(1.0, abs(f)):
                stalls = 0
            else:
                stalls += 1
            if dmax <= stage_tol or stalls >= STALL_LIMIT:
                break
        if tau <= tau_min:
            return best_x, best_f, it, True
        tau *= 0.1


def subgradient_descent(gamma, x0, max_iter, tol):
    """Projected normalized subgradient for ``min_x max_j x_j gamma_j``.

    The step is halved whenever the best value stalls for ``patience``
    iterations or an epoch of ``4n + 10`` iterations ends, and the iterate
    restarts from the best point. Returns
    ``(x_best, f_best, iterations, converged)``.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    n = gamma.shape[0]
    x = project_simplex(np.asarray(x0, dtype=np.float64))
    patience = 2 * n + 2
    epoch = 4 * n + 10
    step = 0.5
    zeros = np.zeros(n)
    best_x = x.copy()
    best_f = objective(x, gamma, zeros, 1.0, 0.0)
    stall = 0
    age = 0
    it = 0
    while it < max_iter:
        if step < tol:
            return best_x, best_f, it, True
        k = int(np.argmax(x * gamma))
        y = x.copy()
        y[k] -= step
        x = project_simplex(y)
        it += 1
        age += 1
        f = objective(x, gamma, zeros, 1.0, 0.0)
        if f < best_f:
            best_f = f
            best_x = x.copy()
            stall = 0
        else:
            stall += 1
        if stall >= patience or age >= epoch:
            step *= 0.5
            x = best_x.copy()
            stall = 0
            age = 0
    return best_x, best_f, it, step < tol


def _compositions(n, total):
    if n == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for k in range(total + 1):
        rest = _compositions(n - 1, total - k)
        head = np.full((rest.shape[0], 1), k, dtype=np.int64)
        blocks.append(np.hstack([head, rest]))
    return np.vstack(blocks)


def grid_search(gamma, psi, beta, coef, K):
    """Exhaustive search over the lattice ``x = k / K``; first minimum wins.

    Returns ``(counts, value)``.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.float64)
    n = gamma.shape[0]
    counts = _compositions(n, int(K))
    p = counts / float(K)
    m = p[:, 0] * gamma[0]
    pen = psi[0] * p[:, 0] * (1.0 - p[:, 0])
    for j in range(1, n):
        m = np.maximum(m, p[:, j] * gamma[j])
        pen = pen + psi[j] * p[:, j] * (1.0 - p[:, j])
    values = beta * m + coef * pen
    i = int(np.argmin(values))
    return counts[i].copy(), float(values[i])


def sample_rounds(p, gamma, t, u_incl, u_choice, policy):
    """Resolve per-round inclusion and the attacker's pick from uniform draws.

    Returns ``(included, attacked)``: a ``(rounds, n)`` uint8 matrix and a
    length-``rounds`` int64 vector with -1 for idle rounds.
    """
    p = np.asarray(p, dtype=np.float64)
    gamma = np.asarray(gamma, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    inc = np.asarray(u_incl) < p[None, :]
    rounds = inc.shape[0]
    any_inc = inc.any(axis=1)
    if policy == BEST_RESPONSE:
        score = np.where(inc, (p * gamma)[None, :], -np.inf)
        attacked = np.argmax(score, axis=1)
    elif policy == EASIEST_FIRST:
        score = np.where(inc, t[None, :], np.inf)
        attacked = np.argmin(score, axis=1)
    elif policy == UNIFORM_RANDOM:
        count = inc.sum(axis=1)
        k = np.minimum((np.asarray(u_choice) * count).astype(np.int64), np.maximum(count - 1, 0))
        rank = np.cumsum(inc, axis=1) - 1
        hit = inc & (rank == k[:, None])
        attacked = np.argmax(hit, axis=1)
    else:
        raise ValueError(f"unknown policy code {policy}")
    attacked = np.where(any_inc, attacked, -1).astype(np.int64)
    return inc.astype(np.uint8).reshape(rounds, -1), attacked
