# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_pykernels``.

Same signatures, same return types, same evaluation order.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, fabs, INFINITY
from libc.stdlib cimport qsort

cnp.import_array()

BEST_RESPONSE = 0
EASIEST_FIRST = 1
UNIFORM_RANDOM = 2
cdef long STALL_LIMIT = 3
cdef double INITIAL_TEMPERATURE = 0.01


cdef int _desc(const void* a, const void* b) noexcept nogil:
    cdef double x = (<double*>a)[0]
    cdef double y = (<double*>b)[0]
    if x < y:
        return 1
    if x > y:
        return -1
    return 0


cdef void _project(double[::1] v, double[::1] out, double[::1] work) noexcept nogil:
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i, rho = 0
    cdef double css = 0.0, css_rho = 0.0, theta, w
    for i in range(n):
        work[i] = v[i]
    qsort(&work[0], n, sizeof(double), _desc)
    for i in range(n):
        css += work[i]
        if work[i] - (css - 1.0) / (i + 1) > 0.0:
            rho = i
            css_rho = css
    theta = (css_rho - 1.0) / (rho + 1)
    for i in range(n):
        w = v[i] - theta
        out[i] = w if w > 0.0 else 0.0


def project_simplex(v):
    """Euclidean projection of ``v`` onto the probability simplex (sort based)."""
    cdef double[::1] src = np.ascontiguousarray(v, dtype=np.float64)
    out = np.empty(src.shape[0], dtype=np.float64)
    work = np.empty(src.shape[0], dtype=np.float64)
    _project(src, out, work)
    return out


cdef double _objective(double[::1] x, double[::1] gamma, double[::1] psi,
                       double beta, double coef) noexcept nogil:
    cdef Py_ssize_t j
    cdef double m = -INFINITY, pen = 0.0, prod
    for j in range(x.shape[0]):
        prod = x[j] * gamma[j]
        if prod > m:
            m = prod
        pen += psi[j] * x[j] * (1.0 - x[j])
    return beta * m + coef * pen


def objective(x, gamma, psi, double beta, double coef):
    """``beta * max_j x_j gamma_j + coef * sum_j psi_j x_j (1 - x_j)``."""
    return _objective(np.ascontiguousarray(x, dtype=np.float64),
                      np.ascontiguousarray(gamma, dtype=np.float64),
                      np.ascontiguousarray(psi, dtype=np.float64), beta, coef)


cdef double _smoothed(double[::1] x, double[::1] gamma, double[::1] psi,
                      double beta, double coef, double tau,
                      double[::1] grad, bint want_grad) noexcept nogil:
    cdef Py_ssize_t j, n = x.shape[0]
    cdef double zmax = -INFINITY, z, s = 0.0, pen = 0.0, e
    for j in range(n):
        z = beta * x[j] * gamma[j]
        if z > zmax:
            zmax = z
    for j in range(n):
        e = exp((beta * x[j] * gamma[j] - zmax) / tau)
        s += e
        if want_grad:
            grad[j] = e
        pen += psi[j] * (x[j] * (1.0 - x[j]))
    if want_grad:
        for j in range(n):
            grad[j] = beta * gamma[j] * (grad[j] / s) + coef * psi[j] * (1.0 - 2.0 * x[j])
    return zmax + tau * log(s) + coef * pen


def local_descent(gamma, psi, double beta, double coef, x0, long max_iter, double tol):
    """Projected gradient on a log-sum-exp smoothing, annealed temperature.

    Returns ``(x_best, f_best, iterations, converged)``.
    """
    cdef double[::1] g = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef double[::1] p = np.ascontiguousarray(psi, dtype=np.float64)
    cdef Py_ssize_t n = g.shape[0], j
    cdef double[::1] x = np.empty(n)
    cdef double[::1] y = np.empty(n)
    cdef double[::1] trial = np.empty(n)
    cdef double[::1] grad = np.empty(n)
    cdef double[::1] grad_y = np.empty(n)
    cdef double[::1] work = np.empty(n)
    best = np.empty(n)
    cdef double[::1] best_x = best
    cdef double gmax = -INFINITY, pmax = -INFINITY
    for j in range(n):
        if g[j] > gmax:
            gmax = g[j]
        if p[j] > pmax:
            pmax = p[j]
    cdef double scale = beta * gmax
    if (1.0 - beta) * pmax > scale:
        scale = (1.0 - beta) * pmax
    if scale < 1e-12:
        scale = 1e-12
    cdef double tau = INITIAL_TEMPERATURE * scale, tau_min = 1e-9 * scale
    cdef double step = 1.0 / scale, step_max = 1e3 / scale
    cdef double stage_tol, f, fy, t, gap, curv, dot_gd, dd, dj, dmax, fx, best_f
    cdef long it = 0, stalls
    _project(np.ascontiguousarray(x0, dtype=np.float64), x, work)
    best_x[:] = x
    best_f = _objective(x, g, p, beta, coef)
    with nogil:
        while True:
            stage_tol = 1e-2 * tau / scale
            if tol > stage_tol:
                stage_tol = tol
            stalls = 0
            while True:
                if it >= max_iter:
                    with gil:
                        return best, best_f, it, False
                f = _smoothed(x, g, p, beta, coef, tau, grad, True)
                t = 2.0 * step
                if t > step_max:
                    t = step_max
                while True:
                    for j in range(n):
                        trial[j] = x[j] - t * grad[j]
                    _project(trial, y, work)
                    fy = _smoothed(y, g, p, beta, coef, tau, grad, False)
                    dot_gd = 0.0
                    dd = 0.0
                    for j in range(n):
                        dj = y[j] - x[j]
                        dot_gd += grad[j] * dj
                        dd += dj * dj
                    gap = fy - (f + dot_gd + dd / (2.0 * t))
                    if gap <= 0.0 or t < 1e-20:
                        break
                    if gap <= 1e-12 * (fabs(f) if fabs(f) > 1.0 else 1.0):
                        _smoothed(y, g, p, beta, coef, tau, grad_y, True)
                        curv = 0.0
                        for j in range(n):
                            curv += (grad_y[j] - grad[j]) * (y[j] - x[j])
                        if curv <= dd / t:
                            break
                    t *= 0.5
                step = t
                it += 1
                dmax = 0.0
                for j in range(n):
                    dj = fabs(y[j] - x[j])
                    if dj > dmax:
                        dmax = dj
                    x[j] = y[j]
                fx = _objective(x, g, p, beta, coef)
                if fx < best_f:
                    best_f = fx
                    for j in range(n):
                        best_x[j] = x[j]
                if fy < f - 1e-15 * (fabs(f) if fabs(f) > 1.0 else 1.0):
                    stalls = 0
                else:
                    stalls += 1
                if dmax <= stage_tol or stalls >= STALL_LIMIT:
                    break
            if tau <= tau_min:
                break
            tau *= 0.1
    return best, best_f, it, True


def subgradient_descent(gamma, x0, long max_iter, double tol):
    """Projected normalized subgradient for ``min_x max_j x_j gamma_j``.

    Returns ``(x_best, f_best, iterations, converged)``.
    """
    cdef double[::1] g = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef Py_ssize_t n = g.shape[0], j, k
    cdef double[::1] x = np.empty(n)
    cdef double[::1] y = np.empty(n)
    cdef double[::1] work = np.empty(n)
    cdef double[::1] zeros = np.zeros(n)
    best = np.empty(n)
    cdef double[::1] best_x = best
    cdef long patience = 2 * n + 2, epoch = 4 * n + 10
    cdef long stall = 0, age = 0, it = 0
    cdef double step = 0.5, f, best_f, top
    _project(np.ascontiguousarray(x0, dtype=np.float64), x, work)
    best_x[:] = x
    best_f = _objective(x, g, zeros, 1.0, 0.0)
    with nogil:
        while it < max_iter:
            if step < tol:
                break
            k = 0
            top = x[0] * g[0]
            for j in range(1, n):
                if x[j] * g[j] > top:
                    top = x[j] * g[j]
                    k = j
            for j in range(n):
                y[j] = x[j]
            y[k] -= step
            _project(y, x, work)
            it += 1
            age += 1
            f = _objective(x, g, zeros, 1.0, 0.0)
            if f < best_f:
                best_f = f
                for j in range(n):
                    best_x[j] = x[j]
                stall = 0
            else:
                stall += 1
            if stall >= patience or age >= epoch:
                step *= 0.5
                for j in range(n):
                    x[j] = best_x[j]
                stall = 0
                age = 0
    return best, best_f, it, step < tol


def grid_search(gamma, psi, double beta, double coef, long K):
    """Exhaustive search over the lattice ``x = k / K``; first minimum wins.

    Returns ``(counts, value)``.
    """
    cdef double[::1] g = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef double[::1] p = np.ascontiguousarray(psi, dtype=np.float64)
    cdef Py_ssize_t n = g.shape[0], j, i
    cdef cnp.int64_t[::1] c = np.zeros(n, dtype=np.int64)
    best_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] best = best_arr
    cdef double[::1] x = np.empty(n)
    cdef double val, best_val = INFINITY, m, pen, prod
    cdef long free_sum
    c[n - 1] = K
    with nogil:
        while True:
            m = -INFINITY
            pen = 0.0
            for j in range(n):
                x[j] = <double>c[j] / <double>K
            for j in range(n):
                prod = x[j] * g[j]
                if j == 0 or prod > m:
                    m = prod
                pen = pen + p[j] * x[j] * (1.0 - x[j])
            val = beta * m + coef * pen
            if val < best_val:
                best_val = val
                for j in range(n):
                    best[j] = c[j]
            # odometer over the first n-1 coordinates, lexicographic order
            i = n - 2
            while i >= 0:
                c[i] += 1
                free_sum = 0
                for j in range(n - 1):
                    free_sum += c[j]
                if free_sum <= K:
                    break
                c[i] = 0
                i -= 1
            if i < 0:
                break
            free_sum = 0
            for j in range(n - 1):
                free_sum += c[j]
            c[n - 1] = K - free_sum
    return best_arr, best_val


def sample_rounds(p, gamma, t, u_incl, u_choice, long policy):
    """Resolve per-round inclusion and the attacker's pick from uniform draws.

    Returns ``(included, attacked)``.
    """
    if policy not in (BEST_RESPONSE, EASIEST_FIRST, UNIFORM_RANDOM):
        raise ValueError(f"unknown policy code {policy}")
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[::1] gv = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef double[:, ::1] u = np.ascontiguousarray(u_incl, dtype=np.float64)
    cdef double[::1] uc = np.ascontiguousarray(u_choice, dtype=np.float64)
    cdef Py_ssize_t rounds = u.shape[0], n = pv.shape[0], r, j
    inc_arr = np.zeros((rounds, n), dtype=np.uint8)
    att_arr = np.empty(rounds, dtype=np.int64)
    cdef cnp.uint8_t[:, ::1] inc = inc_arr
    cdef cnp.int64_t[::1] att = att_arr
    cdef long count, k, seen
    cdef double best, score
    with nogil:
        for r in range(rounds):
            count = 0
            for j in range(n):
                if u[r, j] < pv[j]:
                    inc[r, j] = 1
                    count += 1
            att[r] = -1
            if count == 0:
                continue
            if policy == 0:
                best = -INFINITY
                for j in range(n):
                    if inc[r, j]:
                        score = pv[j] * gv[j]
                        if att[r] < 0 or score > best:
                            best = score
                            att[r] = j
            elif policy == 1:
                best = INFINITY
                for j in range(n):
                    if inc[r, j] and (att[r] < 0 or tv[j] < best):
                        best = tv[j]
                        att[r] = j
            else:
                k = <long>(uc[r] * count)
                if k > count - 1:
                    k = count - 1
                seen = 0
                for j in range(n):
                    if inc[r, j]:
                        if seen == k:
                            att[r] = j
                            break
                        seen += 1
    return inc_arr, att_arr
