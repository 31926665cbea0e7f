# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Same contracts as ``_kernels_py``: log-domain panel quadrature centred at the
Laplace point, Laguerre recurrence and Sturm-sequence bisection.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, expm1, log, sqrt, fabs, INFINITY, isfinite, pow

from ._kernels_py import QuadratureError, GL_X as _GL_X_PY, GL_W as _GL_W_PY, GL_ORDER, LOG_REL_STOP, MAX_PANELS, laplace_center

cnp.import_array()

BACKEND = "cython"

cdef double[::1] _GX = np.ascontiguousarray(_GL_X_PY)
cdef double[::1] _GW = np.ascontiguousarray(_GL_W_PY)
cdef int _NG = GL_ORDER
cdef double _STOP = LOG_REL_STOP
cdef int _MAXP = MAX_PANELS


cdef inline double _lag(int n, double alpha, double t) nogil:
    cdef double prev = 1.0, cur, nxt
    cdef int j
    if n == 0:
        return 1.0
    cur = 1.0 + alpha - t
    for j in range(1, n):
        nxt = ((2 * j + 1 + alpha - t) * cur - (j + alpha) * prev) / (j + 1)
        prev = cur
        cur = nxt
    return cur


def laguerre_eval(int n, double alpha, t):
    """Generalized Laguerre polynomial L_n^(alpha) on an array via recurrence."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    cdef cnp.ndarray[double, ndim=1] tt = np.ascontiguousarray(np.ravel(np.asarray(t, dtype=float)))
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(tt)
    cdef Py_ssize_t i, m = tt.shape[0]
    for i in range(m):
        out[i] = _lag(n, alpha, tt[i])
    return out.reshape(np.shape(t))


cdef struct _Acc:
    double scale
    double total


cdef inline void _acc_add(_Acc* acc, double logv, double sgn_w) nogil:
    if logv > acc.scale:
        acc.total = acc.total * exp(acc.scale - logv)
        acc.scale = logv
    acc.total += sgn_w * exp(logv - acc.scale)


cdef int _march(int direction, double u_limit, double h, double t0, double p,
                double mu, double beta, int n1, int n2, double alpha,
                _Acc* acc, double* last_bound) nogil:
    """Add panels to ``acc`` marching away from u = 0; returns panel count or -1."""
    cdef double u = 0.0, a, bnd, width, x, w, phi, t, poly, logv, pmax, pb, edge, slope
    cdef double running = -INFINITY
    cdef double mut = mu * pow(t0, beta)
    cdef int count = 0, i
    while True:
        if direction > 0:
            if u >= u_limit:
                break
            a = u
            bnd = u + h
            if bnd > u_limit:
                bnd = u_limit
        else:
            if u <= u_limit:
                break
            bnd = u
            a = u - h
            if a < u_limit:
                a = u_limit
        width = bnd - a
        if width <= 0.0:
            break
        pmax = -INFINITY
        for i in range(_NG):
            x = a + width * _GX[i]
            w = width * _GW[i]
            phi = (p + 1.0) * x - t0 * expm1(x)
            if mu != 0.0:
                phi -= mut * expm1(beta * x)
            t = t0 * exp(x)
            poly = _lag(n1, alpha, t) * _lag(n2, alpha, t)
            if poly == 0.0:
                continue
            logv = phi + log(fabs(poly))
            if logv > pmax:
                pmax = logv
            _acc_add(acc, logv, w if poly > 0.0 else -w)
        count += 1
        pb = pmax + log(width)
        if running == -INFINITY:
            running = pb
        elif pb > running:
            running = pb + log(1.0 + exp(running - pb))
        else:
            running = running + log(1.0 + exp(pb - running))
        edge = bnd if direction > 0 else a
        t = t0 * exp(edge)
        slope = (p + 1.0) - t - mu * beta * pow(t, beta)
        last_bound[0] = pb - running
        if pb < running + _STOP and ((direction > 0 and slope < 0.0) or (direction < 0 and slope > 0.0)):
            break
        if count > _MAXP:
            return -1
        u = bnd if direction > 0 else a
    return count


def log_quad(double p, double mu, double beta, double lo, double hi,
             int n1=0, int n2=0, double alpha=0.0, factor=None):
    """Signed log of  int_lo^hi t^p exp(-t - mu t^beta) L_n1^(alpha)(t) L_n2^(alpha)(t) dt.

    Returns ``(sign, log_abs, n_panels)``.
    """
    if factor is not None:
        from ._kernels_py import log_quad as _py_log_quad
        return _py_log_quad(p, mu, beta, lo, hi, n1, n2, alpha, factor)
    if not p > -1.0 and lo <= 0.0:
        raise ValueError("integrand not integrable at t = 0 (need p > -1)")
    if not hi > lo:
        return 0, -INFINITY, 0
    cdef double t0 = laplace_center(p, mu, beta)
    if t0 < lo:
        t0 = lo
    if t0 > hi:
        t0 = hi
    cdef double log_base = (p + 1.0) * log(t0) - t0
    if mu != 0.0:
        log_base -= mu * pow(t0, beta)
    cdef double u_lo = log(lo / t0) if lo > 0.0 else -INFINITY
    cdef double u_hi = log(hi / t0) if isfinite(hi) else INFINITY
    cdef double curv = t0 + mu * beta * beta * pow(t0, beta)
    cdef double slope = fabs((p + 1.0) - t0 - mu * beta * pow(t0, beta))
    cdef double h = 1.0 / sqrt(curv)
    if h > 1.0:
        h = 1.0
    if slope * h > 2.0:
        h = 2.0 / slope
    cdef _Acc acc
    acc.scale = -INFINITY
    acc.total = 0.0
    cdef double bound = 0.0
    cdef int nr = 0, nl = 0
    with nogil:
        if u_hi > 0.0:
            nr = _march(1, u_hi, h, t0, p, mu, beta, n1, n2, alpha, &acc, &bound)
        if nr >= 0 and u_lo < 0.0:
            nl = _march(-1, u_lo, h, t0, p, mu, beta, n1, n2, alpha, &acc, &bound)
    if nr < 0 or nl < 0:
        raise QuadratureError("panel march did not converge", bound)
    if acc.total == 0.0 or acc.scale == -INFINITY:
        return 0, -INFINITY, nr + nl
    return (1 if acc.total > 0.0 else -1), log_base + acc.scale + log(fabs(acc.total)), nr + nl


cdef inline int _sturm(double[::1] d, double[::1] e2, double x) nogil:
    cdef double q
    cdef int c = 0
    cdef Py_ssize_t i, n = d.shape[0]
    q = d[0] - x
    if q == 0.0:
        q = -1e-300
    if q < 0.0:
        c += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if q == 0.0:
            q = -1e-300
        if q < 0.0:
            c += 1
    return c


def sturm_count(d, e2, x):
    """Number of eigenvalues strictly below each entry of ``x``."""
    cdef double[::1] dd = np.ascontiguousarray(d, dtype=float)
    cdef double[::1] ee = np.ascontiguousarray(e2, dtype=float)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.shape, dtype=np.int64)
    cdef Py_ssize_t i
    for i in range(xs.size):
        out.flat[i] = _sturm(dd, ee, xs.flat[i])
    return out


def tridiag_eigvalsh(d, e):
    """All eigenvalues (ascending) of a real symmetric tridiagonal matrix by bisection."""
    cdef double[::1] dd = np.ascontiguousarray(d, dtype=float)
    cdef cnp.ndarray[double, ndim=1] ea = np.ascontiguousarray(e, dtype=float)
    cdef Py_ssize_t n = dd.shape[0], j, k
    if n == 0:
        return np.empty(0)
    cdef double[::1] e2 = np.ascontiguousarray(ea * ea)
    cdef double glo = INFINITY, ghi = -INFINITY, r, span
    for k in range(n):
        r = 0.0
        if k > 0:
            r += fabs(ea[k - 1])
        if k < n - 1:
            r += fabs(ea[k])
        if dd[k] - r < glo:
            glo = dd[k] - r
        if dd[k] + r > ghi:
            ghi = dd[k] + r
    span = max(fabs(glo), fabs(ghi), 1e-300)
    glo -= 1e-12 * span + 1e-300
    ghi += 1e-12 * span + 1e-300
    cdef int n_neg = _sturm(dd, e2, 0.0)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef double lo, hi, mid, scale, mn
    cdef int it
    with nogil:
        for j in range(n):
            if j < n_neg:
                lo = glo
                hi = 0.0
            else:
                lo = 0.0
                hi = ghi
            for it in range(4000):
                scale = max(fabs(lo), fabs(hi))
                if hi - lo <= 4e-16 * scale or hi - lo <= 1e-300:
                    break
                mn = min(fabs(lo), fabs(hi))
                if lo == 0.0 and hi > 1e-280:
                    mid = max(hi * 1e-8, 1e-300)
                elif hi == 0.0 and lo < -1e-280:
                    mid = min(lo * 1e-8, -1e-300)
                elif (lo > 0.0 or hi < 0.0) and mn * 4.0 < scale:
                    mid = sqrt(fabs(lo)) * sqrt(fabs(hi))
                    if hi < 0.0:
                        mid = -mid
                else:
                    mid = 0.5 * (lo + hi)
                if _sturm(dd, e2, mid) > j:
                    hi = mid
                else:
                    lo = mid
            out[j] = 0.5 * (lo + hi)
    return out
