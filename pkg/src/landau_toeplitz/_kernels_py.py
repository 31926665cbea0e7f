"""Pure NumPy implementations of the numerical kernels.

These mirror the compiled routines in ``_kernels.pyx`` one for one and are
used whenever the extension module is not built (or when
``LANDAU_TOEPLITZ_PURE=1`` is set).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

GL_ORDER = 20
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)
GL_X = 0.5 * (_NODES + 1.0)
GL_W = 0.5 * _WEIGHTS

# panel contributions below exp(LOG_REL_STOP) of the running sum are dropped
LOG_REL_STOP = math.log(1e-16)
MAX_PANELS = 20000
_BATCH = 24


class QuadratureError(ArithmeticError):
    """Raised when the panel march fails to converge.

    ``bound`` holds the log of the last panel contribution relative to the
    accumulated integral, i.e. the achieved error bound.
    """

    def __init__(self, message, bound=float("nan")):
        super().__init__(message)
        self.bound = bound


def laguerre_eval(n, alpha, t):
    """Generalized Laguerre polynomial L_n^(alpha) on an array via recurrence."""
    t = np.asarray(t, dtype=float)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    prev = np.ones_like(t)
    if n == 0:
        return prev
    cur = 1.0 + alpha - t
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 + alpha - t) * cur - (j + alpha) * prev) / (j + 1)
    return cur


def laplace_center(p, mu, beta):
    """Maximizer of (p+1) ln t - t - mu t^beta over t > 0."""
    a = p + 1.0
    if a <= 0.0:
        return 0.0  # integrand decreasing; caller clamps to the lower limit
    if mu == 0.0:
        return a
    # f(x) = e^x + mu*beta*e^(beta x) - a is convex increasing in x = ln t;
    # Newton from a point right of the root converges monotonically.
    x = max(math.log(a), math.log(a / (mu * beta)) / beta)
    for _ in range(200):
        e1 = math.exp(x)
        e2 = mu * beta * math.exp(beta * x)
        f = e1 + e2 - a
        step = f / (e1 + beta * e2)
        x -= step
        if abs(step) < 1e-15 * max(1.0, abs(x)):
            break
    return math.exp(x)


def _panel_width(p, mu, beta, t0):
    curv = t0 + mu * beta * beta * t0**beta
    slope = abs((p + 1.0) - t0 - mu * beta * t0**beta)
    h = min(1.0, 1.0 / math.sqrt(curv))
    if slope * h > 2.0:
        h = 2.0 / slope
    return h


def _eval_panels(starts, widths, t0, p, mu, beta, n1, n2, alpha, factor):
    u = (starts[:, None] + widths[:, None] * GL_X[None, :]).ravel()
    w = (widths[:, None] * GL_W[None, :]).ravel()
    mut = mu * t0**beta
    phi = (p + 1.0) * u - t0 * np.expm1(u)
    if mu != 0.0:
        phi = phi - mut * np.expm1(beta * u)
    t = t0 * np.exp(u)
    poly = laguerre_eval(n1, alpha, t)
    if n2 != 0 or n1 != 0:
        poly = poly * laguerre_eval(n2, alpha, t)
    if factor is not None:
        poly = poly * np.asarray(factor(t), dtype=float)
    with np.errstate(divide="ignore"):
        logv = phi + np.log(np.abs(poly))
    return logv.reshape(starts.size, -1), np.sign(poly).reshape(starts.size, -1), \
        w.reshape(starts.size, -1), phi.reshape(starts.size, -1)


def _march(direction, u_limit, h, t0, p, mu, beta, n1, n2, alpha, factor):
    """Collect panel node data marching away from u = 0 in one direction."""
    logs, signs, weights = [], [], []
    u = 0.0
    n_done = 0
    best = -math.inf
    running = -math.inf
    while True:
        if direction > 0:
            starts = u + h * np.arange(_BATCH)
            ends = np.minimum(starts + h, u_limit)
            starts = np.minimum(starts, u_limit)
        else:
            ends = u - h * np.arange(_BATCH)
            starts = np.maximum(ends - h, u_limit)
            ends = np.maximum(ends, u_limit)
        widths = ends - starts
        keep = widths > 0.0
        starts, widths = starts[keep], widths[keep]
        if starts.size == 0:
            break
        logv, sg, w, phi = _eval_panels(starts, widths, t0, p, mu, beta, n1, n2, alpha, factor)
        with np.errstate(divide="ignore"):
            panel_bound = np.max(logv, axis=1) + np.log(widths)
        stop_at = None
        for i in range(starts.size):
            best = max(best, panel_bound[i])
            # crude running log-sum of panel bounds
            running = np.logaddexp(running, panel_bound[i])
            edge_phi_slope = (p + 1.0) - t0 * math.exp(starts[i] if direction < 0 else starts[i] + widths[i]) \
                - mu * beta * (t0 * math.exp(starts[i] if direction < 0 else starts[i] + widths[i]))**beta
            moving_away = edge_phi_slope < 0.0 if direction > 0 else edge_phi_slope > 0.0
            if panel_bound[i] < running + LOG_REL_STOP and moving_away:
                stop_at = i
                break
        n_keep = starts.size if stop_at is None else stop_at + 1
        logs.append(logv[:n_keep])
        signs.append(sg[:n_keep])
        weights.append(w[:n_keep])
        n_done += n_keep
        if stop_at is not None:
            break
        if direction > 0:
            u = starts[-1] + widths[-1]
            if u >= u_limit:
                break
        else:
            u = starts[-1]
            if u <= u_limit:
                break
        if n_done > MAX_PANELS:
            raise QuadratureError(
                "panel march did not converge", float(panel_bound[-1] - running))
    if not logs:
        return np.empty(0), np.empty(0), np.empty(0), 0
    return (np.concatenate(logs).ravel(), np.concatenate(signs).ravel(),
            np.concatenate(weights).ravel(), n_done)


def log_quad(p, mu, beta, lo, hi, n1=0, n2=0, alpha=0.0, factor=None):
    """Signed log of  int_lo^hi t^p exp(-t - mu t^beta) L_n1^(alpha)(t) L_n2^(alpha)(t) dt.

    Returns ``(sign, log_abs, n_panels)``.
    """
    if not p > -1.0 and lo <= 0.0:
        raise ValueError("integrand not integrable at t = 0 (need p > -1)")
    if not hi > lo:
        return 0, -math.inf, 0
    t0 = laplace_center(p, mu, beta)
    t0 = min(max(t0, lo), hi)
    log_base = (p + 1.0) * math.log(t0) - t0 - (mu * t0**beta if mu != 0.0 else 0.0)
    u_lo = math.log(lo / t0) if lo > 0.0 else -math.inf
    u_hi = math.log(hi / t0) if math.isfinite(hi) else math.inf
    h = _panel_width(p, mu, beta, t0)
    parts = []
    n_total = 0
    try:
        if u_hi > 0.0:
            lr, sr, wr, nr = _march(+1, u_hi, h, t0, p, mu, beta, n1, n2, alpha, factor)
            parts.append((lr, sr, wr))
            n_total += nr
        if u_lo < 0.0:
            ll, sl, wl, nl = _march(-1, u_lo, h, t0, p, mu, beta, n1, n2, alpha, factor)
            parts.append((ll, sl, wl))
            n_total += nl
    except OverflowError:
        raise QuadratureError("integrand does not decay within the double range") from None
    logv = np.concatenate([x[0] for x in parts])
    sg = np.concatenate([x[1] for x in parts])
    w = np.concatenate([x[2] for x in parts])
    finite = np.isfinite(logv)
    if not finite.any():
        return 0, -math.inf, n_total
    ref = float(np.max(logv[finite]))
    total = float(np.sum(w[finite] * sg[finite] * np.exp(logv[finite] - ref)))
    if total == 0.0:
        return 0, -math.inf, n_total
    return (1 if total > 0 else -1), log_base + ref + math.log(abs(total)), n_total


def sturm_count(d, e2, x):
    """Number of eigenvalues strictly below each entry of ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    tiny = 1e-300
    count = np.zeros(x.shape, dtype=np.int64)
    q = d[0] - x
    q = np.where(q == 0.0, -tiny, q)
    count += q < 0.0
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        q = np.where(q == 0.0, -tiny, q)
        count += q < 0.0
    return count


def tridiag_eigvalsh(d, e):
    """All eigenvalues (ascending) of a real symmetric tridiagonal matrix by bisection.

    Same-sign brackets are split geometrically so that tiny eigenvalues of
    graded matrices come out with small relative error.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.size
    if n == 0:
        return np.empty(0)
    e2 = e * e
    ae = np.abs(e)
    rad = np.zeros(n)
    rad[:-1] += ae
    rad[1:] += ae
    glo = float(np.min(d - rad))
    ghi = float(np.max(d + rad))
    span = max(abs(glo), abs(ghi), 1e-300)
    glo -= 1e-12 * span + 1e-300
    ghi += 1e-12 * span + 1e-300
    target = np.arange(n)  # eigenvalue j is the x where count passes j
    n_neg = int(sturm_count(d, e2, 0.0)[0])
    lo = np.where(target < n_neg, glo, 0.0)
    hi = np.where(target < n_neg, 0.0, ghi)
    tiny = 1e-300
    for _ in range(4000):
        same = (lo > 0.0) | (hi < 0.0)
        width = hi - lo
        scale = np.maximum(np.abs(lo), np.abs(hi))
        done = (width <= 4e-16 * scale) | (width <= tiny)
        if np.all(done):
            break
        geo = same & (np.minimum(np.abs(lo), np.abs(hi)) * 4.0 < scale)
        mid = 0.5 * (lo + hi)
        with np.errstate(invalid="ignore"):
            # product of square roots: lo * hi underflows below ~1e-154
            gmid = np.sign(hi) * np.sqrt(np.abs(lo)) * np.sqrt(np.abs(hi))
        mid = np.where(geo, gmid, mid)
        # zero brackets: split towards zero geometrically
        zero_lo = (lo == 0.0) & (hi > 0.0)
        mid = np.where(zero_lo & (hi > 1e-280), np.maximum(hi * 1e-8, tiny), mid)
        zero_hi = (hi == 0.0) & (lo < 0.0)
        mid = np.where(zero_hi & (lo < -1e-280), np.minimum(lo * 1e-8, -tiny), mid)
        c = sturm_count(d, e2, mid)
        go_hi = c > target
        hi = np.where(done, hi, np.where(go_hi, mid, hi))
        lo = np.where(done, lo, np.where(go_hi, lo, mid))
    return 0.5 * (lo + hi)
