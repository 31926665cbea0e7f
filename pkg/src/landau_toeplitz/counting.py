"""Eigenvalue counting functions, phase-space volumes and their predictions."""

from __future__ import annotations

import bisect
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .special import LogScalar
from .toeplitz import EigenvalueSequence, TruncationWarning, matrix_element

__all__ = [
    "CountingCurve",
    "LazyRadialSpectrum",
    "count_above",
    "phi_volume",
    "cq_constant",
    "predicted_counts",
    "counting_curve",
]


def _key(x):
    """Sort key of a positive level, in the same form as LogScalar.sort_key."""
    if isinstance(x, LogScalar):
        return x.sort_key()
    return LogScalar.from_float(x).sort_key()


class LazyRadialSpectrum:
    """Diagonal Toeplitz values <V phi(q,k), phi(q,k)> computed on demand.

    Counting uses binary search over k, so it requires k -> value to be
    non-increasing from ``n_explicit`` on; the first ``n_explicit`` values
    are counted directly.  Monotonicity is spot-checked near the searched
    index.
    """

    def __init__(self, ctx, V, q=0, k_max=10**12, n_explicit=64):
        self.ctx, self.V, self.q = ctx, V, q
        self.k_max = int(k_max)
        self.n_explicit = int(n_explicit)
        self.mono_tol = 1e-6
        self._cache = {}

    def value(self, k):
        k = int(k)
        if k not in self._cache:
            self._cache[k] = matrix_element(self.ctx, self.V, self.q, self.q, k, k)
        return self._cache[k]

    def count_above(self, lam):
        key = _key(lam)
        n = sum(1 for k in range(self.n_explicit) if self.value(k).sort_key() > key)
        lo = self.n_explicit
        if self.value(lo).sort_key() <= key:
            return n
        if self.value(self.k_max).sort_key() > key:
            warnings.warn("level is below the truncation floor; count is a lower bound",
                          TruncationWarning, stacklevel=2)
            return n + self.k_max - lo + 1
        hi = self.k_max  # value(lo) > lam >= value(hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.value(mid).sort_key() > key:
                lo = mid
            else:
                hi = mid
        for k in (lo - 1, lo, hi):
            if k >= self.n_explicit and k + 1 <= self.k_max:
                a, b = self.value(k), self.value(k + 1)
                # values near k ~ 1e8 carry ~1e-7 relative rounding from ln Gamma
                if b.sign > 0 and a.sign > 0 and b.log_abs - a.log_abs > self.mono_tol:
                    raise ArithmeticError(f"spectrum not monotone near k={k}")
        return n + (hi - self.n_explicit)


def count_above(seq, lam):
    """#{k : nu_k > lam} (strict) for a sorted sequence or a lazy spectrum."""
    if not (float(lam) > 0.0 if not isinstance(lam, LogScalar) else lam.sign > 0):
        raise ValueError("lambda must be > 0")
    if isinstance(seq, LazyRadialSpectrum):
        return seq.count_above(lam)
    if not isinstance(seq, EigenvalueSequence):
        vals = [v if isinstance(v, LogScalar) else LogScalar.from_float(v) for v in seq]
        seq = EigenvalueSequence.from_unsorted(vals)
    key = _key(lam)
    # values are non-increasing: negate keys to get an ascending list
    neg = [(-s, -x) for s, x in (v.sort_key() for v in seq.values)]
    count = bisect.bisect_left(neg, (-key[0], -key[1]))
    if len(seq) and count == len(seq):
        warnings.warn("level is below the truncation floor; count is a lower bound",
                      TruncationWarning, stacklevel=2)
    return count


# ---------------------------------------------------------------------------

def phi_volume(psi, lam, r_max=1e15, n_grid=6000):
    """Area of {x : psi(|x|) > lam} for a radial profile psi.

    The profile is scanned on a radial grid, crossings are refined by root
    finding, and the area of each superlevel annulus is summed.
    """
    if not lam > 0:
        raise ValueError("lambda must be > 0")
    f = lambda r: float(psi.value(r)) - lam
    while f(r_max) > 0.0:
        # slow power tails cross lambda far out; widen the scan before giving up
        if r_max >= 1e150:
            raise ValueError("profile does not decay below lambda")
        r_max *= 1e15
    n_grid = int(n_grid * max(1.0, math.log10(r_max) / 15.0))
    grid = np.unique(np.concatenate([np.linspace(0.0, 10.0, 1001), np.geomspace(10.0, r_max, n_grid)]))
    bps = getattr(psi, "breakpoints", ())
    cut = []
    for piece in getattr(psi, "pieces", (psi,)):
        c = getattr(piece, "cutoff", None)
        if c is not None and c.kind != "none":
            cut.append(c.radius)
    extra = [x for r in list(bps) + cut for x in (r * (1 - 1e-13), r, r * (1 + 1e-13))]
    grid = np.unique(np.concatenate([grid, extra]))
    vals = np.asarray(psi.value(grid), dtype=float) - lam
    above = vals > 0.0
    area = 0.0
    start = 0.0 if above[0] else None
    for i in range(1, grid.size):
        if above[i] == above[i - 1]:
            continue
        r = brentq(f, grid[i - 1], grid[i], xtol=1e-14 * grid[i], rtol=1e-15) \
            if np.isfinite(vals[i - 1]) and np.isfinite(vals[i]) else grid[i]
        if above[i]:
            start = r
        else:
            area += math.pi * (r * r - start * start)
            start = None
    if start is not None:
        raise ValueError("profile does not decay below lambda")
    return area


def cq_constant(tau, rho, ctx, n_theta=4096):
    """(b/4 pi) int_0^{2 pi} tau(theta)^{2/rho} d theta; constant tau gives (b/2) tau^{2/rho}."""
    if not rho > 0:
        raise ValueError("rho must be > 0")
    if callable(tau):
        th = 2.0 * math.pi * np.arange(n_theta) / n_theta
        vals = np.asarray(tau(th), dtype=float)
        if np.any(vals <= 0):
            raise ValueError("angular profile must be positive")
        # periodic trapezoid rule
        return ctx.b / (4.0 * math.pi) * (2.0 * math.pi) * float(np.mean(vals ** (2.0 / rho)))
    if not tau > 0:
        raise ValueError("tau must be > 0")
    return 0.5 * ctx.b * tau ** (2.0 / rho)


def predicted_counts(kind, params, lam):
    """Leading-order counting prediction.

    ``thm1``: |ln lam| / ln|ln lam|.  ``thm2``: the three beta branches with
    ``params = {"beta", "mu"}``.  ``thm3``: (b / 2 pi) Phi_psi(lam) with
    ``params = {"b", "psi"}``.
    """
    if kind in ("thm1", "thm2"):
        if not 0.0 < lam < 1.0:
            raise ValueError("lambda must lie in (0, 1)")
        L = abs(math.log(lam))
        if L <= 1.0 and (kind == "thm1" or params["beta"] > 1.0):
            raise ValueError("lambda must lie in (0, 1/e) for the ln|ln lambda| law")
    if kind == "thm1":
        return L / math.log(L)
    if kind == "thm2":
        beta, mu = params["beta"], params["mu"]
        if beta < 1.0:
            return mu ** (-1.0 / beta) * L ** (1.0 / beta)
        if beta == 1.0:
            return L / math.log1p(mu)
        return beta / (beta - 1.0) * L / math.log(L)
    if kind == "thm3":
        return params["b"] / (2.0 * math.pi) * phi_volume(params["psi"], lam)
    raise ValueError(f"unknown prediction kind {kind!r}")


@dataclass
class CountingCurve:
    """Counts #{nu_k > lambda} on a grid of levels, with predictions."""

    lambdas: list
    counts: list
    predicted: list
    meta: dict = field(default_factory=dict)

    def ratios(self):
        return [c / p if p else math.nan for c, p in zip(self.counts, self.predicted)]

    def to_csv(self, path=None):
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.meta, sort_keys=True) + "\n")
        buf.write("lambda,count,predicted,ratio\n")
        for lam, c, p, r in zip(self.lambdas, self.counts, self.predicted, self.ratios()):
            buf.write(f"{lam!r},{c},{p!r},{r!r}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def counting_curve(spectrum, lambdas, kind, params, meta=None):
    lambdas = sorted(float(x) for x in lambdas)[::-1]  # decreasing lambda -> non-decreasing count
    counts = [count_above(spectrum, lam) for lam in lambdas]
    preds = [predicted_counts(kind, params, lam) for lam in lambdas]
    return CountingCurve(lambdas, counts, preds, dict(meta or {}))
