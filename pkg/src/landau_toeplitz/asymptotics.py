"""Formal power series and the large-k expansions of eigenvalue logarithms.

The coefficients ``f_j`` and ``g_j`` are Taylor coefficients (in epsilon) of
the minimum values of

    F(s; eps) = s - ln s + eps mu s^beta      (0 < beta < 1)
    G(s; eps) = mu s^beta - ln s + eps s      (beta > 1)

They are obtained by solving the stationarity equation as a truncated power
series (fixed-point iteration) and substituting back.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .special import LogScalar, log_j_integral, log_lower_incomplete

__all__ = [
    "PowerSeries",
    "AsymptoticExpansion",
    "PredictionBand",
    "solve_minimizer",
    "objective",
    "f_series",
    "g_series",
    "j_range",
    "mu_from_gamma",
    "theorem2_expansion",
    "lnL_prediction",
    "log_l_exact",
    "disk_prediction",
    "theorem1_prediction",
    "fd_coefficients",
    "MAX_ORDER",
]

MAX_ORDER = 30


class PowerSeries:
    """Truncated power series c_0 + c_1 eps + ... + c_J eps^J."""

    __slots__ = ("c",)

    def __init__(self, coeffs, order=None):
        c = np.asarray(coeffs, dtype=float).ravel()
        if order is not None:
            c = np.concatenate([c, np.zeros(max(0, order + 1 - c.size))])[: order + 1]
        if c.size == 0:
            c = np.zeros(1)
        self.c = c

    @property
    def order(self):
        return self.c.size - 1

    @classmethod
    def constant(cls, a, order):
        return cls([a], order)

    @classmethod
    def variable(cls, order):
        """The series ``eps``."""
        return cls([0.0, 1.0], order)

    def __getitem__(self, j):
        return float(self.c[j]) if j <= self.order else 0.0

    def __repr__(self):
        return f"PowerSeries({self.c.tolist()})"

    def _other(self, other):
        if isinstance(other, PowerSeries):
            if other.order != self.order:
                raise ValueError("series orders differ")
            return other
        return PowerSeries.constant(float(other), self.order)

    def __add__(self, other):
        return PowerSeries(self.c + self._other(other).c)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self.c)

    def __sub__(self, other):
        return PowerSeries(self.c - self._other(other).c)

    def __rsub__(self, other):
        return PowerSeries(self._other(other).c - self.c)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(self.c * float(other))
        other = self._other(other)
        return PowerSeries(np.convolve(self.c, other.c)[: self.order + 1])

    __rmul__ = __mul__

    def shift(self, n=1):
        """Multiply by eps^n (truncating)."""
        out = np.zeros_like(self.c)
        if n <= self.order:
            out[n:] = self.c[: self.order + 1 - n]
        return PowerSeries(out)

    def exp(self):
        n = self.order
        g = np.zeros(n + 1)
        g[0] = math.exp(self.c[0])
        for m in range(1, n + 1):
            g[m] = sum(k * self.c[k] * g[m - k] for k in range(1, m + 1)) / m
        return PowerSeries(g)

    def log(self):
        if not self.c[0] > 0.0:
            raise ValueError("log needs a positive constant term")
        n = self.order
        f = np.zeros(n + 1)
        f[0] = math.log(self.c[0])
        for m in range(1, n + 1):
            acc = self.c[m] - sum(k * f[k] * self.c[m - k] for k in range(1, m)) / m
            f[m] = acc / self.c[0]
        return PowerSeries(f)

    def __pow__(self, a):
        return (self.log() * float(a)).exp()

    def compose(self, inner):
        """self(inner(eps)); inner must have zero constant term."""
        inner = self._other(inner)
        if inner.c[0] != 0.0:
            raise ValueError("composition needs an inner series with zero constant term")
        out = PowerSeries.constant(0.0, self.order)
        for a in self.c[::-1]:  # Horner
            out = out * inner + a
        return out

    def derivative(self):
        n = self.order
        d = np.array([k * self.c[k] for k in range(1, n + 1)] + [0.0])
        return PowerSeries(d)

    def __call__(self, eps):
        return float(np.polynomial.polynomial.polyval(eps, self.c))

    def allclose(self, other, tol=1e-12):
        other = self._other(other)
        return bool(np.all(np.abs(self.c - other.c) <= tol * (1 + np.abs(other.c))))


# ---------------------------------------------------------------------------
# minimizers

def objective(kind, beta, mu, eps, s):
    if kind == "F":
        return s - math.log(s) + eps * mu * s**beta
    if kind == "G":
        return mu * s**beta - math.log(s) + eps * s
    raise ValueError("kind must be 'F' or 'G'")


def _stationarity(kind, beta, mu, eps, s):
    """s * dObjective/ds, the defining scalar equation."""
    if kind == "F":
        return s - 1.0 + eps * beta * mu * s**beta
    return beta * mu * s**beta - 1.0 + eps * s


def _fixed_point_slope(kind, beta, mu, eps, s):
    if kind == "F":
        return -eps * beta * beta * mu * s ** (beta - 1.0)
    base = (1.0 - eps * s) / (beta * mu)
    return (1.0 / beta) * base ** (1.0 / beta - 1.0) * (-eps / (beta * mu))


def solve_minimizer(kind, beta, mu, eps):
    """Stationary point s_<(eps) (kind 'F') or s_>(eps) (kind 'G')."""
    if not (beta > 0 and mu > 0):
        raise ValueError("need beta > 0 and mu > 0")
    if kind == "F":
        s_ref = 1.0
    elif kind == "G":
        s_ref = (beta * mu) ** (-1.0 / beta)
    else:
        raise ValueError("kind must be 'F' or 'G'")
    if eps == 0.0:
        return s_ref
    h = lambda s: _stationarity(kind, beta, mu, eps, s)
    # h is negative near s = 0; find a sign change to the right
    lo, hi = s_ref, s_ref
    while h(lo) > 0.0:
        lo *= 0.5
        if lo < 1e-300:
            raise ArithmeticError("no stationary point found")
    while h(hi) < 0.0:
        hi *= 2.0
        if hi > 1e300 or (kind == "G" and eps > 0 and hi >= 1.0 / eps):
            hi = min(hi, 1.0 / eps) if kind == "G" and eps > 0 else hi
            if h(hi) < 0.0:
                raise ArithmeticError("no stationary point found")
            break
    s = brentq(h, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    for _ in range(2):  # Newton polish
        if kind == "F":
            dh = 1.0 + eps * beta * beta * mu * s ** (beta - 1.0)
        else:
            dh = beta * beta * mu * s ** (beta - 1.0) + eps
        if dh != 0.0:
            s -= h(s) / dh
    if abs(_fixed_point_slope(kind, beta, mu, eps, s)) >= 1.0:
        raise ValueError("eps too large: fixed-point iteration does not contract")
    return s


# ---------------------------------------------------------------------------
# series coefficients

def _check_order(J):
    if J > MAX_ORDER:
        raise ValueError(f"series order {J} exceeds the guard {MAX_ORDER}")
    if J < 0:
        raise ValueError("order must be >= 0")


def _iterate(update, s0, J):
    s = PowerSeries.constant(s0, J)
    for _ in range(4 * J + 10):
        new = update(s)
        if np.max(np.abs(new.c - s.c)) < 1e-14 * max(1.0, np.max(np.abs(s.c))):
            return new
        s = new
    raise ArithmeticError("series fixed-point iteration did not converge")


def minimizer_series(kind, beta, mu, J):
    """Power series of s_<(eps) or s_>(eps)."""
    _check_order(J)
    eps = PowerSeries.variable(J)
    if kind == "F":
        return _iterate(lambda s: 1.0 - (s**beta * (beta * mu)).shift(1), 1.0, J)
    s0 = (beta * mu) ** (-1.0 / beta)
    return _iterate(lambda s: ((1.0 - eps * s).log() * (1.0 / beta)).exp() * s0, s0, J)


def f_series(beta, mu, J=6):
    """Series of f(eps) = F(s_<(eps); eps) for 0 < beta < 1."""
    if not 0.0 < beta < 1.0:
        raise ValueError("f_series needs 0 < beta < 1")
    s = minimizer_series("F", beta, mu, J)
    return s - s.log() + (s**beta * mu).shift(1)


def g_series(beta, mu, J=6):
    """Series of g(eps) = G(s_>(eps); eps) for beta > 1."""
    if not beta > 1.0:
        raise ValueError("g_series needs beta > 1")
    s = minimizer_series("G", beta, mu, J)
    g = s**beta * mu - s.log() + s.shift(1)
    # the constant term is known in closed form; avoid the rounding of s0**beta
    g.c[0] = (1.0 + math.log(mu * beta)) / beta
    return g


def fd_coefficients(kind, beta, mu, J=3, n_nodes=17, radius=0.08):
    """Taylor coefficients of the minimum value by polynomial interpolation.

    The minimum value is computed numerically (root solve) at Chebyshev
    nodes in ``[-radius, radius]`` and interpolated; the coefficients of the
    interpolant serve as finite-difference estimates of f_j / g_j.
    """
    nodes = radius * np.cos(np.pi * (np.arange(n_nodes) + 0.5) / n_nodes)
    vals = np.array([objective(kind, beta, mu, e, solve_minimizer(kind, beta, mu, e)) for e in nodes])
    cheb = np.polynomial.chebyshev.Chebyshev.fit(nodes, vals, n_nodes - 1, domain=[-radius, radius])
    poly = cheb.convert(kind=np.polynomial.Polynomial, domain=[-radius, radius], window=[-radius, radius])
    coef = np.concatenate([poly.coef, np.zeros(J + 1)])
    return coef[: J + 1]


# ---------------------------------------------------------------------------
# expansions

@dataclass
class AsymptoticExpansion:
    """alpha k ln k + sum_e c_e k^e, with a remainder class."""

    kloglog: float = 0.0
    terms: list = field(default_factory=list)
    remainder: str = "O(log k)"

    def __post_init__(self):
        merged = {}
        for e, c in self.terms:
            merged[float(e)] = merged.get(float(e), 0.0) + float(c)
        self.terms = sorted(merged.items(), key=lambda ec: -ec[0])
        if self.remainder not in ("O(log k)", "O(k)", "O(1)"):
            raise ValueError(f"unknown remainder class {self.remainder!r}")

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        v = self.kloglog * k * np.log(k) if self.kloglog else np.zeros_like(k)
        for e, c in self.terms:
            v = v + c * k**e
        return v if v.ndim else float(v)

    def to_dict(self):
        return {"kloglog": self.kloglog, "terms": [[e, c] for e, c in self.terms],
                "remainder": self.remainder}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(d.get("kloglog", 0.0), [tuple(t) for t in d.get("terms", [])],
                   d.get("remainder", "O(log k)"))

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


def mu_from_gamma(gamma, beta, b):
    return gamma * (2.0 / b) ** beta


def j_range(beta, tol=1e-12):
    """Indices j >= 1 with j < 1/(1-beta) (beta < 1) or j < beta/(beta-1) (beta > 1)."""
    if beta == 1.0:
        return []
    bound = 1.0 / (1.0 - beta) if beta < 1.0 else beta / (beta - 1.0)
    out, j = [], 1
    while j < bound - tol:
        out.append(j)
        j += 1
    return out


def theorem2_expansion(beta, mu):
    """Main terms of ln nu_k for a level-0 symbol exp(-gamma r^{2 beta}), mu = gamma (2/b)^beta."""
    if not (beta > 0 and mu > 0):
        raise ValueError("need beta > 0 and mu > 0")
    if beta == 1.0:
        return AsymptoticExpansion(0.0, [(1.0, -math.log1p(mu))])
    js = j_range(beta)
    if beta < 1.0:
        f = f_series(beta, mu, max(js))
        return AsymptoticExpansion(0.0, [((beta - 1.0) * j + 1.0, -f[j]) for j in js])
    terms = [(1.0, (beta - 1.0 - math.log(mu * beta)) / beta)]
    if js:
        g = g_series(beta, mu, max(js))
        terms += [((1.0 / beta - 1.0) * j + 1.0, -g[j]) for j in js]
    return AsymptoticExpansion(-(beta - 1.0) / beta, terms)


@dataclass(frozen=True)
class PredictionBand:
    """Predicted main value with its remainder class.

    ``known_log`` is the part of the remainder that is known explicitly
    (``delta ln k``); it is not included in ``main``.
    """

    main: float
    remainder: str
    known_log: float = 0.0


def lnL_prediction(beta, mu, rho, delta, k):
    """Prediction for ln[(c0 J(k+delta) + c1 E_rho(k - delta_-)) / Gamma(k+1)]."""
    if not rho > 0:
        raise ValueError("need rho > 0")
    exp = theorem2_expansion(beta, mu)
    return PredictionBand(exp(k), exp.remainder, delta * math.log(k))


def log_l_exact(beta, mu, rho, delta, k, c0=1.0, c1=0.0):
    """ln[(c0 J(k+delta) + c1 E_rho(k - delta_-)) / Gamma(k+1)] by quadrature."""
    dm = max(0.0, -delta)
    total = log_j_integral(beta, mu, k + delta) * c0
    if c1 != 0.0:
        total = total + log_lower_incomplete(k - dm, rho) * c1
    return (total / LogScalar(1, math.lgamma(k + 1))).ln()


def disk_prediction(m, rho, k):
    """e^{-rho} rho^{-m+1} k^{2m-1} rho^k / (m! k!) as a LogScalar."""
    if not rho > 0:
        raise ValueError("need rho > 0")
    if k < 1:
        raise ValueError("need k >= 1")
    la = (-rho + (k - m + 1) * math.log(rho) + (2 * m - 1) * math.log(k)
          - math.lgamma(m + 1) - math.lgamma(k + 1))
    return LogScalar(1, la)


def theorem1_prediction(radius=None, b=1.0):
    """-k ln k with an O(k) band; for a disk of given radius, the refined k(1 + ln rho) term."""
    if radius is None:
        return AsymptoticExpansion(-1.0, [], "O(k)")
    rho = 0.5 * b * radius * radius
    return AsymptoticExpansion(-1.0, [(1.0, 1.0 + math.log(rho))], "O(log k)")
