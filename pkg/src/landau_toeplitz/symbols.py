"""Closed-form algebra of radial symbols.

A radial symbol is a finite sum of terms ``c * T**a * exp(-gamma * T**beta)``
in the variable ``T = r**2``, optionally restricted to a disk or to its
complement.  Cutoff-free symbols are closed under the Laplacian, which lets
the Laguerre differential polynomials below be applied exactly, term by term.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .schemas import validate_symbol
from .special import LaguerreParams, laguerre

__all__ = [
    "RadialTerm",
    "Cutoff",
    "RadialSymbol",
    "PiecewiseSymbol",
    "CallbackSymbol",
    "Segment",
    "AngularSymbol",
    "HermitianSymbolMatrix",
    "WqSymbol",
    "derivative_t",
    "laplacian",
    "dbar_squared",
    "laguerre_operator",
    "wq_transform",
    "metric_to_u",
    "tq_symbol",
    "pointwise_eigen_bounds",
    "build_envelopes",
    "eta3_prefactor",
    "eta3_value",
    "eta2_symbol",
]


@dataclass(frozen=True)
class RadialTerm:
    """``c * T**a * exp(-gamma * T**beta)`` with ``T = r**2``."""

    c: float
    a: float = 0.0
    gamma: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        for name in ("c", "a", "gamma", "beta"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"term field {name} must be finite")
            object.__setattr__(self, name, v)
        if self.gamma < 0.0:
            raise ValueError("decay rate gamma must be >= 0")
        if self.beta <= 0.0:
            raise ValueError("decay exponent beta must be > 0")
        if self.gamma == 0.0:
            # no decay factor: beta is irrelevant, normalize so terms merge
            object.__setattr__(self, "beta", 1.0)

    @property
    def key(self):
        return (self.a, self.gamma, self.beta)

    def value_t(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = self.c * np.power(t, self.a)
            if self.gamma != 0.0:
                v = v * np.exp(-self.gamma * np.power(t, self.beta))
        return v

    def scaled(self, s):
        return RadialTerm(self.c * s, self.a, self.gamma, self.beta)

    def times(self, other):
        if self.gamma == 0.0:
            gamma, beta = other.gamma, other.beta
        elif other.gamma == 0.0:
            gamma, beta = self.gamma, self.beta
        elif self.beta == other.beta:
            gamma, beta = self.gamma + other.gamma, self.beta
        else:
            raise ValueError("product of terms from different beta families")
        return RadialTerm(self.c * other.c, self.a + other.a, gamma, beta)

    def to_dict(self):
        return {"c": self.c, "a": self.a, "gamma": self.gamma, "beta": self.beta}


@dataclass(frozen=True)
class Cutoff:
    """Radial restriction: ``none``, ``inside`` (r < R) or ``outside`` (r >= R)."""

    kind: str = "none"
    radius: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "inside", "outside"):
            raise ValueError(f"unknown cutoff kind {self.kind!r}")
        r = float(self.radius)
        if self.kind != "none" and not r > 0.0:
            raise ValueError("cutoff radius must be > 0")
        object.__setattr__(self, "radius", r if self.kind != "none" else 0.0)

    @property
    def r_range(self):
        if self.kind == "inside":
            return 0.0, self.radius
        if self.kind == "outside":
            return self.radius, math.inf
        return 0.0, math.inf

    def mask(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "inside":
            return r < self.radius
        if self.kind == "outside":
            return r >= self.radius
        return np.ones(r.shape, dtype=bool)

    def intersect(self, other):
        if self.kind == "none":
            return other
        if other.kind == "none":
            return self
        if self.kind == other.kind == "inside":
            return Cutoff("inside", min(self.radius, other.radius))
        if self.kind == other.kind == "outside":
            return Cutoff("outside", max(self.radius, other.radius))
        raise ValueError("annular cutoffs are not representable")

    def to_dict(self):
        return {"kind": self.kind, "radius": self.radius}


NO_CUTOFF = Cutoff()


@dataclass(frozen=True)
class Segment:
    """One quadrature piece: a term (or callback) on ``r_lo <= r < r_hi``."""

    r_lo: float
    r_hi: float
    term: RadialTerm | None = None
    func: Callable | None = None


def _merge(terms):
    acc = {}
    for t in terms:
        acc[t.key] = acc.get(t.key, 0.0) + t.c
    out = [RadialTerm(c, *k) for k, c in acc.items() if c != 0.0]
    out.sort(key=lambda t: (t.beta, t.gamma, t.a))
    return tuple(out)


def _piecewise(pieces):
    """Group pieces by cutoff; a single surviving piece is returned as a RadialSymbol."""
    groups = {}
    for p in pieces:
        groups.setdefault(p.cutoff, []).extend(p.terms)
    merged = [RadialSymbol(tuple(t), c) for c, t in groups.items()]
    merged = [m for m in merged if not m.is_zero()]
    if not merged:
        return RadialSymbol.zero()
    if len(merged) == 1:
        return merged[0]
    return PiecewiseSymbol(tuple(merged))


class _SymbolBase:
    """Shared evaluation helpers for radial symbol variants."""

    def __call__(self, r):
        return self.value(r)

    def value_t(self, t):
        return self.value(np.sqrt(np.asarray(t, dtype=float)))


@dataclass(frozen=True)
class RadialSymbol(_SymbolBase):
    """Finite sum of :class:`RadialTerm` with an optional radial cutoff."""

    terms: tuple = ()
    cutoff: Cutoff = NO_CUTOFF

    def __post_init__(self):
        object.__setattr__(self, "terms", _merge(self.terms))
        if self.cutoff is None:
            object.__setattr__(self, "cutoff", NO_CUTOFF)

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c, cutoff=NO_CUTOFF):
        return cls((RadialTerm(c),), cutoff)

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def term(cls, c, a=0.0, gamma=0.0, beta=1.0, cutoff=NO_CUTOFF):
        return cls((RadialTerm(c, a, gamma, beta),), cutoff)

    @classmethod
    def gaussian(cls, gamma, c=1.0):
        """``c * exp(-gamma r^2)``."""
        return cls.term(c, 0.0, gamma, 1.0)

    @classmethod
    def indicator(cls, radius):
        """Indicator of the open disk of the given radius."""
        return cls.constant(1.0, Cutoff("inside", radius))

    # properties ---------------------------------------------------------
    @property
    def is_smooth(self):
        return self.cutoff.kind == "none"

    def is_zero(self):
        return len(self.terms) == 0

    def require_smooth(self, what):
        if not self.is_smooth:
            raise ValueError(f"{what} is not defined for cutoff symbols")

    def with_cutoff(self, cutoff):
        return RadialSymbol(self.terms, cutoff)

    # evaluation ---------------------------------------------------------
    def value(self, r):
        r = np.asarray(r, dtype=float)
        t = r * r
        out = np.zeros(np.shape(t))
        for term in self.terms:
            out = out + term.value_t(t)
        out = np.where(self.cutoff.mask(r), out, 0.0)
        return out if out.ndim else float(out)

    def segments(self):
        lo, hi = self.cutoff.r_range
        return [Segment(lo, hi, term=t) for t in self.terms]

    # algebra ------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = RadialSymbol.constant(other, self.cutoff)
        if isinstance(other, RadialSymbol):
            if other.is_zero():
                return self
            if self.is_zero():
                return other
            return _piecewise((self, other))
        if isinstance(other, PiecewiseSymbol):
            return _piecewise((self,) + other.pieces)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self.scaled(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, s):
        return RadialSymbol(tuple(t.scaled(s) for t in self.terms), self.cutoff)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return self.scaled(float(other))
        if isinstance(other, RadialSymbol):
            terms = tuple(t1.times(t2) for t1 in self.terms for t2 in other.terms)
            return RadialSymbol(terms, self.cutoff.intersect(other.cutoff))
        return NotImplemented

    __rmul__ = __mul__

    # serialization ------------------------------------------------------
    def to_dict(self):
        return {"terms": [t.to_dict() for t in self.terms], "cutoff": self.cutoff.to_dict()}

    @classmethod
    def from_dict(cls, d):
        validate_symbol(d)
        terms = tuple(RadialTerm(t["c"], t.get("a", 0.0), t.get("gamma", 0.0), t.get("beta", 1.0))
                      for t in d.get("terms", []))
        cut = d.get("cutoff") or {"kind": "none"}
        return cls(terms, Cutoff(cut.get("kind", "none"), cut.get("radius", 0.0)))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class PiecewiseSymbol(_SymbolBase):
    """Sum of radial symbols carrying different cutoffs."""

    pieces: tuple = ()

    @property
    def is_smooth(self):
        return False

    def require_smooth(self, what):
        raise ValueError(f"{what} is not defined for piecewise symbols")

    def value(self, r):
        out = sum(np.asarray(p.value(r)) for p in self.pieces)
        return out if np.ndim(out) else float(out)

    def segments(self):
        return [s for p in self.pieces for s in p.segments()]

    def scaled(self, s):
        return PiecewiseSymbol(tuple(p.scaled(s) for p in self.pieces))

    def __add__(self, other):
        if isinstance(other, RadialSymbol):
            return _piecewise(self.pieces + (other,))
        if isinstance(other, PiecewiseSymbol):
            return _piecewise(self.pieces + other.pieces)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self.scaled(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return self.scaled(float(other))
        return NotImplemented

    __rmul__ = __mul__

    def to_dict(self):
        return {"pieces": [p.to_dict() for p in self.pieces]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(RadialSymbol.from_dict(p) for p in d["pieces"]))


@dataclass(frozen=True)
class CallbackSymbol(_SymbolBase):
    """Arbitrary radial profile ``func(r)`` (vectorized), integrated numerically.

    ``breakpoints`` lists radii where ``func`` is not smooth; quadrature is
    split there.
    """

    func: Callable = field(compare=False)
    breakpoints: tuple = ()
    description: str = "callback"

    @property
    def is_smooth(self):
        return False

    def require_smooth(self, what):
        raise ValueError(f"{what} is not defined for callback symbols")

    def value(self, r):
        out = np.asarray(self.func(np.asarray(r, dtype=float)), dtype=float)
        return out if out.ndim else float(out)

    def segments(self):
        edges = [0.0] + sorted(float(x) for x in self.breakpoints if x > 0) + [math.inf]
        return [Segment(lo, hi, func=self.func) for lo, hi in zip(edges[:-1], edges[1:])]

    def scaled(self, s):
        f = self.func
        return CallbackSymbol(lambda r: s * np.asarray(f(r)), self.breakpoints, self.description)


# ---------------------------------------------------------------------------
# differential operators

def derivative_t(s):
    """d/dT of a cutoff-free symbol."""
    s.require_smooth("differentiation")
    out = []
    for t in s.terms:
        if t.a != 0.0:
            out.append(RadialTerm(t.c * t.a, t.a - 1.0, t.gamma, t.beta))
        if t.gamma != 0.0:
            out.append(RadialTerm(-t.c * t.gamma * t.beta, t.a + t.beta - 1.0, t.gamma, t.beta))
    return RadialSymbol(tuple(out))


def laplacian(s, weight=0):
    """Laplacian acting on ``z**weight * h(T)``, returned as the new radial factor.

    For ``weight = 0`` this is the ordinary Laplacian of the radial function
    h(r**2), i.e. ``4 (T h'' + h')``; in general the result is
    ``4 (T h'' + (weight + 1) h')``.
    """
    s.require_smooth("laplacian")
    n = int(weight)
    if n < 0:
        raise ValueError("weight must be >= 0 (use the conjugate for z-bar powers)")
    out = []
    for t in s.terms:
        a, g, b, c = t.a, t.gamma, t.beta, t.c
        if a * (a + n) != 0.0:
            out.append(RadialTerm(4.0 * c * a * (a + n), a - 1.0, g, b))
        if g != 0.0:
            out.append(RadialTerm(-4.0 * c * g * b * (2.0 * a + b + n), a + b - 1.0, g, b))
            out.append(RadialTerm(4.0 * c * g * g * b * b, a + 2.0 * b - 1.0, g, b))
    return RadialSymbol(tuple(out))


def laguerre_operator(n, alpha, s, b, weight=0):
    """Apply ``L_n^(alpha)(-Delta / 2b)`` to ``z**weight * s(T)``; returns the radial factor.

    Uses ``L_n^(alpha)(-x) = sum_j binom(n+alpha, n-j) x^j / j!`` with
    ``x = Delta / 2b``.  Degree -1 gives the zero symbol.
    """
    s.require_smooth("laguerre_operator")
    if n < 0:
        return RadialSymbol.zero()
    out = RadialSymbol.zero()
    cur = s
    for j in range(n + 1):
        coef = math.comb(n + alpha, n - j) / (math.factorial(j) * (2.0 * b) ** j)
        out = out + cur.scaled(coef)
        if j < n:
            cur = laplacian(cur, weight)
    return out


@dataclass(frozen=True)
class AngularSymbol:
    """``Re( z**weight * (h_re(T) + i h_im(T)) )`` with weight >= 0."""

    weight: int
    radial_re: RadialSymbol
    radial_im: RadialSymbol = RadialSymbol()

    def is_zero(self):
        return self.radial_re.is_zero() and self.radial_im.is_zero()

    def value(self, r, theta):
        r = np.asarray(r, dtype=float)
        zw = (r * np.exp(1j * np.asarray(theta))) ** self.weight
        h = np.asarray(self.radial_re.value(r)) + 1j * np.asarray(self.radial_im.value(r))
        return np.real(zw * h)

    def scaled(self, s):
        return AngularSymbol(self.weight, self.radial_re.scaled(s), self.radial_im.scaled(s))

    def __add__(self, other):
        if other.weight != self.weight:
            raise ValueError("cannot add angular symbols of different weight")
        return AngularSymbol(self.weight, self.radial_re + other.radial_re,
                             self.radial_im + other.radial_im)

    def to_dict(self):
        return {"weight": self.weight, "radial_re": self.radial_re.to_dict(),
                "radial_im": self.radial_im.to_dict()}


def dbar_squared(s, s_im=None):
    """d^2/dzbar^2 of the radial function ``s(T) + i s_im(T)``.

    Since d/dzbar g(z zbar) = z g'(T), the result is ``z**2 (s'' + i s_im'')``;
    the real part is what the returned :class:`AngularSymbol` evaluates to.
    """
    s.require_smooth("dbar_squared")
    re = derivative_t(derivative_t(s))
    im = RadialSymbol.zero() if s_im is None else derivative_t(derivative_t(s_im))
    return AngularSymbol(2, re, im)


# ---------------------------------------------------------------------------
# 2x2 Hermitian symbol matrices

def _as_symbol(x):
    if isinstance(x, (RadialSymbol, PiecewiseSymbol, CallbackSymbol)):
        return x
    if x is None:
        return RadialSymbol.zero()
    return RadialSymbol.constant(float(x))


@dataclass(frozen=True)
class HermitianSymbolMatrix:
    """``[[w11, w12], [conj(w12), w22]]`` with ``w12 = w12_re + i w12_im``."""

    w11: RadialSymbol = RadialSymbol()
    w22: RadialSymbol = RadialSymbol()
    w12_re: RadialSymbol = RadialSymbol()
    w12_im: RadialSymbol = RadialSymbol()

    def __post_init__(self):
        for name in ("w11", "w22", "w12_re", "w12_im"):
            object.__setattr__(self, name, _as_symbol(getattr(self, name)))

    @classmethod
    def identity(cls, c=1.0):
        return cls(RadialSymbol.constant(c), RadialSymbol.constant(c))

    @classmethod
    def scalar(cls, p):
        """``p(r) * Identity``."""
        return cls(p, p)

    @classmethod
    def diag(cls, p1, p2):
        return cls(p1, p2)

    def entries(self):
        return (self.w11, self.w22, self.w12_re, self.w12_im)

    @property
    def is_smooth(self):
        return all(e.is_smooth for e in self.entries())

    def require_smooth(self, what):
        for e in self.entries():
            e.require_smooth(what)

    @property
    def offdiag_zero(self):
        return all(isinstance(e, RadialSymbol) and e.is_zero() for e in (self.w12_re, self.w12_im))

    def trace(self):
        return self.w11 + self.w22

    def scaled(self, s):
        return HermitianSymbolMatrix(*(e.scaled(s) for e in self.entries()))

    def __add__(self, other):
        return HermitianSymbolMatrix(*(x + y for x, y in zip(self.entries(), other.entries())))

    def evaluate(self, r):
        """Pointwise matrices, shape ``r.shape + (2, 2)``."""
        r = np.asarray(r, dtype=float)
        m11 = np.asarray(self.w11.value(r), dtype=float)
        m22 = np.asarray(self.w22.value(r), dtype=float)
        m12 = np.asarray(self.w12_re.value(r)) + 1j * np.asarray(self.w12_im.value(r))
        out = np.empty(r.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = m11
        out[..., 1, 1] = m22
        out[..., 0, 1] = m12
        out[..., 1, 0] = np.conj(m12)
        return out

    def to_dict(self):
        return {"m11": self.w11.to_dict(), "m22": self.w22.to_dict(),
                "m12_re": self.w12_re.to_dict(), "m12_im": self.w12_im.to_dict()}

    @classmethod
    def from_dict(cls, d):
        get = lambda k: RadialSymbol.from_dict(d[k]) if k in d else RadialSymbol.zero()
        return cls(get("m11"), get("m22"), get("m12_re"), get("m12_im"))


def pointwise_eigen_bounds(m, r):
    """Eigenvalues ``(m_<, m_>)`` of the 2x2 Hermitian matrix m(r), closed form."""
    m11 = np.asarray(m.w11.value(r), dtype=float)
    m22 = np.asarray(m.w22.value(r), dtype=float)
    x = np.asarray(m.w12_re.value(r), dtype=float)
    y = np.asarray(m.w12_im.value(r), dtype=float)
    mean = 0.5 * (m11 + m22)
    rad = np.hypot(0.5 * (m11 - m22), np.hypot(x, y))
    lo, hi = mean - rad, mean + rad
    if np.ndim(lo) == 0:
        return float(lo), float(hi)
    return lo, hi


def metric_to_u(m):
    """The rotated matrix U entering the quadratic form of the perturbation."""
    half_tr = m.trace().scaled(0.5)
    u11 = half_tr - m.w12_im
    u22 = half_tr + m.w12_im
    u12_re = (m.w11 - m.w22).scaled(0.5)
    u12_im = -m.w12_re
    return HermitianSymbolMatrix(u11, u22, u12_re, u12_im)


_PSD_GRID = np.concatenate([np.linspace(0.0, 10.0, 2001), np.geomspace(10.0, 1e4, 400)])


def tq_symbol(m, q, b, check_psd=True, tol=1e-12):
    """``(1/2) Lambda_q Tr m - b Im m12`` as a radial symbol.

    With ``check_psd`` the metric is sampled on a radial grid and rejected if
    its smaller pointwise eigenvalue is below ``-tol``.
    """
    if check_psd:
        lo, _ = pointwise_eigen_bounds(m, _PSD_GRID)
        if np.nanmin(lo) < -tol:
            raise ValueError("metric is not pointwise positive semidefinite")
    lam = b * (2 * q + 1)
    return m.trace().scaled(0.5 * lam) - m.w12_im.scaled(b)


@dataclass(frozen=True)
class WqSymbol:
    """Level-0 symbol equivalent to a level-q quadratic form: radial + weight-2 parts."""

    radial: RadialSymbol
    angular: AngularSymbol | None = None

    @property
    def has_angular(self):
        return self.angular is not None and not self.angular.is_zero()

    def value(self, r, theta=0.0):
        v = np.asarray(self.radial.value(r), dtype=float)
        if self.has_angular:
            v = v + self.angular.value(r, theta)
        return v


def wq_transform(omega, q, b):
    """Laguerre differential transform of a level-q quadratic-form symbol.

    Radial part ``2b(q+1) L_{q+1}(-D/2b) w11 + 2bq L_{q-1}(-D/2b) w22`` and
    angular part ``-8 Re L_{q-1}^{(2)}(-D/2b) d^2 w12/dzbar^2`` (D the
    Laplacian), all computed exactly in the term algebra.
    """
    omega.require_smooth("wq_transform")
    if q < 0:
        raise ValueError("level q must be >= 0")
    radial = laguerre_operator(q + 1, 0, omega.w11, b).scaled(2.0 * b * (q + 1))
    if q > 0:
        radial = radial + laguerre_operator(q - 1, 0, omega.w22, b).scaled(2.0 * b * q)
    angular = None
    if q > 0 and not omega.offdiag_zero:
        d2 = dbar_squared(omega.w12_re, omega.w12_im)
        re = laguerre_operator(q - 1, 2, d2.radial_re, b, weight=2)
        im = laguerre_operator(q - 1, 2, d2.radial_im, b, weight=2)
        angular = AngularSymbol(2, re, im).scaled(-8.0)
    return WqSymbol(radial, angular)


# ---------------------------------------------------------------------------
# envelopes for exponentially decaying metrics

def build_envelopes(gamma, beta, delta_lo, delta_hi, r, cap=1.0):
    """Sharp-cutoff lower/upper envelopes ``|x|^delta exp(-gamma |x|^{2 beta})``.

    Lower: the delta_lo profile outside radius r+1.  Upper: the delta_hi
    profile outside r-1 plus the constant ``cap`` (the maximum of m_>) inside
    r+1.  The overlap on the annulus keeps the upper envelope a valid bound
    where the smooth transition would have been.
    """
    if delta_lo > delta_hi:
        raise ValueError("need delta_lo <= delta_hi")
    if not r > 1.0:
        raise ValueError("need r > 1")
    lower = RadialSymbol.term(1.0, 0.5 * delta_lo, gamma, beta, Cutoff("outside", r + 1.0))
    tail = RadialSymbol.term(1.0, 0.5 * delta_hi, gamma, beta, Cutoff("outside", r - 1.0))
    inner = RadialSymbol.constant(cap, Cutoff("inside", r + 1.0))
    return lower, PiecewiseSymbol((tail, inner))


def eta3_prefactor(q, beta, gamma, b):
    """Leading constant of the level-q transform of ``exp(-gamma |x|^{2 beta})``."""
    lam = b * (2 * q + 1)
    if beta < 0.5:
        return 2.0 * lam
    if beta == 0.5:
        x = -((2.0 * beta * gamma) ** 2) / (2.0 * b)
        return 2.0 * b * ((q + 1) * laguerre(LaguerreParams(q + 1), x)
                          + q * laguerre(LaguerreParams(q - 1), x))
    return (2.0 * beta * gamma) ** (2 * (q + 1)) / ((2.0 * b) ** q * math.factorial(q))


def eta3_value(r, q, beta, gamma, delta, b):
    """Model profile ``C |x|^delta exp(-gamma |x|^{2 beta})`` times the growth factor for beta > 1/2."""
    r = np.asarray(r, dtype=float)
    v = eta3_prefactor(q, beta, gamma, b) * r**delta * np.exp(-gamma * r ** (2 * beta))
    if beta > 0.5:
        v = v * r ** (2 * (q + 1) * (2 * beta - 1))
    return v


def eta2_symbol(q, beta, gamma, delta, b):
    """Level-q transform of the smooth profile ``|x|^delta exp(-gamma |x|^{2 beta})``."""
    prof = RadialSymbol.term(1.0, 0.5 * delta, gamma, beta)
    return wq_transform(HermitianSymbolMatrix(prof, prof), q, b).radial
