"""Special functions and log-domain integrals.

Everything that can underflow a double (eigenvalues of order rho^k / k!,
moment integrals with k up to 1e4) is carried as a :class:`LogScalar`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from . import kernels

__all__ = [
    "LogScalar",
    "LaguerreParams",
    "laguerre",
    "laguerre_direct",
    "log_gamma",
    "log_lower_incomplete",
    "log_upper_incomplete",
    "log_j_integral",
]


class LogScalar:
    """Signed real stored as ``(sign, ln|value|)``.

    ``sign`` is -1, 0 or +1; ``log_abs`` is ``-inf`` for zero.  Values built
    with :meth:`from_float` remember the original double so that converting
    back is exact.
    """

    __slots__ = ("sign", "log_abs", "_float")

    def __init__(self, sign, log_abs, _float=None):
        sign = int(sign)
        if sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        log_abs = float(log_abs)
        if sign != 0 and math.isnan(log_abs):
            raise ValueError("log_abs is NaN")
        if sign == 0 or log_abs == -math.inf:
            sign, log_abs = 0, -math.inf
        self.sign = sign
        self.log_abs = log_abs
        self._float = _float

    # construction -------------------------------------------------------
    @classmethod
    def from_float(cls, x):
        x = float(x)
        if x == 0.0:
            return cls(0, -math.inf, 0.0)
        return cls(1 if x > 0 else -1, math.log(abs(x)), x)

    @classmethod
    def from_log(cls, log_abs, sign=1):
        return cls(sign, log_abs)

    @classmethod
    def zero(cls):
        return cls(0, -math.inf)

    @classmethod
    def one(cls):
        return cls(1, 0.0, 1.0)

    # conversion ---------------------------------------------------------
    def __float__(self):
        if self._float is not None:
            return self._float
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    to_float = __float__

    def ln(self):
        """Natural log of a positive value."""
        if self.sign <= 0:
            raise ValueError("log of a non-positive value")
        return self.log_abs

    def is_zero(self):
        return self.sign == 0

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, LogScalar):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return LogScalar.from_float(other)
        return NotImplemented

    def __neg__(self):
        f = None if self._float is None else -self._float
        return LogScalar(-self.sign, self.log_abs, f)

    def __abs__(self):
        f = None if self._float is None else abs(self._float)
        return LogScalar(abs(self.sign), self.log_abs, f)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.sign == 0 or other.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_abs + other.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.sign == 0:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_abs - other.log_abs)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, p):
        p = float(p)
        if self.sign < 0:
            raise ValueError("real power of a negative LogScalar")
        if self.sign == 0:
            if p > 0:
                return LogScalar.zero()
            raise ZeroDivisionError("0 to a non-positive power")
        return LogScalar(1, p * self.log_abs)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.log_abs >= other.log_abs else (other, self)
        d = lo.log_abs - hi.log_abs  # <= 0
        if hi.sign == lo.sign:
            return LogScalar(hi.sign, hi.log_abs + math.log1p(math.exp(d)))
        if d == 0.0:
            return LogScalar.zero()
        return LogScalar(hi.sign, hi.log_abs + math.log1p(-math.exp(d)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    # ordering -----------------------------------------------------------
    def sort_key(self):
        """Key that orders LogScalars by value without leaving the log domain."""
        if self.sign == 0:
            return (0, 0.0)
        return (self.sign, self.sign * self.log_abs)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.sort_key() == other.sort_key()

    def __hash__(self):
        return hash(self.sort_key())

    def __lt__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.sort_key() > other.sort_key()

    def __ge__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.sort_key() >= other.sort_key()

    def __repr__(self):
        return f"LogScalar(sign={self.sign}, log_abs={self.log_abs!r})"

    def relative_difference(self, other):
        """|self - other| / |other|, computed in the log domain when signs agree."""
        other = self._coerce(other)
        if other.sign == 0:
            return 0.0 if self.sign == 0 else math.inf
        if self.sign != other.sign:
            return math.inf
        return abs(math.expm1(self.log_abs - other.log_abs))


def log_sum(values):
    """Signed sum of an iterable of LogScalars."""
    pos = [v.log_abs for v in values if v.sign > 0]
    neg = [v.log_abs for v in values if v.sign < 0]
    p = LogScalar(1, float(np.logaddexp.reduce(pos))) if pos else LogScalar.zero()
    n = LogScalar(-1, float(np.logaddexp.reduce(neg))) if neg else LogScalar.zero()
    return p + n


@dataclass(frozen=True)
class LaguerreParams:
    """Degree ``q`` and superscript ``m`` of a generalized Laguerre polynomial."""

    degree: int
    superscript: int = 0

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < -1:
            raise ValueError("degree must be a nonnegative integer")
        if int(self.superscript) != self.superscript or self.superscript < 0:
            raise ValueError("superscript must be a nonnegative integer")


def laguerre(params, t):
    """L_q^(m)(t) by the three-term recurrence.

    Degree -1 is accepted and returns 0, so that ``q * L_{q-1}`` needs no
    special case at q = 0.
    """
    q, m = int(params.degree), params.superscript
    if q < 0:
        return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
    if np.ndim(t):
        return kernels.laguerre_eval(q, float(m), t)
    t = float(t)
    if q == 0:
        return 1.0
    prev, cur = 1.0, 1.0 + m - t
    for j in range(1, q):
        prev, cur = cur, ((2 * j + 1 + m - t) * cur - (j + m) * prev) / (j + 1)
    return cur


def laguerre_direct(params, t):
    """Reference evaluation of the explicit binomial sum in exact rational arithmetic."""
    q, m = int(params.degree), params.superscript
    if q < 0:
        return 0.0
    x = Fraction(float(t))
    return float(sum(Fraction(math.comb(q + m, q - j) * (-1) ** j, math.factorial(j)) * x**j
                     for j in range(q + 1)))


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise ValueError("log_gamma requires x > 0")
    return math.lgamma(x)


def _wrap(sign, log_abs):
    return LogScalar(sign, log_abs)


def log_lower_incomplete(k, rho):
    """E_rho(k) = int_0^rho e^{-t} t^k dt as a LogScalar."""
    if not k > -1.0:
        raise ValueError("need k > -1")
    if not rho > 0.0:
        raise ValueError("need rho > 0")
    s, la, _ = kernels.log_quad(float(k), 0.0, 1.0, 0.0, float(rho))
    return _wrap(s, la)


def log_upper_incomplete(k, rho):
    """int_rho^inf e^{-t} t^k dt as a LogScalar (any real k when rho > 0)."""
    if not rho > 0.0:
        raise ValueError("need rho > 0")
    s, la, _ = kernels.log_quad(float(k), 0.0, 1.0, float(rho), math.inf)
    return _wrap(s, la)


def log_j_integral(beta, mu, k):
    """J_{beta,mu}(k) = int_0^inf exp(-mu t^beta - t) t^k dt as a LogScalar."""
    if not beta > 0.0:
        raise ValueError("need beta > 0")
    if not mu > 0.0:
        raise ValueError("need mu > 0")
    if not k > -1.0:
        raise ValueError("need k > -1")
    s, la, _ = kernels.log_quad(float(k), float(mu), float(beta), 0.0, math.inf)
    return _wrap(s, la)
