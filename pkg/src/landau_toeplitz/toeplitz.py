"""Matrix elements in the angular momentum basis and Toeplitz eigenvalues.

All integrals reduce, after the substitution ``t = b r^2 / 2``, to

    int t^p exp(-t - mu t^beta) L_n1^(alpha)(t) L_n2^(alpha)(t) dt

over ``[0, inf)`` or a cutoff interval, evaluated in the log domain by
:func:`landau_toeplitz.kernels.log_quad`.
"""

from __future__ import annotations

import functools
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .basis import basis_phase, log_radial_norm
from .special import LogScalar, log_sum
from .symbols import HermitianSymbolMatrix, wq_transform

__all__ = [
    "MagneticContext",
    "EigenvalueSequence",
    "TruncationWarning",
    "xi_element",
    "matrix_element",
    "toeplitz_eigs_radial",
    "quadratic_form_eigs",
    "quadratic_form_matrix",
    "wq_route_eigs",
    "wq_route_matrix",
    "symmetric_eigensolve",
    "default_truncation",
]


class TruncationWarning(UserWarning):
    """A finite section may be too small for the eigenvalues it returns."""


@dataclass(frozen=True)
class MagneticContext:
    """Constant magnetic field strength ``b``."""

    b: float = 1.0

    def __post_init__(self):
        if not float(self.b) > 0.0:
            raise ValueError("magnetic field b must be > 0")
        object.__setattr__(self, "b", float(self.b))

    def landau_level(self, q):
        return self.b * (2 * q + 1)

    def ladder_coeff(self, q, direction):
        """Coefficient of a* (``raise``) or a (``lower``) on phi(q, k)."""
        if direction == "raise":
            return math.sqrt(2.0 * self.b * (q + 1))
        if direction == "lower":
            return math.sqrt(2.0 * self.b * q)
        raise ValueError("direction must be 'raise' or 'lower'")


def default_truncation(q, k_max):
    return max(4 * q + 20, 2 * k_max)


# ---------------------------------------------------------------------------
# eigenvalue sequences

@dataclass
class EigenvalueSequence:
    """Eigenvalues sorted non-increasing, with the index each one came from.

    ``indexed`` keeps the unsorted (k-indexed) values when they are
    meaningful, e.g. diagonal Toeplitz sections.
    """

    values: list
    source_index: list
    meta: dict = field(default_factory=dict)
    indexed: list | None = None

    @classmethod
    def from_unsorted(cls, values, meta=None, keep_indexed=True):
        vals = list(values)
        for v in vals:
            if v.sign != 0 and not math.isfinite(v.log_abs):
                raise ValueError("eigenvalues must be finite")
        order = sorted(range(len(vals)), key=lambda i: (_neg_key(vals[i]), i))
        return cls([vals[i] for i in order], order, dict(meta or {}),
                   vals if keep_indexed else None)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def ln_values(self):
        """ln of the values (requires all positive)."""
        return np.array([v.ln() for v in self.values])

    def log_abs(self):
        return np.array([v.log_abs for v in self.values])

    def signs(self):
        return np.array([v.sign for v in self.values], dtype=int)

    def floats(self):
        return np.array([float(v) for v in self.values])

    def to_csv(self, path=None, indexed=False):
        """CSV with a ``# {json meta}`` first line and columns k, sign, ln_abs_value."""
        vals = self.indexed if indexed else self.values
        if vals is None:
            raise ValueError("no k-indexed values stored")
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.meta, sort_keys=True) + "\n")
        buf.write("k,sign,ln_abs_value\n")
        for k, v in enumerate(vals):
            buf.write(f"{k},{v.sign},{v.log_abs!r}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, text):
        lines = text.splitlines()
        meta = {}
        if lines and lines[0].startswith("#"):
            meta = json.loads(lines[0][1:].strip())
            lines = lines[1:]
        vals = []
        for line in lines[1:]:
            if not line.strip():
                continue
            _, s, la = line.split(",")
            vals.append(LogScalar(int(s), float(la)))
        return cls.from_unsorted(vals, meta, keep_indexed=False)


def _neg_key(v):
    s, x = v.sort_key()
    return (-s, -x)


# ---------------------------------------------------------------------------
# matrix elements

def _pmap(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


@functools.lru_cache(maxsize=200_000)
def _term_integral(term, r_lo, r_hi, b, shift, n1, n2, alpha):
    """c (2/b)^a int_{t_lo}^{t_hi} t^{shift+a} exp(-t - mu t^beta) L_n1 L_n2 dt."""
    t_lo = 0.5 * b * r_lo * r_lo
    t_hi = math.inf if math.isinf(r_hi) else 0.5 * b * r_hi * r_hi
    if not t_hi > t_lo:
        return LogScalar.zero()
    mu = term.gamma * (2.0 / b) ** term.beta if term.gamma != 0.0 else 0.0
    s, la, _ = kernels.log_quad(shift + term.a, mu, term.beta, t_lo, t_hi, n1, n2, float(alpha))
    if s == 0:
        return LogScalar.zero()
    scale = term.a * math.log(2.0 / b) + math.log(abs(term.c))
    return LogScalar(s * (1 if term.c > 0 else -1), la + scale)


def _callback_integral(func, r_lo, r_hi, b, shift, n1, n2, alpha):
    t_lo = 0.5 * b * r_lo * r_lo
    t_hi = math.inf if math.isinf(r_hi) else 0.5 * b * r_hi * r_hi
    if not t_hi > t_lo:
        return LogScalar.zero()
    factor = lambda t: func(np.sqrt(2.0 * t / b))
    s, la, _ = kernels.log_quad(float(shift), 0.0, 1.0, t_lo, t_hi, n1, n2, float(alpha), factor)
    return LogScalar(s, la)


def _symbol_integral(V, b, shift, n1, n2, alpha):
    """Signed log of  int V(sqrt(2t/b)) t^shift e^{-t} L_n1^(alpha) L_n2^(alpha) dt."""
    parts = []
    for seg in V.segments():
        if seg.term is not None:
            parts.append(_term_integral(seg.term, seg.r_lo, seg.r_hi, b, float(shift), n1, n2, alpha))
        else:
            parts.append(_callback_integral(seg.func, seg.r_lo, seg.r_hi, b, shift, n1, n2, alpha))
    return log_sum(parts)


def xi_element(ctx, V, m, s, k, l):
    """<V phi(m, k), phi(s, l)> for a real radial symbol V.

    Returns ``(phase, magnitude)`` with ``phase`` a unit complex number and
    ``magnitude`` a signed LogScalar; the element is ``phase * magnitude``.
    The phase is +-1 when m - s is even and +-i otherwise.
    """
    for idx in (m, s, k, l):
        if idx < 0:
            raise ValueError("basis indices must be nonnegative")
    d = k - m
    if l - s != d:
        return 1.0 + 0j, LogScalar.zero()
    ad = abs(d)
    n1, n2 = min(m, k), min(s, l)
    integral = _symbol_integral(V, ctx.b, ad, n1, n2, ad)
    if integral.sign == 0:
        return 1.0 + 0j, integral
    norm = log_radial_norm(m, k) + log_radial_norm(s, l)
    phase = basis_phase(m, k) * np.conj(basis_phase(s, l))
    return complex(phase), LogScalar(integral.sign, integral.log_abs + norm)


def _phase_sign(phase):
    if abs(phase.imag) > 0.5:
        raise ValueError("element is imaginary (odd level difference); use xi_element")
    return 1 if phase.real > 0 else -1


def matrix_element(ctx, V, m, s, k, l):
    """Xi_{m,s}(V; k, l) = <V phi(m, k), phi(s, l)> as a signed LogScalar.

    Zero unless ``k - m == l - s``.  Only real elements (m - s even) can be
    returned this way; :func:`xi_element` covers the general case.
    """
    phase, mag = xi_element(ctx, V, m, s, k, l)
    if mag.sign == 0:
        return mag
    return mag * _phase_sign(phase)


def toeplitz_eigs_radial(ctx, V, q, K, threads=1):
    """Eigenvalues <V phi(q,k), phi(q,k)>, k < K, of the level-q Toeplitz operator of radial V."""
    if K < 1:
        raise ValueError("K must be >= 1")
    vals = _pmap(lambda k: matrix_element(ctx, V, q, q, k, k), range(K), threads)
    meta = {"operator": "toeplitz_radial", "q": q, "K": K, "b": ctx.b, "backend": kernels.BACKEND}
    return EigenvalueSequence.from_unsorted(vals, meta)


# ---------------------------------------------------------------------------
# quadratic-form sections

@dataclass
class TridiagonalSection:
    """Hermitian section coupling k and k+2 only.

    ``diag[k]`` is a LogScalar; ``offdiag[k]`` is ``(phase, LogScalar)`` for the
    (k+2, k) entry.
    """

    diag: list
    offdiag: list
    extra_diag: LogScalar | None = None

    def is_diagonal(self):
        return all(mag.sign == 0 for _, mag in self.offdiag)

    def dense(self):
        n = len(self.diag)
        a = np.zeros((n, n), dtype=complex)
        for k, v in enumerate(self.diag):
            a[k, k] = float(v)
        for k, (ph, mag) in enumerate(self.offdiag):
            if k + 2 < n:
                a[k + 2, k] = ph * float(mag)
                a[k, k + 2] = np.conj(a[k + 2, k])
        return a


def _section_eigs(section, meta):
    n = len(section.diag)
    if section.is_diagonal():
        vals = list(section.diag)
        return EigenvalueSequence.from_unsorted(vals, meta)
    finite = [v.log_abs for v in section.diag if v.sign != 0]
    finite += [m.log_abs for _, m in section.offdiag if m.sign != 0]
    ref = max(finite)
    vals = []
    dropped = 0
    for parity in (0, 1):
        idx = list(range(parity, n, 2))
        d = np.array([float(LogScalar(section.diag[k].sign, section.diag[k].log_abs - ref)) for k in idx])
        e = np.array([math.exp(section.offdiag[k][1].log_abs - ref) if section.offdiag[k][1].sign else 0.0
                      for k in idx[:-1]])
        if d.size == 0:
            continue
        ev = kernels.tridiag_eigvalsh(d, e)
        for x in ev:
            if abs(x) < 1e-300:
                dropped += 1
                continue
            vals.append(LogScalar(1 if x > 0 else -1, math.log(abs(x)) + ref))
    if dropped:
        warnings.warn(f"{dropped} eigenvalues below the double-precision range were dropped",
                      TruncationWarning, stacklevel=3)
    seq = EigenvalueSequence.from_unsorted(vals, meta, keep_indexed=False)
    return seq


def _check_truncation(seq, extra, K, diagonal=False):
    if extra is None or extra.sign == 0 or len(seq) == 0:
        return
    smallest = min(abs(v) for v in seq.values)
    # a diagonal section is exact; only the ordering against omitted entries can fail
    if diagonal:
        unsafe = smallest.log_abs < extra.log_abs - 1e-12 * max(1.0, abs(extra.log_abs))
    else:
        unsafe = smallest.log_abs <= extra.log_abs + math.log(10.0)
    if unsafe:
        warnings.warn(f"smallest of {K} eigenvalues is within 10x of the first omitted diagonal entry",
                      TruncationWarning, stacklevel=3)


def _combine(*pairs):
    """Sum of complex elements given as (phase, LogScalar) scaled by real coefficients."""
    re, im = [], []
    for coef, (ph, mag) in pairs:
        if mag.sign == 0 or coef == 0.0:
            continue
        v = mag * coef
        if abs(ph.real) > 0.5:
            re.append(v * (1 if ph.real > 0 else -1))
        else:
            im.append(v * (1 if ph.imag > 0 else -1))
    r, i = log_sum(re), log_sum(im)
    return r, i


def _complex_to_pair(re, im):
    """(phase, magnitude) from real and imaginary LogScalars."""
    if im.sign == 0:
        return (1.0 + 0j, re)
    if re.sign == 0:
        return (1j, im)
    mag_log = 0.5 * float(np.logaddexp(2 * re.log_abs, 2 * im.log_abs))
    ang = math.atan2(im.sign * math.exp(im.log_abs - mag_log), re.sign * math.exp(re.log_abs - mag_log))
    return (complex(math.cos(ang), math.sin(ang)), LogScalar(1, mag_log))


def _xi_complex(ctx, w_re, w_im, m, s, k, l):
    """Xi for the complex radial symbol w_re + i w_im, as (re, im) LogScalars."""
    ph, mag_r = xi_element(ctx, w_re, m, s, k, l)
    ph2, mag_i = xi_element(ctx, w_im, m, s, k, l)
    # i * (ph2 * mag_i)
    return _combine((1.0, (ph, mag_r)), (1.0, (1j * ph2, mag_i)))


def quadratic_form_matrix(ctx, omega, q, K, threads=1):
    """Finite section of P_q A* Omega A P_q in the basis phi(q, k), k < K."""
    if K < 1:
        raise ValueError("K must be >= 1")
    b = ctx.b

    def diag(k):
        a = xi_element(ctx, omega.w11, q + 1, q + 1, k, k)
        parts = [(2.0 * b * (q + 1), a)]
        if q > 0:
            parts.append((2.0 * b * q, xi_element(ctx, omega.w22, q - 1, q - 1, k, k)))
        re, _ = _combine(*parts)
        return re

    def off(k):
        # entry (k+2, k): <w12 a phi_k, a* phi_{k+2}> from the cross terms
        if q == 0 or omega.offdiag_zero:
            return (1.0 + 0j, LogScalar.zero())
        re, im = _xi_complex(ctx, omega.w12_re, omega.w12_im, q - 1, q + 1, k, k + 2)
        c = 2.0 * b * math.sqrt(q * (q + 1))
        return _complex_to_pair(re * c, im * c)

    diag_vals = _pmap(diag, range(K + 1), threads)
    offs = _pmap(off, range(max(K - 2, 0)), threads)
    return TridiagonalSection(diag_vals[:K], offs, diag_vals[K])


def quadratic_form_eigs(ctx, omega, q, K, threads=1):
    """Eigenvalues of the K x K section of P_q A* Omega A P_q, sorted non-increasing.

    Even and odd k decouple; each block is Hermitian tridiagonal and is
    solved by Sturm bisection (relative accuracy for graded blocks).
    """
    sec = quadratic_form_matrix(ctx, omega, q, K, threads)
    meta = {"operator": "quadratic_form", "q": q, "K": K, "b": ctx.b, "backend": kernels.BACKEND}
    seq = _section_eigs(sec, meta)
    _check_truncation(seq, sec.extra_diag, K, sec.is_diagonal())
    return seq


def _angular_element(ctx, ang, k):
    """<Re(z^2 H) phi(0,k), phi(0,k+2)> as (re, im) LogScalars."""
    b = ctx.b
    lognorm = math.log(2.0 / b) - 0.5 * (math.lgamma(k + 1) + math.lgamma(k + 3)) + math.log(0.5)
    re = _symbol_integral(ang.radial_re, b, k + 2, 0, 0, 0.0) if not ang.radial_re.is_zero() else LogScalar.zero()
    im = _symbol_integral(ang.radial_im, b, k + 2, 0, 0, 0.0) if not ang.radial_im.is_zero() else LogScalar.zero()
    scale = LogScalar(1, lognorm)
    return re * scale, im * scale


def wq_route_matrix(ctx, omega, q, K, threads=1):
    """Finite section of P_0 w_q(Omega) P_0 in the basis phi(0, k), k < K."""
    w = wq_transform(omega, q, ctx.b)

    def diag(k):
        return matrix_element(ctx, w.radial, 0, 0, k, k)

    def off(k):
        if not w.has_angular:
            return (1.0 + 0j, LogScalar.zero())
        re, im = _angular_element(ctx, w.angular, k)
        return _complex_to_pair(re, im)

    diag_vals = _pmap(diag, range(K + 1), threads)
    offs = _pmap(off, range(max(K - 2, 0)), threads)
    return TridiagonalSection(diag_vals[:K], offs, diag_vals[K])


def wq_route_eigs(ctx, omega, q, K, threads=1):
    """Eigenvalues of the K x K section of P_0 w_q(Omega) P_0, sorted non-increasing."""
    sec = wq_route_matrix(ctx, omega, q, K, threads)
    meta = {"operator": "wq_route", "q": q, "K": K, "b": ctx.b, "backend": kernels.BACKEND}
    seq = _section_eigs(sec, meta)
    _check_truncation(seq, sec.extra_diag, K, sec.is_diagonal())
    return seq


# ---------------------------------------------------------------------------

def symmetric_eigensolve(matrix, n=None, tol=1e-12):
    """All eigenvalues (ascending) of a symmetric / Hermitian matrix.

    ``matrix`` is either a dense square array or a ``(diag, offdiag)`` pair
    describing a real symmetric tridiagonal matrix (solved by bisection).
    Non-symmetric dense input is rejected.
    """
    if isinstance(matrix, tuple):
        d, e = (np.asarray(x, dtype=float) for x in matrix)
        if e.size != max(d.size - 1, 0):
            raise ValueError("off-diagonal must have length n-1")
        if n is not None and d.size != n:
            raise ValueError("dimension mismatch")
        return kernels.tridiag_eigvalsh(d, e)
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if n is not None and a.shape[0] != n:
        raise ValueError("dimension mismatch")
    scale = max(float(np.max(np.abs(a))) if a.size else 0.0, 1e-300)
    if np.max(np.abs(a - a.conj().T), initial=0.0) > tol * scale:
        raise ValueError("matrix is not symmetric")
    return np.linalg.eigvalsh(a)
