"""Finite sections of H_+- = H0 +- W in the Landau basis.

The basis is {phi(s, k) : s <= Q, k <= K}.  The rotation invariant part of
the metric conserves the angular momentum k - s; the off-diagonal entry
u12 of U moves it by 2.  Entries are assembled only where these selection
rules allow, and the matrix is split into connected components.  A
component holding a single level-q state has its cluster shift refined by
a Schur complement iteration in scaled arithmetic, which keeps shifts far
below double precision relative to the level itself.  Other components
are diagonalized densely.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import __version__
from .special import LogScalar, log_sum
from .symbols import (CallbackSymbol, HermitianSymbolMatrix, metric_to_u,
                      pointwise_eigen_bounds)
from .toeplitz import (EigenvalueSequence, _combine, _pmap, _xi_complex, quadratic_form_eigs,
                       xi_element)

__all__ = [
    "TruncationSpec",
    "GalerkinMatrix",
    "assemble_full",
    "cluster_near",
    "SandwichReport",
    "sandwich_check",
    "sandwich_constants",
]

_SUP_GRID = np.concatenate([np.linspace(0.0, 10.0, 2001), np.geomspace(10.0, 1e4, 400)])


@dataclass(frozen=True)
class TruncationSpec:
    """Basis {phi(s, k) : s <= Q, k <= K} around target level q."""

    Q: int
    K: int
    q: int

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("q must be >= 0")
        if self.Q < self.q + 2:
            raise ValueError("Q must be >= q + 2")
        if self.K < 0:
            raise ValueError("K must be >= 0")

    @property
    def dim(self):
        return (self.Q + 1) * (self.K + 1)

    def index(self, s, k):
        return s * (self.K + 1) + k

    def state(self, i):
        return divmod(i, self.K + 1)


@dataclass
class GalerkinMatrix:
    """Dense Hermitian section plus the log-domain entries of W.

    ``entries`` maps ``(row, col)`` to ``(re, im)`` LogScalars of
    <W phi(col), phi(row)>; ``components`` lists index sets that do not
    couple to each other.
    """

    spec: TruncationSpec
    sign: int
    b: float
    dense: np.ndarray
    entries: dict = field(repr=False)
    components: list = field(repr=False)


def _sup_abs(m):
    lo, hi = pointwise_eigen_bounds(m, _SUP_GRID)
    return float(np.nanmax(np.maximum(np.abs(lo), np.abs(hi))))


def _w_element(ctx, u, s, k, s2, k2):
    """<W phi(s, k), phi(s2, k2)> = 1/2 <U A phi, A phi> as (re, im) LogScalars."""
    b = ctx.b
    parts = []
    if k - s == k2 - s2:
        if not u.w11.is_zero():
            c = b * math.sqrt((s + 1) * (s2 + 1))
            parts.append((c, xi_element(ctx, u.w11, s + 1, s2 + 1, k, k2)))
        if s > 0 and s2 > 0 and not u.w22.is_zero():
            c = b * math.sqrt(s * s2)
            parts.append((c, xi_element(ctx, u.w22, s - 1, s2 - 1, k, k2)))
    re, im = _combine(*parts) if parts else (LogScalar.zero(), LogScalar.zero())
    if not u.offdiag_zero:
        extra_re, extra_im = [re], [im]
        if s > 0 and k - s + 2 == k2 - s2:
            # u12 takes the a-component of A phi into the a*-component
            c = b * math.sqrt(s * (s2 + 1))
            r, i = _xi_complex(ctx, u.w12_re, u.w12_im, s - 1, s2 + 1, k, k2)
            extra_re.append(r * c)
            extra_im.append(i * c)
        if s2 > 0 and k - s - 2 == k2 - s2:
            c = b * math.sqrt((s + 1) * s2)
            r, i = _xi_complex(ctx, u.w12_re, -u.w12_im, s + 1, s2 - 1, k, k2)
            extra_re.append(r * c)
            extra_im.append(i * c)
        re, im = log_sum(extra_re), log_sum(extra_im)
    return re, im


def assemble_full(ctx, m, spec, sign, threads=1):
    """Section of H0 + sign * W for a radial metric m.

    For ``sign = -1`` the metric must satisfy sup |m| < 1.
    """
    if sign in ("+", "-"):
        sign = 1 if sign == "+" else -1
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not isinstance(m, HermitianSymbolMatrix):
        raise TypeError("m must be a HermitianSymbolMatrix")
    if sign < 0 and not _sup_abs(m) < 1.0:
        raise ValueError("H_- requires sup |m| < 1")
    u = metric_to_u(m)
    steps = (0, 2, -2) if not u.offdiag_zero else (0,)
    jobs = []
    for col in range(spec.dim):
        s, k = spec.state(col)
        for s2 in range(spec.Q + 1):
            for step in steps:
                k2 = k - s + s2 + step
                if 0 <= k2 <= spec.K:
                    jobs.append((spec.index(s2, k2), col))

    def work(job):
        row, col = job
        return _w_element(ctx, u, *spec.state(col), *spec.state(row))

    vals = _pmap(work, jobs, threads)
    entries = {}
    dense = np.zeros((spec.dim, spec.dim), dtype=complex)
    for (row, col), (re, im) in zip(jobs, vals):
        if re.sign == 0 and im.sign == 0:
            continue
        entries[(row, col)] = (re, im)
        dense[row, col] = sign * complex(float(re), float(im))
    for i in range(spec.dim):
        dense[i, i] += ctx.landau_level(spec.state(i)[0])
    if entries:
        rows, cols = zip(*entries)
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(spec.dim, spec.dim))
        n_comp, labels = connected_components(graph, directed=False)
    else:
        n_comp, labels = spec.dim, np.arange(spec.dim)
    comps = [[] for _ in range(n_comp)]
    for i, lab in enumerate(labels):
        comps[lab].append(i)
    return GalerkinMatrix(spec, sign, ctx.b, dense, entries, comps)


# ---------------------------------------------------------------------------

def _refined_shift(ctx, gm, idx, iq):
    """Refined shift lambda - Lambda_q of the eigenvalue attached to ``idx[iq]``.

    Also returns the remaining eigenvalues of the component (floats).
    """
    n = len(idx)
    ent = gm.entries
    logs = [x.log_abs for i in idx for j in idx if (i, j) in ent
            for x in ent[(i, j)] if x.sign != 0]
    if not logs:
        others = [ctx.landau_level(gm.spec.state(i)[0]) for p, i in enumerate(idx) if p != iq]
        return LogScalar.zero(), others
    S = max(logs)

    def scaled(key):
        if key not in ent:
            return 0j
        f = lambda x: x.sign * math.exp(x.log_abs - S) if x.sign else 0.0
        re, im = ent[key]
        return complex(f(re), f(im))

    What = np.array([[scaled((i, j)) for j in idx] for i in idx])
    sig = gm.sign
    s_float = math.exp(S) if S > -700.0 else 0.0
    levels = np.array([ctx.landau_level(gm.spec.state(i)[0]) for i in idx], dtype=float)
    lam_q = levels[iq]
    block = np.diag(levels).astype(complex) + sig * s_float * What
    evals = np.linalg.eigvalsh(0.5 * (block + block.conj().T))
    j0 = int(np.argmin(np.abs(evals - lam_q)))
    others = [float(e) for j, e in enumerate(evals) if j != j0]
    if n == 1:
        return LogScalar(1, S) * (sig * What[0, 0].real), others
    rest = [i for i in range(n) if i != iq]
    R = (np.diag(levels[rest] - lam_q).astype(complex)
         + sig * s_float * What[np.ix_(rest, rest)])
    w_col, w_row = What[rest, iq], What[iq, rest]
    # lambda = Lambda_q + S d solves d = sig W_qq - S w (R - S d)^{-1} w
    d = sig * What[iq, iq].real
    if s_float > 1e-6:
        d = (evals[j0] - lam_q) / s_float
    eye = np.eye(len(rest))
    for _ in range(60):
        M = R - s_float * d * eye
        x = np.linalg.solve(M, w_col)
        y = np.linalg.solve(M, x)
        g = d - sig * What[iq, iq].real + s_float * (w_row @ x).real
        dg = 1.0 + s_float * s_float * (w_row @ y).real
        step = g / dg
        d -= step
        if abs(step) <= 1e-15 * max(abs(d), 1e-300):
            break
    return LogScalar(1, S) * float(d), others


def cluster_near(ctx, matrix, q, window=None, sign=None):
    """Signed shifts +-(lambda - Lambda_q) of eigenvalues inside ``window``.

    ``matrix`` is a :class:`GalerkinMatrix` (refined, log domain) or a dense
    Hermitian array (plain eigensolve).  The default window is
    Lambda_q +- b.  Shifts are sorted by absolute value, largest first.
    """
    b = ctx.b
    lam_q = ctx.landau_level(q)
    if window is None:
        window = (lam_q - b, lam_q + b)
    w_lo, w_hi = float(window[0]), float(window[1])
    if not (w_lo < lam_q < w_hi):
        raise ValueError("window must contain Lambda_q")
    if (q > 0 and w_lo <= ctx.landau_level(q - 1)) or w_hi >= ctx.landau_level(q + 1):
        raise ValueError("window must lie between the neighbouring Landau levels")
    if sign is None:
        sign = matrix.sign if isinstance(matrix, GalerkinMatrix) else 1
    vals, src = [], []

    def add_float(e, i):
        if w_lo < e < w_hi:
            vals.append(LogScalar.from_float(sign * (e - lam_q)))
            src.append(i)

    if isinstance(matrix, GalerkinMatrix):
        spec = matrix.spec
        for idx in matrix.components:
            at_q = [p for p, i in enumerate(idx) if spec.state(i)[0] == q]
            if len(at_q) == 1:
                shift, others = _refined_shift(ctx, matrix, idx, at_q[0])
                k = spec.state(idx[at_q[0]])[1]
                if w_lo < lam_q + float(shift) < w_hi:
                    vals.append(shift * sign)
                    src.append(k)
                for e in others:
                    add_float(e, k)
            else:
                sub = matrix.dense[np.ix_(idx, idx)]
                for e in np.linalg.eigvalsh(0.5 * (sub + sub.conj().T)):
                    add_float(float(e), idx[0])
    else:
        a = np.asarray(matrix)
        for i, e in enumerate(np.linalg.eigvalsh(0.5 * (a + a.conj().T))):
            add_float(float(e), i)
    if not vals:
        raise ValueError("no eigenvalues inside the window")
    order = sorted(range(len(vals)),
                   key=lambda i: (-vals[i].log_abs if vals[i].sign else math.inf, src[i]))
    meta = {"operator": "galerkin_cluster", "q": q, "sign": sign, "b": b, "window": [w_lo, w_hi]}
    return EigenvalueSequence([vals[i] for i in order], [src[i] for i in order], meta)


# ---------------------------------------------------------------------------

def sandwich_constants(m, eps=0.5):
    """Constants (c_<^-, c_>^-, c_<^+, c_>^+) of the two-sided cluster bound."""
    lo, hi = pointwise_eigen_bounds(m, _SUP_GRID)
    ev = np.concatenate([lo, hi])
    c_plus = float(np.nanmax(np.abs(ev / (1.0 + ev))))
    c_minus = float(np.nanmax(np.abs(ev / (1.0 - ev)))) if np.nanmax(np.abs(ev)) < 1.0 else math.inf
    return {
        "eps": eps, "c_plus": c_plus, "c_minus": c_minus,
        "lower_minus": 1.0 / (2.0 * (1.0 + eps)),
        "upper_minus": (1.0 + c_minus) / (2.0 * (1.0 - eps)),
        "lower_plus": (1.0 - c_plus) / (2.0 * (1.0 + eps)),
        "upper_plus": 1.0 / (2.0 * (1.0 - eps)),
    }


def _eigen_symbols(m):
    """Radial symbols for the pointwise eigenvalues m_< <= m_> of m."""
    if m.offdiag_zero and m.w11 == m.w22:
        return m.w11, m.w11
    lo = CallbackSymbol(lambda r: pointwise_eigen_bounds(m, r)[0], description="m_lower")
    hi = CallbackSymbol(lambda r: pointwise_eigen_bounds(m, r)[1], description="m_upper")
    return lo, hi


@dataclass
class SandwichReport:
    q: int
    sign: int
    spec: TruncationSpec
    constants: dict
    k0: int | None
    k_range: tuple
    rows: list
    violations: dict
    unstable: list
    first_order: dict
    passed: bool
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "version": __version__, "q": self.q, "sign": self.sign,
            "Q": self.spec.Q, "K": self.spec.K, "constants": self.constants,
            "k0": self.k0, "k_range": list(self.k_range), "rows": self.rows,
            "violations": {str(k): v for k, v in self.violations.items()},
            "unstable": self.unstable, "first_order": self.first_order,
            "passed": self.passed, "meta": self.meta,
        }

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def sandwich_check(ctx, m, q, spec, sign=1, k0_max=3, k_range=None, n_first=10,
                   first_tol=0.10, drift_tol=0.01, threads=1):
    """Check c_< nu_{k+k0}(lower) <= shift_k <= c_> nu_{k-k0}(upper) on the finite section.

    ``lower``/``upper`` are the level-q quadratic forms of the pointwise
    eigenvalues m_< and m_>.  A shift enters the test only if it moves by
    less than ``drift_tol`` (relative) when K grows by 50%.  Also compares
    the top ``n_first`` shifts with half the eigenvalues of the quadratic
    form of U.
    """
    if sign in ("+", "-"):
        sign = 1 if sign == "+" else -1
    if spec.q != q:
        raise ValueError("truncation spec targets a different level")
    K = spec.K
    if k_range is None:
        k_range = (0, K // 2)
    k_lo, k_hi = k_range
    consts = sandwich_constants(m)
    c_lo = consts["lower_plus"] if sign > 0 else consts["lower_minus"]
    c_hi = consts["upper_plus"] if sign > 0 else consts["upper_minus"]

    shifts = cluster_near(ctx, assemble_full(ctx, m, spec, sign, threads), q)
    big = TruncationSpec(spec.Q, int(math.ceil(1.5 * K)), q)
    shifts_big = cluster_near(ctx, assemble_full(ctx, m, big, sign, threads), q)

    m_lo, m_hi = _eigen_symbols(m)
    n_seq = k_hi + k0_max + 2
    nu_lo = quadratic_form_eigs(ctx, HermitianSymbolMatrix.scalar(m_lo), q, n_seq, threads).values
    nu_hi = quadratic_form_eigs(ctx, HermitianSymbolMatrix.scalar(m_hi), q, n_seq, threads).values
    u_eigs = quadratic_form_eigs(ctx, metric_to_u(m), q, max(n_first + 2, 12), threads).values

    rows, unstable = [], []
    for k in range(k_lo, min(k_hi, len(shifts) - 1) + 1):
        s, s2 = shifts[k], shifts_big[k]
        drift = s.relative_difference(s2) if s.sign else 0.0
        stable = drift < drift_tol
        if not stable:
            unstable.append(k)
        rows.append({"k": k, "ln_shift": s.log_abs if s.sign else None, "shift_sign": s.sign,
                     "drift": drift, "stable": stable})

    def violations_for(k0):
        bad = []
        for row in rows:
            if not row["stable"]:
                continue
            k = row["k"]
            s = shifts[k]
            lower = nu_lo[k + k0] * c_lo
            ok = s >= lower
            if k - k0 >= 0:
                ok = ok and s <= nu_hi[k - k0] * c_hi
            if not ok:
                bad.append(k)
        return bad

    violations, chosen = {}, None
    for k0 in range(k0_max + 1):
        bad = violations_for(k0)
        violations[k0] = bad
        if not bad:
            chosen = k0
            break
    if chosen is not None:
        for row in rows:
            k = row["k"]
            row["ln_lower"] = (nu_lo[k + chosen] * c_lo).log_abs
            row["ln_upper"] = (nu_hi[k - chosen] * c_hi).log_abs if k >= chosen else None

    rel = []
    for k in range(min(n_first, len(shifts), len(u_eigs))):
        ref = u_eigs[k] * 0.5
        rel.append(shifts[k].relative_difference(ref))
    first = {"n": len(rel), "max_rel_error": max(rel) if rel else None,
             "tolerance": first_tol, "passed": bool(rel) and max(rel) <= first_tol}
    passed = chosen is not None and first["passed"]
    meta = {"b": ctx.b, "drift_tol": drift_tol, "k0_max": k0_max}
    return SandwichReport(q, sign, spec, consts, chosen, (k_lo, k_hi), rows, violations,
                          unstable, first, passed, meta)
