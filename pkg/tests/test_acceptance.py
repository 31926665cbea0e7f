"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (also collected into the pytest
terminal summary).  Run directly with ``python tests/test_acceptance.py``
for the lines alone.
"""

import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_LINES  # noqa: E402

from landau_toeplitz.asymptotics import (disk_prediction, f_series, fd_coefficients,  # noqa: E402
                                         g_series, lnL_prediction, log_l_exact,
                                         theorem1_prediction)
from landau_toeplitz.basis import explicit_polynomial, ladder_polynomial  # noqa: E402
from landau_toeplitz.counting import LazyRadialSpectrum, count_above, cq_constant  # noqa: E402
from landau_toeplitz.galerkin import (TruncationSpec, assemble_full, cluster_near,  # noqa: E402
                                      sandwich_check)
from landau_toeplitz.special import LaguerreParams, laguerre  # noqa: E402
from landau_toeplitz.symbols import (Cutoff, HermitianSymbolMatrix, RadialSymbol,  # noqa: E402
                                     laguerre_operator, tq_symbol)
from landau_toeplitz.toeplitz import (MagneticContext, TruncationWarning, matrix_element,  # noqa: E402
                                      quadratic_form_eigs, toeplitz_eigs_radial, wq_route_eigs)

BETAS_LOW = (0.3, 0.5, 0.7)
BETAS_HIGH = (1.5, 2.0, 3.0)
MUS = (0.5, 1.0, 2.0)
DOUBLINGS = [2**p for p in range(6, 13)]


def report(n, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.2f}s / {budget:.0f}s]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def stable_ratio(resid, ks):
    """Relative growth of the bound C(K) = max_{k <= K} |residual|/ln k per doubling of K.

    Also returns the pointwise change of |residual|/ln k, which is reported
    but not used: it is ill-conditioned wherever the residual crosses zero.
    """
    c = [abs(r) / math.log(k) for r, k in zip(resid, ks)]
    bound = np.maximum.accumulate(c)
    growth = max(b / a - 1 for a, b in zip(bound, bound[1:]))
    pointwise = max(abs(b - a) / a for a, b in zip(c, c[1:]))
    return growth, pointwise


def test_criterion_01_gaussian_closed_form():
    t0 = time.perf_counter()
    worst = 0.0
    for b in (0.5, 1.0, 2.0):
        for gamma in (0.5, 1.0):
            seq = toeplitz_eigs_radial(MagneticContext(b), RadialSymbol.gaussian(gamma), 0, 501)
            for k, v in enumerate(seq.indexed):
                ref = -(k + 1) * math.log1p(2 * gamma / b)
                worst = max(worst, abs(v.log_abs - ref) / abs(ref))
    report(1, worst <= 1e-10, f"max rel error of ln nu_k = {worst:.2e}", time.perf_counter() - t0, 5)


def test_criterion_02_gaussian_linear_decay():
    t0 = time.perf_counter()
    worst = -math.inf
    for b in (0.5, 1.0, 2.0):
        for gamma in (0.5, 1.0):
            mu = 2 * gamma / b
            seq = toeplitz_eigs_radial(MagneticContext(b), RadialSymbol.gaussian(gamma), 0, 501)
            for k in range(1, 501):
                resid = abs(seq.indexed[k].log_abs + math.log1p(mu) * k)
                worst = max(worst, resid - (2 + math.log(k)))
    report(2, worst <= 0, f"max of |residual| - (2 + ln k) = {worst:.3f}", time.perf_counter() - t0, 5)


def test_criterion_03_gaussian_type_expansions():
    t0 = time.perf_counter()
    bad, worst, point = [], 0.0, 0.0
    for beta in BETAS_LOW + BETAS_HIGH:
        for mu in MUS:
            resid = [log_l_exact(beta, mu, 1.0, 0.0, k) - lnL_prediction(beta, mu, 1.0, 0.0, k).main
                     for k in DOUBLINGS]
            change, pw = stable_ratio(resid, DOUBLINGS)
            worst, point = max(worst, change), max(point, pw)
            if change >= 0.5:
                bad.append(f"(beta={beta}, mu={mu}): {change:.2f}")
    detail = f"max growth of the ln k bound per doubling = {worst:.3f} (pointwise change {point:.2f})"
    if bad:
        detail += "; over 50% at " + ", ".join(bad)
    report(3, not bad, detail, time.perf_counter() - t0, 60)


def test_criterion_04_disk_main_term():
    t0 = time.perf_counter()
    ctx = MagneticContext(1.0)
    bad, lo, hi = [], math.inf, -math.inf
    for m in (0, 1, 2):
        for rho in (0.5, 2.0):
            disk = RadialSymbol.indicator(math.sqrt(2 * rho / ctx.b))
            r = [math.exp(matrix_element(ctx, disk, m, m, k, k).log_abs - disk_prediction(m, rho, k).log_abs)
                 for k in range(80, 151)]
            lo, hi = min(lo, min(r)), max(hi, max(r))
            if min(r) < 0.98 or max(r) > 1.02:
                bad.append(f"(m={m}, rho={rho}): [{min(r):.4f}, {max(r):.4f}]")
    detail = f"ratio range [{lo:.4f}, {hi:.4f}]"
    if bad:
        detail += "; outside [0.98, 1.02] at " + ", ".join(bad)
    report(4, not bad, detail, time.perf_counter() - t0, 30)


def test_criterion_05_disk_leading_order():
    t0 = time.perf_counter()
    ctx = MagneticContext(1.0)
    bad, worst, point = [], 0.0, 0.0
    for q in (0, 1, 2):
        for rho in (0.5, 2.0):
            disk = RadialSymbol.indicator(math.sqrt(2 * rho / ctx.b))
            pred = theorem1_prediction(math.sqrt(2 * rho / ctx.b), ctx.b)
            resid = [matrix_element(ctx, disk, q, q, k, k).ln() - pred(k) for k in DOUBLINGS]
            change, pw = stable_ratio(resid, DOUBLINGS)
            worst, point = max(worst, change), max(point, pw)
            if change >= 0.5:
                bad.append(f"(q={q}, rho={rho}): {change:.2f}")
    detail = f"max growth of the ln k bound per doubling = {worst:.3f} (pointwise change {point:.2f})"
    if bad:
        detail += "; over 50% at " + ", ".join(bad)
    report(5, not bad, detail, time.perf_counter() - t0, 30)


def test_criterion_06_coefficient_oracles():
    t0 = time.perf_counter()
    errs = []
    for beta in BETAS_LOW:
        for mu in MUS:
            f = f_series(beta, mu, 3)
            if f[1] != mu:
                errs.append(f"f1 beta={beta} mu={mu}")
            if abs(f[2] + beta * beta * mu * mu / 2) > 1e-8:
                errs.append(f"f2 beta={beta} mu={mu}")
            fd = fd_coefficients("F", beta, mu, 3)
            errs += [f"f{j} fd beta={beta} mu={mu}" for j in range(4)
                     if abs(fd[j] - f[j]) > 1e-6 * abs(f[j])]
    for beta in BETAS_HIGH:
        for mu in MUS:
            g = g_series(beta, mu, 3)
            if g[0] != (1 + math.log(mu * beta)) / beta:
                errs.append(f"g0 beta={beta} mu={mu}")
            if abs(g[1] - (beta * mu) ** (-1 / beta)) > 1e-8:
                errs.append(f"g1 beta={beta} mu={mu}")
            fd = fd_coefficients("G", beta, mu, 3)
            # g_3 vanishes identically at beta = 3, where a pure relative test is meaningless
            errs += [f"g{j} fd beta={beta} mu={mu}" for j in range(4)
                     if abs(fd[j] - g[j]) > 1e-6 * abs(g[j]) + 1e-9]
    report(6, not errs, "all coefficient oracles hold" if not errs else "; ".join(errs),
           time.perf_counter() - t0, 5)


def test_criterion_07_route_equivalence():
    t0 = time.perf_counter()
    ctx = MagneticContext(1.0)
    g = RadialSymbol.gaussian(1.0)
    om = HermitianSymbolMatrix(g, g)
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for q in (1, 2):
            a = quadratic_form_eigs(ctx, om, q, 60)
            b = wq_route_eigs(ctx, om, q, 60)
            for x, y in zip(a.values[:30], b.values[:30]):
                worst = max(worst, x.relative_difference(y))
    report(7, worst <= 1e-7, f"max rel difference of top 30 = {worst:.2e}", time.perf_counter() - t0, 60)


def _gaussian_moment(i, j, i2, j2, b):
    # <z^i zbar^j G, z^i2 zbar^j2 G> with G = exp(-b r^2 / 4)
    if i - j != i2 - j2:
        return 0.0
    n = (i + j + i2 + j2) // 2
    return math.pi * (2.0 / b) ** (n + 1) * math.factorial(n)


def _inner(p1, p2, b):
    return sum(c1 * np.conj(c2) * _gaussian_moment(i, j, i2, j2, b)
               for (i, j), c1 in p1.items() for (i2, j2), c2 in p2.items())


def test_criterion_08_identity_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    lag = 0.0
    for _ in range(1000):
        q, m, t = int(rng.integers(0, 30)), int(rng.integers(0, 10)), float(rng.uniform(-20, 20))
        lhs = sum(laguerre(LaguerreParams(j, m), t) for j in range(q + 1))
        rhs = laguerre(LaguerreParams(q, m + 1), t)
        lag = max(lag, abs(lhs - rhs) / (1 + abs(rhs)))

    ctx = MagneticContext(1.0)
    V = RadialSymbol.gaussian(1.0)
    xi = 0.0
    for m in range(4):
        W = laguerre_operator(m, 0, V, ctx.b)
        for k in range(21):
            a = float(matrix_element(ctx, V, m, m, k, k))
            b0 = float(matrix_element(ctx, W, 0, 0, k, k))
            xi = max(xi, abs(a - b0) / abs(a))
            assert matrix_element(ctx, V, m, m, k, k + 1).sign == 0

    b = 1.0
    states = [(q, k) for q in range(4) for k in range(6)]
    polys = {s: explicit_polynomial(*s, b) for s in states}
    ortho = max(abs(_inner(polys[s1], polys[s2], b) - (s1 == s2)) for s1 in states for s2 in states)

    ladder = max(max(abs(c) for c in
                     [explicit_polynomial(q, k, b).get(key, 0) - ladder_polynomial(q, k, b).get(key, 0)
                      for key in set(explicit_polynomial(q, k, b)) | set(ladder_polynomial(q, k, b))])
                 for q in range(4) for k in range(11))
    ok = lag <= 1e-9 and xi <= 1e-10 and ortho <= 1e-10 and ladder <= 1e-10
    detail = f"Laguerre sum {lag:.1e}, Xi identity {xi:.1e}, orthonormality {ortho:.1e}, ladder {ladder:.1e}"
    report(8, ok, detail, time.perf_counter() - t0, 60)


def test_criterion_09_power_tail_counting():
    t0 = time.perf_counter()
    ctx = MagneticContext(1.0)
    tau, R = 1.0, 1.0
    worst = 0.0
    floor_ok = True
    for q in (0, 1):
        for rho in (1.0, 2.0):
            psi = (RadialSymbol.term(tau, -0.5 * rho, 0.0, 1.0, Cutoff("outside", R))
                   + RadialSymbol.constant(tau * R ** -rho, Cutoff("inside", R)))
            # scaled so that T_q equals psi exactly
            T = tq_symbol(HermitianSymbolMatrix.scalar(psi.scaled(1.0 / ctx.landau_level(q))), q, ctx.b)
            spec = LazyRadialSpectrum(ctx, T, q)
            floor_ok &= float(spec.value(spec.k_max)) < 1e-5
            target = cq_constant(tau, rho, ctx)
            for lam in np.geomspace(1e-4, 1e-3, 10):
                scaled = lam ** (2 / rho) * count_above(spec, float(lam))
                worst = max(worst, abs(scaled / target - 1))
    report(9, worst <= 0.05 and floor_ok, f"max |lambda^(2/rho) N(lambda) / C_q - 1| = {worst:.4f}",
           time.perf_counter() - t0, 120)


def test_criterion_10_galerkin_sandwich():
    t0 = time.perf_counter()
    ctx = MagneticContext(1.0)
    c = 0.02
    const_err = 0.0
    notes, ok = [], True
    for q in (0, 1):
        spec = TruncationSpec(q + 3, 40, q)
        for sign in ("+", "-"):
            s = 1 if sign == "+" else -1
            gm = assemble_full(ctx, HermitianSymbolMatrix.identity(c), spec, sign)
            ev = np.sort(np.linalg.eigvalsh(gm.dense))
            ref = np.sort(np.repeat([(1 + s * c) * ctx.landau_level(j) for j in range(q + 4)], 41))
            const_err = max(const_err, float(np.max(np.abs(ev - ref))))
            shifts = cluster_near(ctx, gm, q).floats()
            const_err = max(const_err, float(np.max(np.abs(shifts - c * ctx.landau_level(q)))))

            m = HermitianSymbolMatrix.scalar(RadialSymbol.term(c, 0.0, 1.0, 1.0))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                rep = sandwich_check(ctx, m, q, spec, sign=s)
            ok &= rep.k0 is not None and rep.k0 <= 3 and rep.first_order["passed"]
            notes.append(f"q={q}{sign}: k0={rep.k0}, first-order {rep.first_order['max_rel_error']:.3f}, "
                         f"{len(rep.unstable)} unstable")
    ok &= const_err <= 1e-10
    report(10, ok, f"constant case error {const_err:.1e}; " + "; ".join(notes), time.perf_counter() - t0, 120)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
