import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from landau_toeplitz.asymptotics import (MAX_ORDER, AsymptoticExpansion, PowerSeries, disk_prediction,
                                         f_series, fd_coefficients, g_series, j_range,
                                         lnL_prediction, log_l_exact, mu_from_gamma, objective,
                                         solve_minimizer, theorem1_prediction, theorem2_expansion)
from landau_toeplitz.special import log_lower_incomplete

coeffs = st.lists(st.floats(-1, 1), min_size=6, max_size=6)


# power series --------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 3.0), coeffs)
def test_exp_log_roundtrip(c0, rest):
    s = PowerSeries([c0] + rest[1:])
    assert s.log().exp().allclose(s, 1e-10)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 3.0), coeffs, st.floats(0.3, 3.0))
def test_real_power_roundtrip(c0, rest, a):
    s = PowerSeries([c0] + rest[1:])
    assert ((s**a) ** (1.0 / a)).allclose(s, 1e-9)


def test_series_arithmetic():
    e = PowerSeries.variable(5)
    geo = PowerSeries([1.0] * 6)
    assert ((1.0 - e) * geo).allclose(PowerSeries.constant(1.0, 5))
    ex = e.exp()
    assert np.allclose(ex.c, [1 / math.factorial(j) for j in range(6)])
    assert np.allclose((1.0 + e).log().c, [0, 1, -1 / 2, 1 / 3, -1 / 4, 1 / 5])
    assert np.allclose(((1.0 + e) ** 0.5).c[:3], [1, 0.5, -0.125])
    assert np.allclose(ex.compose(e * 2.0).c, [2.0**j / math.factorial(j) for j in range(6)])
    assert np.allclose(ex.derivative().c[:5], ex.c[:5])
    assert e.shift(2).c.tolist() == [0, 0, 0, 1, 0, 0]
    assert ex(0.1) == pytest.approx(math.exp(0.1), rel=1e-8)
    with pytest.raises(ValueError):
        (e - 1.0).log()
    with pytest.raises(ValueError):
        ex.compose(ex)
    with pytest.raises(ValueError):
        e + PowerSeries.variable(3)


# minimizers ----------------------------------------------------------------

def test_solve_minimizer_examples():
    assert solve_minimizer("F", 0.4, 1.7, 0.0) == 1.0
    assert solve_minimizer("G", 2.0, 0.5, 0.0) == pytest.approx(1.0)
    u = (-0.05 + math.sqrt(0.05**2 + 4)) / 2
    assert solve_minimizer("F", 0.5, 1.0, 0.1) == pytest.approx(u * u, rel=1e-13)
    assert u * u == pytest.approx(0.9512344, abs=1e-7)


@pytest.mark.parametrize("kind,beta", [("F", 0.3), ("F", 0.7), ("G", 1.5), ("G", 3.0)])
@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("eps", [-0.05, 0.02, 0.1])
def test_stationarity(kind, beta, mu, eps):
    s = solve_minimizer(kind, beta, mu, eps)
    if kind == "F":
        assert abs(s - (1 - eps * beta * mu * s**beta)) <= 1e-12
    else:
        assert abs(beta * mu * s**beta - (1 - eps * s)) <= 1e-12
    h = 1e-6 * s
    d = (objective(kind, beta, mu, eps, s + h) - objective(kind, beta, mu, eps, s - h)) / (2 * h)
    assert abs(d) <= 1e-8


def test_solve_minimizer_rejects_large_eps():
    with pytest.raises(ValueError):
        solve_minimizer("F", 0.5, 1.0, 5.0)
    with pytest.raises(ValueError):
        solve_minimizer("H", 0.5, 1.0, 0.1)


# coefficients ---------------------------------------------------------------

@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_f_series(beta, mu):
    f = f_series(beta, mu, 6)
    assert f[0] == pytest.approx(1.0, abs=1e-15)
    assert f[1] == pytest.approx(mu, rel=1e-14)
    assert f[2] == pytest.approx(-beta * beta * mu * mu / 2, rel=1e-12)
    fd = fd_coefficients("F", beta, mu, 3)
    for j in range(4):
        assert fd[j] == pytest.approx(f[j], rel=1e-6)


@pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_g_series(beta, mu):
    g = g_series(beta, mu, 6)
    assert g[0] == pytest.approx((1 + math.log(mu * beta)) / beta, rel=1e-13)
    assert g[1] == pytest.approx((beta * mu) ** (-1 / beta), rel=1e-13)
    fd = fd_coefficients("G", beta, mu, 3)
    for j in range(4):
        # near-zero coefficients (g_3 vanishes at beta = 3) need an absolute floor
        assert fd[j] == pytest.approx(g[j], rel=1e-6, abs=1e-9)


def test_g0_unit_product():
    assert g_series(4.0, 0.25, 2)[0] == pytest.approx(0.25)


def test_order_guard_and_domain():
    with pytest.raises(ValueError):
        f_series(0.5, 1.0, MAX_ORDER + 1)
    with pytest.raises(ValueError):
        f_series(1.5, 1.0)
    with pytest.raises(ValueError):
        g_series(0.5, 1.0)


# expansions ------------------------------------------------------------------

def test_j_range_is_half_open():
    assert j_range(0.5) == [1]
    assert j_range(2.0 / 3.0) == [1, 2]
    assert j_range(0.7) == [1, 2, 3]
    assert j_range(2.0) == [1]
    assert j_range(3.0) == [1]
    assert j_range(1.5) == [1, 2]
    assert j_range(1.0) == []


def test_theorem2_expansion_examples():
    b, gamma = 2.0, 0.75
    mu = mu_from_gamma(gamma, 1.0, b)
    e = theorem2_expansion(1.0, mu)
    assert e.kloglog == 0.0 and e.terms == [(1.0, pytest.approx(-math.log1p(2 * gamma / b)))]
    assert theorem2_expansion(2.0, 1.0).kloglog == -0.5
    e = theorem2_expansion(0.5, 1.3)
    assert e.terms == [(0.5, pytest.approx(-1.3))]
    e = theorem2_expansion(2.0, 1.0)
    assert dict(e.terms)[1.0] == pytest.approx((1.0 - math.log(2.0)) / 2)
    assert dict(e.terms)[0.5] == pytest.approx(-g_series(2.0, 1.0, 1)[1])
    with pytest.raises(ValueError):
        theorem2_expansion(0.0, 1.0)


def test_expansion_json_roundtrip_and_eval():
    e = AsymptoticExpansion(-0.5, [(0.5, 2.0), (1.0, 1.0), (0.5, 1.0)])
    assert e.terms == [(1.0, 1.0), (0.5, 3.0)]
    back = AsymptoticExpansion.from_json(e.to_json())
    assert back.to_dict() == e.to_dict()
    assert set(e.to_dict()) == {"kloglog", "terms", "remainder"}
    k = 100.0
    assert e(k) == pytest.approx(-0.5 * k * math.log(k) + k + 30.0)
    with pytest.raises(ValueError):
        AsymptoticExpansion(0.0, [], "O(k^2)")


def test_beta_one_residual_is_exactly_order_one():
    mu = 0.8
    for k in (10, 100, 1000):
        exact = log_l_exact(1.0, mu, 1.0, 0.0, k)
        assert exact == pytest.approx(-math.log1p(mu) * (k + 1), rel=1e-10)
        assert exact - lnL_prediction(1.0, mu, 1.0, 0.0, k).main == pytest.approx(-math.log1p(mu))


def test_delta_enters_as_known_log():
    band = lnL_prediction(1.5, 1.0, 2.0, 0.5, 400)
    assert band.known_log == pytest.approx(0.5 * math.log(400))
    assert band.remainder == "O(log k)"
    # the shift is O(ln k): delta ln k when the peak sits at t ~ k, (delta/beta) ln k for beta > 1
    for beta, slope in ((0.5, 1.0), (1.5, 1 / 1.5)):
        for k in (400, 4000):
            a = log_l_exact(beta, 1.0, 2.0, 0.5, k) - log_l_exact(beta, 1.0, 2.0, 0.0, k)
            assert a == pytest.approx(slope * 0.5 * math.log(k), abs=0.5)


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0])
@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_expansion_matches_quadrature(beta, mu):
    ks = [2**p for p in range(6, 13)]
    c = [abs(log_l_exact(beta, mu, 1.0, 0.0, k) - lnL_prediction(beta, mu, 1.0, 0.0, k).main) / math.log(k)
         for k in ks]
    # C(k) = |residual| / ln k stays bounded and does not jump by more than 2x per doubling;
    # the 1e-3 floor covers residuals that cross zero
    for c1, c2 in zip(c, c[1:]):
        assert c2 <= 2 * c1 + 1e-3
    assert max(c) < 1.0


def test_disk_prediction_examples():
    rho, k = 2.0, 10
    v = disk_prediction(0, rho, k)
    assert v.ln() == pytest.approx(-rho + (k + 1) * math.log(rho) - math.log(k) - math.lgamma(k + 1))
    with pytest.raises(ValueError):
        disk_prediction(0, 0.0, 5)


def test_disk_prediction_m0_matches_incomplete_gamma():
    # nu_k = E_rho(k)/k!, the lower incomplete gamma over k!
    rho = 1.5
    prev = None
    for k in (50, 200, 800):
        r = math.exp(log_lower_incomplete(k, rho).log_abs - math.lgamma(k + 1) - disk_prediction(0, rho, k).ln())
        assert r == pytest.approx(1.0, abs=2 * rho / k)
        if prev is not None:
            assert abs(r - 1) < abs(prev - 1)
        prev = r


def test_theorem1_prediction():
    e = theorem1_prediction()
    assert e.kloglog == -1.0 and e.remainder == "O(k)"
    rho = 0.5 * 2.0 * 1.5**2
    e = theorem1_prediction(1.5, 2.0)
    assert dict(e.terms)[1.0] == pytest.approx(1.0 + math.log(rho))
    # Stirling: ln disk_prediction = -k ln k + k(1 + ln rho) - (3/2) ln k + O(1)
    c = -rho + math.log(rho) - 0.5 * math.log(2 * math.pi)
    for k in (100, 1000, 10000):
        resid = disk_prediction(0, rho, k).ln() - e(k)
        assert resid == pytest.approx(-1.5 * math.log(k) + c, abs=1.0 / k)
