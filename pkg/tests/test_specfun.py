import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hitkit import specfun as sf

# Reference values below were computed once with mpmath at 30 digits and frozen.


def rel(a, b):
    return abs(a / b - 1.0)


# --- Gamma family ---------------------------------------------------------

@pytest.mark.parametrize("x, ref", [
    (0.3, 2.991568987687591),
    (-2.5, -0.9453087204829419),
    (17.3, 48647628546156.97),
])
def test_gamma_frozen(x, ref):
    assert rel(sf.gamma(x), ref) < 1e-13


def test_lgamma_large():
    assert rel(sf.lgamma(250.5), 1131.2840013322552) < 1e-14


def test_gamma_poles():
    for x in (0.0, -1.0, -7.0):
        with pytest.raises(sf.PoleError):
            sf.gamma(x)
    assert sf.rgamma(-3.0) == 0.0


@given(st.floats(0.05, 30.0))
def test_gamma_recurrence(x):
    assert rel(sf.gamma(x + 1.0), x * sf.gamma(x)) < 1e-13


@given(st.floats(0.05, 0.95))
def test_gamma_reflection(x):
    assert rel(sf.gamma(x) * sf.gamma(1.0 - x), math.pi / math.sin(math.pi * x)) < 1e-13


def test_beta_symmetric():
    assert rel(sf.beta(0.3, 2.2), sf.gamma(0.3) * sf.gamma(2.2) / sf.gamma(2.5)) < 1e-13


# --- Bessel I -------------------------------------------------------------

def test_bessel_i_at_zero():
    assert sf.bessel_i(0.0, 0.0) == 1.0


def test_bessel_i_half_integer():
    assert rel(sf.bessel_i(-0.5, 1.0), math.cosh(1.0) * math.sqrt(2.0 / math.pi)) < 1e-13
    assert rel(sf.bessel_i(-0.5, 1.0), 1.2312002145929675) < 1e-13


def test_bessel_i_small_argument():
    # leading term (x/2)^nu / Gamma(nu+1)
    lead = (5e-7) ** -0.75 / sf.gamma(0.25)
    assert rel(sf.bessel_i(-0.75, 1e-6), lead) < 1e-6
    assert rel(sf.bessel_i(-0.75, 1e-6), 14668.693079445315) < 1e-12


@pytest.mark.parametrize("nu, x, ref", [
    (0.3, 25.0, 5763958753.418693),
    (2.5, 7.0, 104.61336757234871),
    (-1.3, 3.0, 3.4278426286348327),
])
def test_bessel_i_frozen(nu, x, ref):
    assert rel(sf.bessel_i(nu, x), ref) < 1e-12


def test_bessel_i_large_x_standard_asymptotic():
    # e^x / sqrt(2 pi x) is the correct leading behaviour; the alternative
    # form sqrt(2 pi x) e^x is off by the factor 2 pi x
    for x in (20.0, 40.0, 80.0):
        ratio = sf.bessel_ie(0.4, x) * math.sqrt(2.0 * math.pi * x)
        assert abs(ratio - 1.0) < 1.0 / x
        assert abs(sf.bessel_ie(0.4, x) / math.sqrt(2.0 * math.pi * x) - 1.0) > 0.99


def test_bessel_i_domain():
    with pytest.raises(sf.DomainError):
        sf.bessel_i(0.5, -1.0)


def test_bessel_i_vectorised():
    x = np.array([0.1, 1.0, 10.0])
    assert np.allclose(sf.bessel_i(1.5, x), [sf.bessel_i(1.5, v) for v in x], rtol=1e-15)


@given(st.floats(-0.95, 3.0), st.floats(0.01, 50.0))
def test_bessel_ie_reduced_consistent(nu, x):
    red = sf.bessel_ie_reduced(nu, x)
    assert rel(red, sf.bessel_ie(nu, x) * (0.5 * x) ** (-nu)) < 1e-12


def test_bessel_ie_reduced_at_zero():
    assert rel(sf.bessel_ie_reduced(-0.5, 0.0), 1.0 / sf.gamma(0.5)) < 1e-15


# --- Bessel K -------------------------------------------------------------

@pytest.mark.parametrize("nu, x, ref", [
    (0.5, 1.0, 0.46106850444789454),
    (1.0, 1.0, 0.6019072301972346),
    (0.3, 2.0, 0.11603697434811926),
    (2.7, 0.05, 16338.512785968012),
    (0.0, 40.0, 8.392861100099567e-19),
])
def test_bessel_k_frozen(nu, x, ref):
    assert rel(sf.bessel_k(nu, x), ref) < 1e-12


def test_bessel_k_half_integer_closed_form():
    assert rel(sf.bessel_k(0.5, 1.0), math.sqrt(math.pi / 2.0) * math.exp(-1.0)) < 1e-14


def test_bessel_k_even_in_order():
    assert sf.bessel_k(-0.3, 2.0) == sf.bessel_k(0.3, 2.0)


def test_bessel_k_integer_order_limit():
    # the integer case is a limit of the reflection form; test it against the
    # production route
    assert rel(sf.bessel_k_reflection(1.0, 1.0), sf.bessel_k(1.0, 1.0)) < 1e-9


@given(st.floats(-3.0, 3.0).filter(lambda v: abs(v - round(v)) > 0.05), st.floats(0.1, 5.0))
def test_bessel_k_reflection_moderate_x(nu, x):
    assert rel(sf.bessel_k_reflection(nu, x), sf.bessel_k(nu, x)) < 1e-9


@pytest.mark.xfail(strict=True, reason="I_{-nu} - I_nu cancels about 2x/ln10 digits; "
                                       "double precision cannot reach 1e-9 near x = 20")
def test_bessel_k_reflection_full_range():
    for x in np.linspace(0.1, 20.0, 40):
        assert rel(sf.bessel_k_reflection(0.3, x), sf.bessel_k(0.3, x)) < 1e-9


@given(st.floats(0.0, 4.0), st.floats(0.05, 30.0))
@settings(max_examples=50)
def test_bessel_k_macdonald_integral(nu, x):
    from hitkit.quadrature import QuadSpec, integrate_semi_infinite
    ref, _ = integrate_semi_infinite(lambda t: np.exp(-x * (np.cosh(t) - 1.0)) * np.cosh(nu * t), 0.0,
                                     QuadSpec(tol=1e-13), scale=1.0 / math.sqrt(x))
    assert rel(sf.bessel_ke(nu, x), ref) < 1e-10


@given(st.floats(0.0, 3.0), st.floats(0.05, 20.0))
@settings(max_examples=30)
def test_bessel_k_recurrence(nu, x):
    lhs = sf.bessel_k(nu + 1.0, x) - sf.bessel_k(nu - 1.0, x)
    rhs = 2.0 * nu / x * sf.bessel_k(nu, x)
    assert abs(lhs - rhs) <= 1e-11 * sf.bessel_k(nu + 1.0, x)


def test_bessel_k_domain():
    with pytest.raises(sf.DomainError):
        sf.bessel_k(0.5, 0.0)


@given(st.floats(0.1, 2.0), st.floats(0.1, 10.0))
@settings(max_examples=30)
def test_bessel_k_decreasing(nu, x):
    assert sf.bessel_k(nu, x * 1.1) < sf.bessel_k(nu, x)


# --- Hypergeometric -------------------------------------------------------

def test_hyp2f1_at_zero():
    assert sf.hyp2f1(0.3, -1.7, 2.2, 0.0) == 1.0


def test_hyp2f1_gauss_sum():
    # Gauss summation at z = 1
    ref = sf.gamma(1.2) * sf.gamma(1.7) / (sf.gamma(1.4) * sf.gamma(1.5))
    assert rel(sf.hyp2f1(0.3, 0.2, 1.7, 1.0), ref) < 1e-12
    assert rel(sf.hyp2f1(0.3, 0.2, 1.7, 1.0), 1.0610015965572788) < 1e-12


def test_hyp2f1_log_case():
    assert rel(sf.hyp2f1(1.0, 1.0, 2.0, 0.5), 2.0 * math.log(2.0)) < 1e-14


@pytest.mark.parametrize("a, b, c, z, ref", [
    (0.5, 1.5, 2.2, 0.9, 1.8758604186551053),
    (-0.3, 2.1, 1.4, -0.8, 1.274086082291603),
    (1.2, 0.7, 3.3, -1.0, 0.8184467193178478),
])
def test_hyp2f1_frozen(a, b, c, z, ref):
    assert rel(sf.hyp2f1(a, b, c, z), ref) < 1e-10


def test_hyp2f1_errors():
    with pytest.raises(sf.PoleError):
        sf.hyp2f1(0.5, 0.5, -2.0, 0.3)
    with pytest.raises(sf.SpecialFunctionError):
        sf.hyp2f1(0.5, 0.7, 1.0, 1.0)


@given(st.floats(-2.0, 3.0), st.floats(-2.0, 3.0), st.floats(0.1, 3.0))
@settings(max_examples=50)
def test_hyp2f1_at_one_gamma_identity(a, b, gap):
    c = a + b + gap
    for v in (c, c - a, c - b):
        if abs(v - round(v)) < 1e-6 and round(v) <= 0:
            return
    ref = sf.gamma(c) * sf.gamma(c - a - b) / (sf.gamma(c - a) * sf.gamma(c - b))
    assert abs(sf.hyp2f1(a, b, c, 1.0) - ref) <= 1e-10 * max(1.0, abs(ref))


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(0.3, 3.0), st.floats(-0.99, 0.95))
@settings(max_examples=60)
def test_hyp2f1_vs_mpmath(a, b, c, z):
    ref = float(mp.hyp2f1(a, b, c, z))
    assert abs(sf.hyp2f1(a, b, c, z) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_hyp1f1_values():
    assert sf.hyp1f1(0.3, 1.2, 0.0) == 1.0
    assert rel(sf.hyp1f1(1.0, 2.0, 1.0), math.e - 1.0) < 1e-14
    assert rel(sf.hyp1f1(-1.5, 0.7, 3.0), -1.8348221948605583) < 1e-12
    assert rel(sf.hyp1f1(0.4, 1.3, -5.0), 0.44503891309959664) < 1e-12


@pytest.mark.parametrize("a, b, z, ref", [
    (0.7, 1.4, 0.3, 1.7835779593680452),
    (2.2, 0.5, 6.0, 0.009524352272237536),
    (0.3, 2.0, 1.5, 0.9986910258525553),
])
def test_hypU_frozen(a, b, z, ref):
    assert rel(sf.hypU(a, b, z), ref) < 1e-9


@given(st.floats(0.05, 3.0), st.floats(1.05, 1.95), st.floats(0.05, 10.0))
@settings(max_examples=40)
def test_hypU_kummer_relation(a, b, z):
    lhs = sf.hypU(a, b, z)
    rhs = z ** (1.0 - b) * sf.hypU(1.0 + a - b, 2.0 - b, z)
    assert rel(lhs, rhs) < 1e-9


def test_hypU_small_z_leading_term():
    a, b, z = 0.6, 1.4, 1e-7
    lead = sf.gamma(b - 1.0) / sf.gamma(a) * z ** (1.0 - b)
    assert rel(sf.hypU(a, b, z), lead) < 1e-2


def test_hypU_domain():
    with pytest.raises(sf.DomainError):
        sf.hypU(0.5, 1.5, 0.0)


# --- Whittaker -----------------------------------------------------------

def test_whittaker_w_frozen():
    assert rel(sf.whittaker_w(0.3, 0.2, 1.5), 0.5334657187503841) < 1e-10
    assert rel(sf.whittaker_w(-0.4, 0.25, 0.02), 0.588996764670729) < 1e-10


def test_whittaker_symmetry_point():
    assert rel(sf.whittaker_w(0.3, -0.2, 1.5), sf.whittaker_w(0.3, 0.2, 1.5)) < 1e-10


@given(st.floats(-2.0, 2.0), st.floats(0.05, 1.5), st.floats(0.05, 10.0))
@settings(max_examples=100)
def test_whittaker_symmetry(k, mu, z):
    assert rel(sf.whittaker_w(k, -mu, z), sf.whittaker_w(k, mu, z)) < 1e-12


def test_whittaker_m_definition():
    ref = math.exp(-0.5) * sf.hyp1f1(0.75, 1.5, 1.0)
    assert rel(sf.whittaker_m(0.0, 0.25, 1.0), ref) < 1e-15
    assert rel(sf.whittaker_m(0.0, 0.25, 1.0), 1.0506989124164827) < 1e-12


def test_whittaker_small_z():
    # W_{k,mu}(z) ~ Gamma(2 mu)/Gamma(1/2 + mu - k) z^{1/2 - mu} for 0 < mu < 1/2
    k, mu = 0.0, 0.2
    for z in (1e-4, 1e-6):
        lead = sf.gamma(2 * mu) / sf.gamma(0.5 + mu - k) * z ** (0.5 - mu)
        assert rel(sf.whittaker_w(k, mu, z), lead) < 5 * z ** (2 * mu)


def test_whittaker_small_z_two_terms():
    # adding the second term Gamma(-2mu)/Gamma(1/2 - mu - k) z^{1/2 + mu}
    k, mu, z = 0.0, 0.2, 1e-8
    two = (sf.gamma(2 * mu) / sf.gamma(0.5 + mu - k) * z ** (0.5 - mu)
           + sf.gamma(-2 * mu) / sf.gamma(0.5 - mu - k) * z ** (0.5 + mu))
    assert rel(sf.whittaker_w(k, mu, z), two) < 1e-6


def test_whittaker_domain():
    with pytest.raises(sf.DomainError):
        sf.whittaker_w(0.1, 0.2, -1.0)


# --- Legendre / Gegenbauer -----------------------------------------------

def test_legendre_q_order_zero():
    assert rel(sf.legendre_q(0.0, 0.0, 2.0), 0.5 * math.log(3.0)) < 1e-14


@pytest.mark.parametrize("nu, mu, x, p_ref, q_ref", [
    (0.75, 0.5, 2.0, 1.6308421652342608, 0.1835883803452666),
    (2.3, 0.4, 1.3, 3.440572495118577, 0.14601579673895101),
])
def test_legendre_frozen(nu, mu, x, p_ref, q_ref):
    assert rel(sf.legendre_p(nu, mu, x), p_ref) < 1e-12
    assert rel(sf.legendre_q(nu, mu, x), q_ref) < 1e-12


def _wronskian(nu, mu, x):
    def d(f):
        return (nu * x * f(nu, mu, x) - (nu + mu) * f(nu - 1.0, mu, x)) / (x * x - 1.0)
    return sf.legendre_p(nu, mu, x) * d(sf.legendre_q) - d(sf.legendre_p) * sf.legendre_q(nu, mu, x)


def test_legendre_wronskian_point():
    assert rel(_wronskian(0.75, 0.5, 2.0), sf.legendre_wronskian(0.75, 0.5, 2.0)) < 1e-8


@given(st.floats(0.1, 3.0), st.floats(0.05, 0.95), st.floats(1.1, 5.0))
@settings(max_examples=50)
def test_legendre_wronskian(nu, mu, x):
    assert rel(_wronskian(nu, mu, x), sf.legendre_wronskian(nu, mu, x)) < 1e-8


def test_legendre_p_near_one():
    # P^mu(x) ((x-1)/(x+1))^{mu/2} -> 1/Gamma(1-mu) as x -> 1+, so with
    # mu = alpha/2 the product (x^2-1)^{alpha/4} P^{alpha/2}(x) tends to
    # 2^{alpha/2}/Gamma(1-alpha/2)
    a = 0.8
    mu = 0.5 * a
    x = 1.0 + 1e-10
    val = sf.legendre_p(0.3, mu, x) * ((x - 1.0) / (x + 1.0)) ** (0.5 * mu)
    assert rel(val, 1.0 / sf.gamma(1.0 - mu)) < 1e-8
    scaled = sf.legendre_p(0.3, mu, x) * (x * x - 1.0) ** (0.25 * a)
    assert rel(scaled, 2.0 ** (0.5 * a) / sf.gamma(1.0 - 0.5 * a)) < 1e-8


def test_legendre_errors():
    with pytest.raises(sf.DomainError):
        sf.legendre_q(0.5, 0.2, 1.0)
    with pytest.raises(sf.PoleError):
        sf.legendre_q(-1.5, 0.5, 2.0)


def test_legendre_q_large_degree_finite():
    v = sf.legendre_q(200.3, 0.5, 1.5)
    assert v > 0 and math.isfinite(v)


def test_gegenbauer_low_degree():
    x = np.linspace(-1, 1, 7)
    assert np.all(sf.gegenbauer_c(0, 1.25, x) == 1.0)
    assert np.allclose(sf.gegenbauer_c(1, 1.25, x), 2.5 * x)


def test_gegenbauer_frozen_and_parity():
    assert rel(sf.gegenbauer_c(3, 1.25, 0.4), -1.47) < 1e-14
    assert rel(sf.gegenbauer_c(3, 1.25, -0.4), 1.47) < 1e-14
    assert rel(sf.gegenbauer_c(7, 0.75, -0.6), -0.65940620625) < 1e-13


def _gegenbauer_sum(n, rho, x):
    # explicit finite sum in exact rationals
    from fractions import Fraction
    r = Fraction(rho)
    t = Fraction(x)
    total = Fraction(0)
    for k in range(n // 2 + 1):
        poch = Fraction(1)
        for j in range(n - k):
            poch *= r + j
        total += (-1) ** k * poch / (math.factorial(k) * math.factorial(n - 2 * k)) * (2 * t) ** (n - 2 * k)
    return float(total)


@given(st.integers(0, 12), st.floats(0.1, 2.0), st.floats(-1.0, 1.0))
@settings(max_examples=60)
def test_gegenbauer_explicit_sum(n, rho, x):
    ref = _gegenbauer_sum(n, rho, x)
    assert abs(sf.gegenbauer_c(n, rho, x) - ref) <= 1e-11 * max(1.0, abs(ref))


def test_gegenbauer_bad_degree():
    with pytest.raises(sf.DomainError):
        sf.gegenbauer_c(-1, 1.0, 0.2)


@pytest.mark.parametrize("a, b, z", [(0.0, 0.0, 1.0), (-1.0, 0.0, 1.3), (-2.0, -1.0, 0.7), (-3.0, 2.5, 2.0)])
def test_hypU_terminating_at_integer_b(a, b, z):
    # U(-n, b, z) is a polynomial in z even where 1F1(-n, b, z) has a pole
    assert rel(sf.hypU(a, b, z), float(mp.hyperu(a, b, z))) < 1e-13
