import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as si
from scipy import special

from hitkit import kernels as kn
from hitkit import specfun as sf
from hitkit.bessel_core import HitLawParams, bes_hit_zero_density
from hitkit.quadrature import QuadSpec

alphas = st.floats(0.05, 1.95)


def P(alpha, mass=0.0, lam=None):
    return kn.StabilityParams(alpha, mass, lam)


def quad0inf(f, split=1.0):
    a, _ = si.quad(f, 0, split, limit=400, epsabs=0, epsrel=1e-11)
    b, _ = si.quad(f, split, np.inf, limit=400, epsabs=0, epsrel=1e-11)
    return a + b


# --- parameters and points ------------------------------------------------------

def test_params():
    assert P(1.5, 8.0).lambda_ == pytest.approx(4.0)
    assert P(1.5, 8.0, lam=0.3).lambda_ == 0.3
    assert P(1.0).lambda_ == 0.0
    for bad in (dict(alpha=0.0), dict(alpha=1.0, mass=-1.0), dict(alpha=1.0, lam=-0.1)):
        with pytest.raises(ValueError):
            kn.StabilityParams(**bad)


def test_space_point():
    y = kn.SpacePoint((3, 1, 2, 5))
    assert list(y.tilde) == [1.0, 2.0, 5.0]
    assert list(y.bar) == [2.0, 5.0]
    assert y.dist_tilde([1, 2, 1]) == pytest.approx(5.0)
    assert y.dist_bar([2, 5]) == pytest.approx(math.sqrt(10))


# --- slit boundary kernel ------------------------------------------------------

def test_boundary_value():
    assert kn.halfline2d_boundary_kernel(P(1.0), -1.0, 1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-15)


@pytest.mark.parametrize("alpha, u", [(0.7, -2.0), (1.0, -1.0), (1.8, -0.3)])
def test_boundary_normalised(alpha, u):
    f = lambda r: kn.halfline2d_boundary_kernel(P(alpha), u, r)
    assert abs(quad0inf(f, -u) - 1) < 1e-9


@given(alphas, st.floats(-10, -0.01), st.floats(0.01, 10), st.floats(0.1, 10))
@settings(max_examples=80, deadline=None)
def test_boundary_homogeneous(alpha, u, r, c):
    k = kn.halfline2d_boundary_kernel(P(alpha), u, r)
    assert k > 0
    assert kn.halfline2d_boundary_kernel(P(alpha), c * u, c * r) * c == pytest.approx(k, rel=1e-12)


def test_boundary_mass_with_killing():
    # total mass is E[exp(-lam^2 tau/2)] = first-stage mass of the Bessel time from |u|
    p = P(1.2, lam=0.8)
    mass = quad0inf(lambda r: kn.halfline2d_boundary_kernel(p, -1.5, r))
    assert 0 < mass < 1


# --- slit general start -----------------------------------------------------

def test_general_start_axis_limit():
    p = P(1.0, lam=1.0)
    k = kn.halfline2d_laplace_kernel(p, (1e-4, -1.0), 1.0)
    assert abs(k / kn.halfline2d_boundary_kernel(p, -1.0, 1.0) - 1) < 1e-3


@pytest.mark.parametrize("alpha, lam, z, r", [
    (1.0, 1.0, (1.0, 0.0), 1.0),
    (0.6, 0.0, (0.5, -1.0), 2.0),
    (1.5, 2.0, (2.0, 1.0), 0.3),
])
def test_general_start_two_routes(alpha, lam, z, r):
    p = P(alpha, lam=lam)
    a = kn.halfline2d_laplace_kernel(p, z, r, QuadSpec(tol=1e-11))
    b = kn.halfline2d_laplace_by_composition(p, z, r)
    assert abs(a / b - 1) < 1e-8


@pytest.mark.parametrize("alpha, z", [(1.0, (1.0, 0.0)), (0.5, (0.3, 2.0))])
def test_general_start_normalised(alpha, z):
    p = P(alpha)
    f = lambda r: kn.halfline2d_laplace_kernel(p, z, r)
    assert abs(quad0inf(f, 2.0) - 1) < 1e-7


@given(alphas, st.floats(0.0, 3.0), st.floats(0.01, 3.0), st.floats(-3.0, 3.0), st.floats(0.01, 10.0))
@settings(max_examples=40, deadline=None)
def test_general_start_positive(alpha, lam, z1, z2, r):
    assert kn.halfline2d_laplace_kernel(P(alpha, lam=lam), (z1, z2), r) > 0


def test_general_start_errors():
    with pytest.raises(ValueError):
        kn.halfline2d_laplace_kernel(P(1.0), (0.0, -1.0), 1.0)
    with pytest.raises(ValueError):
        kn.halfline2d_boundary_kernel(P(1.0), 1.0, 1.0)


# --- half-space kernels -----------------------------------------------------

def test_joint_density_normalised_n1():
    p = P(1.0)
    f = lambda s, t: kn.halfspace_joint_density(p, 1, (0.0, -1.0), t, [s])
    inner = lambda t: quad0inf(lambda s: f(s, t))
    total = quad0inf(inner)
    assert abs(total - 1) < 1e-6


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_joint_density_laplace_is_H(lam):
    p = P(1.3, lam=lam)
    y, s = (0.0, -1.0, 0.4), [0.7, -0.2]
    lhs = quad0inf(lambda t: math.exp(-0.5 * lam * lam * t) * kn.halfspace_joint_density(p, 2, y, t, s))
    assert abs(lhs / kn.halfspace_H_lambda(p, 2, y[1:], s) - 1) < 1e-8


def test_joint_density_scaling():
    p = P(0.9)
    y, s, t, c = (0.0, -1.0, 0.5), np.array([0.4, 1.0]), 0.8, 3.0
    a = kn.halfspace_joint_density(p, 2, y, t, s)
    b = kn.halfspace_joint_density(p, 2, tuple(math.sqrt(c) * np.array(y)), c * t, math.sqrt(c) * s)
    assert b * c ** (1 + 1) == pytest.approx(a, rel=1e-12)


@pytest.mark.parametrize("alpha", np.linspace(0.2, 1.8, 5))
@pytest.mark.parametrize("lam", [0.0, 0.3, 0.8, 1.5, 4.0])
def test_H_reduces_to_boundary_n1(alpha, lam):
    p = P(alpha, lam=lam)
    h = kn.halfspace_H_lambda(p, 1, [-1.0], [2.0])
    assert abs(h / kn.halfline2d_boundary_kernel(p, -1.0, 2.0) - 1) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_kfac_small_lambda(n):
    d = 1.7
    small = kn._kfac(0.5 * n, 1e-10, d)  # n = 1 converges only like lam d
    assert abs(small / kn._kfac(0.5 * n, 0.0, d) - 1) < 1e-9


def test_H_decreasing_in_distance():
    p = P(1.1, lam=0.6)
    vals = [kn.halfspace_H_lambda(p, 2, [-1.0, 0.0], [1.0, x]) for x in (0.0, 0.5, 1.0, 3.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n, alpha, lam", [(1, 1.0, 1.0), (2, 0.7, 0.5)])
def test_first_stage_mass(n, alpha, lam):
    p = P(alpha, lam=lam)
    y1 = 0.8
    closed = kn.halfspace_first_stage_mass(p, y1)
    h = HitLawParams(alpha, y1)
    via_t = quad0inf(lambda t: math.exp(-0.5 * lam * lam * t) * bes_hit_zero_density(h, t))
    assert abs(closed / via_t - 1) < 1e-9
    y = np.zeros(n + 1)
    y[0] = y1
    if n == 1:
        total = quad0inf(lambda z: kn.halfspace_P_lambda(p, 1, y, [z])) + \
            quad0inf(lambda z: kn.halfspace_P_lambda(p, 1, y, [-z]))
    else:
        radial = lambda rho: 2 * math.pi * rho * kn.halfspace_P_lambda(p, 2, y, [rho, 0.0])
        total = quad0inf(radial)
    assert abs(total / closed - 1) < 1e-8


def test_composition_n1_matches_slit():
    p = P(1.0, lam=1.0)
    a = kn.halfspace_laplace_kernel(p, 1, (1.0, 0.0), [1.0])
    b = kn.halfline2d_laplace_kernel(p, (1.0, 0.0), 1.0)
    assert abs(a / b - 1) < 1e-4


def test_composition_boundary_limit():
    p = P(1.2, lam=0.5)
    a = kn.halfspace_laplace_kernel(p, 1, (1e-5, -1.0), [0.8])
    assert abs(a / kn.halfspace_H_lambda(p, 1, [-1.0], [0.8]) - 1) < 1e-3


def test_composition_n2_matches_slit_marginal():
    # integrating the n = 2 kernel over sigma3 gives the n = 1 kernel
    p = P(1.0, lam=1.0)
    y = (0.6, -0.5, 0.0)
    f = lambda s3: kn.halfspace_laplace_kernel(p, 2, y, [1.0, s3], QuadSpec(tol=1e-5))
    marg = 2 * (si.quad(f, 0, 2, epsrel=1e-7)[0] + si.quad(f, 2, np.inf, epsrel=1e-7)[0])
    ref = kn.halfline2d_laplace_kernel(p, (0.6, -0.5), 1.0)
    assert abs(marg / ref - 1) < 1e-5


def test_poisson_stable_value():
    assert kn.halfspace_poisson_stable(1.0, 1, [-1.0], [1.0]) == pytest.approx(1 / (2 * math.pi), rel=1e-15)


def test_poisson_stable_n2_normalised():
    alpha, y = 0.5, np.array([-1.0, 0.0])
    f = lambda s2, s1: kn.halfspace_poisson_stable(alpha, 2, y, [s1, s2])
    inner = lambda s1: 2 * quad0inf(lambda s2: f(s2, s1), 2.0)
    # s1 = u/(1-u) turns the slow s1^{-1-alpha/2} tail into an endpoint singularity
    total = si.quad(lambda u: inner(u / (1 - u)) / (1 - u) ** 2, 0, 1, limit=400, epsrel=1e-9)[0]
    assert abs(total - 1) < 1e-4


@given(alphas, st.floats(1e-3, 5.0), st.floats(-5, -0.01), st.floats(0.01, 5), st.floats(-5, 5))
@settings(max_examples=60, deadline=None)
def test_relativistic_below_stable(alpha, m, y1, s1, s2):
    rel = kn.halfspace_poisson_relativistic(alpha, m, 2, [y1, 0.0], [s1, s2])
    stab = kn.halfspace_poisson_stable(alpha, 2, [y1, 0.0], [s1, s2])
    assert 0 <= rel <= stab * (1 + 1e-12)


def test_relativistic_small_mass():
    for n in (1, 2, 3):
        y, s = -np.ones(n), np.ones(n)
        r = kn.halfspace_poisson_relativistic(1.3, 1e-12, n, y, s) / kn.halfspace_poisson_stable(1.3, n, y, s)
        assert abs(r - 1) < 1e-6


def test_relativistic_needs_mass():
    with pytest.raises(ValueError):
        kn.halfspace_poisson_relativistic(1.0, 0.0, 1, [-1.0], [1.0])


# --- interval ---------------------------------------------------------------

@pytest.mark.parametrize("alpha, z2", [(1.0, 0.0), (0.5, 0.4), (1.7, -0.8)])
def test_interval_normalised(alpha, z2):
    f = lambda r: kn.interval_poisson(alpha, z2, r)
    pos = si.quad(f, 1, 2, limit=400, epsrel=1e-12)[0] + si.quad(f, 2, np.inf, limit=400, epsrel=1e-12)[0]
    g = lambda r: kn.interval_poisson(alpha, z2, -r)
    neg = si.quad(g, 1, 2, limit=400, epsrel=1e-12)[0] + si.quad(g, 2, np.inf, limit=400, epsrel=1e-12)[0]
    assert abs(pos + neg - 1) < 1e-8


@given(alphas, st.floats(-0.99, 0.99), st.floats(1.001, 50))
@settings(max_examples=60, deadline=None)
def test_interval_reflection(alpha, z2, r):
    a = kn.interval_poisson(alpha, z2, r)
    assert a > 0
    assert kn.interval_poisson(alpha, -z2, -r) == pytest.approx(a, rel=1e-14)


# --- m_theta and the Gegenbauer expansion -----------------------------------

def test_m_theta_boundary_values():
    assert kn.m_theta(1.0, 0.3, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert kn.m_theta(1.0, 0.3, -1.0) == 0.0


def test_m_theta_zero_theta_increasing():
    xs = np.linspace(-0.99, 0.99, 25)
    v = [kn.m_theta(0.8, 0.0, x) for x in xs]
    assert 0 < kn.m_theta(0.8, 0.0, 0.0) < 1
    assert all(a < b for a, b in zip(v, v[1:]))
    # symmetric geometry: probability 1/2 from the centre
    assert kn.m_theta(0.8, 0.0, 0.0) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("alpha, theta", [(1.0, 0.3), (0.5, 2.0), (1.6, 0.05)])
def test_m_theta_solves_ode(alpha, theta):
    # 1/2 (1-x^2) f'' - c x f' = theta f with c = (2-alpha)/2
    c = 0.5 * (2 - alpha)
    h = 1e-3
    for x in (-0.6, 0.0, 0.45):
        f = lambda u: kn.m_theta(alpha, theta, u)
        d1 = (f(x + h) - f(x - h)) / (2 * h)
        d2 = (f(x + h) - 2 * f(x) + f(x - h)) / h ** 2
        assert abs(0.5 * (1 - x * x) * d2 - c * x * d1 - theta * f(x)) < 1e-5


def test_m_theta_domain():
    with pytest.raises(ValueError):
        kn.m_theta(1.0, 0.3, 1.5)


def test_gegenbauer_expansion_value():
    assert abs(kn.cauchy_gegenbauer_expansion(1.0, 2.0, 0.3, 40) - 1 / 1.7) < 1e-8


def test_gegenbauer_geometric_convergence():
    alpha, r, x = 0.8, 1.2, -0.4
    errs = [abs(kn.cauchy_gegenbauer_expansion(alpha, r, x, N) - 1 / (r - x)) for N in (10, 20, 30, 40)]
    ratios = [(b / a) ** (1 / 10) for a, b in zip(errs, errs[1:])]
    assert max(ratios) < 0.9


@given(alphas, st.floats(1.01, 10.0))
@settings(max_examples=40, deadline=None)
def test_gegenbauer_a0_positive(alpha, r):
    assert kn.gegenbauer_coeff_a(alpha, 0, r) > 0


@pytest.mark.parametrize("n, m", [(0, 1), (1, 3), (2, 5)])
def test_gegenbauer_orthogonality(n, m):
    alpha = 0.9
    rho = 0.5 * (1 + alpha)
    x, w = special.roots_jacobi(30, rho - 0.5, rho - 0.5)
    v = np.sum(w * sf.gegenbauer_c(n, rho, x) * sf.gegenbauer_c(m, rho, x))
    assert abs(v) < 1e-12


# --- complement of a half-line ----------------------------------------------

@pytest.mark.parametrize("m", [0.0, 0.7])
def test_complement_boundary_is_shifted_slit(m):
    alpha = 1.5
    lam = m ** (1 / alpha) if m else 0.0
    a = kn.halfline_complement_boundary(alpha, m, -1.0, 2.0)
    assert a == pytest.approx(kn.halfline2d_boundary_kernel(P(alpha - 1, lam=lam), -1.0, 2.0), rel=1e-15)


def test_complement_general_start_limit():
    a = kn.halfline_complement_kernel(1.5, 0.0, (1e-4, -1.0), 1.0)
    assert abs(a / kn.halfline_complement_boundary(1.5, 0.0, -1.0, 1.0) - 1) < 1e-3


@pytest.mark.parametrize("m", [0.0, 1.0])
def test_complement_nd_at_n2(m):
    a = kn.halfline_complement_nd(1.4, m, 2, [0.0, -1.0], [0.6])
    assert a == pytest.approx(kn.halfline_complement_boundary(1.4, m, -1.0, 0.6), rel=1e-12)


def test_complement_rejects_alpha():
    with pytest.raises(ValueError):
        kn.halfline_complement_boundary(1.0, 0.0, -1.0, 1.0)


# --- resolvents and sweeping ------------------------------------------------

@pytest.mark.parametrize("alpha, n, m, d", [(0.8, 2, 1.0, 1.5), (1.5, 1, 0.3, 0.4), (1.0, 3, 2.0, 2.0)])
def test_resolvent_bridge(alpha, n, m, d):
    x = np.zeros(n)
    y = np.zeros(n)
    y[-1] = d
    lhs = kn.resolvent_relativistic(alpha, n, m, x, y)
    xs = np.concatenate([[0.0], x])
    ys = np.concatenate([[0.0], y])
    rhs = kn.resolvent_bridge_constant(alpha) * kn.resolvent_U_lambda(alpha, n, m ** (1 / alpha), xs, ys)
    assert abs(lhs / rhs - 1) < 1e-12


def test_reflected_bm_on_boundary():
    x = np.array([0.0, 0.3, -0.2])
    y = np.array([0.0, 1.0, 0.5])
    assert kn.resolvent_reflected_bm(2, 0.7, x, y) == pytest.approx(2 * kn.resolvent_U_lambda(1.0, 2, 0.7, x, y),
                                                                   rel=1e-14)


@given(alphas, st.floats(0.1, 3), st.lists(st.floats(-3, 3), min_size=3, max_size=3),
       st.lists(st.floats(-3, 3), min_size=2, max_size=2))
@settings(max_examples=60, deadline=None)
def test_resolvent_positive_symmetric(alpha, lam, y, x):
    x = np.array([0.0] + x)
    y = np.array([abs(y[0])] + y[1:])
    if np.allclose(x, y):
        return
    a = kn.resolvent_U_lambda(alpha, 2, lam, x, y)
    assert a > 0
    assert kn.resolvent_U_lambda(alpha, 2, lam, y, x) == pytest.approx(a, rel=1e-14)


def test_resolvent_needs_boundary_point():
    with pytest.raises(ValueError):
        kn.resolvent_U_lambda(0.7, 1, 1.0, [1.0, 0.0], [1.0, 2.0])


def test_resolvent_alpha1_interior():
    a = kn.resolvent_U_lambda(1.0, 1, 1.0, [1.0, 0.0], [1.0, 2.0])
    assert a == pytest.approx(0.5 * kn.resolvent_reflected_bm(1, 1.0, [1.0, 0.0], [1.0, 2.0]))


@pytest.mark.parametrize("alpha, m, n, x, y, tol", [
    (1.0, 1.0, 1, [-1.0], [1.0], 1e-5),
    (0.5, 0.7, 2, [-1.0, 0.0], [0.5, 0.0], 1e-4),
    (1.3, 1.0, 2, [-0.5, 0.2], [0.0, 0.0], 1e-4),
])
def test_sweeping(alpha, m, n, x, y, tol):
    res = kn.sweeping_residual(alpha, m, n, x, y)
    assert abs(res) / kn.resolvent_relativistic(alpha, n, m, x, y) < tol


# --- strip Fourier relation -------------------------------------------------

def test_strip_ft_zero_frequency_is_real():
    r = kn.strip_ft_check(1.0, 0.0, 0.0, (1.2, 2.0), 0.0, 20_000, seed=3, dt=1e-3)
    assert r.lhs.imag == 0.0
    assert r.rhs_se == 0.0
    assert abs(r.lhs.real / r.rhs - 1) < 5 * r.lhs_se / r.lhs.real + 0.05


def test_strip_ft_modulus_bound():
    a = kn.strip_ft_check(1.0, 0.5, 0.0, (1.2, 2.0), 0.0, 20_000, seed=3, dt=1e-3)
    b = kn.strip_ft_check(1.0, 0.5, 0.0, (1.2, 2.0), 1.5, 20_000, seed=3, dt=1e-3)
    assert abs(b.lhs) <= abs(a.lhs) + 1e-15


def test_strip_ft_effective_parameter():
    r = kn.strip_ft_check(1.0, 0.3, 0.0, (1.1, 3.0), 0.4, 40_000, seed=5, dt=1e-3)
    assert abs(r.lhs.real - r.rhs) < 4 * math.hypot(r.lhs_se, r.rhs_se)


def test_strip_ft_insufficient_samples():
    with pytest.raises(kn.InsufficientSamplesError):
        kn.strip_ft_check(1.0, 0.0, 0.0, (5.0, 5.1), 0.0, 50, seed=0, dt=1e-3)
