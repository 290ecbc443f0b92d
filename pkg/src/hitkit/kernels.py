"""Closed-form hitting kernels, resolvents and their numerical companions.

Coordinates follow one rule: the distinguished coordinate comes first.  In
the Bessel-Brownian space ``R^{n+1}`` a point is ``(y1, y2, ..., y_{n+1})``
with ``y1 >= 0`` the Bessel coordinate; its projection to the boundary space
``R^n`` is ``y_tilde = (y2, ..., y_{n+1})``.  For kernels of the stable process
in ``R^n`` the half-space is ``{x1 < 0}`` and points are plain ``R^n`` vectors.

The relativistic mass ``m`` and the Laplace parameter are tied by
``lam = m**(1/alpha)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import specfun as sf
from .quadrature import (QuadSpec, QuadratureError, integrate, integrate_finite_singular,
                         integrate_power_tail, integrate_semi_infinite)

DEFAULT_SPEC = QuadSpec()


@dataclass(frozen=True)
class StabilityParams:
    """Stability index, relativistic mass and Laplace parameter."""

    alpha: float
    mass: float = 0.0
    lam: float | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError("alpha must lie in (0, 2)")
        if self.mass < 0:
            raise ValueError("mass must be nonnegative")
        if self.lam is not None and self.lam < 0:
            raise ValueError("lambda must be nonnegative")

    @property
    def lambda_(self) -> float:
        """Explicit ``lam`` if given, else ``mass**(1/alpha)``."""
        if self.lam is not None:
            return float(self.lam)
        return self.mass ** (1.0 / self.alpha) if self.mass > 0 else 0.0


@dataclass(frozen=True)
class SpacePoint:
    """A point of ``R^{n+1}``; ``tilde`` drops the Bessel coordinate, ``bar`` the first two."""

    full: tuple

    def __post_init__(self):
        object.__setattr__(self, "full", tuple(float(v) for v in self.full))
        if len(self.full) < 2:
            raise ValueError("need at least two coordinates")

    @property
    def tilde(self) -> np.ndarray:
        return np.asarray(self.full[1:])

    @property
    def bar(self) -> np.ndarray:
        return np.asarray(self.full[2:])

    def dist_tilde(self, sigma_tilde) -> float:
        """``|y - sigma_tilde|`` with ``sigma_tilde`` placed at Bessel coordinate 0."""
        s = np.asarray(sigma_tilde, dtype=float)
        return math.sqrt(self.full[0] ** 2 + float(np.sum((self.tilde - s) ** 2)))

    def dist_bar(self, sigma_bar) -> float:
        """``|y - sigma_bar|`` with ``sigma_bar`` placed at ``(0, 0, sigma_bar)``."""
        s = np.asarray(sigma_bar, dtype=float)
        return math.sqrt(self.full[0] ** 2 + self.full[1] ** 2 + float(np.sum((self.bar - s) ** 2)))


def _check_alpha(alpha: float, lo: float = 0.0, hi: float = 2.0) -> None:
    if not lo < alpha < hi:
        raise ValueError(f"alpha must lie in ({lo:g}, {hi:g})")


def _kfac(nu: float, lam: float, d):
    """``lam^nu K_nu(lam d) / d^nu``, with its ``lam -> 0`` limit for ``nu > 0``."""
    d = np.asarray(d, dtype=float)
    if lam == 0:
        if not nu > 0:
            raise ValueError("the lam = 0 limit needs a positive order")
        out = 2.0 ** (nu - 1.0) * sf.gamma(nu) / d ** (2.0 * nu)
    else:
        out = lam ** nu * sf.bessel_k(nu, lam * d) / d ** nu
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Slit in the plane


def halfline2d_boundary_kernel(p: StabilityParams, u: float, r):
    """Exit density at ``r > 0`` from ``(0, u)``, ``u < 0``, weighted by ``e^{-lam^2 tau/2}``."""
    if not u < 0:
        raise ValueError("u must be negative")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    a = p.alpha
    lam = p.lambda_
    out = math.sin(0.5 * math.pi * a) / math.pi * (-u / r) ** (0.5 * a) * np.exp(-lam * (r - u)) / (r - u)
    return float(out) if out.ndim == 0 else out


def halfline2d_laplace_kernel(p: StabilityParams, z, r: float, q: QuadSpec = DEFAULT_SPEC) -> float:
    """Exit density at ``r`` from a general start ``z = (z1, z2)``, ``z1 > 0``.

    Writes ``(s^2-lam^2)^{alpha/4} I_{-alpha/2}(c sqrt(s^2-lam^2))`` through the
    reduced Bessel function, which is entire in ``s^2 - lam^2``; ``s = lam cosh v``
    then leaves only a smooth exponential.
    """
    a = p.alpha
    lam = p.lambda_
    z1, z2 = map(float, z)
    if not z1 > 0:
        raise ValueError("z1 must be positive (use the boundary kernel on the axis)")
    if not r > 0:
        raise ValueError("r must be positive")
    nz = math.hypot(z1, z2)
    c = math.sqrt(2.0 * r * (nz + z2))
    pref = (nz - z2) ** (0.5 * a) / (2.0 ** (0.5 * a) * sf.gamma(0.5 * a) * r ** (0.5 * a))

    h = -0.5 * a
    if lam > 0:
        # s = lam cosh v; the factor exp(-(|z|+r) lam) is taken out so the
        # integrand is O(1) at v = 0 however large r is
        def g(v):
            with np.errstate(over="ignore", invalid="ignore"):
                sh = np.sinh(v)
                x = c * lam * sh
                excess = 2.0 * lam * np.sinh(0.5 * v) ** 2
                out = np.exp(-(nz + r) * excess + x) * sf.bessel_ie_reduced(h, x) * lam * sh
            # sinh overflows only where the Gaussian factor has long underflowed
            return np.where(np.isfinite(sh), out, 0.0)

        width = min(1.0, 1.0 / math.sqrt((nz + r) * lam))
        val, _ = integrate_semi_infinite(g, 0.0, q, scale=width)
        return pref * math.exp(-(nz + r) * lam) * val

    def g0(s):
        x = c * s
        return np.exp(-(nz + r) * s + x) * sf.bessel_ie_reduced(h, x)

    rate = max(nz + r - c, 1e-3 * (nz + r))
    val, _ = integrate_semi_infinite(g0, 0.0, q, scale=1.0 / rate)
    return pref * val


def halfline2d_laplace_by_composition(p: StabilityParams, z, r: float,
                                      q: QuadSpec = QuadSpec(tol=1e-9)) -> float:
    """Same quantity as :func:`halfline2d_laplace_kernel` assembled from the pair laws.

    Integrates the hitting-time density of ``X1`` against the bridge Laplace
    density of ``X2`` over time, at Laplace parameter ``2 lam`` because the clock
    is ``4 int (X1 + X2)``.
    """
    from .bessel_core import BesselLaw, besq_bridge_laplace_density, besq_hit_time_density

    a = p.alpha
    lam2 = 2.0 * p.lambda_
    z1, z2 = map(float, z)
    nz = math.hypot(z1, z2)
    x1 = 0.5 * (nz - z2)
    x2 = 0.5 * (nz + z2)
    law = BesselLaw.from_alpha(a)

    def f(t):
        out = np.zeros_like(t)
        for i, ti in enumerate(t):
            if ti > 0:
                out[i] = (besq_hit_time_density(a, lam2, x1, ti)
                          * besq_bridge_laplace_density(law, lam2, ti, x2, r))
        return out

    scale = max(0.25 * x1, 1e-3)
    if lam2 > 0:
        val, _ = integrate_semi_infinite(f, 0.0, q, scale=scale)
    else:
        # both factors decay algebraically; the product like t^{-2}
        val, _ = integrate_power_tail(f, 0.0, 0.0, 2.0, q, scale=scale)
    return val


# ---------------------------------------------------------------------------
# Half-spaces


def _sigma2_prefactor(alpha: float, y2: float, s2):
    return (-y2 / s2) ** (0.5 * alpha)


def halfspace_joint_density(p: StabilityParams, n: int, y, t, sigma_tilde) -> float:
    """Joint density of exit time and place from ``y = (0, y2, ...)``, ``y2 < 0``."""
    a = p.alpha
    y = SpacePoint(y)
    if y.full[0] != 0 or not y.full[1] < 0:
        raise ValueError("start must have y1 = 0 and y2 < 0")
    s = np.asarray(sigma_tilde, dtype=float)
    if s.shape != (n,) or not s[0] > 0:
        raise ValueError("sigma_tilde must have n coordinates with sigma2 > 0")
    if not t > 0:
        raise ValueError("t must be positive")
    d2 = y.dist_tilde(s) ** 2
    return (math.sin(0.5 * math.pi * a) / (2.0 ** (0.5 * n) * math.pi ** (1.0 + 0.5 * n))
            * _sigma2_prefactor(a, y.full[1], s[0]) * t ** (-1.0 - 0.5 * n) * math.exp(-d2 / (2.0 * t)))


def halfspace_H_lambda(p: StabilityParams, n: int, y_tilde, sigma_tilde) -> float:
    """Laplace-weighted exit density from the boundary point ``(0, y_tilde)``, ``y2 < 0``."""
    a = p.alpha
    lam = p.lambda_
    yt = np.asarray(y_tilde, dtype=float)
    s = np.asarray(sigma_tilde, dtype=float)
    if yt.shape != (n,) or s.shape != (n,):
        raise ValueError("points must have n coordinates")
    if not yt[0] < 0 or not s[0] > 0:
        raise ValueError("need y2 < 0 and sigma2 > 0")
    d = float(np.sqrt(np.sum((yt - s) ** 2)))
    return (2.0 * math.sin(0.5 * math.pi * a) / (2.0 ** (0.5 * n) * math.pi ** (0.5 * (n + 2)))
            * _sigma2_prefactor(a, yt[0], s[0]) * _kfac(0.5 * n, lam, d))


def halfspace_P_lambda(p: StabilityParams, n: int, y, z_tilde):
    """First-stage density: Laplace-weighted position of the Brownian part when ``Y1`` hits 0.

    ``z_tilde`` may be an array of shape ``(..., n)``.
    """
    a = p.alpha
    lam = p.lambda_
    y = np.asarray(y, dtype=float)
    if y.shape != (n + 1,) or not y[0] > 0:
        raise ValueError("y must have n+1 coordinates with y1 > 0")
    z = np.asarray(z_tilde, dtype=float)
    d = np.sqrt(y[0] ** 2 + np.sum((z - y[1:]) ** 2, axis=-1))
    nu = 0.5 * (n + a)
    const = 2.0 * y[0] ** a / ((2.0 * math.pi) ** (0.5 * n) * 2.0 ** (0.5 * a) * sf.gamma(0.5 * a))
    return const * _kfac(nu, lam, d)


def halfspace_first_stage_mass(p: StabilityParams, y1: float) -> float:
    """``E[exp(-lam^2 T/2)]`` for the Getoor-Sharpe time ``T`` from ``y1`` (closed form)."""
    a = p.alpha
    lam = p.lambda_
    if lam == 0:
        return 1.0
    nu = 0.5 * a
    return 2.0 * (0.5 * lam * y1) ** nu * sf.bessel_k(nu, lam * y1) / sf.gamma(nu)


def _h_lambda_vec(a, lam, n, z, sigma):
    # vectorised H_lambda over z of shape (m, n) with z2 < 0
    d = np.sqrt(np.sum((z - sigma) ** 2, axis=-1))
    return (2.0 * math.sin(0.5 * math.pi * a) / (2.0 ** (0.5 * n) * math.pi ** (0.5 * (n + 2)))
            * (-z[:, 0] / sigma[0]) ** (0.5 * a) * _kfac(0.5 * n, lam, d))


def halfspace_laplace_kernel(p: StabilityParams, n: int, y, sigma_tilde,
                             q: QuadSpec = DEFAULT_SPEC, qmc_points: int = 2 ** 16,
                             qmc_seed: int = 0) -> float:
    """Laplace-weighted exit density from a general start ``y``, ``y1 > 0``.

    ``int_{z2 < 0} P_lam(y, z) H_lam(z, sigma) dz + P_lam(y, sigma)``.  The
    integral is tensorised adaptive quadrature for ``n <= 3`` and a scrambled
    Sobol rule for larger ``n``.  The ``n = 3`` tensor is three nested
    adaptive integrals and takes tens of seconds; loosen ``q`` (including
    ``tail_cutoff_ratio``) when that matters more than the last digits.
    """
    a = p.alpha
    lam = p.lambda_
    y = np.asarray(y, dtype=float)
    sigma = np.asarray(sigma_tilde, dtype=float)
    if y.shape != (n + 1,) or sigma.shape != (n,):
        raise ValueError("dimension mismatch")
    if not y[0] > 0 or not sigma[0] > 0:
        raise ValueError("need y1 > 0 and sigma2 > 0")
    direct = float(halfspace_P_lambda(p, n, y, sigma))
    scale = max(y[0], 0.1)
    if lam > 0:
        scale = min(scale, 1.0 / lam) if lam > 1 else scale

    def integrand(z):
        return halfspace_P_lambda(p, n, y, z) * _h_lambda_vec(a, lam, n, z, sigma)

    if n == 1:
        def f1(u):
            z = -u[:, None]
            return integrand(z)
        val, _ = _half_line(f1, q, scale, lam, a)
    elif n in (2, 3):
        def inner(z2):
            if n == 2:
                def f(w):
                    z = np.column_stack([np.full_like(w, z2), w])
                    return integrand(z)
                v, _ = _real_line(f, y[2], q, scale, lam)
                return v

            def f_outer(w3):
                res = np.empty_like(w3)
                for i, w in enumerate(w3):
                    def f(w4):
                        z = np.column_stack([np.full_like(w4, z2), np.full_like(w4, w), w4])
                        return integrand(z)
                    res[i], _ = _real_line(f, y[3], q, scale, lam)
                return res
            v, _ = _real_line(f_outer, y[2], q, scale, lam)
            return v

        def fz(u):
            return np.array([inner(-ui) for ui in u])
        val, _ = _half_line(fz, q, scale, lam, a)
    else:
        val = _qmc_halfspace(integrand, n, y, scale, qmc_points, qmc_seed)
    return val + direct


def _half_line(f, q, scale, lam, a):
    # integral over (0, inf) of f(u); f behaves like u^{a/2} at 0
    if lam > 0:
        return integrate_semi_infinite(f, 0.0, q, scale=scale)
    return integrate_power_tail(f, 0.0, 0.5 * a, 1.0 + 0.5 * a, q, scale=scale)


def _real_line(f, center, q, scale, lam):
    if lam > 0:
        v1, e1 = integrate_semi_infinite(lambda s: f(center - s), 0.0, q, scale)
        v2, e2 = integrate_semi_infinite(lambda s: f(center + s), 0.0, q, scale)
    else:
        v1, e1 = integrate_power_tail(lambda s: f(center - s), 0.0, 0.0, 2.0, q, scale)
        v2, e2 = integrate_power_tail(lambda s: f(center + s), 0.0, 0.0, 2.0, q, scale)
    return v1 + v2, e1 + e2


def _qmc_halfspace(integrand, n, y, scale, points, seed):
    from scipy.stats import qmc

    u = qmc.Sobol(d=n, scramble=True, seed=seed).random(points)
    u = np.clip(u, 1e-15, 1.0 - 1e-15)
    # z2 = -scale * v/(1-v); other coordinates through a Cauchy map around y
    z = np.empty_like(u)
    jac = np.ones(points)
    z[:, 0] = -scale * u[:, 0] / (1.0 - u[:, 0])
    jac *= scale / (1.0 - u[:, 0]) ** 2
    for k in range(1, n):
        t = math.pi * (u[:, k] - 0.5)
        z[:, k] = y[k + 1] + scale * np.tan(t)
        jac *= scale * math.pi / np.cos(t) ** 2
    return float(np.mean(integrand(z) * jac))


def halfspace_poisson_stable(alpha: float, n: int, y_tilde, sigma_tilde) -> float:
    """Poisson kernel of ``{x1 < 0} in R^n`` for the isotropic stable process."""
    _check_alpha(alpha)
    yt = np.asarray(y_tilde, dtype=float)
    s = np.asarray(sigma_tilde, dtype=float)
    if yt.shape != (n,) or s.shape != (n,):
        raise ValueError("points must have n coordinates")
    if not yt[0] < 0 or not s[0] > 0:
        raise ValueError("need y1 < 0 and sigma1 > 0")
    d = float(np.sqrt(np.sum((yt - s) ** 2)))
    return (math.sin(0.5 * math.pi * alpha) * sf.gamma(0.5 * n) / math.pi ** (0.5 * (n + 2))
            * (-yt[0] / s[0]) ** (0.5 * alpha) / d ** n)


def halfspace_poisson_relativistic(alpha: float, mass: float, n: int, y_tilde, sigma_tilde) -> float:
    """``m``-Poisson kernel of ``{x1 < 0} in R^n`` for the relativistic stable process."""
    _check_alpha(alpha)
    if not mass > 0:
        raise ValueError("mass must be positive (use halfspace_poisson_stable at m = 0)")
    return halfspace_H_lambda(StabilityParams(alpha, mass), n, y_tilde, sigma_tilde)


def _halfspace_kernel_vec(alpha, mass, n, y_tilde, s):
    # vectorised over s of shape (m, n)
    lam = mass ** (1.0 / alpha) if mass > 0 else 0.0
    d = np.sqrt(np.sum((s - y_tilde) ** 2, axis=-1))
    pref = (-y_tilde[0] / s[:, 0]) ** (0.5 * alpha)
    if lam == 0:
        return (math.sin(0.5 * math.pi * alpha) * sf.gamma(0.5 * n) / math.pi ** (0.5 * (n + 2))
                * pref / d ** n)
    return (2.0 * math.sin(0.5 * math.pi * alpha) / (2.0 ** (0.5 * n) * math.pi ** (0.5 * (n + 2)))
            * pref * _kfac(0.5 * n, lam, d))


# ---------------------------------------------------------------------------
# Interval and strip


def interval_poisson(alpha: float, z2: float, r):
    """Exit density at ``|r| > 1`` from ``(0, z2)``, ``|z2| < 1``, no killing."""
    _check_alpha(alpha)
    if not abs(z2) < 1:
        raise ValueError("z2 must lie in (-1, 1)")
    r = np.asarray(r, dtype=float)
    if np.any(np.abs(r) <= 1):
        raise ValueError("|r| must exceed 1")
    out = (math.sin(0.5 * math.pi * alpha) / math.pi
           * ((1.0 - z2 * z2) / (r * r - 1.0)) ** (0.5 * alpha) / np.abs(r - z2))
    return float(out) if out.ndim == 0 else out


def _a_of_theta(alpha: float, theta: float):
    disc = (1.0 - alpha) ** 2 - 8.0 * theta
    if disc >= 0:
        return 0.5 + 0.5 * math.sqrt(disc)
    return complex(0.5, 0.5 * math.sqrt(-disc))


def m_theta(alpha: float, theta: float, x: float) -> float:
    """``E^x[exp(-theta tau); X1(tau) = 1]`` for the Legendre coordinate at ``lam = 0``.

    For ``(1-alpha)^2 < 8 theta`` the parameters ``A`` and ``1 - A`` are complex
    conjugates; the Gamma product is then ``|Gamma(alpha/2 + A)|^2`` and the
    hypergeometric value is real.
    """
    _check_alpha(alpha)
    if not -1.0 <= x <= 1.0:
        raise ValueError("x must lie in [-1, 1]")
    A = _a_of_theta(alpha, theta)
    h = 0.5 * alpha
    for arg in (h + A, 1.0 + h - A):
        if not isinstance(arg, complex) and sf._is_nonpos_int(arg):
            raise sf.PoleError(f"m_theta has a pole at theta = {theta}")
    if x == -1.0:
        return 0.0
    t = 0.5 * (1.0 + x)
    g = sf.gamma(h + A) * sf.gamma(1.0 + h - A)
    if isinstance(g, complex):
        g = g.real
    const = g / (sf.gamma(h) * sf.gamma(1.0 + h))
    return t ** h * const * sf.hyp2f1(A, 1.0 - A, 1.0 + h, t)


def gegenbauer_coeff_a(alpha: float, n: int, r: float) -> float:
    """Coefficient of ``C_n^{((1+alpha)/2)}(x)`` in the expansion of ``1/(r - x)``.

    Uses the real Legendre ``Q`` convention, whose dropped phase cancels the
    ``e^{-i alpha pi/2}`` prefactor of the complex form.
    """
    _check_alpha(alpha)
    if not r > 1:
        raise ValueError("r must exceed 1")
    if n < 0:
        raise ValueError("n must be nonnegative")
    rho = 0.5 * (1.0 + alpha)
    logc = (sf.lgamma(n + 1.0) - sf.lgamma(n + 1.0 + alpha) + sf.lgamma(rho)
            + 0.5 * alpha * math.log(2.0) - 0.5 * math.log(math.pi))
    return ((2.0 * n + alpha + 1.0) * math.exp(logc) * (r * r - 1.0) ** (0.25 * alpha)
            * sf.legendre_q(n + 0.5 * alpha, 0.5 * alpha, r))


def cauchy_gegenbauer_expansion(alpha: float, r: float, x, N: int):
    """Partial sum ``sum_{n<=N} a_n(r) C_n(x)``."""
    rho = 0.5 * (1.0 + alpha)
    total = 0.0
    for n in range(N + 1):
        total = total + gegenbauer_coeff_a(alpha, n, r) * sf.gegenbauer_c(n, rho, x)
    return total


# ---------------------------------------------------------------------------
# Complement of a half-line in the plane (1 < alpha < 2)


def halfline_complement_boundary(alpha: float, m: float, y2: float, r):
    """Exit density at ``r > 0`` from ``(0, y2)``, ``y2 < 0``.

    Identical to the slit kernel with index ``alpha - 1`` and ``lam = m^{1/alpha}``.
    """
    _check_alpha(alpha, 1.0, 2.0)
    if not y2 < 0:
        raise ValueError("y2 must be negative")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    b = alpha - 1.0
    lam = m ** (1.0 / alpha) if m > 0 else 0.0
    out = math.sin(0.5 * math.pi * b) / math.pi * (-y2 / r) ** (0.5 * b) * np.exp(-lam * (r - y2)) / (r - y2)
    return float(out) if out.ndim == 0 else out


def halfline_complement_kernel(alpha: float, m: float, y_tilde, r: float,
                               q: QuadSpec = DEFAULT_SPEC) -> float:
    """Exit density at ``r`` from a general start ``(y1, y2)`` with ``y1 != 0``."""
    _check_alpha(alpha, 1.0, 2.0)
    y1, y2 = map(float, y_tilde)
    if y1 == 0:
        raise ValueError("y1 must be nonzero (use halfline_complement_boundary)")
    lam = m ** (1.0 / alpha) if m > 0 else 0.0
    return halfline2d_laplace_kernel(StabilityParams(alpha - 1.0, lam=lam), (abs(y1), y2), r, q)


def halfline_complement_nd(alpha: float, m: float, n: int, y_tilde, sigma_bar) -> float:
    """Kernel in ``R^n`` of the complement of ``{x1 = 0, x2 >= 0}`` from ``(0, y2, ...)``, ``y2 < 0``.

    The mass enters as ``m^{(n-1)/(2 alpha)}``, matching the ``(n-1)``-dimensional
    half-space kernel with index ``alpha - 1``.
    """
    _check_alpha(alpha, 1.0, 2.0)
    yt = np.asarray(y_tilde, dtype=float)
    s = np.asarray(sigma_bar, dtype=float)
    if yt.shape != (n,) or s.shape != (n - 1,):
        raise ValueError("need n coordinates for the start and n-1 for the exit place")
    if yt[0] != 0 or not yt[1] < 0 or not s[0] > 0:
        raise ValueError("need y1 = 0, y2 < 0 and sigma2 > 0")
    b = alpha - 1.0
    lam = m ** (1.0 / alpha) if m > 0 else 0.0
    d = float(np.sqrt(np.sum((yt[1:] - s) ** 2)))
    k = n - 1
    return (2.0 * math.sin(0.5 * math.pi * b) / (2.0 ** (0.5 * k) * math.pi ** (0.5 * (k + 2)))
            * (-yt[1] / s[0]) ** (0.5 * b) * _kfac(0.5 * k, lam, d))


# ---------------------------------------------------------------------------
# Resolvents


def resolvent_U_lambda(alpha: float, n: int, lam: float, x, y) -> float:
    """``lam^2/2``-resolvent density of the Bessel-Brownian diffusion.

    Density in ``y`` with respect to ``m(dy1) dy_tilde``, ``m(dy1) = 2 y1^{1-alpha} dy1``.
    One of the points must lie on ``{y1 = 0}``, except at ``alpha = 1`` where the
    reflected-Brownian form covers all points.
    """
    _check_alpha(alpha)
    if not lam > 0:
        raise ValueError("lam must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (n + 1,) or y.shape != (n + 1,):
        raise ValueError("points must have n+1 coordinates")
    if x[0] != 0 and y[0] != 0:
        if alpha == 1.0:
            return 0.5 * resolvent_reflected_bm(n, lam, x, y)
        raise ValueError("one point must have Bessel coordinate 0")
    d = float(np.sqrt(np.sum((x - y) ** 2)))
    nu = 0.5 * (n - alpha)
    return ((0.5 * lam) ** nu / (math.pi ** (0.5 * n) * sf.gamma(1.0 - 0.5 * alpha))
            * sf.bessel_k(nu, lam * d) / d ** nu)


def resolvent_reflected_bm(n: int, lam: float, x, y) -> float:
    """Resolvent at ``alpha = 1`` with respect to Lebesgue measure in ``y1``.

    The image term makes it twice the speed-measure density on ``{y1 = 0}``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ys = y.copy()
    ys[0] = -ys[0]
    nu = 0.5 * (n - 1)
    d1 = float(np.sqrt(np.sum((x - y) ** 2)))
    d2 = float(np.sqrt(np.sum((x - ys) ** 2)))
    return (1.0 / math.pi * (lam / (2.0 * math.pi)) ** nu
            * (sf.bessel_k(nu, lam * d1) / d1 ** nu + sf.bessel_k(nu, lam * d2) / d2 ** nu))


def resolvent_relativistic(alpha: float, n: int, m: float, x_tilde, y_tilde) -> float:
    """``m``-resolvent density of the relativistic stable process in ``R^n``."""
    _check_alpha(alpha)
    if not m > 0:
        raise ValueError("m must be positive")
    d = float(np.sqrt(np.sum((np.asarray(x_tilde, float) - np.asarray(y_tilde, float)) ** 2)))
    return _resolvent_rel_d(alpha, n, m, d)


def _resolvent_rel_d(alpha, n, m, d):
    nu = 0.5 * (n - alpha)
    d = np.asarray(d, dtype=float)
    out = (2.0 ** (1.0 - 0.5 * (n + alpha)) / (sf.gamma(0.5 * alpha) * math.pi ** (0.5 * n))
           * m ** (nu / alpha) * sf.bessel_k(nu, m ** (1.0 / alpha) * d) / d ** nu)
    return float(out) if out.ndim == 0 else out


def resolvent_bridge_constant(alpha: float) -> float:
    """``c_alpha`` with ``U^m_m(x, y) = c_alpha U_{m^{1/alpha}}((0,x), (0,y))``."""
    return sf.gamma(1.0 - 0.5 * alpha) * 2.0 ** (1.0 - alpha) / sf.gamma(0.5 * alpha)


def sweeping_residual(alpha: float, m: float, n: int, x_tilde, y_tilde,
                      q: QuadSpec = QuadSpec(tol=1e-8)) -> float:
    """``int_F U^m_m(z, y) P^m(x, dz) - U^m_m(x, y)`` for ``F = {z1 >= 0}``.

    ``n = 1`` is split at ``y``; ``n = 2`` uses polar coordinates centred at
    ``y``, which absorbs the resolvent singularity.
    """
    _check_alpha(alpha)
    if not m > 0:
        raise ValueError("m must be positive")
    x = np.asarray(x_tilde, dtype=float)
    y = np.asarray(y_tilde, dtype=float)
    if x.shape != (n,) or y.shape != (n,):
        raise ValueError("points must have n coordinates")
    if not x[0] < 0 or not y[0] >= 0:
        raise ValueError("need x1 < 0 and y1 >= 0")
    lam = m ** (1.0 / alpha)
    target = resolvent_relativistic(alpha, n, m, x, y)
    if n == 1:
        val = _sweep_1d(alpha, m, x[0], y[0], lam, q)
    elif n == 2:
        val = _sweep_2d(alpha, m, x, y, lam, q)
    else:
        raise ValueError("sweeping_residual supports n = 1 and n = 2")
    return val - target


def _sweep_1d(alpha, m, x1, y1, lam, q):
    a = alpha

    def f(z):
        z = np.asarray(z, dtype=float)
        return (_resolvent_rel_d(a, 1, m, np.abs(z - y1))
                * _halfspace_kernel_vec(a, m, 1, np.array([x1]), z[:, None]))

    total = 0.0
    if y1 > 0:
        # z = y1 * v^k removes the z^{-alpha/2} endpoint factor
        k = 1.0 / (1.0 - 0.5 * a)

        def g(v):
            z = y1 * v ** k
            return f(z) * y1 * k * v ** (k - 1.0)

        v, _ = integrate(g, 0.0, 1.0, q)
        total += v
        tail, _ = integrate_semi_infinite(lambda s: f(y1 + s), 0.0, q, scale=min(1.0, 1.0 / lam))
        total += tail
    else:
        k = 1.0 / (1.0 - 0.5 * a)

        def g(v):
            z = v ** k
            return f(z) * k * v ** (k - 1.0)

        total, _ = integrate_semi_infinite(g, 0.0, q, scale=1.0)
    return total


def _sweep_2d(alpha, m, x, y, lam, q):
    a = alpha
    nu = 0.5 * (2 - a)
    inv = 1.0 / a if nu > 0 else 1.0

    def field(z):
        d = np.sqrt(np.sum((z - y) ** 2, axis=-1))
        return _resolvent_rel_d(a, 2, m, d) * _halfspace_kernel_vec(a, m, 2, x, z)

    def radial(phi, rmax):
        c, s = math.cos(phi), math.sin(phi)

        def g(v):
            rho = v ** inv
            z = np.column_stack([y[0] + rho * c, y[1] + rho * s])
            return field(z) * rho * inv * v ** (inv - 1.0)

        if rmax is None:
            head, _ = integrate(g, 0.0, 1.0, q)
            tail, _ = integrate_semi_infinite(g, 1.0, q, scale=max(1.0, (1.0 / lam) ** (1.0 / inv)))
            return head + tail
        vmax = rmax ** (1.0 / inv)
        val, _ = integrate_finite_singular(g, 0.0, vmax, (0.0, -0.5 * a), q)
        return val

    def outer_open(phis):
        return np.array([radial(ph, None) for ph in phis])

    def outer_closed(phis):
        return np.array([radial(ph, y[0] / abs(math.cos(ph))) for ph in phis])

    if y[0] > 0:
        v1, _ = integrate(outer_open, -0.5 * math.pi, 0.5 * math.pi, q)
        v2, _ = integrate(outer_closed, 0.5 * math.pi, 1.5 * math.pi, q)
        return v1 + v2
    # y on the boundary line: only the right half-plane of directions, with an
    # integrable (cos phi)^{-alpha/2} factor at both ends
    v, _ = integrate_finite_singular(outer_open, -0.5 * math.pi, 0.5 * math.pi,
                                     (-0.5 * a, -0.5 * a), q)
    return v


# ---------------------------------------------------------------------------
# Strip Fourier relation


@dataclass
class StripFTResult:
    """Both sides of the strip Fourier relation over one ``sigma2`` bin.

    ``lhs`` is the transform in ``sigma_bar`` of the Laplace-weighted exit
    density, averaged over the bin; ``rhs`` is the two-dimensional kernel at
    the effective parameter ``sqrt(|zbar|^2 + lam^2)``; ``phase`` is
    ``exp(i ybar.zbar)`` so that ``lhs ~ phase * rhs``.
    """

    lhs: complex
    lhs_se: float
    rhs: float
    rhs_se: float
    phase: complex
    n_samples: int


class InsufficientSamplesError(RuntimeError):
    """The Monte Carlo standard error exceeds 20% of the estimate."""


def strip_ft_check(alpha: float, lam: float, y2: float, sigma2_bin, zbar_freq, mc_samples: int,
                   seed: int = 0, dt: float = 1e-4, ybar=None) -> StripFTResult:
    """Monte Carlo check of the strip Fourier relation for ``n = 2``.

    Left side: 3D strip samples from ``(0, y2, ybar)``.  Right side: the closed
    interval kernel when the effective parameter is 0, otherwise the weighted
    2D strip sampler.
    """
    from .diffusion_sim import SimConfig, sample_strip3d_hit, sample_strip_hit

    if not abs(y2) < 1:
        raise ValueError("y2 must lie in (-1, 1)")
    lo, hi = map(float, sigma2_bin)
    if not (abs(lo) >= 1 and abs(hi) >= 1 and hi > lo and lo * hi > 0):
        raise ValueError("the bin must lie on one side of the interval")
    zb = float(np.atleast_1d(zbar_freq)[0])
    yb = 0.0 if ybar is None else float(np.atleast_1d(ybar)[0])
    width = hi - lo
    cfg = SimConfig(seed=seed, n_paths=mc_samples, dt=dt)
    s3 = sample_strip3d_hit(alpha, (0.0, y2, yb), cfg)
    ok = np.isfinite(s3.place[:, 0])
    inbin = ok & (s3.place[:, 0] > lo) & (s3.place[:, 0] < hi)
    w = np.where(inbin, s3.weights(lam) * np.exp(1j * zb * np.where(ok, s3.place[:, 1], 0.0)), 0.0)
    lhs = complex(np.mean(w)) / width
    lhs_se = float(np.std(w) / math.sqrt(len(w))) / width
    lam_eff = math.hypot(zb, lam)
    if lam_eff == 0:
        rhs, _ = integrate(lambda r: interval_poisson(alpha, y2, r), lo, hi, QuadSpec(tol=1e-10))
        rhs /= width
        rhs_se = 0.0
    else:
        s2 = sample_strip_hit(alpha, (0.0, y2), SimConfig(seed=seed + 1, n_paths=mc_samples, dt=dt))
        ok2 = np.isfinite(s2.place[:, 0])
        w2 = np.where(ok2 & (s2.place[:, 0] > lo) & (s2.place[:, 0] < hi), s2.weights(lam_eff), 0.0)
        rhs = float(np.mean(w2)) / width
        rhs_se = float(np.std(w2) / math.sqrt(len(w2))) / width
    if abs(lhs) == 0 or lhs_se > 0.2 * abs(lhs):
        raise InsufficientSamplesError(f"standard error {lhs_se:.3g} too large for estimate {abs(lhs):.3g}")
    return StripFTResult(lhs, lhs_se, rhs, rhs_se, cmath.exp(1j * yb * zb), len(w))
