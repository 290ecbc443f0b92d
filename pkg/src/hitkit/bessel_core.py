"""Squared Bessel laws.

Transition densities and exact transition sampling for BESQ of index ``nu``,
the first-hitting-time law of zero for the Bessel process of index
``-alpha/2``, and the Laplace-transform identities that weight paths by
``exp(-lambda^2/2 * integral of X)``.

All densities are with respect to Lebesgue measure in the forward variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun as sf
from .quadrature import QuadSpec, integrate_semi_infinite


@dataclass(frozen=True)
class BesselLaw:
    """BESQ law of index ``nu`` (dimension ``delta = 2 nu + 2``)."""

    nu: float

    def __post_init__(self):
        if not self.nu > -1.0:
            raise ValueError("index must exceed -1")

    @property
    def delta(self) -> float:
        return 2.0 * self.nu + 2.0

    @property
    def is_reflecting_regime(self) -> bool:
        """True for ``-1 < nu < 0``, where 0 is reached and instantaneously reflecting."""
        return -1.0 < self.nu < 0.0

    @classmethod
    def from_alpha(cls, alpha: float) -> "BesselLaw":
        """The index ``-alpha/2`` used throughout, for which 0 is reflecting."""
        return cls(-0.5 * alpha)


@dataclass(frozen=True)
class HitLawParams:
    """Stability index and starting position of the Bessel process."""

    alpha: float
    start: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError("alpha must lie in (0, 2)")
        if self.start < 0:
            raise ValueError("start must be nonnegative")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")


def _log_sinh(u):
    u = np.asarray(u, dtype=float)
    return u + np.log1p(-np.exp(-2.0 * u)) - math.log(2.0)


def _coth(u):
    u = np.asarray(u, dtype=float)
    return 1.0 / np.tanh(u)


def besq_transition_density(law: BesselLaw, t: float, x: float, y):
    """Density of ``X_t`` at ``y`` for BESQ(nu) started at ``x``.

    ``q_t(x, y) = (1/2t) (y/x)^{nu/2} exp(-(x+y)/2t) I_nu(sqrt(xy)/t)`` and, for
    ``x = 0``, the Gamma(nu+1, scale 2t) density.
    """
    nu = law.nu
    if not t > 0:
        raise ValueError("t must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("y must be positive")
    if x == 0:
        logd = nu * np.log(y) - y / (2.0 * t) - (nu + 1.0) * math.log(2.0 * t) - sf.lgamma(nu + 1.0)
        out = np.exp(logd)
    else:
        w = np.sqrt(x * y) / t
        # exp(-(x+y)/2t) I_nu(w) = exp(-(sqrt x - sqrt y)^2 / 2t) * e^{-w} I_nu(w), and
        # (y/x)^{nu/2} (w/2)^nu = (y/2t)^nu keeps tiny x from overflowing the power
        gap = (math.sqrt(x) - np.sqrt(y)) ** 2 / (2.0 * t)
        out = 0.5 / t * np.power(y / (2.0 * t), nu) * np.exp(-gap) * sf.bessel_ie_reduced(nu, w)
    return float(out) if out.ndim == 0 else out


def besq_sample_transition(law: BesselLaw, t: float, x, rng: np.random.Generator):
    """Exact draw of ``X_t`` given ``X_0 = x`` (vectorised in ``x``).

    Poisson(x/2t) mixture of Gamma(nu + 1 + N) variables with scale 2t.
    """
    x = np.asarray(x, dtype=float)
    n = rng.poisson(x / (2.0 * t))
    return 2.0 * t * rng.standard_gamma(law.nu + 1.0 + n)


def bes_hit_zero_density(p: HitLawParams, t):
    """Getoor-Sharpe density of the hitting time of 0 for BES(-alpha/2) from ``p.start``."""
    a = p.alpha
    y1 = p.start
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    logd = (a * math.log(y1) - 0.5 * a * math.log(2.0) - sf.lgamma(0.5 * a)
            - (1.0 + 0.5 * a) * np.log(t) - y1 * y1 / (2.0 * t))
    out = np.exp(logd)
    return float(out) if out.ndim == 0 else out


def bes_hit_zero_sample(p: HitLawParams, rng: np.random.Generator, size=None):
    """Exact hitting times: ``y1^2 / (2 G)`` with ``G ~ Gamma(alpha/2)``."""
    g = rng.standard_gamma(0.5 * p.alpha, size=size)
    # a start at 0 is already on the boundary: T = 0
    return p.start ** 2 / (2.0 * g)


def besq_bridge_laplace_density(law: BesselLaw, lam: float, t: float, x: float, r):
    """``E^x[exp(-lam^2/2 int_0^t X_s ds); X_t in dr] / dr`` for BESQ(nu).

    For ``x = 0`` the normalising constant is ``1/Gamma(nu+1)``, which is what
    makes the ``lam -> 0`` limit the Gamma transition density and the total
    mass ``cosh(t lam)^{-(nu+1)}``.
    """
    nu = law.nu
    r = np.asarray(r, dtype=float)
    if lam == 0:
        return besq_transition_density(law, t, x, r)
    u = t * lam
    cth = _coth(u)
    lsh = _log_sinh(u)
    if x == 0:
        logd = (nu * np.log(r) + (nu + 1.0) * math.log(lam) - (nu + 1.0) * (math.log(2.0) + lsh)
                - sf.lgamma(nu + 1.0) - 0.5 * lam * r * cth)
        out = np.exp(logd)
    else:
        w = np.sqrt(x * r) * lam * np.exp(-lsh)
        expo = -0.5 * lam * (x + r) * cth + w
        # (r/x)^{nu/2} (w/2)^nu = (r lam / 2 sinh)^nu
        logpow = nu * (np.log(0.5 * r * lam) - lsh)
        out = lam * np.exp(logpow - math.log(2.0) - lsh + expo) * sf.bessel_ie_reduced(nu, w)
    return float(out) if out.ndim == 0 else out


def besq_hit_laplace(law: BesselLaw, gamma: float, lam: float, x: float, b: float = 0.0) -> float:
    """``E^x[exp(-gamma tau - lam^2/2 int_0^tau X_s ds)]`` with ``tau`` the hitting time of ``b``.

    For ``b = 0`` the constant is ``Gamma((|nu| + 1 + gamma/lam)/2) / (lam^{(nu+1)/2}
    Gamma(|nu|))``, fixed by the small-argument behaviour of ``W``.
    """
    nu = law.nu
    if not -1.0 < nu < 0.0:
        raise ValueError("index must lie in (-1, 0)")
    if not lam > 0:
        raise ValueError("lam must be positive")
    if not x > 0:
        raise ValueError("x must be positive")
    kappa = -gamma / (2.0 * lam)
    mu = 0.5 * abs(nu)
    if b > 0:
        if x < b:
            raise ValueError("start must lie above the target level")
        return ((x / b) ** (-0.5 * (nu + 1.0))
                * sf.whittaker_w(kappa, mu, lam * x) / sf.whittaker_w(kappa, mu, lam * b))
    const = sf.gamma(0.5 * (abs(nu) + 1.0 + gamma / lam)) / (lam ** (0.5 * (nu + 1.0)) * sf.gamma(abs(nu)))
    return const * x ** (-0.5 * (nu + 1.0)) * sf.whittaker_w(kappa, mu, lam * x)


def besq_hit_laplace_printed(law: BesselLaw, gamma: float, lam: float, x: float) -> float:
    """Same expression with the constant ``Gamma((nu + 1 + lam/2)/2)`` in place of the
    corrected one; kept only so the two can be compared numerically."""
    nu = law.nu
    kappa = -gamma / (2.0 * lam)
    const = sf.gamma(0.5 * (nu + 1.0 + 0.5 * lam)) / (lam ** (0.5 * (nu + 1.0)) * sf.gamma(abs(nu)))
    return const * x ** (-0.5 * (nu + 1.0)) * sf.whittaker_w(kappa, 0.5 * abs(nu), lam * x)


def besq_hit_time_density(alpha: float, lam: float, x: float, t):
    """Density in ``t`` of the hitting time of 0 for BESQ(-alpha/2) from ``x``,
    weighted by ``exp(-lam^2/2 int X)``; ``lam = 0`` gives the plain law."""
    _check_alpha(alpha)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    h = 0.5 * alpha
    if lam == 0:
        logd = h * math.log(x) - h * math.log(2.0) - sf.lgamma(h) - (1.0 + h) * np.log(t) - x / (2.0 * t)
    else:
        u = t * lam
        logd = (h * math.log(x) + (1.0 + h) * math.log(lam) - h * math.log(2.0) - sf.lgamma(h)
                - (1.0 + h) * _log_sinh(u) - 0.5 * x * lam * _coth(u))
    out = np.exp(logd)
    return float(out) if out.ndim == 0 else out


def hit_laplace_by_quadrature(alpha: float, gamma: float, lam: float, x: float,
                              spec: QuadSpec = QuadSpec(tol=1e-11)) -> float:
    """``int_0^inf exp(-gamma t) w(t, x) dt`` computed numerically."""

    def f(t):
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-gamma * t[pos]) * besq_hit_time_density(alpha, lam, x, t[pos])
        return out

    scale = max(0.05 * x, 1e-3)
    v, _ = integrate_semi_infinite(f, 0.0, spec, scale=scale)
    return v


class SingularPointError(ValueError):
    """Evaluation at ``|x| = 1``, where the scale and speed densities blow up or vanish."""


def _off_singular(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) == 1.0):
        raise SingularPointError("|x| = 1 is a singular point")
    return x


def scale_density(alpha: float, x):
    """Scale density ``|1 - x^2|^{alpha/2 - 1}`` of the Legendre/hyperbolic diffusions."""
    _check_alpha(alpha)
    x = _off_singular(x)
    out = np.abs(1.0 - x * x) ** (0.5 * alpha - 1.0)
    return float(out) if out.ndim == 0 else out


def speed_density(alpha: float, x):
    """Speed density ``2 |1 - x^2|^{-alpha/2}``."""
    _check_alpha(alpha)
    x = _off_singular(x)
    out = 2.0 * np.abs(1.0 - x * x) ** (-0.5 * alpha)
    return float(out) if out.ndim == 0 else out
