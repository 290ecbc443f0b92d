"""Deterministic adaptive quadrature.

Three entry points cover everything the kernels need:

* :func:`integrate` -- globally adaptive 15-point Gauss-Kronrod on a finite
  interval, bisecting the panel with the largest error estimate.
* :func:`integrate_semi_infinite` -- consecutive panels of doubling width
  on ``[a, inf)``, each integrated adaptively, until a tail panel drops below
  ``tail_cutoff_ratio`` of the running total.
* :func:`integrate_finite_singular` -- Gauss-Jacobi rules of increasing
  order for integrands with algebraic endpoint behaviour.

Integrands are called with a 1-D float array and must return an array of the
same shape.  Nothing here depends on thread state, so results are bitwise
reproducible.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi

Integrand = Callable[[np.ndarray], np.ndarray]

# Kronrod 15 / Gauss 7 nodes and weights on [-1, 1].
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WK_FULL = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss nodes sit at odd positions of the Kronrod set.
_WG_FULL = np.zeros(15)
_WG_FULL[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadSpec:
    """Tolerance and budget policy for the integrators."""

    tol: float = 1e-8
    max_subdivisions: int = 2000
    tail_cutoff_ratio: float = 1e-16

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_subdivisions < 8:
            raise ValueError("max_subdivisions must be at least 8")


DEFAULT_SPEC = QuadSpec()


class QuadratureError(ArithmeticError):
    """Raised when the error target is not met; carries the partial result."""

    def __init__(self, message, value, err_est):
        super().__init__(f"{message} (value={value!r}, err_est={err_est!r})")
        self.value = value
        self.err_est = err_est


def _gk15(f: Integrand, a: float, b: float):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * _NODES), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError("non-finite integrand value", math.nan, math.inf)
    k = half * float(np.dot(_WK_FULL, fx))
    g = half * float(np.dot(_WG_FULL, fx))
    return k, abs(k - g)


def _adaptive(f: Integrand, a: float, b: float, rtol: float, atol: float,
              max_sub: int):
    v, e = _gk15(f, a, b)
    # max-heap on error; the counter keeps ordering deterministic on ties
    heap = [(-e, 0, a, b, v, e)]
    total_v, total_e = v, e
    count = 1
    while total_e > max(rtol * abs(total_v), atol):
        if count >= max_sub:
            raise QuadratureError("subdivision budget exhausted", total_v, total_e)
        _, _, lo, hi, pv, pe = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise QuadratureError("interval underflow", total_v, total_e)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total_v += v1 + v2 - pv
        total_e += e1 + e2 - pe
        heapq.heappush(heap, (-e1, count, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, count + 1, mid, hi, v2, e2))
        count += 2
    # re-sum to avoid drift from incremental updates
    total_v = math.fsum(item[4] for item in heap)
    total_e = math.fsum(item[5] for item in heap)
    return total_v, total_e


def integrate(f: Integrand, a: float, b: float, spec: QuadSpec = DEFAULT_SPEC,
              atol: float = 0.0):
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    Returns ``(value, err_est)`` with ``err_est <= max(spec.tol*|value|, atol)``.
    """
    if a == b:
        return 0.0, 0.0
    if b < a:
        v, e = integrate(f, b, a, spec, atol)
        return -v, e
    return _adaptive(f, float(a), float(b), spec.tol, atol, spec.max_subdivisions)


def integrate_semi_infinite(f: Integrand, a: float, spec: QuadSpec = DEFAULT_SPEC,
                            scale: float = 1.0, max_panels: int = 200):
    """Integral of ``f`` over ``[a, inf)`` for eventually exponentially decaying ``f``.

    Panels ``[a + scale*(2**k - 1), a + scale*(2**(k+1) - 1)]`` are integrated in
    turn. Summation stops once a panel contributes less than
    ``spec.tail_cutoff_ratio`` of the running total and is no larger than its
    predecessor (so a slowly rising prefix is never mistaken for a tail).

    ``scale`` should be of the order of the decay length of ``f``.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    total_v = 0.0
    total_e = 0.0
    values = []
    prev = math.inf
    lo = float(a)
    width = float(scale)
    for _ in range(max_panels):
        hi = lo + width
        # panel errors add up, so each panel works to a quarter of the target
        atol = 0.1 * spec.tol * abs(total_v)
        v, e = _adaptive(f, lo, hi, 0.25 * spec.tol, atol, spec.max_subdivisions)
        values.append(v)
        total_v = math.fsum(values)
        total_e += e
        if total_v != 0.0 and abs(v) <= spec.tail_cutoff_ratio * abs(total_v) \
                and abs(v) <= prev:
            break
        if total_v == 0.0 and v == 0.0 and lo - a > 1e3 * scale:
            # integrand vanished identically over a long stretch
            break
        prev = abs(v)
        lo = hi
        width *= 2.0
    else:
        raise QuadratureError("tail did not decay", total_v, total_e)
    if total_e > spec.tol * abs(total_v):
        raise QuadratureError("tolerance not met", total_v, total_e)
    return total_v, total_e


def integrate_semi_infinite_cosh(f: Integrand, a: float, spec: QuadSpec = DEFAULT_SPEC):
    """Integral of ``f`` over ``[a, inf)``, ``a > 0``, after ``s = a cosh v``.

    The substitution turns ``(s - a)**p`` endpoint behaviour into
    ``v**(2p + 1)`` and is an alternative route to :func:`integrate_semi_infinite`.
    """
    if not a > 0:
        raise ValueError("cosh substitution needs a > 0")

    def g(v):
        return f(a * np.cosh(v)) * a * np.sinh(v)

    return integrate_semi_infinite(g, 0.0, spec, scale=1.0)


def integrate_real_line(f: Integrand, center: float = 0.0,
                        spec: QuadSpec = DEFAULT_SPEC, scale: float = 1.0):
    """Integral over the whole real line, split at ``center``."""
    v1, e1 = integrate_semi_infinite(lambda s: f(center - s), 0.0, spec, scale)
    v2, e2 = integrate_semi_infinite(lambda s: f(center + s), 0.0, spec, scale)
    return v1 + v2, e1 + e2


_JACOBI_CACHE: dict = {}


def _jacobi_rule(n: int, p: float, q: float):
    key = (n, p, q)
    rule = _JACOBI_CACHE.get(key)
    if rule is None:
        # roots_jacobi uses the weight (1-x)^alpha (1+x)^beta on [-1, 1]
        # scipy evaluates a 0/0 branch it then discards when p + q = -1
        with np.errstate(invalid="ignore", divide="ignore"):
            x, w = roots_jacobi(n, q, p)
        rule = (x, w)
        if len(_JACOBI_CACHE) < 256:
            _JACOBI_CACHE[key] = rule
    return rule


def integrate_finite_singular(f: Integrand, a: float, b: float,
                              endpoint_exponents: tuple[float, float],
                              spec: QuadSpec = DEFAULT_SPEC, max_order: int = 1280):
    """Integral of ``f`` over ``[a, b]`` where ``f ~ (x-a)**p`` and ``f ~ (b-x)**q``.

    The smooth factor ``f(x) / ((x-a)**p (b-x)**q)`` is integrated against the
    Jacobi weight with rules of order 10, 20, 40, ...; the error estimate is
    the difference between the last two orders.
    """
    p, q = map(float, endpoint_exponents)
    if not (p > -1 and q > -1):
        raise ValueError("endpoint exponents must exceed -1")
    if not b > a:
        raise ValueError("need a < b")
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)

    def weighted(t):
        # f / ((x-a)^p (b-x)^q) up to the constant half**(p+q), absorbed below
        return f(mid + half * t) / (np.power(1.0 + t, p) * np.power(1.0 - t, q))

    prev = None
    err = math.inf
    n = 10
    while n <= max_order:
        t, w = _jacobi_rule(n, p, q)
        val = half * float(np.dot(w, weighted(t)))
        if not math.isfinite(val):
            raise QuadratureError("non-finite integrand value", val, math.inf)
        if prev is not None:
            err = abs(val - prev)
            if err <= spec.tol * abs(val) or err == 0.0:
                return val, err
        prev = val
        n *= 2
    raise QuadratureError("Gauss-Jacobi order limit reached", prev, err)


def integrate_power_tail(f: Integrand, a: float, p: float, beta: float,
                         spec: QuadSpec = DEFAULT_SPEC, scale: float = 1.0):
    """Integral over ``[a, inf)`` of ``f ~ (s-a)**p`` near ``a`` and ``~ s**-beta`` far out.

    Maps ``s = a + scale*u/(1-u)`` onto ``(0, 1)`` where the tail becomes the
    endpoint factor ``(1-u)**(beta-2)``; needs ``beta > 1``.
    """
    if not beta > 1:
        raise ValueError("algebraic tail must decay faster than 1/s")

    def g(u):
        s = a + scale * u / (1.0 - u)
        return f(s) * scale / (1.0 - u) ** 2

    return integrate_finite_singular(g, 0.0, 1.0, (p, beta - 2.0), spec)
