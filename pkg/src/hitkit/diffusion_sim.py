"""Monte Carlo for the Bessel-Brownian diffusion and its time-changed pairs.

Half-line (slit) geometry
    The pair ``(X1, X2)`` of independent BESQ(-alpha/2) processes is mapped to
    the plane by ``f(x1, x2) = (4 x1 x2, x2 - x1)``.  The slit is reached when
    ``X1`` hits 0, so the exit place ``X2(tau)`` is drawn exactly from one
    Getoor-Sharpe time and one BESQ transition.  The clock ``A1 = 4 int(X1+X2)``
    needs a path skeleton:

    * ``X1`` given its hitting time is a BESQ(+alpha/2) bridge to 0 and is
      sampled exactly on the grid;
    * ``X2`` started at 0 is sampled backwards as a bridge from the exact
      place to 0 (BESQ is symmetric w.r.t. its speed measure), so places are
      identical to the place-only sampler;
    * ``X2`` started above 0 is run forward with exact transitions and the
      endpoint is the place.

    Only the trapezoid rule for ``A1`` is discretised.

Strip geometry
    ``(X1, X2)`` are the Legendre and hyperbolic Bessel processes on
    ``[-1, 1]`` and ``[1, inf)``; ``h(x1, x2) = ((1-x1^2)(x2^2-1), x1 x2)``.
    No exact sampler exists, so a compiled Euler scheme with projection at
    ``x2 = 1`` and linear crossing interpolation is used.

All samplers are deterministic in ``SimConfig.seed``: vectorised ones draw
from one generator per block of :data:`hitkit.rng.BLOCK` paths, compiled ones
from a counter-based stream per path.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange

from . import rng as _rng
from .rng import BLOCK, block_generator, normal_pair, philox_key

# prefer OpenMP/workqueue so an outdated TBB is never probed (it only warns)
if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ and "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_STAGE1 = 4
_STRIP3 = 5


class HorizonError(RuntimeError):
    """Too many paths failed to exit within the step budget."""


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings shared by all samplers."""

    seed: int = 0
    n_paths: int = 100_000
    dt: float = 1e-4
    substeps: int = 64
    bridge_correction: bool = True
    max_steps: int = 1_000_000
    richardson: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_paths < 1:
            raise ValueError("n_paths must be at least 1")
        if self.substeps < 1:
            raise ValueError("substeps must be at least 1")
        if self.richardson and self.substeps % 2:
            raise ValueError("Richardson extrapolation needs an even number of substeps")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class HitSample:
    """A batch of exit draws.

    ``place`` has one row per path and one column per free coordinate of the
    exit point.  ``time_functional`` is the exit time in the diffusion's own
    clock.  Paths that never exited carry NaN and are counted in
    ``horizon_failures``.
    """

    place: np.ndarray
    time_functional: np.ndarray
    exact_place: bool
    exact_time: bool
    horizon_failures: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.place.shape[0]

    def weights(self, lam: float) -> np.ndarray:
        """``exp(-lam^2/2 * time)``; zero for paths that did not exit."""
        w = np.exp(-0.5 * lam * lam * self.time_functional)
        return np.where(np.isfinite(w), w, 0.0)


@dataclass(frozen=True)
class PairState:
    """The independent pair before mapping to the plane."""

    x1: float
    x2: float
    kind: str = "halfline"

    def __post_init__(self):
        if self.kind == "halfline":
            if self.x1 < 0 or self.x2 < 0:
                raise ValueError("half-line pair needs x1, x2 >= 0")
        elif self.kind == "strip":
            if abs(self.x1) > 1 or self.x2 < 1:
                raise ValueError("strip pair needs |x1| <= 1 and x2 >= 1")
        else:
            raise ValueError(f"unknown pair kind {self.kind!r}")

    @classmethod
    def halfline_from_point(cls, z1: float, z2: float) -> "PairState":
        """Inverse of the f-map on its BESQ scale: ``z1`` is the Bessel coordinate."""
        r = math.hypot(z1, z2)
        return cls(0.5 * (r - z2), 0.5 * (r + z2), "halfline")

    @classmethod
    def strip_from_point(cls, z1: float, z2: float) -> "PairState":
        """Inverse of the h-map; the larger root belongs to ``x2 >= 1``."""
        sp = math.hypot(z1, z2 + 1.0)
        sm = math.hypot(z1, z2 - 1.0)
        x2 = max(0.5 * (sp + sm), 1.0)
        x1 = min(max(0.5 * (sp - sm), -1.0), 1.0)
        pair = cls(x1, x2, "strip")
        y1, y2 = pair.to_point()
        if abs(y1 - z1 * z1) > 1e-9 * (1 + z1 * z1) or abs(y2 - z2) > 1e-9 * (1 + abs(z2)):
            raise ArithmeticError("strip inverse map failed its round trip")
        return pair

    def to_point(self) -> tuple[float, float]:
        """Image under the map, first coordinate on the squared scale."""
        if self.kind == "halfline":
            return 4.0 * self.x1 * self.x2, self.x2 - self.x1
        return (1.0 - self.x1 ** 2) * (self.x2 ** 2 - 1.0), self.x1 * self.x2


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")


def _blocks(n: int):
    for b in range((n + BLOCK - 1) // BLOCK):
        yield b, b * BLOCK, min(BLOCK, n - b * BLOCK)


def _pad(v, count: int, fill: float) -> np.ndarray:
    v = np.broadcast_to(np.asarray(v, dtype=float), (count,))
    out = np.full(BLOCK, fill)
    out[:count] = v
    return out


def _grid_fractions(k: int) -> np.ndarray:
    # quadratic clustering toward the hitting time; even-indexed points form
    # the same grid with k/2 intervals
    u = np.arange(k + 1) / k
    return 1.0 - (1.0 - u) ** 2


def _bridge_step(g, a, h, rem, shape_base):
    """One step of a BESQ bridge to 0: density prop. to q_h(a, b) exp(-b/2 rem)."""
    s = h + rem
    n = g.poisson(np.where(s > 0, a * rem / (2.0 * h * s + 1e-300), 0.0))
    scale = np.where(s > 0, 2.0 * h * rem / (s + 1e-300), 0.0)
    return scale * g.standard_gamma(shape_base + n)


def _halfline_block(alpha: float, x1, x2, count: int, seed: int, block: int,
                    with_time: bool, k: int):
    """Place, hitting time and A1 levels for one block of paths."""
    nu = -0.5 * alpha
    x1 = _pad(x1, count, 1.0)
    x2 = _pad(x2, count, 0.0)
    gp = block_generator(seed, _rng.PLACE, block)
    gam = gp.standard_gamma(0.5 * alpha, size=BLOCK)
    tau = x1 / (2.0 * gam)
    npois = gp.poisson(np.where(tau > 0, x2 / (2.0 * tau + 1e-300), 0.0))
    place = np.where(tau > 0, 2.0 * tau * gp.standard_gamma(nu + 1.0 + npois), x2)
    if not with_time:
        return place[:count], tau[:count], None

    gs = block_generator(seed, _rng.SKELETON, block)
    frac = _grid_fractions(k)
    times = tau[None, :] * frac[:, None]
    steps = np.diff(times, axis=0)
    x1_path = np.empty((k + 1, BLOCK))
    x1_path[0] = x1
    for j in range(1, k + 1):
        rem = tau - times[j]
        if j == k:
            x1_path[j] = 0.0
        else:
            x1_path[j] = _bridge_step(gs, x1_path[j - 1], steps[j - 1], rem, 1.0 - nu)

    start_zero = x2 == 0.0
    x2_path = np.empty((k + 1, BLOCK))
    if np.all(start_zero[:count]):
        # walk back from the exact place to 0
        x2_path[k] = place
        for j in range(k, 0, -1):
            if j == 1:
                x2_path[0] = 0.0
            else:
                x2_path[j - 1] = _bridge_step(gs, x2_path[j], steps[j - 1], times[j - 1], nu + 1.0)
    else:
        x2_path[0] = x2
        for j in range(1, k + 1):
            h = steps[j - 1]
            npois = gs.poisson(np.where(h > 0, x2_path[j - 1] / (2.0 * h + 1e-300), 0.0))
            x2_path[j] = 2.0 * h * gs.standard_gamma(nu + 1.0 + npois)
        place = x2_path[k]

    s = x1_path + x2_path
    levels = []
    stride = 1
    while stride <= k and k % stride == 0 and len(levels) < 4:
        sub = s[::stride]
        hs = np.diff(times[::stride], axis=0)
        levels.append(4.0 * np.sum(0.5 * hs * (sub[1:] + sub[:-1]), axis=0)[:count])
        stride *= 2
    return place[:count], tau[:count], levels


def _check_slit_start(z1: float, z2: float) -> None:
    if z1 < 0:
        raise ValueError("the Bessel coordinate must be nonnegative")
    if z1 == 0 and z2 >= 0:
        raise ValueError("start lies on the slit")


def sample_halfline_hit_place(alpha: float, start, cfg: SimConfig) -> HitSample:
    """Exact exit places from the plane minus the slit ``{0} x [0, inf)``.

    ``start = (z1, z2)`` with ``z1 >= 0`` the Bessel coordinate.  The time
    column holds the hitting time ``tau`` of the pair, not the diffusion's
    clock.
    """
    _check_alpha(alpha)
    z1, z2 = map(float, start)
    _check_slit_start(z1, z2)
    pair = PairState.halfline_from_point(z1, z2)
    places, taus = [], []
    for b, _, count in _blocks(cfg.n_paths):
        p, t, _ = _halfline_block(alpha, pair.x1, pair.x2, count, cfg.seed, b, False, cfg.substeps)
        places.append(p)
        taus.append(t)
    return HitSample(np.concatenate(places)[:, None], np.concatenate(taus), True, True,
                     meta={"sampler": "halfline_place", "clock": "pair"})


def sample_halfline_hit_with_time(alpha: float, start, cfg: SimConfig) -> HitSample:
    """Exit place together with ``A1(tau)``, the exit time of the diffusion.

    ``meta['coarse']`` holds ``A1`` from the nested grid with half the
    substeps; with ``cfg.richardson`` the returned time is ``2 A_K - A_{K/2}``.
    """
    _check_alpha(alpha)
    z1, z2 = map(float, start)
    _check_slit_start(z1, z2)
    pair = PairState.halfline_from_point(z1, z2)
    return _halfline_with_time(alpha, pair.x1, pair.x2, cfg, None)


def _halfline_with_time(alpha, x1, x2, cfg, count_total):
    n = cfg.n_paths if count_total is None else count_total
    places, times, coarse, levels_all = [], [], [], []
    for b, lo, count in _blocks(n):
        a1 = x1 if np.ndim(x1) == 0 else x1[lo:lo + count]
        a2 = x2 if np.ndim(x2) == 0 else x2[lo:lo + count]
        p, _, levels = _halfline_block(alpha, a1, a2, count, cfg.seed, b, True, cfg.substeps)
        places.append(p)
        levels_all.append(levels)
    levels = [np.concatenate([lv[i] for lv in levels_all]) for i in range(len(levels_all[0]))]
    fine = levels[0]
    coarse = levels[1] if len(levels) > 1 else None
    time = fine
    if cfg.richardson:
        time = np.maximum(2.0 * fine - coarse, 0.0)
    return HitSample(np.concatenate(places)[:, None], time, True, False,
                     meta={"sampler": "halfline_time", "substeps": cfg.substeps,
                           "coarse": coarse, "levels": levels})


@njit(cache=True, parallel=True, error_model="numpy")
def _strip_kernel(n, offset, x1_0, x2_0, alpha, dt, max_steps, bridge, k0, k1,
                  place, atime, overshoot):
    c = 0.5 * (2.0 - alpha)
    sq = math.sqrt(dt)
    for i in prange(n):
        path = offset + i
        x1 = x1_0
        x2 = x2_0
        acc = 0.0
        f_prev = x2 * x2 - x1 * x1
        place[i] = np.nan
        atime[i] = np.nan
        overshoot[i] = np.nan
        for k in range(max_steps):
            g1, g2 = normal_pair(path, k, k0, k1)
            n1 = x1 + math.sqrt(max(1.0 - x1 * x1, 0.0)) * sq * g1 - c * x1 * dt
            n2 = x2 + math.sqrt(max(x2 * x2 - 1.0, 0.0)) * sq * g2 + c * x2 * dt
            if n2 < 1.0:
                n2 = 1.0
            if abs(n1) >= 1.0:
                side = 1.0 if n1 > 0 else -1.0
                if bridge:
                    theta = (side - x1) / (n1 - x1)
                else:
                    theta = 1.0
                x2e = x2 + theta * (n2 - x2)
                acc += 0.5 * theta * dt * (f_prev + x2e * x2e - 1.0)
                place[i] = side * x2e
                atime[i] = acc
                overshoot[i] = abs(n1) - 1.0
                break
            f_new = n2 * n2 - n1 * n1
            acc += 0.5 * dt * (f_prev + f_new)
            f_prev = f_new
            x1 = n1
            x2 = n2


def _run_strip(alpha, z1, z2, cfg):
    pair = PairState.strip_from_point(z1, z2)
    k0, k1 = philox_key(cfg.seed, _rng.EULER)
    n = cfg.n_paths
    place = np.empty(n)
    atime = np.empty(n)
    over = np.empty(n)
    _strip_kernel(n, 0, pair.x1, pair.x2, float(alpha), float(cfg.dt), int(cfg.max_steps),
                  bool(cfg.bridge_correction), k0, k1, place, atime, over)
    fails = int(np.count_nonzero(np.isnan(place)))
    return place, atime, over, fails


def _check_strip_start(z1, z2):
    if z1 < 0:
        raise ValueError("the Bessel coordinate must be nonnegative")
    if z1 == 0 and abs(z2) >= 1:
        raise ValueError("start lies on the removed half-lines")


def sample_strip_hit(alpha: float, start, cfg: SimConfig) -> HitSample:
    """Exit of the plane minus ``{0} x ((-inf,-1] u [1,inf))`` by Euler simulation."""
    _check_alpha(alpha)
    z1, z2 = map(float, start)
    _check_strip_start(z1, z2)
    place, atime, over, fails = _run_strip(alpha, z1, z2, cfg)
    return HitSample(place[:, None], atime, False, False, fails,
                     meta={"sampler": "strip", "dt": cfg.dt, "overshoot": over})


def sample_strip3d_hit(alpha: float, start, cfg: SimConfig) -> HitSample:
    """Strip exit with one extra Brownian coordinate: places ``(sigma2, sigma3)``."""
    _check_alpha(alpha)
    z1, z2, z3 = map(float, start)
    _check_strip_start(z1, z2)
    place, atime, over, fails = _run_strip(alpha, z1, z2, cfg)
    extra = np.empty(cfg.n_paths)
    for b, lo, count in _blocks(cfg.n_paths):
        g = block_generator(cfg.seed, _STRIP3, b)
        extra[lo:lo + count] = g.standard_normal(BLOCK)[:count]
    sigma3 = z3 + np.sqrt(np.where(np.isfinite(atime), atime, 0.0)) * extra
    sigma3 = np.where(np.isfinite(atime), sigma3, np.nan)
    return HitSample(np.column_stack([place, sigma3]), atime, False, False, fails,
                     meta={"sampler": "strip3d", "dt": cfg.dt, "overshoot": over})


def sample_halfspace_hit_nd(alpha: float, n: int, start, cfg: SimConfig) -> HitSample:
    """Exit of ``R^{n+1}`` minus ``{y1 = 0, y2 >= 0}``.

    ``start = (y1, y2, ..., y_{n+1})`` with ``y1 >= 0`` the Bessel coordinate.
    The first stage runs the Brownian part until the Bessel coordinate hits
    0 (exact).  Paths landing with ``y2 < 0`` continue with the slit sampler
    from ``(0, y2)``; its clock ``A1`` moves the remaining coordinates.
    """
    _check_alpha(alpha)
    if n < 1:
        raise ValueError("n must be at least 1")
    y = np.asarray(start, dtype=float)
    if y.shape != (n + 1,):
        raise ValueError(f"start must have {n + 1} coordinates")
    if y[0] < 0:
        raise ValueError("the Bessel coordinate must be nonnegative")
    if y[0] == 0 and y[1] >= 0:
        raise ValueError("start lies on the removed set")
    total = cfg.n_paths
    places = np.empty((total, n))
    times = np.empty(total)
    stage2_idx, stage2_u, stage2_rest, stage2_t = [], [], [], []
    for b, lo, count in _blocks(total):
        g = block_generator(cfg.seed, _STAGE1, b)
        gam = g.standard_gamma(0.5 * alpha, size=BLOCK)[:count]
        z = g.standard_normal((BLOCK, n))[:count]
        t = y[0] ** 2 / (2.0 * gam)
        pos = y[1:] + np.sqrt(t)[:, None] * z
        places[lo:lo + count] = pos
        times[lo:lo + count] = t
        neg = np.nonzero(pos[:, 0] < 0)[0]
        stage2_idx.append(lo + neg)
        stage2_u.append(pos[neg, 0])
        stage2_rest.append(pos[neg, 1:])
        stage2_t.append(t[neg])
    idx = np.concatenate(stage2_idx)
    m = idx.size
    if m:
        u = np.concatenate(stage2_u)
        rest = np.concatenate(stage2_rest)
        sub = SimConfig(seed=cfg.seed, n_paths=m, dt=cfg.dt, substeps=cfg.substeps,
                        richardson=cfg.richardson)
        hs = _halfline_with_time(alpha, -u, np.zeros(m), sub, m)
        tau2 = hs.time_functional
        places[idx, 0] = hs.place[:, 0]
        if n > 1:
            extra = np.empty((m, n - 1))
            for b, lo, count in _blocks(m):
                g = block_generator(cfg.seed, _rng.GAUSS, b)
                extra[lo:lo + count] = g.standard_normal((BLOCK, n - 1))[:count]
            places[idx, 1:] = rest + np.sqrt(tau2)[:, None] * extra
        times[idx] = times[idx] + tau2
    return HitSample(places, times, exact_place=(n == 1 or m == 0), exact_time=(m == 0),
                     meta={"sampler": "halfspace", "n": n, "second_stage": m,
                           "substeps": cfg.substeps})


def sample_halfline_complement_hit(alpha: float, n: int, start, cfg: SimConfig) -> HitSample:
    """Exit of ``R^{n+1}`` minus ``{y1 = y2 = 0, y3 >= 0}`` for ``1 < alpha < 2``.

    ``sqrt(Y1^2 + B2^2)`` is a Bessel process of index ``(1 - alpha)/2``, so the
    problem is the half-space one with ``alpha - 1`` and one dimension fewer.
    """
    if not 1.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (1, 2)")
    if n < 2:
        raise ValueError("n must be at least 2")
    y = np.asarray(start, dtype=float)
    if y.shape != (n + 1,):
        raise ValueError(f"start must have {n + 1} coordinates")
    reduced = np.concatenate([[math.hypot(y[0], y[1])], y[2:]])
    out = sample_halfspace_hit_nd(alpha - 1.0, n - 1, reduced, cfg)
    out.meta["sampler"] = "halfline_complement"
    return out
