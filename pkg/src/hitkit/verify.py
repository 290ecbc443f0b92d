"""Acceptance checks A1-A11.

Each ``check_*`` function runs one criterion at its pinned size and returns
a :class:`CriterionResult`.  The CLI ``verify`` command and the acceptance
tests both call these, so the numbers in a report and in a test run agree.
Seeds are fixed per criterion and were chosen before any run.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import bessel_core as bc
from . import kernels as kn
from . import specfun as sf
from .diffusion_sim import (SimConfig, sample_halfline_complement_hit, sample_halfline_hit_place,
                            sample_halfline_hit_with_time, sample_strip3d_hit, sample_strip_hit)
from .quadrature import (QuadSpec, integrate, integrate_finite_singular, integrate_power_tail,
                         integrate_real_line)


@dataclass
class CriterionResult:
    criterion: str
    description: str
    passed: bool
    stats: dict = field(default_factory=dict)
    runtime_s: float = 0.0
    budget_s: float = math.inf

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        key = ", ".join(f"{k}={_fmt(v)}" for k, v in self.stats.items() if np.isscalar(v))
        return f"{self.criterion} {verdict} [{self.runtime_s:.1f}s/{self.budget_s:g}s] {key}"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stats"] = _jsonable(self.stats)
        return d


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _timed(name: str, description: str, budget: float, body: Callable[[], tuple[bool, dict]]):
    t0 = time.perf_counter()
    ok, stats = body()
    dt = time.perf_counter() - t0
    stats["within_budget"] = dt < budget
    return CriterionResult(name, description, bool(ok and dt < budget), stats, dt, budget)


def _bin_probs(density, edges, q=QuadSpec(tol=1e-12)):
    return np.array([integrate(density, lo, hi, q)[0] for lo, hi in zip(edges[:-1], edges[1:])])


# ---------------------------------------------------------------------------


def check_A1(n_paths: int = 10 ** 6, seed: int = 0, alphas=(0.5, 1.0, 1.5)) -> CriterionResult:
    """Exact slit exit places from (0, -1) against the boundary kernel, 60 log bins."""

    def body():
        edges = np.geomspace(0.05, 10.0, 61)
        per = {}
        ok = True
        for a in alphas:
            s = sample_halfline_hit_place(a, (0.0, -1.0), SimConfig(seed=seed, n_paths=n_paths))
            cnt, _ = np.histogram(s.place[:, 0], edges)
            p = kn.StabilityParams(a, lam=0.0)
            expected = n_paths * _bin_probs(lambda r: kn.halfline2d_boundary_kernel(p, -1.0, r), edges)
            use = cnt > 500
            rel = np.abs(cnt / expected - 1.0)[use]
            z = ((cnt - expected) / np.sqrt(expected))[use]
            sup = float(rel.max())
            per[f"alpha={a}"] = {"sup_rel": sup, "max_abs_z": float(np.abs(z).max()),
                                 "chi2_per_bin": float(np.mean(z * z)), "bins_used": int(use.sum())}
            ok &= sup < 0.03
        stats = {f"sup_rel[{k}]": v["sup_rel"] for k, v in per.items()}
        stats["detail"] = per
        return ok, stats

    return _timed("A1", "slit boundary kernel vs exact MC, sup-bin rel err < 3%", 120.0, body)


def check_A1_diagnostic(n_paths: int = 10 ** 7, seed: int = 0) -> CriterionResult:
    """Same comparison at ten times the sample size; not an acceptance criterion."""
    r = check_A1(n_paths=n_paths, seed=seed)
    r.criterion = "A1-diagnostic"
    r.description = "A1 histogram at 1e7 paths (sampler exactness diagnostic)"
    r.budget_s = math.inf
    return r


def check_A2(n_paths: int = 200_000, substeps: int = 64, seed: int = 0) -> CriterionResult:
    """Laplace-weighted slit exit mass on (0.5, 1.5) from (1, 0), alpha = lam = 1."""

    def body():
        p = kn.StabilityParams(1.0, lam=1.0)
        exact, _ = integrate(lambda r: np.array([kn.halfline2d_laplace_kernel(p, (1.0, 0.0), ri) for ri in r]),
                             0.5, 1.5, QuadSpec(tol=1e-10))
        s = sample_halfline_hit_with_time(1.0, (1.0, 0.0), SimConfig(seed=seed, n_paths=n_paths,
                                                                     substeps=substeps))
        inbin = (s.place[:, 0] > 0.5) & (s.place[:, 0] < 1.5)
        w = np.where(inbin, s.weights(1.0), 0.0)
        est = float(w.mean())
        se = float(w.std() / math.sqrt(w.size))
        coarse = float(np.where(inbin, np.exp(-0.5 * s.meta["coarse"]), 0.0).mean())
        rel = abs(est / exact - 1.0)
        return rel < 0.03, {"mc": est, "quadrature": exact, "rel_err": rel, "rel_se": se / exact,
                            "bias_K_vs_K/2": abs(est - coarse) / exact}

    return _timed("A2", "weighted slit exit mass vs kernel quadrature, within 3%", 300.0, body)


def _strip_edges():
    return np.geomspace(1.05, 6.0, 31)


def _interval_bin_expect(alpha, z2, edges):
    # folded |r| bins: r and -r
    return (_bin_probs(lambda r: kn.interval_poisson(alpha, z2, r), edges)
            + _bin_probs(lambda r: kn.interval_poisson(alpha, z2, -r), edges))


def check_A3(n_paths: int = 10 ** 6, dt: float = 1e-4, seed: int = 0) -> CriterionResult:
    """Euler strip exit places from (0, 0) against the interval kernel, 30 log bins in |r|."""

    def body():
        s = sample_strip_hit(1.0, (0.0, 0.0), SimConfig(seed=seed, n_paths=n_paths, dt=dt))
        r = np.abs(s.place[:, 0])
        edges = _strip_edges()
        cnt, _ = np.histogram(r[np.isfinite(r)], edges)
        expected = n_paths * _interval_bin_expect(1.0, 0.0, edges)
        rel = np.abs(cnt / expected - 1.0)
        z = (cnt - expected) / np.sqrt(expected)
        sup = float(rel.max())
        return sup < 0.05, {"sup_rel": sup, "max_abs_z": float(np.abs(z).max()),
                            "chi2_per_bin": float(np.mean(z * z)),
                            "horizon_failures": s.horizon_failures}

    return _timed("A3", "strip Euler MC vs interval kernel, sup-bin rel err < 5%", 600.0, body)


def check_A4(seed: int = 0) -> CriterionResult:
    """``H_lam`` at n = 1 against the slit boundary kernel; resolvent bridge constant."""

    def body():
        worst1 = 0.0
        for a in np.linspace(0.2, 1.8, 5):
            for lam in (0.1, 0.5, 1.0, 2.0, 4.0):
                p = kn.StabilityParams(float(a), lam=lam)
                for r in (0.3, 1.0, 3.0):
                    h = kn.halfspace_H_lambda(p, 1, [-1.0], [r])
                    b = kn.halfline2d_boundary_kernel(p, -1.0, r)
                    worst1 = max(worst1, abs(h / b - 1.0))
        rng = np.random.default_rng(seed)
        worst2 = 0.0
        for _ in range(25):
            a = rng.uniform(0.1, 1.9)
            n = int(rng.integers(1, 4))
            m = rng.uniform(0.1, 3.0)
            x = rng.uniform(-2, 2, n)
            y = rng.uniform(-2, 2, n)
            lhs = kn.resolvent_relativistic(a, n, m, x, y)
            rhs = kn.resolvent_bridge_constant(a) * kn.resolvent_U_lambda(
                a, n, m ** (1.0 / a), np.r_[0.0, x], np.r_[0.0, y])
            worst2 = max(worst2, abs(lhs / rhs - 1.0))
        return worst1 <= 1e-12 and worst2 <= 1e-12, {"H_vs_boundary": worst1, "resolvent_bridge": worst2}

    return _timed("A4", "algebraic identity grid to 1e-12", 1.0, body)


def _stable_norm_2d(alpha, q):
    y = np.array([-1.0, 0.0])

    def inner(s1):
        out = np.empty_like(s1)
        for i, a in enumerate(s1):
            f = lambda s2: kn._halfspace_kernel_vec(alpha, 0.0, 2, y, np.column_stack([np.full_like(s2, a), s2]))
            out[i] = integrate_power_tail(lambda t: f(t) + f(-t), 0.0, 0.0, 2.0, q)[0]
        return out

    return integrate_power_tail(inner, 0.0, -0.5 * alpha, 1.0 + 0.5 * alpha, q)[0]


def _interval_norm(alpha, z2, q):
    def side(sign):
        f = lambda t: kn.interval_poisson(alpha, z2, sign * (1.0 + t))
        return integrate_power_tail(f, 0.0, -0.5 * alpha, 1.0 + alpha, q)[0]
    return side(1.0) + side(-1.0)


def check_A5() -> CriterionResult:
    """Total masses of the m = 0 kernels and of their m > 0 counterparts."""

    def body():
        q = QuadSpec(tol=1e-9)
        stats = {}
        ok = True
        for a in (0.5, 1.0, 1.5):
            v1 = integrate_power_tail(lambda s: kn._halfspace_kernel_vec(a, 0.0, 1, np.array([-1.0]), s[:, None]),
                                      0.0, -0.5 * a, 1.0 + 0.5 * a, q)[0]
            v2 = _stable_norm_2d(a, QuadSpec(tol=1e-7))
            vi = _interval_norm(a, 0.0, q)
            vj = _interval_norm(a, 0.4, q)
            stats[f"stable_n1[a={a}]"] = v1
            stats[f"stable_n2[a={a}]"] = v2
            stats[f"interval[a={a}]"] = vi
            stats[f"interval_z0.4[a={a}]"] = vj
            ok &= all(abs(v - 1.0) <= 1e-4 for v in (v1, v2, vi, vj))
        # m > 0
        for a, m in ((0.5, 1.0), (1.5, 0.3)):
            lam = m ** (1.0 / a)
            v = integrate_power_tail(lambda s: kn._halfspace_kernel_vec(a, m, 1, np.array([-1.0]), s[:, None]),
                                     0.0, -0.5 * a, 1.0 + 0.5 * a, q)[0]
            w = integrate_power_tail(lambda r: kn.halfline2d_boundary_kernel(kn.StabilityParams(a, lam=lam),
                                                                            -1.0, r),
                                     0.0, -0.5 * a, 1.0 + 0.5 * a, q)[0]
            stats[f"relativistic_n1[a={a},m={m}]"] = v
            stats[f"slit_lam[a={a},m={m}]"] = w
            ok &= 0.0 < v < 1.0 and 0.0 < w < 1.0
        c = integrate_power_tail(lambda r: kn.halfline_complement_boundary(1.5, 1.0, -1.0, r),
                                 0.0, -0.25, 1.25, q)[0]
        stats["complement_m1"] = c
        ok &= 0.0 < c < 1.0
        return ok, stats

    return _timed("A5", "kernel normalisations", 30.0, body)


def check_A6(seed: int = 0, configs: int = 10) -> CriterionResult:
    """Sweeping residuals at random configurations."""

    def body():
        rng = np.random.default_rng(seed)
        stats = {}
        ok = True
        for a, m, n in ((1.0, 1.0, 1), (0.5, 0.7, 2)):
            worst = 0.0
            for _ in range(configs):
                x = np.r_[-rng.uniform(0.1, 2.0), rng.uniform(-1.0, 1.0, n - 1)]
                y = np.r_[rng.uniform(0.0, 2.0), rng.uniform(-1.0, 1.0, n - 1)]
                res = kn.sweeping_residual(a, m, n, x, y)
                worst = max(worst, abs(res) / kn.resolvent_relativistic(a, n, m, x, y))
            stats[f"max_rel_residual[a={a},m={m},n={n}]"] = worst
            ok &= worst <= 1e-4
        return ok, stats

    return _timed("A6", "sweeping identity residuals <= 1e-4 relative", 120.0, body)


def check_A7() -> CriterionResult:
    """Gegenbauer partial sum and orthogonality."""
    from scipy.special import roots_jacobi

    def body():
        err = abs(kn.cauchy_gegenbauer_expansion(1.0, 2.0, 0.3, 40) - 1.0 / 1.7)
        x, w = roots_jacobi(30, 0.5, 0.5)
        c = np.array([sf.gegenbauer_c(n, 1.0, x) for n in range(11)])
        gram = (c * w) @ c.T
        d = np.sqrt(np.diag(gram))
        off = np.abs(gram / np.outer(d, d) - np.eye(11)).max()
        return err < 1e-8 and off < 1e-10, {"partial_sum_err": err, "max_offdiag": float(off)}

    return _timed("A7", "Gegenbauer expansion and orthogonality", 1.0, body)


def check_A8(seed: int = 0) -> CriterionResult:
    """Special-function identities on random draws.

    The reflection form of ``K`` cancels two terms of size ``I(x)`` to leave
    ``K(x)``, so its draws stay at ``x <= 5`` where that costs fewer than five
    digits.
    """

    def body():
        rng = np.random.default_rng(seed)
        k_err = 0.0
        for _ in range(100):
            nu = int(rng.integers(-3, 3)) + rng.uniform(0.05, 0.95)
            x = rng.uniform(0.1, 5.0)
            k_err = max(k_err, abs(sf.bessel_k_reflection(nu, x) / sf.bessel_k(nu, x) - 1.0))
        f_err = 0.0
        for _ in range(50):
            a = rng.uniform(-2.0, 3.0)
            b = rng.uniform(-2.0, 3.0)
            c = a + b + rng.uniform(0.1, 3.0)
            if sf._is_nonpos_int(c) or sf._is_nonpos_int(c - a) or sf._is_nonpos_int(c - b):
                continue
            ref = sf.gamma(c) * sf.gamma(c - a - b) / (sf.gamma(c - a) * sf.gamma(c - b))
            f_err = max(f_err, abs(sf.hyp2f1(a, b, c, 1.0) / ref - 1.0))
        w_err = 0.0
        for _ in range(100):
            k = rng.uniform(-2.0, 2.0)
            mu = rng.uniform(0.05, 1.5)
            z = rng.uniform(0.05, 10.0)
            w_err = max(w_err, abs(sf.whittaker_w(k, -mu, z) / sf.whittaker_w(k, mu, z) - 1.0))
        l_err = 0.0
        for _ in range(50):
            nu = rng.uniform(0.1, 3.0)
            mu = rng.uniform(0.05, 0.95)
            x = rng.uniform(1.1, 5.0)
            l_err = max(l_err, abs(_wronskian_by_recurrence(nu, mu, x) / sf.legendre_wronskian(nu, mu, x) - 1.0))
        ok = k_err <= 1e-9 and f_err <= 1e-10 and w_err <= 1e-12 and l_err <= 1e-8
        return ok, {"K_reflection": k_err, "F21_at_1": f_err, "whittaker_symmetry": w_err,
                    "legendre_wronskian": l_err}

    return _timed("A8", "special-function oracles", 10.0, body)


def _wronskian_by_recurrence(nu, mu, x):
    # (x^2 - 1) f' = nu x f_nu - (nu + mu) f_{nu-1}, valid for both kinds
    def d(f):
        return (nu * x * f(nu, mu, x) - (nu + mu) * f(nu - 1.0, mu, x)) / (x * x - 1.0)
    return (sf.legendre_p(nu, mu, x) * d(sf.legendre_q)
            - d(sf.legendre_p) * sf.legendre_q(nu, mu, x))


def check_A9(n_paths: int = 100_000, seed: int = 0) -> CriterionResult:
    """Half-line complement: index-shift identity and MC from the stable start (0.5, -1)."""

    def body():
        alpha = 1.5
        worst = 0.0
        for m in (0.0, 1.0):
            lam = m ** (1.0 / alpha) if m > 0 else 0.0
            p = kn.StabilityParams(alpha - 1.0, lam=lam)
            for y2 in (-0.3, -1.0, -2.5):
                for r in (0.2, 1.0, 4.0):
                    a = kn.halfline_complement_boundary(alpha, m, y2, r)
                    b = kn.halfline2d_boundary_kernel(p, y2, r)
                    c = kn.halfline_complement_nd(alpha, m, 2, [0.0, y2], [r])
                    worst = max(worst, abs(a / b - 1.0), abs(c / b - 1.0))
        s = sample_halfline_complement_hit(alpha, 2, (0.0, 0.5, -1.0), SimConfig(seed=seed, n_paths=n_paths))
        place = s.place[:, 0]
        edges = [0.0, 0.3, 1.0, 3.0, math.inf]
        q = QuadSpec(tol=1e-8)
        mc_worst = 0.0
        detail = {}
        for m in (0.0, 1.0):
            lam = m ** (1.0 / alpha) if m > 0 else 0.0
            w = s.weights(lam)
            f = lambda r: np.array([kn.halfline_complement_kernel(alpha, m, (0.5, -1.0), ri, q) for ri in r])
            for lo, hi in zip(edges[:-1], edges[1:]):
                if math.isinf(hi):
                    ref = integrate_power_tail(f, lo, 0.0, 1.25, q, scale=lo)[0]
                elif lo == 0.0:
                    ref = integrate_finite_singular(f, lo, hi, (-0.25, 0.0), q)[0]
                else:
                    ref = integrate(f, lo, hi, q)[0]
                est = float(np.mean(np.where((place > lo) & (place < hi), w, 0.0)))
                rel = abs(est / ref - 1.0)
                detail[f"m={m},bin=({lo},{hi})"] = {"mc": est, "kernel": ref, "rel": rel}
                mc_worst = max(mc_worst, rel)
        return worst <= 1e-12 and mc_worst < 0.04, {"identity": worst, "mc_max_rel": mc_worst,
                                                    "detail": detail}

    return _timed("A9", "half-line complement reduction and MC within 4%", 180.0, body)


def check_A10(n_paths: int = 10 ** 6, dt: float = 1e-4, seed: int = 1) -> CriterionResult:
    """Strip Fourier relation at zero effective frequency: 3D strip marginal vs interval kernel."""

    def body():
        s = sample_strip3d_hit(1.0, (0.0, 0.0, 0.0), SimConfig(seed=seed, n_paths=n_paths, dt=dt))
        ok_rows = np.isfinite(s.place[:, 0])
        r = np.abs(s.place[ok_rows, 0])
        phase = np.exp(0j * s.place[ok_rows, 1])  # zbar = ybar = 0
        edges = _strip_edges()
        idx = np.digitize(r, edges) - 1
        inside = (idx >= 0) & (idx < len(edges) - 1)
        lhs = np.bincount(idx[inside], weights=phase[inside].real, minlength=len(edges) - 1)
        lhs_im = np.bincount(idx[inside], weights=phase[inside].imag, minlength=len(edges) - 1)
        expected = n_paths * _interval_bin_expect(1.0, 0.0, edges)
        rel = np.abs(lhs / expected - 1.0)
        sup = float(rel.max())
        return sup < 0.05, {"sup_rel": sup, "max_abs_imag": float(np.abs(lhs_im).max() / n_paths),
                            "horizon_failures": s.horizon_failures}

    return _timed("A10", "3D strip marginal vs interval kernel, sup-bin rel err < 5%", 600.0, body)


def check_A11() -> CriterionResult:
    """Whittaker hitting transform against numerical Laplace transforms of the time density."""

    def body():
        alpha = 1.0
        x = 1.3
        law = bc.BesselLaw.from_alpha(alpha)
        worst = 0.0
        printed_worst = 0.0
        for g in (0.0, 0.5, 2.0):
            for lam in (0.5, 1.0, 2.0):
                num = bc.hit_laplace_by_quadrature(alpha, g, lam, x)
                worst = max(worst, abs(bc.besq_hit_laplace(law, g, lam, x) / num - 1.0))
                printed_worst = max(printed_worst,
                                    abs(bc.besq_hit_laplace_printed(law, g, lam, x) / num - 1.0))
        return worst <= 1e-6, {"max_rel_err": worst, "printed_constant_max_rel_err": printed_worst,
                               "resolution": "Gamma((|nu|+1+gamma/lam)/2) / (lam^((nu+1)/2) Gamma(|nu|))"}

    return _timed("A11", "hitting transform constant, 1e-6 on a 3x3 grid", 30.0, body)


CHECKS = {
    "A1": check_A1, "A2": check_A2, "A3": check_A3, "A4": check_A4, "A5": check_A5, "A6": check_A6,
    "A7": check_A7, "A8": check_A8, "A9": check_A9, "A10": check_A10, "A11": check_A11,
}

SUITES = {
    **{k: [k] for k in CHECKS},
    "halfspace-mc": ["A1"],
    "identities": ["A4"],
    "fast": ["A4", "A5", "A6", "A7", "A8", "A11"],
    "all": list(CHECKS),
}


def run_suite(name: str, progress: Callable[[CriterionResult], None] | None = None) -> list[CriterionResult]:
    """Run every criterion of suite ``name``; raises KeyError for an unknown suite."""
    out = []
    for key in SUITES[name]:
        res = CHECKS[key]()
        if progress is not None:
            progress(res)
        out.append(res)
    return out
