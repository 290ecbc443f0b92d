"""Command-line front end.

    hitkit eval      --geometry interval --alpha 1 --start 0,0 --grid r=1.1:5:9
    hitkit simulate  --geometry halfline2d --alpha 1 --start 0,-1 --paths 100000
    hitkit verify    --suite identities --out report.json
    hitkit report    report.json

Settings may also come from a JSON manifest (``--manifest``); flags override
it.  Exit codes: 0 ok, 2 usage, 3 numerical failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import subprocess
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4

EVAL_GEOMETRIES = ("halfline2d", "halfspace", "interval", "strip_ft", "halfline_complement", "resolvent")
SIM_GEOMETRIES = ("halfline2d", "strip", "strip3d", "halfspace", "halfline_complement")
COMMANDS = ("eval", "simulate", "verify", "report")

# flag name -> default; None means "required by some commands"
_DEFAULTS = {
    "alpha": None, "mass": 0.0, "lambda": None, "geometry": None, "start": None, "grid": [],
    "paths": 100_000, "dt": 1e-4, "substeps": 64, "seed": 0, "out": None, "format": "csv",
    "suite": None, "tol": 1e-8,
}


class UsageError(Exception):
    """Invalid manifest or flag combination (exit 2)."""


@dataclass
class Axis:
    name: str
    values: list

    @classmethod
    def parse(cls, text: str) -> "Axis":
        if "=" not in text:
            raise UsageError(f"grid axis {text!r} must look like name=lo:hi:n or name=v1,v2,...")
        name, spec = text.split("=", 1)
        name = name.strip()
        try:
            if ":" in spec:
                lo, hi, n = spec.split(":")
                n = int(n)
                if n < 1:
                    raise UsageError(f"axis {name}: point count must be positive")
                values = [float(v) for v in np.linspace(float(lo), float(hi), n)] if n > 1 else [float(lo)]
            else:
                values = [float(v) for v in spec.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"axis {name}: {exc}") from None
        if not values:
            raise UsageError(f"axis {name} is empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise UsageError(f"axis {name} must be strictly increasing")
        return cls(name, values)


@dataclass
class RunManifest:
    """Everything a run depends on; echoed into every output file."""

    command: str
    settings: dict = field(default_factory=dict)

    def __getattr__(self, key):
        try:
            return self.__dict__["settings"][key]
        except KeyError:
            raise AttributeError(key) from None

    def echo(self) -> dict:
        # the output path is where the echo goes, not an input of the run
        return {"command": self.command, **{k: v for k, v in self.settings.items() if k != "out"}}


def _parse_start(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    try:
        return [float(v) for v in str(value).split(",")]
    except ValueError:
        raise UsageError(f"cannot parse start {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hitkit", description="Hitting kernels of Bessel-Brownian diffusions "
                                "and stable Poisson kernels.")
    p.add_argument("--version", action="version", version=f"hitkit {version_string()}")
    sub = p.add_subparsers(dest="command")
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--manifest", help="JSON manifest; flags override its values")
        s.add_argument("--alpha", type=float)
        s.add_argument("--mass", type=float)
        s.add_argument("--lambda", dest="lambda", type=float)
        s.add_argument("--geometry")
        s.add_argument("--start", help="comma-separated coordinates")
        s.add_argument("--grid", action="append", help="axis as name=lo:hi:n or name=v1,v2,...")
        s.add_argument("--paths", type=int)
        s.add_argument("--dt", type=float)
        s.add_argument("--substeps", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--out")
        s.add_argument("--format", choices=("csv", "json"))
        s.add_argument("--suite")
        s.add_argument("--tol", type=float)
        if name == "report":
            s.add_argument("inputs", nargs="*", help="verify reports to summarise")
    return p


def load_manifest(args: argparse.Namespace) -> RunManifest:
    settings = dict(_DEFAULTS)
    if args.manifest:
        try:
            data = json.loads(Path(args.manifest).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read manifest: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("manifest must be a JSON object")
        unknown = set(data) - set(_DEFAULTS) - {"command"}
        if unknown:
            raise UsageError(f"unknown manifest keys: {sorted(unknown)}")
        if "command" in data and data["command"] != args.command:
            raise UsageError(f"manifest is for {data['command']!r}, not {args.command!r}")
        settings.update({k: v for k, v in data.items() if k != "command"})
    for key in _DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    if isinstance(settings["grid"], str):
        settings["grid"] = [settings["grid"]]
    settings["start"] = _parse_start(settings["start"])
    if getattr(args, "inputs", None):
        settings["inputs"] = list(args.inputs)
    _validate(args.command, settings)
    return RunManifest(args.command, settings)


def _validate(command, s):
    if s["alpha"] is not None and not 0.0 < s["alpha"] < 2.0:
        raise UsageError("--alpha must lie in (0, 2)")
    if s["mass"] < 0:
        raise UsageError("--mass must be nonnegative")
    if s["lambda"] is not None and s["lambda"] < 0:
        raise UsageError("--lambda must be nonnegative")
    if s["paths"] < 1 or s["substeps"] < 1 or not s["dt"] > 0 or not s["tol"] > 0:
        raise UsageError("--paths, --substeps, --dt and --tol must be positive")
    if not 0 <= s["seed"] < 2 ** 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    if s["format"] not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    if command in ("eval", "simulate"):
        allowed = EVAL_GEOMETRIES if command == "eval" else SIM_GEOMETRIES
        if s["geometry"] not in allowed:
            raise UsageError(f"--geometry must be one of {', '.join(allowed)}")
        if s["alpha"] is None:
            raise UsageError("--alpha is required")
        if s["start"] is None:
            raise UsageError("--start is required")
    if command == "eval":
        s["grid"] = [Axis.parse(g) if isinstance(g, str) else g for g in s["grid"]]
        if not s["grid"]:
            raise UsageError("eval needs at least one --grid axis")
    if command == "verify" and not s["suite"]:
        raise UsageError("verify needs --suite")


def version_string() -> str:
    """Package version plus ``git describe`` of the source tree when available."""
    try:
        here = Path(__file__).resolve().parent
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=here,
                             capture_output=True, text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


# ---------------------------------------------------------------------------
# eval


def _lam(s) -> float:
    if s["mass"] > 0:
        if s["lambda"] is not None and not math.isclose(s["lambda"], s["mass"] ** (1.0 / s["alpha"])):
            raise UsageError("--lambda and --mass disagree (lambda = mass^(1/alpha))")
        return s["mass"] ** (1.0 / s["alpha"])
    return s["lambda"] or 0.0


def _axes(s, names):
    grid = {a.name: a.values for a in s["grid"]}
    missing = [n for n in names if n not in grid]
    extra = [n for n in grid if n not in names]
    if missing or extra:
        raise UsageError(f"{s['geometry']} needs grid axes {names}; got {list(grid)}")
    return [grid[n] for n in names]


def _eval_rows(s):
    from . import kernels as kn
    from .quadrature import QuadSpec

    geo = s["geometry"]
    a = s["alpha"]
    start = s["start"]
    q = QuadSpec(tol=s["tol"])
    lam = _lam(s)
    p = kn.StabilityParams(a, mass=s["mass"], lam=lam)

    if geo == "halfline2d":
        if len(start) != 2:
            raise UsageError("halfline2d start is (z1, z2)")
        (rs,) = _axes(s, ["r"])
        for r in rs:
            if start[0] == 0:
                yield ["r"], [r], kn.halfline2d_boundary_kernel(p, start[1], r), 0.0
            else:
                v = kn.halfline2d_laplace_kernel(p, start, r, q)
                yield ["r"], [r], v, q.tol * abs(v)
    elif geo == "interval":
        z2 = start[-1]
        if len(start) == 2 and start[0] != 0:
            raise UsageError("interval kernel needs a start on the axis, (0, z2)")
        (rs,) = _axes(s, ["r"])
        for r in rs:
            yield ["r"], [r], kn.interval_poisson(a, z2, r), 0.0
    elif geo == "halfspace":
        n = len(start)
        names = [f"sigma{k + 1}" for k in range(n)]
        for pt in itertools.product(*_axes(s, names)):
            if s["mass"] > 0:
                v = kn.halfspace_poisson_relativistic(a, s["mass"], n, start, pt)
            elif lam > 0:
                v = kn.halfspace_H_lambda(p, n, start, pt)
            else:
                v = kn.halfspace_poisson_stable(a, n, start, pt)
            yield names, list(pt), v, 0.0
    elif geo == "halfline_complement":
        names = ["r"]
        if len(start) == 2:
            (rs,) = _axes(s, names)
            for r in rs:
                if start[0] == 0:
                    yield names, [r], kn.halfline_complement_boundary(a, s["mass"], start[1], r), 0.0
                else:
                    v = kn.halfline_complement_kernel(a, s["mass"], start, r, q)
                    yield names, [r], v, q.tol * abs(v)
        else:
            n = len(start)
            names = [f"sigma{k + 2}" for k in range(n - 1)]
            for pt in itertools.product(*_axes(s, names)):
                yield names, list(pt), kn.halfline_complement_nd(a, s["mass"], n, start, pt), 0.0
    elif geo == "resolvent":
        n = len(start)
        names = [f"y{k + 1}" for k in range(n)]
        for pt in itertools.product(*_axes(s, names)):
            if s["mass"] > 0:
                v = kn.resolvent_relativistic(a, n, s["mass"], start, pt)
            elif lam > 0:
                v = kn.resolvent_U_lambda(a, n, lam, np.r_[0.0, start], np.r_[0.0, pt])
            else:
                raise UsageError("resolvent needs --mass or --lambda > 0")
            yield names, list(pt), v, 0.0
    elif geo == "strip_ft":
        if len(start) != 2:
            raise UsageError("strip_ft start is (y2, ybar)")
        edges, freqs = _axes(s, ["sigma2", "zbar"])
        for lo, hi in zip(edges[:-1], edges[1:]):
            for zb in freqs:
                res = kn.strip_ft_check(a, lam, start[0], (lo, hi), [zb], s["paths"], seed=s["seed"],
                                        dt=s["dt"], ybar=[start[1]])
                names = ["sigma2_lo", "sigma2_hi", "zbar", "quantity"]
                yield names, [lo, hi, zb, "lhs_re"], res.lhs.real, res.lhs_se
                yield names, [lo, hi, zb, "lhs_im"], res.lhs.imag, res.lhs_se
                yield names, [lo, hi, zb, "rhs_times_phase_re"], (res.phase * res.rhs).real, res.rhs_se


def cmd_eval(m: RunManifest) -> dict:
    rows = []
    names = None
    for nm, inputs, value, err in _eval_rows(m.settings):
        names = nm
        rows.append(inputs + [float(value), float(err)])
    return {"columns": names + ["value", "err_est"], "rows": rows}


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(m: RunManifest) -> dict:
    from . import diffusion_sim as ds

    s = m.settings
    cfg = ds.SimConfig(seed=s["seed"], n_paths=s["paths"], dt=s["dt"], substeps=s["substeps"])
    a = s["alpha"]
    start = s["start"]
    geo = s["geometry"]
    if geo == "halfline2d":
        out = ds.sample_halfline_hit_with_time(a, start, cfg)
    elif geo == "strip":
        out = ds.sample_strip_hit(a, start, cfg)
    elif geo == "strip3d":
        out = ds.sample_strip3d_hit(a, start, cfg)
    elif geo == "halfspace":
        out = ds.sample_halfspace_hit_nd(a, len(start) - 1, start, cfg)
    else:
        out = ds.sample_halfline_complement_hit(a, len(start) - 1, start, cfg)
    if out.horizon_failures > 1e-3 * len(out):
        raise ds.HorizonError(f"{out.horizon_failures} of {len(out)} paths did not exit")
    k = out.place.shape[1]
    cols = ["path"] + [f"place{j + 1}" for j in range(k)] + ["time"]
    rows = [[i] + list(map(float, out.place[i])) + [float(out.time_functional[i])] for i in range(len(out))]
    flags = {"exact_place": out.exact_place, "exact_time": out.exact_time,
             "horizon_failures": out.horizon_failures}
    return {"columns": cols, "rows": rows, "flags": flags}


# ---------------------------------------------------------------------------
# verify / report


def cmd_verify(m: RunManifest) -> dict:
    from . import verify as vf

    suite = m.settings["suite"]
    if suite not in vf.SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(vf.SUITES)}")
    results = vf.run_suite(suite, progress=lambda r: print(r.line(), file=sys.stderr, flush=True))
    return {"suite": suite, "passed": all(r.passed for r in results),
            "criteria": [r.to_dict() for r in results]}


def cmd_report(m: RunManifest) -> dict:
    inputs = m.settings.get("inputs") or []
    if not inputs:
        raise UsageError("report needs one or more verify JSON files")
    rows = []
    for path in inputs:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {path}: {exc}") from None
        for c in data.get("criteria", []):
            rows.append([path, c["criterion"], "PASS" if c["passed"] else "FAIL", c["runtime_s"], c["budget_s"]])
    return {"columns": ["source", "criterion", "verdict", "runtime_s", "budget_s"], "rows": rows}


# ---------------------------------------------------------------------------
# output


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(m: RunManifest, result: dict) -> str:
    echo = _jsonable(m.echo())
    if m.settings["format"] == "json" or "columns" not in result:
        doc = {"version": version_string(), "manifest": echo, "seed": m.settings["seed"], **result}
        return json.dumps(_jsonable(doc), indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# hitkit {version_string()}\n")
    buf.write(f"# manifest: {json.dumps(echo, sort_keys=True)}\n")
    buf.write(f"# seed: {m.settings['seed']}\n")
    for k, v in result.get("flags", {}).items():
        buf.write(f"# {k}: {json.dumps(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result["columns"])
    for row in result["rows"]:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, Axis):
        return f"{obj.name}=" + ",".join(repr(v) for v in obj.values)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _apply_threads():
    raw = os.environ.get("HITKIT_THREADS")
    if not raw:
        return
    try:
        n = int(raw)
    except ValueError:
        raise UsageError("HITKIT_THREADS must be a positive integer") from None
    if n < 1:
        raise UsageError("HITKIT_THREADS must be a positive integer")
    import numba

    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    from .diffusion_sim import HorizonError
    from .kernels import InsufficientSamplesError
    from .quadrature import QuadratureError
    from .specfun import ConvergenceError, DomainError, PoleError

    t0 = time.perf_counter()
    try:
        manifest = load_manifest(args)
        _apply_threads()
        handler = {"eval": cmd_eval, "simulate": cmd_simulate, "verify": cmd_verify,
                   "report": cmd_report}[args.command]
        result = handler(manifest)
    except UsageError as exc:
        print(f"hitkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, ConvergenceError, PoleError, HorizonError, InsufficientSamplesError) as exc:
        print(f"hitkit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, DomainError) as exc:
        print(f"hitkit: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE

    text = render(manifest, result)
    out = manifest.settings["out"]
    if out:
        Path(out).write_text(text)
        meta = {"wall_clock_s": time.perf_counter() - t0,
                "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                "version": version_string()}
        Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=1) + "\n")
    else:
        sys.stdout.write(text)
    if args.command == "verify" and not result["passed"]:
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
