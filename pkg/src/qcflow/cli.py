"""Command-line entry point.

    qcflow run <config.json> [--out DIR] [--snapshots EVERY]
    qcflow validate <config.json>
    qcflow version

A config is one JSON document::

    {
      "kind": "heleshaw",
      "initial_map": {"alpha": 2.0, "a": [0, {"re": 0.1, "im": 0.0}]},
      "numerics": {"N": 64, "n": 256, "dt": 0.1, "t_end": 1.0},
      "output": {"dir": "run1"}
    }

plus, depending on the kind, exactly one driving block among ``herglotz``,
``field``, ``beltrami`` and ``mobius``.  Exit codes: 0 success, 2 config
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .douady_earle import (CircleHomeomorphism, beltrami_of_extension, sup_bound,
                           decay_constant, extend, mobius_map, nu_from_field)
from .errors import QCFlowError
from .fields import DiskHolomorphic
from .grid import DiskQuadrature, circle_nodes, is_power_of_two
from .heleshaw import PGState, estimate_blowup_time, evolve, moments, tangent_vector
from .laurent import LaurentMap
from .loewner import HerglotzFunction, lk_ode_integrate, lk_pde_evolve
from .teich import lambda_star
from .vect import CircleField

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

CSV_FORMAT = "qcflow-trajectory/1"
KINDS = ("heleshaw", "lk-pde", "lk-ode", "douady-earle", "nu-from-field", "check-bounds")
DRIVING_BLOCKS = ("herglotz", "field", "beltrami", "mobius")
ALLOWED_DRIVING = {
    "heleshaw": (),
    "lk-pde": ("herglotz", "field", "beltrami"),
    "lk-ode": ("herglotz", "field", "beltrami"),
    "douady-earle": ("field", "mobius"),
    "nu-from-field": ("field",),
    "check-bounds": ("field",),
}
NEEDS_MAP = ("heleshaw", "lk-pde")
DEFAULT_NUMERICS = {
    "N": 64, "n": 256, "n_r": 32, "dt": 0.1, "t_end": 1.0, "rtol": 1e-12, "atol": 1e-14,
    "cusp_tol": 1e-3, "rhs_sign": 1, "moments": 3, "tau": 0.1,
}
DEFAULT_GRID = {"n_r": 8, "n_theta": 16, "r_max": 0.9}
POWER_OF_TWO = ("N", "n", "n_r")
TOLERANCES = ("rtol", "atol", "cusp_tol")


class ConfigError(Exception):
    def __init__(self, errors):
        super().__init__("; ".join(f"{p}: {m}" for p, m in errors))
        self.errors = errors


@dataclass
class ScenarioConfig:
    kind: str
    initial_map: LaurentMap | None
    driving: tuple[str, dict] | None
    numerics: dict
    grid: dict
    points: list
    output_dir: str
    raw: dict = field(default_factory=dict)


# --- serialization ------------------------------------------------------------


def fmt(x: float) -> str:
    """Full-precision decimal (17 significant digits)."""
    return format(float(x), ".17g")


def complex_json(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else json.dumps(str(float(obj)))
    if isinstance(obj, (complex, np.complexfloating)):
        return _emit(complex_json(obj), indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _emit(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_emit(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, complex, np.ndarray)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _emit(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(obj, path: Path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_emit(obj, 2, 0) + "\n")


def write_csv(path: Path, columns: list[str], rows: list[list[float]]):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])


# --- parsing and validation -----------------------------------------------------


def parse_complex(value, path: str, errors: list) -> complex:
    if isinstance(value, bool):
        errors.append((path, "expected a number"))
        return 0j
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, dict) and set(value) <= {"re", "im"}:
        try:
            return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
        except (TypeError, ValueError):
            pass
    if isinstance(value, list) and len(value) == 2:
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError):
            pass
    errors.append((path, "expected a number, {re, im} or [re, im]"))
    return 0j


def _parse_trig(block: dict, path: str, errors: list) -> dict:
    out = {}
    for key in ("cos", "sin"):
        terms = block.get(key, {})
        if not isinstance(terms, dict):
            errors.append((f"{path}.{key}", "expected an object mapping frequency to amplitude"))
            continue
        parsed = {}
        for k, a in terms.items():
            try:
                kk = int(k)
            except ValueError:
                errors.append((f"{path}.{key}.{k}", "frequency must be an integer"))
                continue
            if kk < 1 or not isinstance(a, (int, float)) or isinstance(a, bool):
                errors.append((f"{path}.{key}.{k}", "needs frequency >= 1 and a real amplitude"))
                continue
            parsed[kk] = float(a)
        out[key] = parsed
    return out


def _check_p0(block, path, errors):
    p0 = block.get("p0", 1.0)
    if not isinstance(p0, (int, float)) or isinstance(p0, bool) or not p0 > 0:
        errors.append((f"{path}.p0", "must be a positive number"))


def parse_config(raw) -> ScenarioConfig:
    """Check schema and invariants; raises ConfigError listing every violation."""
    errors = []
    if not isinstance(raw, dict):
        raise ConfigError([("$", "config must be a JSON object")])
    kind = raw.get("kind")
    if kind not in KINDS:
        errors.append(("kind", f"must be one of {', '.join(KINDS)}"))

    present = [b for b in DRIVING_BLOCKS if b in raw]
    driving = None
    if kind in KINDS:
        allowed = ALLOWED_DRIVING[kind]
        for b in present:
            if b not in allowed:
                errors.append((b, f"driving block not accepted by kind {kind}"))
        if allowed and len(present) != 1:
            errors.append(("driving", f"exactly one driving block required, got {len(present)}"
                           + (f" ({', '.join(present)})" if present else "")))
        if len(present) == 1 and present[0] in allowed:
            name = present[0]
            block = raw[name]
            if not isinstance(block, dict):
                errors.append((name, "must be an object"))
            else:
                driving = (name, _parse_driving(name, block, errors))

    numerics = dict(DEFAULT_NUMERICS)
    user_num = raw.get("numerics", {})
    if not isinstance(user_num, dict):
        errors.append(("numerics", "must be an object"))
        user_num = {}
    for k, v in user_num.items():
        path = f"numerics.{k}"
        if k not in DEFAULT_NUMERICS:
            errors.append((path, "unknown field"))
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            errors.append((path, "must be a number"))
        else:
            numerics[k] = v
    for k in POWER_OF_TWO:
        v = numerics[k]
        if not (isinstance(v, int) or float(v).is_integer()) or not is_power_of_two(int(v)):
            errors.append((f"numerics.{k}", f"must be a power of two, got {v}"))
        else:
            numerics[k] = int(v)
    for k in TOLERANCES:
        if not numerics[k] > 0:
            errors.append((f"numerics.{k}", "tolerance must be > 0"))
    for k in ("dt", "t_end"):
        if not numerics[k] > 0:
            errors.append((f"numerics.{k}", "must be > 0"))
    if numerics["rhs_sign"] not in (1, -1):
        errors.append(("numerics.rhs_sign", "must be 1 or -1"))
    if not (float(numerics["moments"]).is_integer() and numerics["moments"] >= 1):
        errors.append(("numerics.moments", "must be a positive integer"))
    numerics["moments"] = int(numerics["moments"])

    f0 = None
    if "initial_map" in raw:
        im = raw["initial_map"]
        if not isinstance(im, dict):
            errors.append(("initial_map", "must be an object"))
        else:
            alpha = im.get("alpha", 1.0)
            if isinstance(alpha, bool) or not isinstance(alpha, (int, float)) or not alpha > 0:
                errors.append(("initial_map.alpha", "must be a positive real number"))
                alpha = 1.0
            a = im.get("a", [])
            if not isinstance(a, list):
                errors.append(("initial_map.a", "must be a list of coefficients a_0, a_1, ..."))
                a = []
            coeffs = [parse_complex(c, f"initial_map.a[{i}]", errors) for i, c in enumerate(a)]
            if isinstance(numerics["N"], int) and len(coeffs) > numerics["N"] + 1:
                errors.append(("initial_map.a", f"more than N + 1 = {numerics['N'] + 1} coefficients"))
            f0 = LaurentMap(float(alpha), coeffs or [0.0])
    elif kind in NEEDS_MAP:
        errors.append(("initial_map", f"required for kind {kind}"))

    grid = dict(DEFAULT_GRID)
    user_grid = raw.get("grid", {})
    if not isinstance(user_grid, dict):
        errors.append(("grid", "must be an object"))
        user_grid = {}
    for k, v in user_grid.items():
        if k not in DEFAULT_GRID:
            errors.append((f"grid.{k}", "unknown field"))
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            errors.append((f"grid.{k}", "must be a number"))
        else:
            grid[k] = v
    for k in ("n_r", "n_theta"):
        if not (float(grid[k]).is_integer() and grid[k] >= 1):
            errors.append((f"grid.{k}", "must be a positive integer"))
        grid[k] = int(grid[k])
    r_cap = 0.999 if kind == "check-bounds" else 0.99
    if not 0 < grid["r_max"] <= r_cap:
        errors.append(("grid.r_max", f"must lie in (0, {r_cap}]"))

    points = [parse_complex(z, f"points[{i}]", errors) for i, z in enumerate(raw.get("points", []))]
    if kind == "lk-ode":
        if not points:
            errors.append(("points", "lk-ode needs at least one starting point"))
        elif any(abs(z) <= 1.0 for z in points):
            errors.append(("points", "starting points must satisfy |zeta| > 1"))
        if raw.get("sign", "retracting") not in ("retracting", "expanding"):
            errors.append(("sign", "must be 'retracting' or 'expanding'"))

    output = raw.get("output", {})
    if not isinstance(output, dict) or not isinstance(output.get("dir", ""), str):
        errors.append(("output.dir", "must be a string"))
        output = {}

    known = {"kind", "initial_map", "numerics", "grid", "points", "sign", "output", "comment",
             *DRIVING_BLOCKS}
    for k in raw:
        if k not in known:
            errors.append((k, "unknown field"))
    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(kind, f0, driving, numerics, grid, points,
                          output.get("dir", "qcflow-run"), raw)


def _parse_driving(name: str, block: dict, errors: list) -> dict:
    path = name
    if name == "herglotz":
        c = block.get("coeffs")
        if not isinstance(c, list) or not c:
            errors.append((f"{path}.coeffs", "needs a non-empty list p_0, p_1, ..."))
            return {}
        coeffs = [parse_complex(v, f"{path}.coeffs[{i}]", errors) for i, v in enumerate(c)]
        if abs(coeffs[0].imag) > 0 or not coeffs[0].real > 0:
            errors.append((f"{path}.coeffs[0]", "p_0 must be real and positive"))
        return {"coeffs": coeffs}
    if name == "field":
        const = block.get("const", 0.0)
        if isinstance(const, bool) or not isinstance(const, (int, float)):
            errors.append((f"{path}.const", "must be a real number"))
            const = 0.0
        out = {"const": float(const), **_parse_trig(block, path, errors)}
        n = block.get("n", 256)
        if not isinstance(n, int) or not is_power_of_two(n):
            errors.append((f"{path}.n", "must be a power of two"))
        out["n"] = n
        _check_p0(block, path, errors)
        out["p0"] = block.get("p0", 1.0)
        out["p1"] = parse_complex(block.get("p1", 0.0), f"{path}.p1", errors)
        tau = block.get("tau", 0.1)
        if isinstance(tau, bool) or not isinstance(tau, (int, float)):
            errors.append((f"{path}.tau", "must be a number"))
        out["tau"] = tau
        return out
    if name == "beltrami":
        phi = block.get("phi")
        if not isinstance(phi, list) or not phi:
            errors.append((f"{path}.phi", "needs a non-empty list of Taylor coefficients"))
            return {}
        _check_p0(block, path, errors)
        return {"phi": [parse_complex(v, f"{path}.phi[{i}]", errors) for i, v in enumerate(phi)],
                "p0": block.get("p0", 1.0),
                "p1": parse_complex(block.get("p1", 0.0), f"{path}.p1", errors)}
    if name == "mobius":
        a = parse_complex(block.get("a", 0.0), f"{path}.a", errors)
        if abs(a) >= 1:
            errors.append((f"{path}.a", "must satisfy |a| < 1"))
        rot = block.get("rotation", 0.0)
        if isinstance(rot, bool) or not isinstance(rot, (int, float)):
            errors.append((f"{path}.rotation", "must be a real number"))
        return {"a": a, "rotation": float(rot) if isinstance(rot, (int, float)) else 0.0}
    return {}


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError([("$", f"cannot read config: {exc}")]) from None
    except json.JSONDecodeError as exc:
        raise ConfigError([("$", f"invalid JSON: {exc}")]) from None
    return parse_config(raw)


# --- scenario execution ---------------------------------------------------------


def _field(block: dict) -> CircleField:
    return CircleField.trig(block["const"], block.get("cos"), block.get("sin"), n=block["n"])


def _herglotz(cfg: ScenarioConfig) -> HerglotzFunction:
    name, block = cfg.driving
    if name == "herglotz":
        return HerglotzFunction(block["coeffs"])
    if name == "field":
        return HerglotzFunction.from_field(_field(block), block["p0"], block["p1"])
    phi = DiskHolomorphic(block["phi"])
    n_r = cfg.numerics["n_r"]
    return HerglotzFunction.from_nu(lambda_star(phi), block["p0"], block["p1"],
                                    quad=DiskQuadrature(n_r, 2 * n_r))


def polar_grid(grid: dict) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r = grid["r_max"] * np.arange(1, grid["n_r"] + 1) / grid["n_r"]
    th = circle_nodes(grid["n_theta"])
    return r, th, r[:, None] * np.exp(1j * th[None, :])


def _grid_layout(grid: dict, r, th) -> dict:
    return {"type": "polar", "r": r, "theta": th, "layout": "values[i][j] at r[i] e^{i theta[j]}"}


def _map_columns(N: int, K: int) -> list[str]:
    cols = ["t", "alpha"]
    for k in range(N + 1):
        cols += [f"re_a{k}", f"im_a{k}"]
    cols.append("area")
    for k in range(1, K + 1):
        cols += [f"m{k}_re", f"m{k}_im"]
    return cols + ["min_df", "rep_margin"]


def _map_row(t, f: LaurentMap, N: int, area, mom, min_df, rep_margin) -> list[float]:
    y = f.to_state(N)
    row = [t, f.alpha.real]
    for c in y[1:]:
        row += [c.real, c.imag]
    row.append(area)
    for m in mom:
        row += [m.real, m.imag]
    return row + [min_df, rep_margin]


def _curve_snapshot(t, f: LaurentMap, n: int) -> dict:
    return {"t": t, "grid": {"type": "circle", "n": n, "theta": "2 pi j / n"},
            "boundary": [complex_json(z) for z in f.boundary(n)]}


def _run_heleshaw(cfg, out: Path, every: int) -> dict:
    num = cfg.numerics
    N, K = num["N"], num["moments"]
    state0 = PGState(0.0, LaurentMap(cfg.initial_map.alpha, cfg.initial_map.a), num["n"])
    failure = None
    try:
        states = evolve(state0, num["t_end"], num["dt"], N=N, rtol=num["rtol"], atol=num["atol"],
                        cusp_tol=num["cusp_tol"], rhs_sign=num["rhs_sign"], K=K)
    except QCFlowError as exc:
        failure = exc
        states = getattr(exc, "states", None) or []
    rows = [_map_row(s.t, s.f, N, s.diagnostics["area"], s.diagnostics["moments"],
                     s.diagnostics["min_df"], float(np.min(s.inverse_jacobian()))) for s in states]
    write_csv(out / "trajectory.csv", _map_columns(N, K), rows)
    r, th, pts = polar_grid(cfg.grid)
    snaps = []
    for i, s in enumerate(states):
        if i % every and i != len(states) - 1:
            continue
        snap = _curve_snapshot(s.t, s.f, num["n"])
        snap["tangent_nu"] = {"grid": _grid_layout(cfg.grid, r, th),
                              "values": np.asarray(tangent_vector(s, pts))}
        snaps.append(snap)
    dump_json({"kind": "heleshaw", "snapshots": snaps}, out / "fields.json")
    results = {"ill_posed": num["rhs_sign"] < 0, "rows": len(rows)}
    if states:
        last = states[-1]
        results.update({"t_final": last.t, "alpha_final": last.f.alpha.real,
                        "area_final": last.diagnostics["area"],
                        "min_df_final": last.diagnostics["min_df"],
                        "blowup_estimate": estimate_blowup_time(
                            [s.t for s in states], [s.diagnostics["min_df"] for s in states])})
    if failure is not None:
        raise _Failure(failure, results)
    return results


def _run_lk_pde(cfg, out: Path, every: int) -> dict:
    num = cfg.numerics
    N, K = num["N"], num["moments"]
    p = _herglotz(cfg)
    failure = None
    try:
        states = lk_pde_evolve(cfg.initial_map, p, num["t_end"], num["dt"], N=N, rtol=num["rtol"],
                               atol=num["atol"], min_df=num["cusp_tol"], n_check=num["n"])
    except QCFlowError as exc:
        failure = exc
        states = getattr(exc, "states", None) or []
    rows = []
    for s in states:
        mom = moments(PGState(s.t, s.f, num["n"]), K)
        rows.append(_map_row(s.t, s.f, N, s.diagnostics["area"], mom, s.diagnostics["min_df"],
                             s.diagnostics["rep_margin"]))
    write_csv(out / "trajectory.csv", _map_columns(N, K), rows)
    snaps = [_curve_snapshot(s.t, s.f, num["n"]) for i, s in enumerate(states)
             if i % every == 0 or i == len(states) - 1]
    dump_json({"kind": "lk-pde", "herglotz": {"p0": p.p0, "p1": p.p1, "coeffs": p.coeffs[:N + 2]},
               "snapshots": snaps}, out / "fields.json")
    results = {"rows": len(rows), "p0": p.p0, "p1": p.p1}
    if states:
        results.update({"t_final": states[-1].t, "alpha_final": states[-1].f.alpha.real,
                        "area_final": states[-1].diagnostics["area"]})
    if failure is not None:
        raise _Failure(failure, results)
    return results


def _run_lk_ode(cfg, out: Path, every: int) -> dict:
    num = cfg.numerics
    p = _herglotz(cfg)
    sign = cfg.raw.get("sign", "retracting")
    traj = lk_ode_integrate(np.array(cfg.points), p, num["t_end"], num["dt"], sign=sign,
                            rtol=num["rtol"], atol=num["atol"])
    w = np.asarray(traj.w).reshape(traj.t.size, -1)
    wm = np.exp(-traj.t)[:, None] * w
    wp = np.exp(traj.t)[:, None] * w
    cols = ["t"]
    for j in range(w.shape[1]):
        cols += [f"re_w{j}", f"im_w{j}", f"re_wm{j}", f"im_wm{j}", f"re_wp{j}", f"im_wp{j}"]
    rows = []
    for i, t in enumerate(traj.t):
        row = [t]
        for j in range(w.shape[1]):
            row += [w[i, j].real, w[i, j].imag, wm[i, j].real, wm[i, j].imag,
                    wp[i, j].real, wp[i, j].imag]
        rows.append(row)
    write_csv(out / "trajectory.csv", cols, rows)
    dump_json({"kind": "lk-ode", "points": cfg.points, "sign": sign,
               "final": {"w": w[-1], "e_minus_t_w": wm[-1], "e_plus_t_w": wp[-1]}},
              out / "fields.json")
    return {"sign": sign, "exit_time": traj.exit_time, "t_final": traj.t[-1], "rows": len(rows),
            "columns_note": "wm = e^{-t} w, wp = e^{t} w"}


def _run_douady_earle(cfg, out: Path, every: int) -> dict:
    name, block = cfg.driving
    if name == "mobius":
        phi = CircleHomeomorphism.mobius(block["a"], block["rotation"])
    else:
        phi = CircleHomeomorphism.from_field(_field(block), block["tau"])
    r, th, pts = polar_grid(cfg.grid)
    ext = np.empty(pts.shape, dtype=complex)
    mu = np.empty(pts.shape, dtype=complex)
    residual = 0.0
    iters = 0
    for idx in np.ndindex(pts.shape):
        sol = extend(phi, pts[idx], tol=cfg.numerics["rtol"])
        ext[idx] = sol.w
        mu[idx] = beltrami_of_extension(phi, pts[idx], sol)
        residual = max(residual, abs(sol.residual))
        iters = max(iters, sol.iterations)
    layout = _grid_layout(cfg.grid, r, th)
    dump_json({"kind": "douady-earle", "extension": {"grid": layout, "values": ext},
               "beltrami": {"grid": layout, "values": mu}}, out / "fields.json")
    results = {"max_residual": residual, "max_iterations": iters, "max_abs_mu": np.max(np.abs(mu))}
    if name == "mobius":
        results["max_mobius_deviation"] = np.max(np.abs(ext - mobius_map(pts, block["a"],
                                                                         block["rotation"])))
    return results


def _run_nu_from_field(cfg, out: Path, every: int) -> dict:
    d = _field(cfg.driving[1])
    r, th, pts = polar_grid(cfg.grid)
    nu = np.asarray(nu_from_field(d, pts))
    dump_json({"kind": "nu-from-field", "nu": {"grid": _grid_layout(cfg.grid, r, th), "values": nu}},
              out / "fields.json")
    return {"max_abs_nu": np.max(np.abs(nu))}


def _run_check_bounds(cfg, out: Path, every: int) -> dict:
    d = _field(cfg.driving[1])
    r, th, pts = polar_grid(cfg.grid)
    nu = np.abs(np.asarray(nu_from_field(d, pts)))
    b1 = sup_bound(d, pts)
    M = decay_constant(d)
    r2 = np.abs(pts) ** 2
    ratio = nu * r2 / (1.0 - r2)
    layout = _grid_layout(cfg.grid, r, th)
    dump_json({"kind": "check-bounds", "abs_nu": {"grid": layout, "values": nu},
               "bound1_margin": {"grid": layout, "values": b1 - nu},
               "bound2_ratio": {"grid": layout, "values": ratio}}, out / "fields.json")
    ok1 = bool(np.all(nu <= b1))
    ok2 = bool(np.all(ratio <= M * (1.0 + 1e-12)))
    results = {"bound1_min_margin": np.min(b1 - nu), "bound1_max_usage": np.max(nu / b1),
               "bound2_constant": M, "bound2_max_ratio": np.max(ratio),
               "bound1_ok": ok1, "bound2_ok": ok2}
    if not (ok1 and ok2):
        raise _Failure(QCFlowError("a pointwise bound on nu is violated"), results)
    return results


RUNNERS = {
    "heleshaw": _run_heleshaw,
    "lk-pde": _run_lk_pde,
    "lk-ode": _run_lk_ode,
    "douady-earle": _run_douady_earle,
    "nu-from-field": _run_nu_from_field,
    "check-bounds": _run_check_bounds,
}


class _Failure(Exception):
    def __init__(self, cause, results):
        super().__init__(str(cause))
        self.cause = cause
        self.results = results


def failure_reason(exc) -> dict:
    reason = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("t", "theta", "blowup_time", "point", "value", "residual", "iterations"):
        v = getattr(exc, attr, None)
        if v is not None:
            reason[attr] = v
    return reason


def versions() -> dict:
    return {"qcflow": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def run(cfg: ScenarioConfig, out_dir: str | None = None, snapshots: int = 10) -> int:
    """Execute a validated scenario; returns the exit status."""
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"config": cfg.raw, "versions": versions(), "kind": cfg.kind,
                "snapshots_every": snapshots, "csv_format": CSV_FORMAT}
    if cfg.kind in ("heleshaw", "lk-pde"):
        manifest["csv_columns"] = _map_columns(cfg.numerics["N"], cfg.numerics["moments"])
    start = time.perf_counter()
    status, reason, results = EXIT_OK, None, {}
    try:
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            results = RUNNERS[cfg.kind](cfg, out, max(1, snapshots))
    except _Failure as exc:
        status, reason, results = EXIT_NUMERICAL, failure_reason(exc.cause), exc.results
    except (QCFlowError, FloatingPointError) as exc:
        status, reason = EXIT_NUMERICAL, failure_reason(exc)
    manifest["wall_time_s"] = time.perf_counter() - start
    manifest["status"] = "ok" if status == EXIT_OK else "failed"
    if reason is not None:
        manifest["reason"] = reason
        print(json.dumps({"status": "failed", "reason": reason}, default=str), file=sys.stderr)
    dump_json({"kind": cfg.kind, "status": manifest["status"], "results": results,
               **({"reason": reason} if reason else {})}, out / "results.json")
    dump_json(manifest, out / "manifest.json")
    return status


def validate(path) -> tuple[int, dict]:
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        return EXIT_CONFIG, {"ok": False, "errors": [{"path": p, "message": m} for p, m in exc.errors]}
    return EXIT_OK, {"ok": True, "kind": cfg.kind,
                     "driving": cfg.driving[0] if cfg.driving else None}


def _threads_ok() -> bool:
    v = os.environ.get("QCFLOW_THREADS")
    return v is None or (v.isdigit() and int(v) >= 1)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qcflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a scenario")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--snapshots", type=int, default=10, metavar="EVERY",
                       help="write a field snapshot every EVERY trajectory rows")
    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")
    sub.add_parser("version", help="print version information")
    args = parser.parse_args(argv)

    if args.command == "version":
        print(json.dumps(versions()))
        return EXIT_OK
    if not _threads_ok():
        print(json.dumps({"ok": False, "errors": [{"path": "$env.QCFLOW_THREADS",
                                                    "message": "must be a positive integer"}]}),
              file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        code, report = validate(args.config)
        print(json.dumps(report))
        return code
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(json.dumps({"ok": False, "errors": [{"path": p, "message": m}
                                                  for p, m in exc.errors]}), file=sys.stderr)
        return EXIT_CONFIG
    if args.snapshots < 1:
        print(json.dumps({"ok": False, "errors": [{"path": "--snapshots",
                                                    "message": "must be >= 1"}]}), file=sys.stderr)
        return EXIT_CONFIG
    code = run(cfg, args.out, args.snapshots)
    print(str(Path(args.out or cfg.output_dir)))
    return code


if __name__ == "__main__":
    sys.exit(main())
