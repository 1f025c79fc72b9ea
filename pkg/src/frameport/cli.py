"""Command-line front end.

Every command prints one report (JSON by default, CSV with ``--format csv``)
embedding the SHA-256 of each input file, all tolerances and grid
parameters, and a ``provenance`` block naming the formula behind each
number. Exit codes: 0 success, 2 invalid input, 3 unsupported ``p``/dim.
"""

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import __version__, duals, frames, ot, psd, schemas
from .measure import MeasureError, from_dict, moment, mean

COMMANDS = (
    "frame-report", "ellipsoid", "distance", "closest-fiber", "closest-tight",
    "geodesic", "dual-check", "dual-construct", "delta-dual", "pfp", "oracle-ot",
)
DEFAULT_TOL = 1e-9
TOL_ENV = "FRAMEPORT_TOL"


class InputError(ValueError):
    """Exit code 2."""


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    p: float = 2.0
    tol: float = None
    grid: int = frames.DEFAULT_GRID
    fmt: str = "json"
    seed: int = None
    t: float = None
    a: float = None
    lam: float = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if not self.p >= 1:
            raise InputError("--p must be >= 1")
        if self.tol is not None and not self.tol > 0:
            raise InputError("--tol must be > 0")
        if self.grid < 1:
            raise InputError("--grid must be positive")
        if self.fmt not in ("json", "csv"):
            raise InputError("--format must be json or csv")


@dataclass
class _Input:
    path: str
    sha256: str
    kind: str
    data: dict


def _load(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except (ValueError, UnicodeDecodeError) as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    kind = schemas.detect_kind(data)
    if kind is None:
        raise InputError(f"{path}: unrecognised input object")
    try:
        jsonschema.validate(data, schemas.INPUT_KINDS[kind])
    except jsonschema.ValidationError as exc:
        raise InputError(f"{path}: {exc.message}") from exc
    return _Input(path, hashlib.sha256(raw).hexdigest(), kind, data)


def _as_measure(inp):
    if inp.kind != "measure":
        raise InputError(f"{inp.path}: expected a measure, got a {inp.kind}")
    return from_dict(inp.data)


def _as_matrix(inp):
    if inp.kind == "matrix":
        return psd.matrix_from_dict(inp.data)
    if inp.kind == "measure":
        return frames.frame_operator(from_dict(inp.data))
    raise InputError(f"{inp.path}: expected a matrix or measure, got a {inp.kind}")


def _take(inputs, kinds, command):
    if len(inputs) not in kinds:
        want = " or ".join(str(k) for k in sorted(kinds))
        raise InputError(f"{command} needs {want} --input file(s), got {len(inputs)}")


def _oracle_ok(mu, nu):
    return mu.size * nu.size <= ot.MAX_CELLS


def _frame_report(cfg, inputs, tol):
    _take(inputs, {1}, cfg.command)
    mu = _as_measure(inputs[0])
    rep = frames.frame_report(mu, cfg.p, frame_tol=tol["frame_tol"], grid=cfg.grid)
    prov = {"bounds": "eigen" if rep.method == "eigen" else "sphere-grid"}
    return rep.to_dict(), prov


def _ellipsoid(cfg, inputs, tol):
    _take(inputs, {1}, cfg.command)
    ell = frames.frame_ellipsoid(_as_measure(inputs[0]))
    out = ell.to_dict()
    out["degenerate"] = ell.is_degenerate
    return out, {"semi_lengths": "eigen"}


def _distance(cfg, inputs, tol):
    _take(inputs, {2}, cfg.command)
    S, T = _as_matrix(inputs[0]), _as_matrix(inputs[1])
    if S.shape != T.shape:
        raise InputError("matrices have different dimensions")
    rS, rT = psd.sqrt_psd(S), psd.sqrt_psd(T)
    out = {
        "bures_squared": psd.bures_squared(S, T),
        "d_W": psd.bures_distance(S, T),
        "op_lower": float(np.linalg.norm(rS - rT, 2)),
        "fro_upper": float(np.linalg.norm(rS - rT)),
    }
    prov = {"bures_squared": "gelbrich", "d_W": "gelbrich",
            "op_lower": "sqrt-difference", "fro_upper": "sqrt-difference"}
    if inputs[0].kind == inputs[1].kind == "measure":
        mu, nu = _as_measure(inputs[0]), _as_measure(inputs[1])
        if _oracle_ok(mu, nu):
            out["oracle_w2_squared"] = ot.solve_exact(mu, nu, 2).cost
            prov["oracle_w2_squared"] = "oracle"
    return out, prov


def _closest_fiber(cfg, inputs, tol):
    _take(inputs, {2}, cfg.command)
    mu, T = _as_measure(inputs[0]), _as_matrix(inputs[1])
    nu, dist = frames.closest_in_fiber(mu, T)
    out = {
        "measure": nu.to_dict(),
        "distance": dist,
        "optimal_map": psd.optimal_map(frames.frame_operator(mu), T).tolist(),
    }
    prov = {"distance": "fiber-trace", "measure": "optimal-linear-map"}
    if _oracle_ok(mu, nu):
        out["oracle_distance"] = ot.wasserstein_p(mu, nu, 2)
        prov["oracle_distance"] = "oracle"
    return out, prov


def _closest_tight(cfg, inputs, tol):
    _take(inputs, {1, 2}, cfg.command)
    mu = _as_measure(inputs[0])
    T = _as_matrix(inputs[1]) if len(inputs) == 2 else np.eye(mu.dim)
    c_min, nu, dist = frames.closest_on_ray(mu, T)
    out = {"c_min": c_min, "measure": nu.to_dict(), "distance": dist}
    return out, {"c_min": "ray-minimiser", "distance": "fiber-trace"}


def _geodesic(cfg, inputs, tol):
    _take(inputs, {2}, cfg.command)
    if cfg.t is None:
        raise InputError("geodesic needs --t")
    mu, T = _as_measure(inputs[0]), _as_matrix(inputs[1])
    A = psd.optimal_map(frames.frame_operator(mu), T)
    try:
        nu = frames.geodesic(mu, A, cfg.t)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = {"t": cfg.t, "measure": nu.to_dict(), "optimal_map": A.tolist()}
    return out, {"measure": "interpolated-linear-map"}


def _dual_check(cfg, inputs, tol):
    _take(inputs, {1, 2}, cfg.command)
    if inputs[0].kind != "coupling":
        raise InputError(f"{inputs[0].path}: expected a coupling")
    gamma = ot.coupling_from_dict(inputs[0].data)
    M = _as_matrix(inputs[1]) if len(inputs) == 2 else None
    cert = duals.is_m_dual(gamma, M, tol["dual_tol"])
    out = {"certificate": cert.to_dict()}
    prov = {"certificate": "coupling-frame-operator"}
    is_identity = M is None or np.allclose(M, np.eye(gamma.left_dim), rtol=0, atol=0)
    if cert.valid and is_identity:
        mu, nu = gamma.left_marginal(), gamma.right_marginal()
        out["dual_distance"] = duals.dual_distance_check(mu, nu, gamma, tol["dual_tol"]).to_dict()
        prov["dual_distance"] = "closed-form"
    return out, prov


def _dual_construct(cfg, inputs, tol):
    _take(inputs, {1, 2}, cfg.command)
    mu = _as_measure(inputs[0])
    if len(inputs) == 2:
        if inputs[1].kind != "h-table":
            raise InputError(f"{inputs[1].path}: expected an h-table")
        h = np.asarray(inputs[1].data["h"], dtype=float)
        h_source = "file"
    elif cfg.seed is not None:
        h = np.random.default_rng(cfg.seed).standard_normal(mu.atoms.shape)
        h_source = "seeded-normal"
    else:
        h = np.zeros(mu.atoms.shape)
        h_source = "zero"
    nu, gamma = duals.pushforward_dual(mu, h)
    cert = duals.is_m_dual(gamma, None, tol["dual_tol"])
    out = {
        "measure": nu.to_dict(),
        "coupling": gamma.to_dict(),
        "certificate": cert.to_dict(),
        "h_source": h_source,
    }
    return out, {"measure": "pushforward-dual", "certificate": "coupling-frame-operator"}


def _delta_dual(cfg, inputs, tol):
    _take(inputs, {0}, cfg.command)
    if cfg.a is None or cfg.lam is None:
        raise InputError("delta-dual needs --a and --lam")
    nu = duals.delta_dual_family(cfg.a, cfg.lam)
    gamma = duals.point_mass_dual_coupling(cfg.a, nu)
    cert = duals.is_m_dual(gamma, None, tol["dual_tol"])
    out = {
        "a": cfg.a,
        "lambda": cfg.lam,
        "measure": nu.to_dict(),
        "mean": float(mean(nu)[0]),
        "second_moment": moment(nu, 2),
        "coupling": gamma.to_dict(),
        "certificate": cert.to_dict(),
    }
    return out, {"measure": "two-atom-family", "certificate": "coupling-frame-operator"}


def _pfp(cfg, inputs, tol):
    _take(inputs, {1}, cfg.command)
    mu = _as_measure(inputs[0])
    rep = frames.pfp_minimizer_check(mu, cfg.p, tol=tol["frame_tol"], grid=cfg.grid)
    out = rep.to_dict()
    return out, {"pfp": "double-sum", "min_gap": rep.method}


def _oracle_ot(cfg, inputs, tol):
    _take(inputs, {2}, cfg.command)
    mu, nu = _as_measure(inputs[0]), _as_measure(inputs[1])
    plan = ot.solve_exact(mu, nu, cfg.p)
    out = {
        "cost": plan.cost,
        "distance": plan.distance,
        "coupling": plan.coupling.to_dict(),
        "min_reduced_cost": plan.min_reduced_cost,
        "pivots": plan.pivots,
    }
    return out, {"cost": "oracle"}


_HANDLERS = {
    "frame-report": _frame_report,
    "ellipsoid": _ellipsoid,
    "distance": _distance,
    "closest-fiber": _closest_fiber,
    "closest-tight": _closest_tight,
    "geodesic": _geodesic,
    "dual-check": _dual_check,
    "dual-construct": _dual_construct,
    "delta-dual": _delta_dual,
    "pfp": _pfp,
    "oracle-ot": _oracle_ot,
}


def _tolerances(cfg):
    tol = cfg.tol
    if tol is None and os.environ.get(TOL_ENV):
        try:
            tol = float(os.environ[TOL_ENV])
        except ValueError as exc:
            raise InputError(f"{TOL_ENV} is not a number") from exc
        if not tol > 0:
            raise InputError(f"{TOL_ENV} must be > 0")
    if tol is None:
        return {"frame_tol": DEFAULT_TOL, "dual_tol": duals.DUAL_TOL}
    return {"frame_tol": tol, "dual_tol": tol}


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for key in obj:
            yield from _flatten(obj[key], f"{prefix}.{key}" if prefix else key)
    elif isinstance(obj, list):
        for i, item in enumerate(obj):
            yield from _flatten(item, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _to_csv(report):
    rows = list(_flatten(report))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([k for k, _ in rows])
    writer.writerow(["" if v is None else json.dumps(v) if isinstance(v, bool) else v
                     for _, v in rows])
    return buf.getvalue()


def _error(code, exc):
    return {"error": {"code": code, "type": type(exc).__name__, "message": str(exc)}}


def run(cfg):
    """Execute one command; returns ``(exit_code, report_dict)``."""
    try:
        tol = _tolerances(cfg)
        inputs = [_load(path) for path in cfg.inputs]
        result, provenance = _HANDLERS[cfg.command](cfg, inputs, tol)
    except frames.UnsupportedError as exc:
        return 3, _error(3, exc)
    except (InputError, MeasureError, psd.NotPSDError, psd.ShapeError,
            frames.NotAFrameError, duals.DualError, ValueError) as exc:
        return 2, _error(2, exc)
    report = {
        "command": cfg.command,
        "version": __version__,
        "inputs": [{"path": i.path, "sha256": i.sha256, "kind": i.kind} for i in inputs],
        "parameters": {
            "p": cfg.p, "grid": cfg.grid, "seed": cfg.seed,
            "t": cfg.t, "a": cfg.a, "lambda": cfg.lam,
        },
        "tolerances": dict(tol, weight_tol=1e-12, unit_tol=1e-10),
        "provenance": provenance,
        "result": result,
    }
    if cfg.command in ("dual-check", "dual-construct", "delta-dual"):
        report["parameters"]["probe_set"] = result["certificate"]["probe_set"]
    return 0, report


def render(report, fmt="json"):
    if fmt == "csv" and "error" not in report:
        return _to_csv(report)
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", default=[], metavar="FILE",
                        help="input JSON file (repeatable)")
    common.add_argument("--p", type=float, default=2.0, help="exponent p >= 1")
    common.add_argument("--tol", type=float, default=None,
                        help=f"tolerance override (also via ${TOL_ENV})")
    common.add_argument("--grid", type=int, default=frames.DEFAULT_GRID,
                        help="sphere grid size for p != 2")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=None)
    parser = argparse.ArgumentParser(prog="frameport", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "geodesic":
            sp.add_argument("--t", type=float, required=True)
        if name == "delta-dual":
            sp.add_argument("--a", type=float, required=True)
            sp.add_argument("--lam", type=float, required=True)
    return parser


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            return 0
        stdout.write(render(_error(2, InputError("invalid command line"))))
        return 2
    try:
        cfg = RunConfig(
            command=args.command, inputs=args.input, p=args.p, tol=args.tol,
            grid=args.grid, fmt=args.fmt, seed=args.seed,
            t=getattr(args, "t", None), a=getattr(args, "a", None),
            lam=getattr(args, "lam", None),
        )
    except InputError as exc:
        stdout.write(render(_error(2, exc)))
        return 2
    code, report = run(cfg)
    stdout.write(render(report, cfg.fmt))
    return code

