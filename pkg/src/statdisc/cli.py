"""Command-line front end.

Every command loads a quadric (``--input``), resolves parameters and writes a
single JSON report. Exit codes: 0 completed/PASS, 1 mathematical failure
(tolerance exceeded, solver failure, internal inconsistency), 2 input error.
Logging goes to stderr at the level named by ``STATDISC_LOG``.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .disc import (fourier_coefficients, make_disc, sample_boundary, verify_attachment,
                   verify_lift_holomorphic, verify_pinning)
from .errors import InputError, InternalInconsistency, NoDirectionFound, StatDiscError
from .io import dumps, load, load_quadric, loads, parse_vector, vector_from_config
from .jets import (center_jacobian, center_map, jet1, jet1_numeric, jet_map, jet_map_jacobian,
                   necessity_check)
from .minimality import is_defective, is_stationary_minimal, minimality_equivalences, orbit_basis
from .pencil import factorize
from .quadric import find_levi_direction, is_D_nondegenerate, is_fully_nondegenerate
from .scan import scan
from .tolerances import DEFAULT, Tolerances

log = logging.getLogger("statdisc")

COMMANDS = ("check", "solve-x", "disc", "verify", "jet", "jacobian", "center", "minimal",
            "defect", "scan")


@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    a: object = None
    b0: object = None
    V: object = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    samples: int = 256
    trials: int = 256
    output: Optional[str] = None
    dump: bool = False
    fourier: bool = False
    grid: Optional[dict] = None


def _parse_tol(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise InputError(f"--tol value for {name!r} is not a number") from None
    return out


def config_from_args(args) -> RunConfig:
    """Merge an optional ``--config`` JSON file with command-line flags (flags win)."""
    base: dict = {}
    cfg_dir = Path(".")
    if args.config:
        base = load(args.config)
        if not isinstance(base, dict):
            raise InputError("config file must hold a JSON object")
        cfg_dir = Path(args.config).parent
        if base.get("command", args.command) != args.command:
            raise InputError(f"config is for {base['command']!r}, not {args.command!r}")
    input_path = args.input
    if input_path is None and base.get("input") is not None:
        input_path = str(cfg_dir / base["input"])
    tol = dict(base.get("tol", {}))
    tol.update(_parse_tol(args.tol))
    grid = base.get("grid")
    if args.grid is not None:
        grid = loads(args.grid)

    def pick(name, default):
        v = getattr(args, name)
        return v if v is not None else base.get(name, default)

    return RunConfig(
        command=args.command, input_path=input_path,
        a=pick("a", None), b0=pick("b0", None), V=pick("V", None),
        tolerances=tol, seed=int(pick("seed", 0)), samples=int(pick("samples", 256)),
        trials=int(pick("trials", 256)), output=args.output or base.get("output"),
        dump=bool(args.dump or base.get("dump", False)),
        fourier=bool(args.fourier or base.get("fourier", False)), grid=grid,
    )


def _vec(value, length, real=False):
    if isinstance(value, str):
        return parse_vector(value, length, real)
    return vector_from_config(value, length, real)


class _Context:
    def __init__(self, cfg: RunConfig):
        if cfg.input_path is None:
            raise InputError("--input is required")
        self.cfg = cfg
        self.q = load_quadric(cfg.input_path)
        try:
            self.tols: Tolerances = DEFAULT.override(**cfg.tolerances)
        except KeyError as exc:
            raise InputError(f"unknown tolerance name(s): {exc.args[0]}") from None
        q = self.q
        self.levi = None
        if cfg.b0 is None:
            self.levi = find_levi_direction(q, cfg.trials, cfg.seed, tol=self.tols.invertibility)
            self.b0 = self.levi.b0
        else:
            self.b0 = _vec(cfg.b0, q.d, real=True)
        self.a = np.zeros(q.d, dtype=complex) if cfg.a is None else _vec(cfg.a, q.d)
        self.V = np.ones(q.n, dtype=complex) if cfg.V is None else _vec(cfg.V, q.n)

    @property
    def params(self) -> dict:
        return {"a": self.a, "b0": self.b0, "V": self.V}

    def disc(self):
        return make_disc(self.q, self.a, self.b0, self.V, tols=self.tols)


def _report_dict(rep) -> dict:
    out = {
        "matrix": rep.matrix,
        "singular_values": rep.singular_values,
        "sigma_min": rep.sigma_min,
        "condition_number": rep.condition_number,
        "threshold": rep.threshold,
        "verdict": rep.verdict,
    }
    if rep.realified is not None:
        out["realified"] = rep.realified
        out["realified_singular_values"] = np.linalg.svd(rep.realified, compute_uv=False)
    return out


def _check_dict(c) -> dict:
    return {"residual": c.residual, "threshold": c.threshold, "passed": c.passed}


def _certificate_dict(c) -> dict:
    return {"minimal": c.minimal, "gram": c.gram, "gram_min_eigenvalue": c.gram_min_eigenvalue,
            "rank_sigma_min": c.rank_sigma_min, "threshold": c.threshold,
            "kernel_witness": c.kernel_witness}


def cmd_check(ctx: _Context):
    res = {"n": ctx.q.n, "d": ctx.q.d, "b0": ctx.b0}
    if ctx.levi is not None:
        res["levi_sigma_min"] = ctx.levi.smallest_singular_value
    if ctx.cfg.V is not None:
        t = ctx.tols.invertibility
        res["D_nondegenerate"] = _report_dict(is_D_nondegenerate(ctx.q, ctx.b0, ctx.V, t))
        res["fully_nondegenerate"] = _report_dict(is_fully_nondegenerate(ctx.q, ctx.b0, ctx.V, t))
    return True, res


def cmd_solve_x(ctx: _Context):
    fact = factorize(ctx.q, ctx.a, ctx.b0, tols=ctx.tols)
    res = {"X": fact.X, "norm_X": fact.norm_X, "iterations": fact.iterations,
           "diagnostics": fact.diagnostics}
    if ctx.cfg.dump:
        res["factorization"] = {"a": fact.a, "b": fact.b, "b0": fact.b0, "X": fact.X, "B": fact.B,
                                "K": fact.K, "P": fact.P, "A_sum": fact.A_sum}
    return True, res


def cmd_disc(ctx: _Context):
    disc = ctx.disc()
    data = sample_boundary(disc, ctx.cfg.samples)
    res = {"samples": ctx.cfg.samples, "iy": disc.iy,
           "boundary": {k: data[k] for k in ("zeta", "h", "g", "htilde", "gtilde")}}
    if ctx.cfg.fourier:
        N = ctx.cfg.samples
        idx = np.arange(-(N // 2) + 1, N // 2)
        res["fourier"] = {"index": idx}
        for k in ("h", "g", "htilde", "gtilde"):
            res["fourier"][k] = fourier_coefficients(data[k])[idx % N]
    return True, res


def _pow2_at_least(n, low):
    p = low
    while p < n:
        p *= 2
    return p


def cmd_verify(ctx: _Context):
    disc = ctx.disc()
    t = ctx.tols
    att = verify_attachment(disc, max(ctx.cfg.samples, 8), t.attachment)
    hol = verify_lift_holomorphic(disc, _pow2_at_least(ctx.cfg.samples, 128), t.holomorphy)
    pin = verify_pinning(disc, t.pinning)
    ok = att.passed and hol.passed and pin.passed
    res = {"attachment": _check_dict(att), "pinning": _check_dict(pin),
           "holomorphy": {"max_negative": hol.max_negative, "max_coefficient": hol.max_coefficient,
                          "threshold": hol.threshold, "passed": hol.passed},
           "factorization": disc.fact.diagnostics}
    return ok, res


def cmd_jet(ctx: _Context):
    disc = ctx.disc()
    exact = np.concatenate(jet1(disc))
    numeric = np.concatenate(jet1_numeric(disc))
    rel = float(np.max(np.abs(exact - numeric)) / max(np.max(np.abs(exact)), 1e-300))
    V, Q, ima = jet_map(disc)
    n, d = ctx.q.n, ctx.q.d
    res = {"jet1": {"dh": exact[:n], "dg": exact[n:n + d], "dgtilde": exact[n + d:]},
           "jet1_numeric": {"dh": numeric[:n], "dg": numeric[n:n + d], "dgtilde": numeric[n + d:]},
           "relative_error": rel, "normalized": {"V": V, "quadratic": Q, "im_a": ima}}
    return rel <= 1e-6, res


def cmd_jacobian(ctx: _Context):
    t = ctx.tols.invertibility
    rep = jet_map_jacobian(ctx.q, ctx.a, ctx.b0, ctx.V, tol=t)
    nec = necessity_check(ctx.q, ctx.a, ctx.b0, ctx.V)
    res = {"jacobian": _report_dict(rep), "necessity": nec.status,
           "minimality": _certificate_dict(nec.minimality)}
    if not np.any(ctx.a):
        res["D_nondegenerate"] = _report_dict(is_D_nondegenerate(ctx.q, ctx.b0, ctx.V, t))
    if not nec.consistent:
        raise InternalInconsistency("invertible 1-jet criterion without stationary minimality")
    return True, res


def cmd_center(ctx: _Context):
    disc = ctx.disc()
    t = ctx.tols.invertibility
    V, G = center_map(disc)
    rep = center_jacobian(ctx.q, ctx.a, ctx.b0, ctx.V, tol=t)
    res = {"center": {"h0": V, "g0": G}, "jacobian": _report_dict(rep)}
    if not np.any(ctx.a):
        res["fully_nondegenerate"] = _report_dict(is_fully_nondegenerate(ctx.q, ctx.b0, ctx.V, t))
    return True, res


def cmd_minimal(ctx: _Context):
    disc = ctx.disc()
    t = ctx.tols
    cert = is_stationary_minimal(ctx.q, disc.X, disc.V, t.invertibility, t.witness)
    eq = minimality_equivalences(ctx.q, ctx.a, ctx.b0, ctx.V)
    res = {"certificate": _certificate_dict(cert),
           "orbit_dimension": orbit_basis(disc.X, disc.V).real_dimension,
           "equivalences": {"nondefective": eq.nondefective, "h0": eq.minimal_h0,
                            "dh0": eq.minimal_dh0, "dh1": eq.minimal_dh1}}
    return True, res


def cmd_defect(ctx: _Context):
    disc = ctx.disc()
    rep = is_defective(disc, witness_tol=ctx.tols.witness)
    res = {"defective": rep.defective, "certificate": _certificate_dict(rep.certificate)}
    if rep.defective:
        res["witness"] = {"lambda": rep.witness, "boundary_residual": rep.boundary_residual,
                          "fourier_max": rep.fourier_max, "threshold": rep.threshold}
    return True, res


def cmd_scan(ctx: _Context):
    if ctx.cfg.grid is None:
        raise InputError("scan needs a grid (--grid JSON or 'grid' in --config)")
    result = scan(ctx.q, ctx.b0, ctx.cfg.grid)
    return True, {"grid": result.grid, "records": result.records, "summary": result.summary}


HANDLERS = {
    "check": cmd_check, "solve-x": cmd_solve_x, "disc": cmd_disc, "verify": cmd_verify,
    "jet": cmd_jet, "jacobian": cmd_jacobian, "center": cmd_center, "minimal": cmd_minimal,
    "defect": cmd_defect, "scan": cmd_scan,
}


def run(cfg: RunConfig):
    """Execute one command; returns ``(exit_code, report)``."""
    report = {"command": cfg.command, "version": __version__, "input": cfg.input_path}
    try:
        ctx = _Context(cfg)
        report["parameters"] = ctx.params
        report["tolerances"] = ctx.tols.as_dict()
        ok, result = HANDLERS[cfg.command](ctx)
        report["result"] = result
        report["status"] = "PASS" if ok else "FAIL"
        return (0 if ok else 1), report
    except InputError as exc:
        report["status"] = "ERROR"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return 2, report
    except StatDiscError as exc:
        report["status"] = "FAIL"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, NoDirectionFound):
            report["error"]["best_direction"] = exc.best
            report["error"]["best_sigma"] = exc.sigma
        return 1, report


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="quadric JSON file")
    common.add_argument("--config", help="JSON run configuration (flags override it)")
    common.add_argument("--a", help="complex d-vector, e.g. '0.1,0;0,0.02'")
    common.add_argument("--b0", help="real d-vector, e.g. '1,0' (default: searched)")
    common.add_argument("--V", help="complex n-vector (default: all ones)")
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--trials", type=int, default=None,
                        help="random directions tried when searching for b0")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--dump", action="store_true", help="serialize the factorization")
    common.add_argument("--fourier", action="store_true", help="emit Fourier coefficient table")
    common.add_argument("--grid", help="scan grid as inline JSON")

    parser = argparse.ArgumentParser(prog="statdisc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    level = os.environ.get("STATDISC_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        cfg = config_from_args(args)
    except InputError as exc:
        print(dumps({"command": args.command, "status": "ERROR", "version": __version__,
                     "error": {"type": type(exc).__name__, "message": str(exc)}}), end="")
        return 2
    code, report = run(cfg)
    text = dumps(report)
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
