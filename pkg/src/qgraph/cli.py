"""Command-line front end: ``qgraph <command> --input graph.json``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import interval
from .asymptotics import UndeterminedProfile, profile
from .graph import StructureError, graph_from_json, validate_self_adjoint
from .interval import IntegrationError
from .secular import PoleError, find_eigenvalues
from .spectral import LimitRequired, QUAD_RTOL, spectral_determinant, zeta, zeta_prime_zero

COMMANDS = ("validate", "eigenvalues", "det", "zeta", "asymptotics", "selftest")
FORMATS = ("json", "csv", "text")

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_PROFILE = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, **where):
        super().__init__(message)
        self.code, self.kind, self.where = code, kind, where

    def to_json(self) -> dict:
        out = {"error": self.kind, "message": str(self)}
        out.update({k: v for k, v in self.where.items() if v is not None})
        return out


@dataclass
class RunConfig:
    command: str
    input: Path | None = None
    out: Path | None = None
    fmt: str = "json"
    gammas: list[float] = field(default_factory=list)
    s_values: list[float] = field(default_factory=list)
    k_max: float = 20.0
    grid_step: float | None = None
    tol_ode: float | None = None
    tol_quad: float = QUAD_RTOL
    truncation_j: int | None = None
    limit: bool = False

    def check(self):
        for name in ("tol_ode", "tol_quad", "grid_step"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise CliError(EXIT_PARSE, "parse", f"{name} must be positive", field=name)
        if self.k_max <= 0:
            raise CliError(EXIT_PARSE, "parse", "k-max must be positive", field="k_max")
        if self.command != "selftest" and self.input is None:
            raise CliError(EXIT_PARSE, "parse", "--input is required", field="input")
        if self.command in ("det", "zeta") and not self.gammas:
            raise CliError(EXIT_PARSE, "parse", "give --gamma or --gamma-grid", field="gamma")
        if self.command == "zeta" and not self.s_values:
            raise CliError(EXIT_PARSE, "parse", "give --s", field="s")


# -- output ------------------------------------------------------------------

def _encode(obj) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".12e") if math.isfinite(x) else "null"
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _fmt(x) -> str:
    return format(float(x), ".12e")


def emit_report(command: str, payload: dict, fmt: str = "json") -> str:
    """Render a command payload; JSON has sorted keys and ``%.12e`` floats."""
    if fmt == "json":
        return _encode(payload) + "\n"
    if fmt == "csv":
        return _csv(command, payload)
    return _text(command, payload)


def _csv(command: str, payload: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "eigenvalues":
        w.writerow(["j", "E_j", "multiplicity"])
        for j, lev in enumerate(payload["levels"], 1):
            w.writerow([j, _fmt(lev["E"]), lev["multiplicity"]])
    elif command == "det":
        w.writerow(["gamma", "S", "dirichlet_factor", "secular_factor_re", "secular_factor_im"])
        for r in payload["results"]:
            w.writerow([_fmt(r["gamma"]), _fmt(r["value"]), _fmt(r["dirichlet_factor"]),
                        _fmt(r["secular_factor"][0]), _fmt(r["secular_factor"][1])])
    elif command == "zeta":
        w.writerow(["s", "gamma", "zeta_re", "zeta_im", "error", "zeta_prime_0"])
        for r in payload["results"]:
            w.writerow([_fmt(r["s"][0]), _fmt(r["gamma"]), _fmt(r["value"][0]),
                        _fmt(r["value"][1]), _fmt(r["error"]), _fmt(r["zeta_prime_0"])])
    elif command == "asymptotics":
        w.writerow(["j", "c_j_re", "c_j_im"])
        for j, c in enumerate(payload["coefficients"]):
            w.writerow([j, c[0], c[1]])
    elif command == "selftest":
        w.writerow(["case", "status", "detail"])
        for c in payload["cases"]:
            w.writerow([c["name"], c["status"], c["detail"]])
    else:
        w.writerow(["valid", "rank", "hermitian_residual", "violations"])
        w.writerow([payload["valid"], payload["rank"], _fmt(payload["hermitian_residual"]),
                    "; ".join(payload["violations"])])
    return buf.getvalue()


def _text(command: str, payload: dict) -> str:
    lines = []
    if command == "eigenvalues":
        lines.append(f"{len(payload['levels'])} levels with k <= {payload['k_max']:g}")
        for j, lev in enumerate(payload["levels"], 1):
            lines.append(f"  {j:4d}  E = {lev['E']:.12g}  (x{lev['multiplicity']})")
        lines += [f"  warning: {m}" for m in payload["warnings"]]
    elif command == "det":
        for r in payload["results"]:
            tag = " (limit)" if r["extrapolated"] else ""
            lines.append(f"gamma = {r['gamma']:.6g}{tag}  S = {r['value']:.12g}")
    elif command == "zeta":
        for r in payload["results"]:
            lines.append(f"s = {r['s'][0]:.6g}  gamma = {r['gamma']:.6g}  "
                         f"zeta = {r['value'][0]:.12g}  (err {r['error']:.1e})")
    elif command == "asymptotics":
        c = payload["c_N"]
        lines.append(f"N = {payload['N']}  c_N = {c[0]} + {c[1]}i  P = {payload['P']}")
    elif command == "selftest":
        for c in payload["cases"]:
            lines.append(f"{c['status']:5s} {c['name']}: {c['detail']}")
    else:
        lines.append("valid" if payload["valid"] else "invalid")
        lines += [f"  {v}" for v in payload["violations"]]
        lines += [f"  warning: {w}" for w in payload["warnings"]]
    return "\n".join(lines) + "\n"


# -- input -------------------------------------------------------------------

def load_spec(path: Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_PARSE, "parse", f"cannot read input: {exc}", path=str(path)) from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, "parse", exc.msg, path=str(path), line=exc.lineno) from exc
    try:
        return graph_from_json(raw)
    except KeyError as exc:
        raise CliError(EXIT_PARSE, "parse", "missing field", path=str(path),
                       field=str(exc.args[0])) from exc
    except StructureError as exc:
        raise CliError(EXIT_VALIDATION, "validation", str(exc), path=str(path)) from exc
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise CliError(EXIT_PARSE, "parse", str(exc), path=str(path)) from exc


def parse_grid(text: str) -> list[float]:
    """``start:stop:count`` (linear) or ``start:stop:count:log``."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
        raise ValueError(f"bad grid {text!r}; expected start:stop:count[:log]")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("grid count must be positive")
    if len(parts) == 4 and parts[3] == "log":
        if start <= 0 or stop <= 0:
            raise ValueError("log grid needs positive ends")
        return [float(x) for x in np.geomspace(start, stop, count)]
    return [float(x) for x in np.linspace(start, stop, count)]


def _thread_cap() -> int | None:
    raw = os.environ.get("QGRAPH_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise CliError(EXIT_PARSE, "parse", "QGRAPH_THREADS must be an integer",
                       field="QGRAPH_THREADS") from None
    if n < 1:
        raise CliError(EXIT_PARSE, "parse", "QGRAPH_THREADS must be positive",
                       field="QGRAPH_THREADS")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgraph", description=__doc__)
    p.add_argument("command_pos", nargs="?", choices=COMMANDS, metavar="command")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--input", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--gamma", type=float, action="append", default=[])
    p.add_argument("--gamma-grid")
    p.add_argument("--s", type=float, action="append", default=[])
    p.add_argument("--k-max", type=float, default=20.0)
    p.add_argument("--grid-step", type=float)
    p.add_argument("--tol-ode", type=float)
    p.add_argument("--tol-quad", type=float, default=QUAD_RTOL)
    p.add_argument("--truncation-J", dest="truncation_j", type=int)
    p.add_argument("--limit", action="store_true", help="extrapolate S(gamma) to gamma = 0")
    p.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
    return p


def config_from_args(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    command = args.command or args.command_pos
    if command is None:
        raise CliError(EXIT_PARSE, "parse", "no command given", field="command")
    if args.command and args.command_pos and args.command != args.command_pos:
        raise CliError(EXIT_PARSE, "parse", "conflicting commands", field="command")
    gammas = list(args.gamma)
    if args.gamma_grid:
        try:
            gammas += parse_grid(args.gamma_grid)
        except ValueError as exc:
            raise CliError(EXIT_PARSE, "parse", str(exc), field="gamma_grid") from exc
    if args.limit and not gammas:
        gammas = [0.0]
    cfg = RunConfig(command, args.input, args.out, args.fmt, gammas, list(args.s), args.k_max,
                    args.grid_step, args.tol_ode, args.tol_quad, args.truncation_j, args.limit)
    cfg.check()
    return cfg


# -- commands ----------------------------------------------------------------

def _validate(graph, mc, cfg):
    rep = validate_self_adjoint(mc, graph)
    return {"valid": rep.valid, "violations": list(rep.violations), "rank": rep.rank,
            "hermitian_residual": rep.hermitian_residual, "local": rep.local,
            "warnings": list(rep.warnings)}


def _require_valid(graph, mc):
    rep = validate_self_adjoint(mc, graph)
    if not rep.valid:
        raise CliError(EXIT_VALIDATION, "validation", "; ".join(rep.violations))


def _eigenvalues(graph, mc, cfg):
    spec = find_eigenvalues(graph, mc, cfg.k_max, cfg.grid_step)
    return {"k_max": spec.k_max, "warnings": list(spec.warnings),
            "levels": [{"E": E, "multiplicity": m, "residual": r}
                       for (E, m), r in zip(spec.levels, spec.residuals)]}


def _det(graph, mc, cfg):
    out = []
    for g in cfg.gammas:
        res = spectral_determinant(graph, mc, g, limit=cfg.limit and g == 0,
                                   order=cfg.truncation_j)
        out.append(res.to_json())
    return {"results": out}


def _zeta(graph, mc, cfg):
    out = []
    for g in cfg.gammas:
        zp = zeta_prime_zero(graph, mc, g)
        for s in cfg.s_values:
            rec = zeta(graph, mc, s, g, rtol=cfg.tol_quad, order=cfg.truncation_j).to_json()
            rec["zeta_prime_0"] = zp
            out.append(rec)
    return {"results": out}


def _asymptotics(graph, mc, cfg):
    return profile(graph, mc, cfg.truncation_j).to_json()


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute ``cfg``; returns ``(exit status, rendered report)``."""
    if cfg.command == "selftest":
        from .selftest import run_selftest
        payload = run_selftest()
        status = EXIT_OK if payload["passed"] else EXIT_NUMERIC
        return status, emit_report("selftest", payload, cfg.fmt)
    graph, mc = load_spec(cfg.input)
    if cfg.tol_ode is not None:
        interval.configure(rtol=cfg.tol_ode)
    if cfg.command == "validate":
        payload = _validate(graph, mc, cfg)
        return (EXIT_OK if payload["valid"] else EXIT_VALIDATION,
                emit_report("validate", payload, cfg.fmt))
    _require_valid(graph, mc)
    handler = {"eigenvalues": _eigenvalues, "det": _det, "zeta": _zeta,
               "asymptotics": _asymptotics}[cfg.command]
    try:
        payload = handler(graph, mc, cfg)
    except UndeterminedProfile as exc:
        raise CliError(EXIT_PROFILE, "undetermined_profile", str(exc)) from exc
    except (IntegrationError, PoleError, LimitRequired, ArithmeticError, ValueError) as exc:
        raise CliError(EXIT_NUMERIC, "numeric", str(exc)) from exc
    return EXIT_OK, emit_report(cfg.command, payload, cfg.fmt)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        _thread_cap()
        status, text = run(cfg)
    except CliError as exc:
        sys.stderr.write(_encode(exc.to_json()) + "\n")
        return exc.code
    if cfg.out is not None:
        cfg.out.write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
