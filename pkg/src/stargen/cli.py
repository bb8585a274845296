"""Command-line front end.

Exit codes: 0 ok, 2 usage or configuration, 3 data mismatch, 4 numerical
contract violation.  Every failure prints one line starting with ``error:``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from jsonschema import Draft7Validator

from .errors import (ConfigurationError, DomainError, GridMismatchError,
                     NumericalContractError, UnsupportedError, WindowAnnihilationError)

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_NUMERIC = 0, 2, 3, 4

CONFIG_SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "hbar": {"type": "number", "exclusiveMinimum": 0},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["x_min", "x_max", "n_points"],
            "properties": {
                "x_min": {"type": "number"},
                "x_max": {"type": "number"},
                "n_points": {"type": "integer", "minimum": 8},
            },
        },
        "hamiltonian": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["oscillator", "quadratic-1d", "kinetic-plus-potential"]},
                "mass": {"type": "number", "exclusiveMinimum": 0},
                "omega": {"type": "number", "exclusiveMinimum": 0},
                "coefficients": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"},
                              "minItems": 3, "maxItems": 3},
                },
                "potential": {"type": "string"},
            },
        },
        "windows": {"type": "array", "items": {"type": ["integer", "string"]}},
        "count": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string"},
    },
}

DEFAULTS: dict[str, Any] = {
    "hbar": 1.0,
    "grid": {"x_min": -10.0, "x_max": 10.0, "n_points": 512},
    "hamiltonian": {"kind": "oscillator"},
    "windows": [0],
    "count": 8,
    "output_dir": "stargen_out",
}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message, EXIT_USAGE)


# ------------------------------------------------------------------ config

def _parse_grid(text: str) -> dict[str, Any]:
    try:
        lo, hi, n = text.split(":")
        return {"x_min": float(lo), "x_max": float(hi), "n_points": int(n)}
    except ValueError:
        raise CliError(f"--grid expects XMIN:XMAX:N, got {text!r}") from None


def _parse_window(text: str):
    return int(text) if text.lstrip("-").isdigit() else text


def load_config(args: argparse.Namespace) -> dict[str, Any]:
    cfg = json.loads(json.dumps(DEFAULTS))
    if getattr(args, "config", None):
        try:
            user = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise CliError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise CliError(f"config {args.config} is not valid JSON: {exc.msg} "
                           f"at line {exc.lineno} column {exc.colno}") from None
        errors = sorted(Draft7Validator(CONFIG_SCHEMA).iter_errors(user), key=lambda e: list(e.path))
        if errors:
            e = errors[0]
            where = "/".join(str(p) for p in e.path) or "<root>"
            raise CliError(f"config {args.config}: {where}: {e.message}")
        cfg.update(user)
    if getattr(args, "hbar", None) is not None:
        cfg["hbar"] = args.hbar
    if getattr(args, "grid", None):
        cfg["grid"] = _parse_grid(args.grid)
    if getattr(args, "count", None) is not None:
        cfg["count"] = args.count
    if getattr(args, "window", None):
        cfg["windows"] = [_parse_window(w) for w in args.window]
    if getattr(args, "out", None):
        cfg["output_dir"] = args.out
    if not cfg["hbar"] > 0:
        raise CliError("hbar must be positive")
    if cfg["count"] < 0:
        raise CliError("count must be non-negative")
    return cfg


def _spatial_grid(cfg):
    from .grids import SpatialGrid
    g = cfg["grid"]
    return SpatialGrid(float(g["x_min"]), float(g["x_max"]), int(g["n_points"]))


def _potential(expr: str):
    import sympy as sp
    x = sp.Symbol("x", real=True)
    try:
        parsed = sp.parse_expr(expr, local_dict={"x": x})
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise CliError(f"cannot parse potential {expr!r}: {exc}") from None
    extra = parsed.free_symbols - {x}
    if extra:
        raise CliError(f"potential may only depend on x, found {sorted(map(str, extra))}")
    fn = sp.lambdify(x, parsed, "numpy")
    return lambda v: np.broadcast_to(np.asarray(fn(v), dtype=float), np.shape(v))


def hamiltonian_from(cfg):
    from .spectral import HamiltonianSpec
    h = cfg["hamiltonian"]
    kind = h["kind"]
    if kind == "oscillator":
        return HamiltonianSpec.oscillator(h.get("mass", 1.0), h.get("omega", 1.0))
    if kind == "quadratic-1d":
        if "coefficients" not in h:
            raise CliError("quadratic-1d needs 'coefficients' as [a, b, c] triples for c x^a p^b")
        coeffs: dict = {}
        for a, b, c in h["coefficients"]:
            if int(a) != a or int(b) != b:
                raise CliError("monomial powers must be integers")
            coeffs[(int(a), int(b))] = coeffs.get((int(a), int(b)), 0.0) + c
        return HamiltonianSpec.quadratic(coeffs)
    if "potential" not in h:
        raise CliError("kinetic-plus-potential needs a 'potential' expression in x")
    return HamiltonianSpec.kinetic_potential(_potential(h["potential"]), h.get("mass", 1.0),
                                             label=h["potential"])


def _windows(cfg, grid):
    from .io import read_field
    from .grids import WaveField
    out = []
    for w in cfg["windows"]:
        if isinstance(w, int):
            if w < 0:
                raise CliError(f"window index must be non-negative, got {w}")
            out.append((w, w))
        else:
            f = read_field(w)
            if not isinstance(f, WaveField):
                raise CliError(f"window file {w} holds a phase-space field")
            if f.grid != grid.x_axis:
                raise CliError(f"window file {w} does not match the grid", EXIT_MISMATCH)
            out.append((f, "custom"))
    return out


# ---------------------------------------------------------------- commands

def _solve(cfg, out_stream) -> int:
    from .grids import PhaseGrid
    from .io import write_field, write_json, write_table
    from .spectral import eigensolve, stargen_from_eigen, stargen_residual

    h = hamiltonian_from(cfg)
    grid = _spatial_grid(cfg)
    hbar = float(cfg["hbar"])
    count = int(cfg["count"])
    pgrid = PhaseGrid.compatible(grid, hbar)
    windows = _windows(cfg, pgrid)
    pairs = eigensolve(h, grid, hbar, count)
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for j, pair in enumerate(pairs):
        write_field(out / f"psi_{j}.sgf", pair.psi, hbar)
        for window, tag in windows:
            sg = stargen_from_eigen(pair, window, pgrid)
            name = f"stargen_{j}_w{tag}.sgf" if tag != "custom" else f"stargen_{j}_wcustom{len(rows)}.sgf"
            write_field(out / name, sg.big_psi)
            rows.append((j, tag, pair.eigenvalue, stargen_residual(h, sg)))
    write_table(out / "residuals.csv", ["j", "k_window", "lambda", "residual"], rows)
    write_json(out / "eigenvalues.json", {
        "hamiltonian": h.label or h.kind,
        "grid": cfg["grid"],
        "hbar": hbar,
        "eigenvalues": [p.eigenvalue for p in pairs],
        "residuals": [p.residual for p in pairs],
        "coefficients": [],
        "fields": [f"psi_{j}.sgf" for j in range(len(pairs))],
    })
    for j, p in enumerate(pairs):
        print(f"{j} {p.eigenvalue:.12g}", file=out_stream)
    return EXIT_OK


def cmd_oscillator(args) -> int:
    cfg = load_config(args)
    cfg["hamiltonian"] = {"kind": "oscillator"}
    return _solve(cfg, sys.stdout)


def cmd_solve(args) -> int:
    return _solve(load_config(args), sys.stdout)


def _read_pair(a_path: str, b_path: str):
    from .io import read_field
    from .grids import PhaseField
    try:
        a, b = read_field(a_path), read_field(b_path)
    except OSError as exc:
        raise CliError(f"cannot read field: {exc.strerror}: {exc.filename}") from None
    if not (isinstance(a, PhaseField) and isinstance(b, PhaseField)):
        raise CliError("star expects two phase-space fields", EXIT_MISMATCH)
    if a.grid != b.grid:
        raise CliError("fields live on different grids", EXIT_MISMATCH)
    return a, b


def cmd_star(args) -> int:
    from .grids import PhaseField
    from .io import write_field
    from .moyal import star_product

    a, b = _read_pair(args.a, args.b)
    ab = star_product(a, b)
    write_field(args.output, ab)
    print(f"norm {ab.norm():.12e}")
    if args.verify:
        comm = ab - star_product(b, a)
        dev = (comm - PhaseField.constant(a.grid, 1j * a.grid.hbar)).max_abs()
        ok = dev < 1e-10
        print(f"{'PASS' if ok else 'FAIL'}  commutator_minus_ihbar  measured={dev:.2e}  required < 1e-10")
        if not ok:
            raise CliError(f"a*b - b*a differs from i*hbar by {dev:.2e}", EXIT_NUMERIC)
    return EXIT_OK


def cmd_wigner(args) -> int:
    from .grids import PhaseGrid, WaveField
    from .io import read_field, write_field
    from .special import hermite_function
    from .wigner import WindowedTransform, cross_wigner

    cfg = load_config(args)
    hbar = float(cfg["hbar"])
    if args.psi is not None:
        try:
            psi = read_field(args.psi)
        except OSError as exc:
            raise CliError(f"cannot read field: {exc.strerror}: {exc.filename}") from None
        if not isinstance(psi, WaveField):
            raise CliError(f"{args.psi} holds a phase-space field", EXIT_MISMATCH)
        grid = PhaseGrid.compatible(psi.grid, hbar)
    else:
        grid = PhaseGrid.compatible(_spatial_grid(cfg), hbar)
        psi = hermite_function(args.state, grid.x_axis, hbar)
    out_dir = Path(cfg["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    for window, tag in _windows(cfg, grid):
        phi = window if isinstance(window, WaveField) else hermite_function(window, grid.x_axis, hbar)
        w = cross_wigner(WindowedTransform(phi, grid), psi)
        path = out_dir / f"wigner_w{tag}.sgf"
        write_field(path, w)
        print(f"{path.name} norm {w.norm():.12e}")
    return EXIT_OK


def _matrix_arg(text: str) -> np.ndarray:
    p = Path(text)
    try:
        raw = p.read_text() if p.exists() else text
        m = np.array(json.loads(raw), dtype=float)
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise CliError(f"cannot parse matrix: {exc}") from None
    return m


def cmd_williamson(args) -> int:
    from .symplectic import quadratic_spectrum, williamson
    m = _matrix_arg(args.matrix)
    dec = williamson(m)
    payload: dict[str, Any] = {"omegas": dec.omegas.tolist(), "S": dec.S.tolist()}
    if args.levels:
        idx = [[int(v) for v in s.split(",")] for s in args.levels]
        payload["levels"] = quadratic_spectrum(m, idx, args.hbar or 1.0)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suite
    if args.suite != "all" and args.suite not in SUITES:
        raise CliError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES + ('all',))}")
    results = run_suite(args.suite)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stargen", description="Phase-space quantization toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, window=True):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--hbar", type=float)
        p.add_argument("--grid", help="XMIN:XMAX:N")
        p.add_argument("--count", type=int)
        if window:
            p.add_argument("--window", action="append", help="Hermite index or wave-field file")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("oscillator", help="harmonic oscillator eigen- and star-genfunctions")
    common(p)
    p.set_defaults(func=cmd_oscillator)

    p = sub.add_parser("solve", help="solve the Hamiltonian described by the config")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("star", help="Moyal product of two field files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("output")
    p.add_argument("--verify", action="store_true",
                   help="also check that a*b - b*a equals i*hbar (for x and p fields)")
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("wigner", help="cross-Wigner transform of a wave field")
    common(p)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--psi", help="wave-field file to transform")
    src.add_argument("--state", type=int, default=0, help="Hermite state to transform")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("williamson", help="Williamson normal form of an SPD matrix")
    p.add_argument("matrix", help="JSON matrix literal or file")
    p.add_argument("--levels", nargs="*", help="multi-indices like 0,1")
    p.add_argument("--hbar", type=float)
    p.set_defaults(func=cmd_williamson)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite")
    p.set_defaults(func=cmd_verify)
    return parser


def _thread_limit():
    raw = os.environ.get("STARGEN_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"STARGEN_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise CliError(f"STARGEN_THREADS must be a positive integer, got {raw!r}")
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=n)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        limit = _thread_limit()
        try:
            return args.func(args)
        finally:
            if limit is not None:
                limit.restore_original_limits()
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except GridMismatchError as exc:
        code, msg = EXIT_MISMATCH, str(exc)
    except (NumericalContractError, WindowAnnihilationError) as exc:
        code, msg = EXIT_NUMERIC, str(exc)
    except (ConfigurationError, DomainError, UnsupportedError) as exc:
        code, msg = EXIT_USAGE, str(exc)
    print("error: " + " ".join(msg.split()), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
