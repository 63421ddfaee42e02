"""Command-line front end: ``eqloc {localize,dh,character,pair,verify}``.

Every invocation produces a :class:`RunReport`.  Reports render either as
text (numbers with 15 significant digits) or, with ``--json``, as
canonical JSON: sorted keys, floats rounded to 15 significant digits, so
parsing and re-rendering a report reproduces it byte for byte.

Exit codes: 0 success, 1 computation error or failed verification,
2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import characters as chars
from . import oracles
from .core import Problem, load_problem, serialize
from .dh import dh_measure, verify_fourier_inversion
from .errors import ComputationError, ConfigError
from .fixtures import FIXTURE_NAMES, load_fixture
from .localization import LocalizedIntegrand, localize_integral, random_regular_parameter
from .roots import RootSystem

SIG = 15


class UsageError(ConfigError):
    """Bad command line (unknown flag, malformed value)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage().strip()}\n{self.prog}: error: {message}")


# -- report ------------------------------------------------------------------------


def _round(x: float):
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.{SIG}g}") + 0.0


def canonical(value: Any):
    """JSON-ready copy of ``value`` with floats rounded to 15 significant digits."""
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _round(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _round(value.real), "im": _round(value.imag)}
    if isinstance(value, np.ndarray):
        return canonical(value.tolist())
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def fmt(value) -> str:
    """Human-readable number with 15 significant digits."""
    if isinstance(value, (complex, np.complexfloating)):
        re, im = value.real + 0.0, value.imag + 0.0
        return f"{re:.{SIG}g}{'+' if im >= 0 or math.isnan(im) else '-'}{abs(im):.{SIG}g}i"
    if isinstance(value, (bool, np.bool_)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value) + 0.0:.{SIG}g}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {fmt(v)}" for k, v in value.items()) + "}"
    return str(value)


@dataclass
class RunReport:
    """Outcome of one CLI invocation.

    ``inputs`` is the SHA-256 digest of the canonicalized configuration and
    arguments; ``results`` is a list of ``(name, value)`` pairs.
    """

    command: str
    inputs: str = ""
    results: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    exit_code: int = 0

    def add(self, name: str, value) -> None:
        self.results.append((name, value))

    def result(self, name: str):
        return next(v for k, v in self.results if k == name)

    def to_json(self) -> str:
        tree = {
            "command": self.command,
            "inputs": self.inputs,
            "results": [{"name": k, "value": canonical(v)} for k, v in self.results],
            "diagnostics": list(self.diagnostics),
            "exit_code": self.exit_code,
        }
        return json.dumps(tree, sort_keys=True, indent=2)

    def to_text(self) -> str:
        scalars = [(k, v) for k, v in self.results if not isinstance(v, (list, dict))]
        if len(self.results) == 1 and scalars:
            return fmt(scalars[0][1])
        lines = []
        for k, v in self.results:
            if isinstance(v, list) and v and isinstance(v[0], dict):
                lines.append(f"{k}:")
                for row in v:
                    lines.append("  " + "; ".join(f"{a}={fmt(b)}" for a, b in row.items()))
            else:
                lines.append(f"{k} = {fmt(v)}")
        return "\n".join(lines)


def rerender(json_text: str) -> str:
    """Parse a JSON report and render it again in canonical form."""
    return json.dumps(json.loads(json_text), sort_keys=True, indent=2)


def digest(tree) -> str:
    return hashlib.sha256(json.dumps(canonical(tree), sort_keys=True).encode()).hexdigest()


# -- argument parsing helpers --------------------------------------------------------


def parse_scalar(token: str):
    """A real decimal, or a complex ``a+bi`` token."""
    tok = token.strip().replace(" ", "")
    if not tok:
        raise UsageError("empty number")
    try:
        if tok.endswith(("i", "j")):
            return complex(tok[:-1] + "j")
        return float(tok)
    except ValueError:
        raise UsageError(f"cannot parse number {token!r}") from None


def parse_param(text: str) -> np.ndarray:
    """``X=c1,c2,...`` (the ``X=`` prefix is optional)."""
    if "=" in text:
        name, text = text.split("=", 1)
        if name.strip() != "X":
            raise UsageError(f"unknown parameter name {name!r}; expected X")
    values = [parse_scalar(t) for t in text.split(",")]
    if any(isinstance(v, complex) for v in values):
        return np.array(values, dtype=complex)
    return np.array(values, dtype=float)


def parse_integrand(text: str) -> LocalizedIntegrand:
    if text == "exp":
        return LocalizedIntegrand.exponential_of_moment()
    if text == "euler":
        return LocalizedIntegrand.euler_form()
    if text.startswith("const"):
        _, _, c = text.partition(":")
        return LocalizedIntegrand.constant(float(parse_scalar(c)) if c else 1.0)
    raise UsageError(f"unknown integrand {text!r}; expected exp, const:c or euler")


def parse_bump(text: str) -> chars.Bump:
    """``center=1,2,radius=0.1,amp=1``; bare numbers extend the previous key."""
    fields: dict[str, list[float]] = {}
    key = None
    for tok in text.split(","):
        if "=" in tok:
            key, tok = tok.split("=", 1)
            key = key.strip()
            if key not in ("center", "radius", "amp", "amplitude"):
                raise UsageError(f"unknown bump field {key!r}")
            fields[key] = []
        if key is None:
            raise UsageError("bump must start with a key=value pair")
        v = parse_scalar(tok)
        if isinstance(v, complex):
            raise UsageError("bump parameters must be real")
        fields[key].append(v)
    if "center" not in fields or "radius" not in fields:
        raise UsageError("bump needs center and radius")
    amp = fields.get("amp", fields.get("amplitude", [1.0]))
    if len(fields["radius"]) != 1 or len(amp) != 1:
        raise UsageError("radius and amp take one value each")
    return chars.Bump(tuple(fields["center"]), fields["radius"][0], amp[0])


def parse_weight(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"highest weight must be comma-separated integers, got {text!r}") from None


def _problem(args) -> tuple[Problem, Any]:
    if getattr(args, "fixture", None):
        try:
            return load_fixture(args.fixture), {"fixture": args.fixture}
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
    if not getattr(args, "config", None):
        raise UsageError("one of --config or --fixture is required")
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {args.config!r}: {exc.strerror}") from None
    problem = load_problem(text)
    return problem, serialize(problem)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


# -- subcommands ---------------------------------------------------------------------


def cmd_localize(args, report: RunReport):
    problem, cfg = _problem(args)
    X = parse_param(args.param)
    f = parse_integrand(args.integrand)
    report.inputs = digest({"config": cfg, "param": X, "integrand": args.integrand})
    if np.iscomplexobj(X):
        report.diagnostics.append("warning: complex parameter; evaluation is experimental")
    report.add("value", localize_integral(problem.spec, X, f))


def cmd_dh(args, report: RunReport):
    problem, cfg = _problem(args)
    report.inputs = digest({"config": cfg})
    m = dh_measure(problem.spec)
    rows = []
    for p in m.pieces:
        ineq = [list(a) + [b] for a, b in zip(p.A, p.b)]
        rows.append({"dim": p.dim, "inequalities": ineq, "density": np.asarray(p.density), "mass": p.mass()})
    report.add("pieces", rows)
    report.add("total_mass", m.total_mass())
    if args.emit_csv:
        lo = np.min([p.vertices.min(axis=0) for p in m.pieces], axis=0)
        hi = np.max([p.vertices.max(axis=0) for p in m.pieces], axis=0)
        n = args.grid
        axes = [np.linspace(a, b, n) for a, b in zip(lo, hi)]
        pts = np.column_stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")])
        dens = m.density_at(pts)
        names = ["x", "y"][: m.ambient_dim]
        _write_csv(args.emit_csv, names + ["density"], [list(map(float, p)) + [float(d)] for p, d in zip(pts, dens)])
        report.diagnostics.append(f"wrote {args.emit_csv}")


def cmd_character(args, report: RunReport):
    if args.root_system:
        try:
            rs = RootSystem.named(args.root_system)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        cfg = {"root_system": args.root_system}
    else:
        problem, cfg = _problem(args)
        if problem.root_system is None:
            raise ConfigError("configuration has no root_system")
        rs = problem.root_system
    lam = parse_weight(args.highest_weight)
    if len(lam) != rs.rank:
        raise UsageError(f"highest weight has {len(lam)} labels, root system has rank {rs.rank}")
    params = [parse_param(p) for p in args.param]
    report.inputs = digest({"config": cfg, "lambda": lam, "params": params})
    table = chars.character_table(rs, lam, params)
    if len(table) == 1:
        report.add("value", table[0][1])
    else:
        report.add("table", [{"X": list(X), "value": v} for X, v in table])
    if args.emit_csv:
        header = [f"X{k + 1}_{part}" for k in range(rs.rank) for part in ("re", "im")] + ["re", "im"]
        rows = []
        for X, v in table:
            row = []
            for x in X:
                row += [float(np.real(x)), float(np.imag(x))]
            rows.append(row + [v.real, v.imag])
        _write_csv(args.emit_csv, header, rows)
        report.diagnostics.append(f"wrote {args.emit_csv}")


def cmd_pair(args, report: RunReport):
    problem, cfg = _problem(args)
    if problem.multiplicities is None:
        raise ConfigError("configuration has no cycle (multiplicity table)")
    phi = parse_bump(args.bump)
    f = parse_integrand(args.integrand)
    report.inputs = digest({"config": cfg, "bump": args.bump, "integrand": args.integrand, "quad": args.quad})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        value = chars.pair_distribution(problem.spec, problem.multiplicities, f, phi, quad=args.quad)
    for w in caught:
        report.diagnostics.append(f"warning: {w.message}")
    report.add("value", value)


#: verification tolerances per fixture
TOL = {
    "localization": 1e-9,
    "dh": {"s2": 0.01, "cp1": 0.01, "cp2": 0.02},
    "hamiltonian": 1e-6,
    "fourier": {"s2": 1e-10, "cp1": 1e-10, "cp2": 1e-8},
}


def _verdict(report: RunReport, name: str, value: float, tol: float):
    ok = value < tol
    report.add(name, value)
    report.add(f"{name}_status", "PASS" if ok else "FAIL")
    return ok


def cmd_verify(args, report: RunReport):
    if args.fixture not in oracles.SURFACES:
        raise ConfigError(f"verify supports fixtures {', '.join(oracles.SURFACES)}, got {args.fixture!r}")
    seed = args.seed if args.seed is not None else int(os.environ.get("EQLOC_SEED", "0"))
    spec = load_fixture(args.fixture).spec
    surface = oracles.surface_fixture(args.fixture)
    report.inputs = digest({"fixture": args.fixture, "what": args.what, "seed": seed, "samples": args.samples})
    report.add("seed", seed)
    ok = True
    if args.what == "localization":
        if args.fixture == "s2":
            rows = [(t, localize_integral(spec, [t], LocalizedIntegrand.exponential_of_moment()), oracles.quadrature_integral_s2(t)) for t in (0.1, 1.0, 5.0)]
        else:
            rng = np.random.default_rng(seed)
            Xs = [random_regular_parameter(spec, rng) for _ in range(3)]
            n = spec.dim_complex
            rows = [(X, localize_integral(spec, X, LocalizedIntegrand.exponential_of_moment()), oracles.quadrature_integral_cpn(n, X)) for X in Xs]
        err = max(abs(a - b) / abs(b) for _, a, b in rows)
        report.add("comparisons", [{"X": x, "localized": a, "quadrature": b} for x, a, b in rows])
        ok = _verdict(report, "max_relative_error", err, TOL["localization"])
    elif args.what == "dh":
        samples = args.samples or 10**6
        m = dh_measure(spec)
        bins = 20 if spec.torus_rank == 1 else 10
        t0 = time.perf_counter()
        hist = oracles.monte_carlo_pushforward(surface, samples, bins, seed)
        report.add("runtime_s", time.perf_counter() - t0)
        ok = _verdict(report, "l1_relative", oracles.histogram_l1(hist, m), TOL["dh"][args.fixture])
        rng = np.random.default_rng(seed)
        res = max(verify_fourier_inversion(m, spec, random_regular_parameter(spec, rng)) for _ in range(10))
        ok &= _verdict(report, "fourier_residual", res, TOL["fourier"][args.fixture])
        if args.emit_csv:
            exact = m.bin_masses(hist.edges)
            rows = []
            for idx in np.ndindex(hist.masses.shape):
                bounds = []
                for ax, k in enumerate(idx):
                    bounds += [float(hist.edges[ax][k]), float(hist.edges[ax][k + 1])]
                rows.append(bounds + [float(hist.masses[idx]), float(exact[idx])])
            header = [f"{c}{k + 1}" for k in range(spec.torus_rank) for c in ("lo", "hi")] + ["monte_carlo", "exact"]
            _write_csv(args.emit_csv, header, rows)
            report.diagnostics.append(f"wrote {args.emit_csv}")
    elif args.what == "hamiltonian":
        samples = args.samples or 10**4
        X = np.arange(1, spec.torus_rank + 1, dtype=float)
        r = oracles.check_hamiltonian_identity(surface, X, samples, 1e-5, seed)
        report.add("skipped_points", r.skipped)
        ok = _verdict(report, "max_residual", r.max_residual, TOL["hamiltonian"])
        coarse = oracles.check_hamiltonian_identity(surface, X, samples, 1e-3, seed).max_residual
        fine = oracles.check_hamiltonian_identity(surface, X, samples, 5e-4, seed).max_residual
        ratio = coarse / fine
        report.add("h_halving_ratio", ratio)
        good = 3.5 <= ratio <= 4.5
        report.add("h_halving_ratio_status", "PASS" if good else "FAIL")
        ok &= good
    report.add("status", "PASS" if ok else "FAIL")
    if not ok:
        report.diagnostics.append("error: verification failed")
        report.exit_code = 1


# -- parser and entry points -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eqloc", description="Equivariant localization, DH measures and characters.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, source=True):
        if source:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--config", metavar="FILE", help="JSON configuration document")
            g.add_argument("--fixture", choices=FIXTURE_NAMES, help="built-in fixture")
        p.add_argument("--json", action="store_true", help="emit a canonical JSON report")

    p = sub.add_parser("localize", help="localized integral of an equivariant form")
    common(p)
    p.add_argument("--param", required=True, help="X=c1,...,cr")
    p.add_argument("--integrand", default="exp", help="exp | const:c | euler")

    p = sub.add_parser("dh", help="Duistermaat-Heckman measure")
    common(p)
    p.add_argument("--emit-csv", metavar="PATH", help="write a sampled density grid")
    p.add_argument("--grid", type=int, default=41, help="grid points per axis for --emit-csv")

    p = sub.add_parser("character", help="Weyl character value(s)")
    common(p)
    p.add_argument("--root-system", help="A1 | A2 | B2 | G2")
    p.add_argument("--highest-weight", required=True, help="Dynkin labels, e.g. 1,0")
    p.add_argument("--param", required=True, action="append", help="X=c1,...; complex as a+bi; repeat for a table")
    p.add_argument("--emit-csv", metavar="PATH", help="write the character table")

    p = sub.add_parser("pair", help="pair the chamber-weighted character with a bump function")
    common(p)
    p.add_argument("--bump", required=True, help="center=c1,...,radius=r,amp=a")
    p.add_argument("--integrand", default="exp", help="exp | const:c | euler")
    p.add_argument("--quad", type=int, default=8, help="initial Gauss-Legendre order per axis")

    p = sub.add_parser("verify", help="check the engines against brute-force oracles")
    common(p, source=False)
    p.add_argument("--fixture", required=True, choices=tuple(oracles.SURFACES))
    p.add_argument("--what", required=True, choices=("localization", "dh", "hamiltonian"))
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default $EQLOC_SEED or 0)")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--emit-csv", metavar="PATH", help="write the histogram comparison (--what dh)")
    return parser


COMMANDS = {"localize": cmd_localize, "dh": cmd_dh, "character": cmd_character, "pair": cmd_pair, "verify": cmd_verify}


def run_cli(argv=None, stdout=None, stderr=None) -> RunReport:
    """Run one command, print its report and return it."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    as_json = "--json" in argv
    report = RunReport(command=argv[0] if argv else "")
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(parser.format_usage().strip() + "\neqloc: error: a subcommand is required")
        report.command = args.command
        COMMANDS[args.command](args, report)
    except SystemExit as exc:  # --help
        report.exit_code = int(exc.code or 0)
        return report
    except ConfigError as exc:
        report.diagnostics.append(f"error: {exc}")
        report.exit_code = 2
    except OSError as exc:
        report.diagnostics.append(f"error: {exc}")
        report.exit_code = 2
    except (ComputationError, ValueError, NotImplementedError) as exc:
        report.diagnostics.append(f"error: {exc}")
        report.exit_code = 1
    if as_json:
        print(report.to_json(), file=stdout)
    else:
        if report.results:
            print(report.to_text(), file=stdout)
        for d in report.diagnostics:
            print(d, file=stderr)
    return report


def main(argv=None) -> int:
    return run_cli(argv).exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
