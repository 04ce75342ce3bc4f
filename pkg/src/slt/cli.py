"""Command-line front end: load a problem file, run a subcommand, emit CSV/JSON.

Output conventions: decimal point, comma separator, ``#``-prefixed comment
lines for metadata.  Identical inputs produce byte-identical output (fixed
summation orders, no clocks or seeds).  Exit codes: 0 success, 1 computation
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import expansion, green
from .errors import ConfigError, ProblemValidationError, SLTError
from .expr import parse_expression
from .fixtures import FIXTURE_NAMES
from .model import (DEFAULT_GRID_STEPS, TwoIntervalProblem, inner_product,
                    ode_residual, problem, sample_expression, validate_problem)
from .spectrum import compute_spectrum
from .verify import run_fixture_suite

REQUIRED_FIELDS = ("p1", "p2", "alpha", "beta", "q_left", "q_right", "t_matrix")
KNOWN_FIELDS = REQUIRED_FIELDS + ("grid_steps",)


@dataclass
class RunConfig:
    """One parsed invocation: exactly one subcommand plus validated options."""

    subcommand: str
    options: dict
    output: str | None


def load_problem(path: str) -> TwoIntervalProblem:
    """Parse and validate a problem configuration file (TOML key/value text)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path!r}: {exc}") from None
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error in {path!r}: {exc}") from None
    return problem_from_dict(data, source=path)


def problem_from_dict(data: dict, source: str = "<config>") -> TwoIntervalProblem:
    for name in REQUIRED_FIELDS:
        if name not in data:
            raise ConfigError(f"{source}: missing field {name!r}")
    for name in data:
        if name not in KNOWN_FIELDS:
            raise ConfigError(f"{source}: unknown field {name!r}")
    t = data["t_matrix"]
    if (not isinstance(t, list) or len(t) != 2
            or any(not isinstance(row, list) or len(row) != 4 for row in t)):
        raise ConfigError(f"{source}: t_matrix must be a 2x4 array of numbers")
    try:
        q_left = parse_expression(str(data["q_left"]))
        q_right = parse_expression(str(data["q_right"]))
    except SLTError as exc:
        raise ConfigError(f"{source}: bad potential expression: {exc}") from None
    try:
        P = problem(p1=data["p1"], p2=data["p2"], alpha=data["alpha"],
                    beta=data["beta"], q_left=q_left, q_right=q_right,
                    tmatrix=t, grid_steps=data.get("grid_steps", DEFAULT_GRID_STEPS))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from None
    violations = validate_problem(P)
    if violations:
        raise ConfigError(f"{source}: invalid problem: " + "; ".join(violations))
    return P


def worker_count() -> int:
    """Worker cap from SLT_THREADS (default: machine parallelism)."""
    raw = os.environ.get("SLT_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"SLT_THREADS must be an integer, got {raw!r}") from None
        if n < 1:
            raise ConfigError("SLT_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# Subcommand implementations (each returns a list of output lines)

def _midpoint_samples(count: int):
    """Sample abscissae that never hit the two-sided interface point.

    Cell midpoints taken per subinterval, so x=0 can never be produced no
    matter the count.
    """
    n_left = (count + 1) // 2
    n_right = count - n_left
    xs = [-math.pi + (i + 0.5) * math.pi / n_left for i in range(n_left)]
    xs += [(j + 0.5) * math.pi / n_right for j in range(n_right)]
    return xs


def _cmd_spectrum(P, opts):
    spec = compute_spectrum(P, opts["count"])
    for w in spec.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if opts["format"] == "json":
        return [json.dumps(spec.to_json_dict(), indent=2)]
    return spec.to_csv_rows()


def _cmd_eigenfunction(P, opts):
    spec = compute_spectrum(P, opts["index"] + 1)
    e = spec[opts["index"]]
    lines = [f"# n={e.n} lambda={e.lambda_n!r} norm_constant={e.norm_constant!r}",
             "x,phi"]
    for x in _midpoint_samples(opts["samples"]):
        lines.append(f"{x!r},{e.eigenfunction.value_at(x)!r}")
    return lines


def _cmd_green(P, opts):
    lam = opts["lam"]
    xs = _midpoint_samples(opts["samples"])
    lines = [f"# lambda={lam!r}", "x,xi,G"]
    for x in xs:
        for xi in xs:
            lines.append(f"{x!r},{xi!r},{green.green_eval(P, lam, x, xi)!r}")
    return lines


def _cmd_resolvent(P, opts):
    lam = opts["lam"]
    f = parse_expression(opts["f"])
    if opts["method"] == "series":
        spec = compute_spectrum(P, opts["terms"])
        u = green.resolvent_series(P, spec, f, lam, opts["terms"])
    else:
        u = green.resolvent_quadrature(P, lam, f)
    f_trace = sample_expression(P, f)
    residual = ode_residual(P, u, lam, f_trace)
    lines = [f"# lambda={lam!r} method={opts['method']}", "x,u"]
    for x, y in zip(u.left_x, u.left_y):
        lines.append(f"{float(x)!r},{float(y)!r}")
    for x, y in zip(u.right_x, u.right_y):
        lines.append(f"{float(x)!r},{float(y)!r}")
    lines.append(f"# max_residual={residual!r}")
    return lines


def _cmd_expand(P, opts):
    f = parse_expression(opts["f"])
    n_terms = opts["terms"]
    spec = compute_spectrum(P, n_terms)
    coeffs = expansion.fourier_coefficients(P, spec, f, n_terms)
    lines = ["n,c_n"]
    for n, c in enumerate(coeffs.values):
        lines.append(f"{n},{float(c)!r}")
    if opts["parseval"]:
        trace = sample_expression(P, f)
        norm2 = inner_product(P, trace, trace)
        gap = expansion.parseval_gap(P, spec, f, n_terms)
        lines.append(f"# norm2={norm2!r} parseval_gap={gap!r}")
    if opts["reconstruct"]:
        sn = expansion.partial_expansion(P, spec, f, n_terms)
        lines.append("# reconstruction")
        lines.append("x,f,S_N")
        for x in _midpoint_samples(opts["reconstruct"]):
            lines.append(f"{x!r},{f(x)!r},{sn.value_at(x)!r}")
    return lines


def _cmd_verify(opts):
    names = list(FIXTURE_NAMES) if opts["fixture"] == "all" else [opts["fixture"]]
    if len(names) > 1 and worker_count() > 1:
        with ThreadPoolExecutor(max_workers=min(worker_count(), len(names))) as pool:
            per_fixture = list(pool.map(run_fixture_suite, names))
    else:
        per_fixture = [run_fixture_suite(name) for name in names]
    lines = []
    all_ok = True
    for results in per_fixture:
        for label, ok, detail in results:
            lines.append(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
            all_ok = all_ok and ok
    lines.append("all checks passed" if all_ok else "some checks FAILED")
    return lines, all_ok


# ---------------------------------------------------------------------------
# Argument parsing and dispatch

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slt",
        description="Spectral solver for two-interval problems with "
                    "interface transmission conditions.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, needs_problem=True):
        if needs_problem:
            p.add_argument("--problem", required=True, help="problem config file (TOML)")
            p.add_argument("--grid", type=int, default=None,
                           help="override grid_steps from the config")
        p.add_argument("--output", default=None, help="write output here instead of stdout")

    p = sub.add_parser("spectrum", help="compute eigenvalues")
    add_common(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("eigenfunction", help="sample one normalized eigenfunction")
    add_common(p)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--samples", type=int, default=64)

    p = sub.add_parser("green", help="sample the Green kernel")
    add_common(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--samples", type=int, default=16)

    p = sub.add_parser("resolvent", help="apply the resolvent to f")
    add_common(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--f", required=True, help="right-hand side expression in x")
    p.add_argument("--method", choices=("quadrature", "series"), default="quadrature")
    p.add_argument("--terms", type=int, default=200)

    p = sub.add_parser("expand", help="eigenfunction expansion of f")
    add_common(p)
    p.add_argument("--f", required=True)
    p.add_argument("--terms", type=int, required=True)
    p.add_argument("--parseval", action="store_true")
    p.add_argument("--reconstruct", type=int, default=0, metavar="M")

    p = sub.add_parser("verify", help="run the invariant suite on built-in fixtures")
    add_common(p, needs_problem=False)
    p.add_argument("--fixture", choices=FIXTURE_NAMES + ("all",), default="all")
    return parser


def _validate_options(args) -> RunConfig:
    opts = vars(args).copy()
    sub = opts.pop("subcommand")
    output = opts.pop("output", None)
    positive = {"count": opts.get("count"), "samples": opts.get("samples"),
                "terms": opts.get("terms")}
    for name, value in positive.items():
        if value is not None and value < 1:
            raise ConfigError(f"--{name} must be >= 1")
    if opts.get("index") is not None and opts["index"] < 0:
        raise ConfigError("--index must be >= 0")
    if opts.get("reconstruct") is not None and opts["reconstruct"] < 0:
        raise ConfigError("--reconstruct must be >= 1 when given")
    if opts.get("grid") is not None and (opts["grid"] < 4 or opts["grid"] % 2):
        raise ConfigError("--grid must be an even integer >= 4")
    return RunConfig(subcommand=sub, options=opts, output=output)


def run(config: RunConfig) -> int:
    """Execute one validated invocation; returns the process exit code."""
    opts = config.options
    if config.subcommand == "verify":
        lines, all_ok = _cmd_verify(opts)
        _emit(lines, config.output)
        return 0 if all_ok else 1

    P = load_problem(opts["problem"])
    if opts.get("grid"):
        P = problem(p1=P.p1, p2=P.p2, alpha=P.alpha, beta=P.beta,
                    q_left=P.q_left, q_right=P.q_right, tmatrix=P.tmatrix,
                    grid_steps=opts["grid"])
        P.require_valid()
    handler = {
        "spectrum": _cmd_spectrum,
        "eigenfunction": _cmd_eigenfunction,
        "green": _cmd_green,
        "resolvent": _cmd_resolvent,
        "expand": _cmd_expand,
    }[config.subcommand]
    _emit(handler(P, opts), config.output)
    return 0


def _emit(lines, output: str | None):
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        config = _validate_options(args)
        return run(config)
    except (ConfigError, ProblemValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SLTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
