"""Command line front end.

    sturmq eigen --preset airy --n 3
    sturmq lemma --a 1,1 --b 1,4 --eps 0.5
    sturmq verify --preset dirichlet_laplacian --f "sin(3x)"
    sturmq flow --problem '{"preset": "dirichlet_laplacian", "b": 1}' --f "..." --ell-max 6
    sturmq probe --preset dirichlet_laplacian --d 2 --N 12 --iterations 2000
    sturmq oscillation --preset airy --m 1 --n 6 --trials 500

Results go to stdout or ``--output``. Reals are written with 17
significant digits and runs are deterministic for fixed flags and seed.

On failure a single JSON line ``{"error": code, "detail": text}`` goes to
stderr and the exit status is

    2  invalid configuration or flags
    3  invalid input (problem, function, instance, geometry)
    4  numerical failure (integration, search, resolution, degenerate operator)
    1  anything unexpected
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import domlemma, eigensolver, spectral, verifier
from .coefficients import PRESETS, ProblemSpec, problem_from_json
from .errors import (ConfigError, DegenerateOperatorError, IntegrationError, ResolutionError,
                     SearchError, SturmError)
from .expr import parse_function
from .grid import Grid, sample

EXIT_CONFIG, EXIT_INPUT, EXIT_NUMERICAL, EXIT_UNEXPECTED = 2, 3, 4, 1
_NUMERICAL = (IntegrationError, SearchError, ResolutionError, DegenerateOperatorError)
COMMANDS = ("eigen", "lemma", "verify", "flow", "probe", "oscillation")


def exit_status(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, _NUMERICAL):
        return EXIT_NUMERICAL
    if isinstance(exc, (SturmError, OSError)):
        return EXIT_INPUT
    return EXIT_UNEXPECTED


def format_real(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every real written as ``%.17g`` (non-finite as strings)."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_real(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class RunConfig:
    command: str
    problem: ProblemSpec | None = None
    grid_m: int = 2048
    N: int = 16
    seed: int = 0
    tau: float = 1e-9
    c: float = 1.0
    output: str | None = None
    format: str = "json"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.grid_m < 64 or self.grid_m % 2:
            raise ConfigError(f"grid_m must be even and >= 64, got {self.grid_m}")
        if self.N < 1:
            raise ConfigError(f"N must be >= 1, got {self.N}")
        if not 0.0 <= self.tau <= 0.1:
            raise ConfigError(f"tau must lie in [0, 0.1], got {self.tau}")
        if not self.c > 0:
            raise ConfigError(f"c must be positive, got {self.c}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")

    @property
    def grid(self) -> Grid:
        return Grid.for_problem(self.problem, self.grid_m)


# command implementations return the output text

def _eigen(cfg: RunConfig) -> str:
    n = cfg.options.get("n")
    indices = [n] if n is not None else list(range(1, cfg.N + 1))
    pairs = [eigensolver.solve_eigenpair(cfg.problem, k, cfg.grid) for k in indices]
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "lambda", "sup_norm", "min_extremum"])
        for e in pairs:
            writer.writerow([e.n, format_real(e.lam), format_real(e.sup_norm),
                             format_real(min(e.extrema))])
        return buf.getvalue()
    if n is not None:
        doc = {"problem": cfg.problem.to_json(), **pairs[0].to_json()}
    else:
        doc = eigensolver.spectrum_report(cfg.problem, pairs)
    return dumps(doc) + "\n"


def _parse_list(text: str, name: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--{name} must be a comma-separated list of numbers") from None


def _lemma(cfg: RunConfig) -> str:
    o = cfg.options
    if o.get("input"):
        with open(o["input"]) as fh:
            doc = json.load(fh)
    else:
        if o.get("a") is None or o.get("b") is None or o.get("eps") is None:
            raise ConfigError("lemma needs --a, --b and --eps, or --input FILE")
        doc = {"a": _parse_list(o["a"], "a"), "b": _parse_list(o["b"], "b"), "eps": o["eps"]}
    return dumps(domlemma.solve_json(doc)) + "\n"


def _input_function(cfg: RunConfig):
    expr = cfg.options.get("f")
    if not expr:
        raise ConfigError(f"{cfg.command} needs --f EXPR")
    return sample(parse_function(expr), cfg.grid)


def _verify(cfg: RunConfig) -> str:
    o = cfg.options
    if o.get("sweep"):
        rows = verifier.dipole_sweep(cfg.problem, cfg.grid, x0=o.get("x0", 1.0),
                                     width0=o.get("width", 0.2), levels=o.get("levels", 5),
                                     c=cfg.c, tau=cfg.tau)
        if cfg.format == "csv":
            buf = io.StringIO()
            verifier.sweep_to_csv(rows, buf)
            return buf.getvalue()
        return dumps([{"width": r.width, "kappa": r.kappa, "projection_ratio": r.projection_ratio,
                       "margin": r.margin, "report": r.report.to_json()} for r in rows]) + "\n"
    if o.get("dipole"):
        vals = _parse_list(o["dipole"], "dipole")
        if len(vals) != 2:
            raise ConfigError("--dipole takes X0,WIDTH")
        f = verifier.localized_dipole(cfg.problem, vals[0], vals[1], cfg.grid)
    else:
        f = _input_function(cfg)
    rep = verifier.verify_theorem(f, cfg.problem, cfg.c, cfg.tau)
    return dumps(rep.to_json()) + "\n"


def _flow(cfg: RunConfig) -> str:
    f = _input_function(cfg)
    basis = eigensolver.compute_basis(cfg.problem, cfg.N, cfg.grid)
    steps = spectral.root_trajectory(spectral.expand(f, basis), cfg.options.get("ell_max", 6),
                                     cfg.tau)
    if cfg.format == "json":
        return dumps([{"ell": s.ell, "sign_changes": s.sign_changes,
                       "dominant_index": s.dominant_index,
                       "dominance_ratio": s.dominance_ratio} for s in steps]) + "\n"
    buf = io.StringIO()
    spectral.trajectory_to_csv(steps, buf)
    return buf.getvalue()


def _probe(cfg: RunConfig) -> str:
    o = cfg.options
    d = o.get("d", 2)
    res = verifier.sharpness_probe(cfg.problem, d, cfg.N, o.get("iterations", 2000), cfg.seed,
                                   cfg.grid, cfg.c, cfg.tau)
    return dumps({"c": cfg.c, **res.to_json()}) + "\n"


def _oscillation(cfg: RunConfig) -> str:
    o = cfg.options
    m, n = o.get("m", 1), o.get("n", 6)
    res = verifier.strong_oscillation_check(cfg.problem, m, n, o.get("trials", 1000), cfg.seed,
                                            grid=cfg.grid, tau=cfg.tau)
    return dumps(res.to_json()) + "\n"


_RUNNERS = {"eigen": _eigen, "lemma": _lemma, "verify": _verify, "flow": _flow,
            "probe": _probe, "oscillation": _oscillation}


def run(cfg: RunConfig) -> int:
    """Execute one command and write its artifact. Raises on failure."""
    text = _RUNNERS[cfg.command](cfg)
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sturmq", description="Sturm-Liouville spectra and oscillation checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt="json"):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--preset", choices=sorted(PRESETS), help="built-in problem")
        src.add_argument("--problem", help="problem JSON file or inline JSON object")
        p.add_argument("--grid-m", type=int, default=2048, help="grid subintervals (even, >= 64)")
        p.add_argument("--N", type=int, default=16, help="basis size")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tau", type=float, default=1e-9, help="relative zero threshold")
        p.add_argument("--c", type=float, default=1.0, help="constant in kappa")
        p.add_argument("--output", "-o", help="write here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default=fmt)

    p = sub.add_parser("eigen", help="eigenpairs")
    common(p)
    p.add_argument("--n", type=int, help="single eigenpair index (default: 1..N)")

    p = sub.add_parser("lemma", help="dominance witness")
    common(p)
    p.add_argument("--a", help="comma-separated a_i")
    p.add_argument("--b", help="comma-separated b_i")
    p.add_argument("--eps", type=float)
    p.add_argument("--input", help="JSON file {a, b, eps}")

    p = sub.add_parser("verify", help="projection lower bound")
    common(p)
    p.add_argument("--f", help="input function expression")
    p.add_argument("--dipole", help="X0,WIDTH for a localized dipole")
    p.add_argument("--sweep", action="store_true", help="dyadic dipole width sweep")
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--width", type=float, default=0.2)
    p.add_argument("--levels", type=int, default=5)

    p = sub.add_parser("flow", help="sign changes under the iterated inverse")
    common(p, fmt="csv")
    p.add_argument("--f", help="input function expression")
    p.add_argument("--ell-max", type=int, default=6)

    p = sub.add_parser("probe", help="adversarial margin search")
    common(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--iterations", type=int, default=2000)

    p = sub.add_parser("oscillation", help="random strong oscillation checks")
    common(p)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--trials", type=int, default=1000)
    return parser


def _load_problem(args):
    if args.command == "lemma":
        return None
    if args.problem:
        text = args.problem.strip()
        if not text.startswith("{"):
            with open(text) as fh:
                text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"problem is not valid JSON: {exc}") from None
        return problem_from_json(doc)
    if args.preset:
        return PRESETS[args.preset]()
    raise ConfigError(f"{args.command} needs --preset or --problem")


_OPTION_KEYS = ("n", "a", "b", "eps", "input", "f", "dipole", "sweep", "x0", "width", "levels",
                "ell_max", "d", "iterations", "m", "trials")


def config_from_args(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    options = {k: getattr(args, k) for k in _OPTION_KEYS if hasattr(args, k)}
    return RunConfig(args.command, _load_problem(args), args.grid_m, args.N, args.seed, args.tau,
                     args.c, args.output, args.format, options)


def main(argv=None) -> int:
    try:
        return run(config_from_args(argv))
    except Exception as exc:  # every failure becomes one JSON line
        code = getattr(exc, "code", None) if isinstance(exc, SturmError) else None
        if code is None:
            code = "io" if isinstance(exc, OSError) else "unexpected"
        sys.stderr.write(json.dumps({"error": code, "detail": str(exc)}, sort_keys=True) + "\n")
        return exit_status(exc)


if __name__ == "__main__":
    sys.exit(main())
