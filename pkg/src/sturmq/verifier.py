"""Projection lower bound checks and the experiments built around it.

For ``f`` with ``d - 1`` sign changes and ``kappa = c ||f'|| / ||f||`` the
inequality under test is

    sum_{n <= d} |<f, phi_n>_w|  >=  exp(-kappa^2 log(kappa)^2) ||f||.

The bound underflows for moderate ``kappa`` (``kappa = 30`` already gives
``exp(-10400)``), so reports carry ``log_bound`` and ``log_margin`` next
to the plain values and the verdict is taken from ``log_margin``.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .coefficients import ProblemSpec
from .eigensolver import Basis, compute_basis
from .errors import DegenerateInputError, GeometryError, ResolutionError, SearchError, ShapeError
from .grid import DEFAULT_TAU, Grid, GridFunction, count_sign_changes, h1_seminorm, l2_norm
from .spectral import expand, synthesize

TAIL_ENERGY_TOL = 1e-4
DEFAULT_MAX_N = 1024
N_START = 16


def max_basis_size() -> int:
    """Basis cap from ``STURMQ_MAX_N`` (default 1024)."""
    raw = os.environ.get("STURMQ_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        val = int(raw)
    except ValueError:
        raise ShapeError(f"STURMQ_MAX_N must be an integer, got {raw!r}") from None
    if val < 1:
        raise ShapeError(f"STURMQ_MAX_N must be >= 1, got {val}")
    return val


def kappa(f: GridFunction, c: float = 1.0) -> float:
    if not c > 0:
        raise ShapeError(f"c must be positive, got {c}")
    norm = l2_norm(f)
    if norm == 0.0:
        raise DegenerateInputError("kappa of the zero function is undefined")
    return c * h1_seminorm(f) / norm


def log_bound_value(kappa: float) -> float:
    if not kappa > 0:
        raise ShapeError(f"kappa must be positive, got {kappa}")
    lk = math.log(kappa)
    return -(kappa * lk) ** 2


def bound_value(kappa: float) -> float:
    """``kappa ** (-kappa**2 log kappa)``, formed from its exponent."""
    return math.exp(log_bound_value(kappa))


@dataclass(frozen=True)
class VerificationReport:
    d: int
    kappa: float
    c: float
    bound: float
    log_bound: float
    projection_sum: float
    f_norm: float
    margin: float
    log_margin: float
    passed: bool
    N_used: int
    tail_energy: float

    def to_json(self) -> dict:
        return asdict(self)


def _report(coeffs, f_norm, kap, d, c, N, tail) -> VerificationReport:
    s = float(np.sum(np.abs(coeffs[:d])))
    lb = log_bound_value(kap)
    if s > 0:
        log_margin = math.log(s) - math.log(f_norm) - lb
    else:
        log_margin = -math.inf
    margin = math.exp(log_margin) if log_margin < 709.0 else math.inf
    return VerificationReport(d, kap, c, math.exp(lb), lb, s, f_norm, margin, log_margin,
                              bool(log_margin >= 0.0), N, tail)


def verify_theorem(f: GridFunction, problem: ProblemSpec, c: float = 1.0,
                   tau: float = DEFAULT_TAU, max_n: int | None = None,
                   n_start: int = N_START) -> VerificationReport:
    """Check the projection inequality for ``f`` against ``problem``'s basis.

    ``d`` is the number of sign changes plus one. The basis size starts at
    ``max(d, n_start)`` and doubles until the relative tail energy
    ``||f - S_N f||_w^2 / ||f||_w^2`` is at most 1e-4. Reaching ``max_n``
    without that raises :class:`ResolutionError`.
    """
    if (f.grid.a, f.grid.b) != (problem.a, problem.b):
        raise ShapeError("f is sampled on a different interval than the problem")
    cap = max_basis_size() if max_n is None else max_n
    d = count_sign_changes(f, tau) + 1
    kap = kappa(f, c)
    N = min(max(d, n_start), cap)
    if d > cap:
        raise ResolutionError(f"f needs at least {d} modes but the basis cap is {cap}")
    while True:
        basis = compute_basis(problem, N, f.grid)
        e = expand(f, basis)
        f_norm_sq = e.source_norm_sq
        resid = f - synthesize(e)
        tail = l2_norm(resid, basis.weight) ** 2 / f_norm_sq
        if tail <= TAIL_ENERGY_TOL:
            return _report(e.coeffs, math.sqrt(f_norm_sq), kap, d, c, N, tail)
        if N >= cap:
            raise ResolutionError(
                f"tail energy {tail:.3g} > {TAIL_ENERGY_TOL} with N = {N} (cap {cap}); "
                "refine the grid or raise STURMQ_MAX_N")
        N = min(2 * N, cap)


def bump(s):
    """C^2 bump ``(1 - s^2)^3`` on ``[-1, 1]``, zero outside."""
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** 3, 0.0)


def localized_dipole(problem: ProblemSpec, x0: float, width: float, grid: Grid) -> GridFunction:
    """Positive bump at ``x0`` minus the same bump shifted right by ``2 width``.

    The shift is snapped to an even number of grid steps, so the second
    bump's samples are an exact translate of the first and the Simpson
    mean cancels to roundoff.
    """
    h = grid.h
    if width < 4 * h:
        raise GeometryError(f"width {width} is below 4 grid spacings ({4 * h:.3g})")
    shift = 2 * h * max(1, round(width / h))
    if not (problem.a < x0 - width and x0 + shift + width < problem.b):
        raise GeometryError(
            f"dipole support [{x0 - width}, {x0 + shift + width}] leaves ({problem.a}, {problem.b})")
    x = grid.nodes
    return GridFunction(grid, bump((x - x0) / width) - bump((x - x0 - shift) / width))


@dataclass(frozen=True)
class SweepRow:
    width: float
    kappa: float
    projection_ratio: float
    margin: float
    report: VerificationReport


def dipole_sweep(problem: ProblemSpec, grid: Grid, x0: float = 1.0, width0: float = 0.2,
                 levels: int = 5, c: float = 1.0, tau: float = DEFAULT_TAU,
                 max_n: int | None = None) -> list:
    """Verify dipoles of width ``width0 / 2**k`` for ``k < levels``."""
    rows = []
    for k in range(levels):
        width = width0 / 2 ** k
        rep = verify_theorem(localized_dipole(problem, x0, width, grid), problem, c, tau, max_n)
        rows.append(SweepRow(width, rep.kappa, rep.projection_sum / rep.f_norm, rep.margin, rep))
    return rows


def sweep_to_csv(rows, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["width", "kappa", "projection_ratio", "margin"])
    for r in rows:
        writer.writerow([f"{v:.17g}" for v in (r.width, r.kappa, r.projection_ratio, r.margin)])


@dataclass(frozen=True)
class OscillationResult:
    m: int
    n: int
    trials: int
    seed: int
    failures: tuple  # (trial, sign_changes, coeffs)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "m": self.m, "n": self.n, "trials": self.trials, "seed": self.seed,
            "passed": self.passed,
            "failures": [{"trial": t, "sign_changes": s, "coeffs": list(cf)}
                         for t, s, cf in self.failures],
        }


def strong_oscillation_check(problem: ProblemSpec, m: int, n: int, trials: int, seed: int,
                             grid: Grid | None = None, basis: Basis | None = None,
                             tau: float = DEFAULT_TAU) -> OscillationResult:
    """Random combinations of ``phi_m..phi_n`` must have ``m-1..n-1`` sign changes."""
    if not 1 <= m <= n:
        raise ShapeError(f"need 1 <= m <= n, got m={m}, n={n}")
    if basis is None:
        basis = compute_basis(problem, n, grid)
    elif len(basis) < n:
        raise ShapeError(f"basis has {len(basis)} modes, need {n}")
    block = basis.matrix[m - 1:n]
    rng = np.random.default_rng(seed)
    failures = []
    for t in range(trials):
        coeffs = rng.uniform(-1.0, 1.0, n - m + 1)
        while not coeffs.any():
            coeffs = rng.uniform(-1.0, 1.0, n - m + 1)
        s = count_sign_changes(GridFunction(basis.grid, coeffs @ block), tau)
        if not m - 1 <= s <= n - 1:
            failures.append((t, s, tuple(float(v) for v in coeffs)))
    return OscillationResult(m, n, trials, seed, tuple(failures))


@dataclass(frozen=True)
class ProbeResult:
    d: int
    N: int
    best_margin: float
    best_log_margin: float
    best_kappa: float
    best_coeffs: tuple
    evaluations: int

    def to_json(self) -> dict:
        return {
            "d": self.d, "N": self.N,
            "best_margin": self.best_margin, "best_log_margin": self.best_log_margin,
            "best_kappa": self.best_kappa, "best_coeffs": list(self.best_coeffs),
            "evaluations": self.evaluations,
        }


def sharpness_probe(problem: ProblemSpec, d: int, N: int, iterations: int, seed: int,
                    grid: Grid | None = None, c: float = 1.0, tau: float = DEFAULT_TAU,
                    restarts: int = 4, max_starts: int = 1000) -> ProbeResult:
    """Derivative-free search for a small margin among ``f = sum_{n<=N} c_n phi_n``.

    Feasible ``f`` have at most ``d - 1`` sign changes; the margin of each
    candidate uses its own sign-change count. ``iterations`` coordinate
    moves are split over ``restarts`` feasible random starts. A move
    perturbs one coefficient by ``+-step``; after 50 consecutive rejections
    the step halves.
    """
    if not 1 <= d < N:
        raise ShapeError(f"need 1 <= d < N, got d={d}, N={N}")
    basis = compute_basis(problem, N, grid)
    mat = basis.matrix
    wgt = basis.weight
    rng = np.random.default_rng(seed)
    evals = 0

    def evaluate(coeffs):
        nonlocal evals
        evals += 1
        if not coeffs.any():
            return None
        f = GridFunction(basis.grid, coeffs @ mat)
        sc = count_sign_changes(f, tau)
        if sc > d - 1:
            return None
        kap = kappa(f, c)
        rep = _report(coeffs, l2_norm(f, wgt), kap, sc + 1, c, N, 0.0)
        return rep.log_margin, kap

    def feasible_start():
        for _ in range(max_starts):
            coeffs = np.concatenate([rng.uniform(-1.0, 1.0, d),
                                     0.1 * rng.uniform(-1.0, 1.0, N - d)])
            val = evaluate(coeffs)
            if val is not None:
                return coeffs, val
        raise SearchError(f"no feasible start with <= {d - 1} sign changes in {max_starts} draws")

    best = None
    per_run = [iterations // restarts + (1 if r < iterations % restarts else 0)
               for r in range(restarts)]
    for budget in per_run:
        coeffs, (cur, kap) = feasible_start()
        step, rejected = 0.25, 0
        for _ in range(budget):
            j = int(rng.integers(N))
            trial = coeffs.copy()
            trial[j] += step if rng.random() < 0.5 else -step
            val = evaluate(trial)
            if val is not None and val[0] < cur:
                coeffs, (cur, kap), rejected = trial, val, 0
            else:
                rejected += 1
                if rejected >= 50:
                    step, rejected = 0.5 * step, 0
        if best is None or cur < best[0]:
            best = (cur, kap, coeffs / np.linalg.norm(coeffs))
    cur, kap, coeffs = best
    margin = math.exp(cur) if cur < 709.0 else math.inf
    return ProbeResult(d, N, margin, cur, kap, tuple(float(v) for v in coeffs), evals)
