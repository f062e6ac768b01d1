"""Eigenpairs of regular Sturm-Liouville problems by Prufer shooting.

Phase convention: with a constant scale ``S > 0``,

    y = rho sin(theta) / sqrt(S),      p y' = rho sqrt(S) cos(theta),

so that

    theta' = S cos^2(theta) / p + (lam w - q) sin^2(theta) / S,
    (log rho)' = (S / p - (lam w - q) / S) sin(theta) cos(theta).

``S = 1`` is the classical Prufer phase. Zeros of ``y`` sit at multiples of
pi for every ``S``, so the eigenvalue condition ``theta(b) = (n-1) pi +
theta_b`` only needs its boundary angles adjusted. The solver picks
``S ~ sqrt(lam p w)``, which makes the phase nearly linear and keeps the
step count roughly independent of ``n``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .coefficients import ProblemSpec
from .errors import ResolutionError, SearchError, ShapeError
from .grid import DEFAULT_TAU, Grid, GridFunction, sample
from .ode import dopri5
from .special import airy

RTOL = 1e-10
ATOL = 1e-10
BISECTION_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class EigenPair:
    n: int
    lam: float
    phi: GridFunction
    sup_norm: float
    interior_roots: tuple
    extrema: tuple

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "lambda": self.lam,
            "roots": list(self.interior_roots),
            "sup_norm": self.sup_norm,
            "extrema": list(self.extrema),
        }


@dataclass(frozen=True)
class SpectrumMeta:
    """Spectral data entering the projection bound.

    ``h[k]`` and ``sup_norms[k]`` refer to index ``n = k + 1``;
    ``min_gap_ratio[k]`` is ``min_{2<=i<=n} lam_i / lam_{i-1}`` for
    ``n = k + 2`` (it is undefined for ``n = 1``).
    """

    N: int
    lambdas: tuple
    sup_norms: tuple
    h: tuple
    min_gap_ratio: tuple


def _left_angle(problem: ProblemSpec, scale: float) -> float:
    if problem.bc.left_dirichlet:
        return 0.0
    # arccot(alpha / S) in (0, pi/2]
    return math.atan2(1.0, problem.bc.alpha / scale)


def _right_offset(problem: ProblemSpec, scale: float) -> float:
    if problem.bc.right_dirichlet:
        return math.pi
    return math.pi - math.atan2(1.0, problem.bc.beta / scale)


def prufer_scale(problem: ProblemSpec, lam: float) -> float:
    c = problem.coefficients
    mid = 0.5 * (problem.a + problem.b)
    pm, wm = float(c.p(mid)), float(c.w(mid))
    floor = pm * (math.pi / problem.length) ** 2
    return math.sqrt(pm * max(lam * wm, floor))


def prufer_phase(problem: ProblemSpec, lam: float, scale: float = 1.0) -> float:
    """theta(b) for the phase equation started from the left boundary angle.

    ``scale = 1`` integrates ``theta' = cos^2/p + (lam w - q) sin^2``.
    """
    c = problem.coefficients
    p, q, w = c.p, c.q, c.w
    S = float(scale)
    invS = 1.0 / S
    lam = float(lam)
    sin, cos = math.sin, math.cos

    def rhs(x, th):
        s, co = sin(th), cos(th)
        return S * co * co / p(x) + (lam * w(x) - q(x)) * s * s * invS

    return dopri5(rhs, problem.a, problem.b, _left_angle(problem, S),
                  rtol=RTOL, atol=ATOL)


def _count_residual(problem: ProblemSpec, n: int, lam: float) -> float:
    """Positive iff ``lam > lam_n``; zero at the eigenvalue."""
    S = prufer_scale(problem, lam)
    target = (n - 1) * math.pi + _right_offset(problem, S)
    return prufer_phase(problem, lam, S) - target


def weyl_constant(problem: ProblemSpec, m: int = 2048) -> float:
    """``pi^2 / (int_a^b sqrt(w/p))^2``, the leading coefficient of ``lam_n / n^2``."""
    c = problem.coefficients
    g = Grid(problem.a, problem.b, m)
    r = sample(lambda x: np.sqrt(c.w(x) / c.p(x)), g)
    return math.pi ** 2 / float(np.dot(g.simpson_weights, r.values)) ** 2


def lambda_ceiling(problem: ProblemSpec, n: int) -> float:
    c = problem.coefficients
    shift = c.q_max / c.w_min
    weyl = weyl_constant(problem, 256)
    comparison = c.p_max / c.w_min * (math.pi * (n + 1) / problem.length) ** 2
    return max(weyl * (n + 5) ** 2, comparison) + shift


@lru_cache(maxsize=None)
def eigenvalue(problem: ProblemSpec, n: int, lam_max: float | None = None) -> float:
    """lam_n by bracketing on the phase count and bisection to relative 1e-12."""
    if n < 1:
        raise ShapeError(f"eigenvalue index must be >= 1, got {n}")
    ceiling = lambda_ceiling(problem, n) if lam_max is None else float(lam_max)
    if _count_residual(problem, n, 0.0) >= 0.0:
        _known_lambdas.setdefault((problem, n), 0.0)
        return 0.0
    # lam_{n-1} < lam_n is a valid lower bracket when already known
    lo = _known_lambdas.get((problem, n - 1), 0.0)
    weyl = weyl_constant(problem, 256)
    c = problem.coefficients
    hi = min(ceiling, 1.1 * weyl * n * n + c.q_max / c.w_min + weyl)
    while _count_residual(problem, n, hi) < 0.0:
        lo = hi
        if hi >= ceiling:
            raise SearchError(f"no bracket for lambda_{n} below ceiling {ceiling:.6g}")
        hi = min(2.0 * hi, ceiling)
    while hi - lo > BISECTION_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _count_residual(problem, n, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    _known_lambdas.setdefault((problem, n), lam)
    return lam


# write-once record of computed eigenvalues, used only for bracketing
_known_lambdas: dict = {}


def _recover(problem: ProblemSpec, lam: float, grid: Grid) -> np.ndarray:
    """Unnormalized eigenfunction samples from the (theta, log rho) system."""
    c = problem.coefficients
    p, q, w = c.p, c.q, c.w
    S = prufer_scale(problem, lam)
    invS = 1.0 / S
    sin, cos = math.sin, math.cos

    def rhs(x, u):
        s, co = sin(u[0]), cos(u[0])
        pv = p(x)
        k = lam * w(x) - q(x)
        return np.array([S * co * co / pv + k * s * s * invS,
                         (S / pv - k * invS) * s * co])

    th0 = _left_angle(problem, S)
    _, sol = dopri5(rhs, problem.a, problem.b, np.array([th0, 0.0]),
                    rtol=RTOL, atol=ATOL, dense=True)
    u = sol(grid.nodes)
    th, lr = u[:, 0], u[:, 1]
    y = np.exp(lr - lr.max()) * np.sin(th)
    if problem.bc.left_dirichlet:
        y[0] = 0.0
    if problem.bc.right_dirichlet:
        y[-1] = 0.0
    return y


def _roots_and_extrema(x: np.ndarray, v: np.ndarray, tau: float = DEFAULT_TAU):
    absv = np.abs(v)
    keep = np.flatnonzero(absv > tau * absv.max())
    s = np.sign(v[keep])
    ch = np.flatnonzero(s[1:] != s[:-1])
    lo_i, hi_i = keep[ch], keep[ch + 1]
    roots = np.empty(0)
    if ch.size:
        spline = CubicSpline(x, v)
        lo, hi = x[lo_i].copy(), x[hi_i].copy()
        slo = np.sign(v[lo_i])
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            left = np.sign(spline(mid)) == slo
            lo = np.where(left, mid, lo)
            hi = np.where(left, hi, mid)
        roots = 0.5 * (lo + hi)

    # nodal domains: nodes between consecutive roots
    seg = np.searchsorted(roots, x)
    nseg = roots.size + 1
    segmax = np.zeros(nseg)
    np.maximum.at(segmax, seg, absv)
    hits = np.flatnonzero(absv == segmax[seg])
    _, first = np.unique(seg[hits], return_index=True)
    at = hits[first]
    peaks = segmax.copy()
    m = x.size - 1
    inner = (at > 0) & (at < m)
    j = at[inner]
    if j.size:
        y0, ym, yp = absv[j], absv[j - 1], absv[j + 1]
        same = (seg[j - 1] == seg[j]) & (seg[j + 1] == seg[j])
        den = yp - 2.0 * y0 + ym
        ok = same & (den < 0.0)
        corr = np.where(ok, (yp - ym) ** 2 / (8.0 * np.where(ok, den, -1.0)), 0.0)
        peaks[np.flatnonzero(inner)] = y0 - corr
    return roots, peaks


@lru_cache(maxsize=8192)
def solve_eigenpair(problem: ProblemSpec, n: int, grid: Grid) -> EigenPair:
    """n-th eigenpair sampled on ``grid``, normalized so <phi, phi>_w = 1."""
    if grid.a != problem.a or grid.b != problem.b:
        raise ShapeError("grid does not span the problem interval")
    lam = eigenvalue(problem, n)
    y = _recover(problem, lam, grid)
    wfun = sample(problem.coefficients.w, grid)
    norm = math.sqrt(float(np.dot(grid.simpson_weights, y * y * wfun.values)))
    y = y / norm
    absy = np.abs(y)
    first = np.flatnonzero(absy > DEFAULT_TAU * absy.max())[0]
    if y[first] < 0:
        y = -y
    roots, peaks = _roots_and_extrema(grid.nodes, y)
    if roots.size != n - 1:
        raise ResolutionError(
            f"phi_{n} shows {roots.size} sign changes on m={grid.m}; expected {n - 1}")
    phi = GridFunction(grid, y)
    return EigenPair(n, lam, phi, float(absy.max()), tuple(roots.tolist()),
                     tuple(peaks.tolist()))


@dataclass(frozen=True, eq=False)
class Basis(Sequence):
    """The first N eigenpairs of one problem on one grid."""

    problem: ProblemSpec
    grid: Grid
    pairs: tuple

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    @cached_property
    def lambdas(self) -> np.ndarray:
        return np.array([e.lam for e in self.pairs])

    @cached_property
    def matrix(self) -> np.ndarray:
        """Rows are eigenfunction samples."""
        mat = np.array([e.phi.values for e in self.pairs])
        mat.setflags(write=False)
        return mat

    @cached_property
    def weight(self) -> GridFunction:
        return sample(self.problem.coefficients.w, self.grid)


def compute_basis(problem: ProblemSpec, N: int, grid: Grid | None = None) -> Basis:
    if N < 1:
        raise ShapeError(f"basis size must be >= 1, got {N}")
    grid = grid or Grid.for_problem(problem)
    return Basis(problem, grid, tuple(solve_eigenpair(problem, n, grid) for n in range(1, N + 1)))


def spectrum_meta(pairs) -> SpectrumMeta:
    pairs = list(pairs)
    idx = [e.n for e in pairs]
    if idx != list(range(1, len(pairs) + 1)):
        raise ShapeError(f"eigenpairs must be indexed 1..N contiguously, got {idx}")
    lambdas = tuple(e.lam for e in pairs)
    h = tuple(np.minimum.accumulate([min(e.extrema) for e in pairs]).tolist())
    ratios = [lambdas[i] / lambdas[i - 1] for i in range(1, len(lambdas))]
    gaps = tuple(np.minimum.accumulate(ratios).tolist()) if ratios else ()
    return SpectrumMeta(len(pairs), lambdas, tuple(e.sup_norm for e in pairs), h, gaps)


def spectrum_report(problem: ProblemSpec, pairs) -> dict:
    meta = spectrum_meta(pairs)
    return {
        "problem": problem.to_json(),
        "pairs": [e.to_json() for e in pairs],
        "h": list(meta.h),
        "min_gap_ratio": list(meta.min_gap_ratio),
    }


def orthogonality_defect(basis: Basis) -> float:
    """max |<phi_i, phi_j>_w - delta_ij|."""
    wts = basis.grid.simpson_weights * basis.weight.values
    gram = (basis.matrix * wts) @ basis.matrix.T
    return float(np.max(np.abs(gram - np.eye(len(basis)))))


def residual_norm(problem: ProblemSpec, pair: EigenPair) -> float:
    """Discrete L2 norm of -(p phi')' + q phi - lam w phi on interior nodes."""
    g = pair.phi.grid
    x, y, h = g.nodes, pair.phi.values, g.h
    c = problem.coefficients
    xm = 0.5 * (x[1:] + x[:-1])
    pm = np.array([float(c.p(t)) for t in xm])
    flux = pm * np.diff(y) / h
    lhs = -np.diff(flux) / h
    xi = x[1:-1]
    qv = np.array([float(c.q(t)) for t in xi])
    wv = np.array([float(c.w(t)) for t in xi])
    r = lhs + qv * y[1:-1] - pair.lam * wv * y[1:-1]
    return math.sqrt(h * float(np.sum(r * r)))


def airy_determinant(lam: float) -> float:
    """Ai(1-lam) Bi(2-lam) - Ai(2-lam) Bi(1-lam); zero exactly at the Airy-preset eigenvalues."""
    a1, _, b1, _ = airy(1.0 - lam)
    a2, _, b2, _ = airy(2.0 - lam)
    return a1 * b2 - a2 * b1


def airy_determinant_roots(lo: float = 0.0, hi: float = 100.0, step: float = 0.05,
                           xtol: float = 1e-13) -> list:
    """Sign-change brackets of the determinant on a ladder, refined by bisection."""
    grid = np.arange(lo, hi + step, step)
    vals = [airy_determinant(t) for t in grid]
    roots = []
    for i in range(len(grid) - 1):
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(float(grid[i]))
            continue
        if fa * fb < 0.0:
            a, b = float(grid[i]), float(grid[i + 1])
            while b - a > xtol * max(1.0, abs(a)):
                mid = 0.5 * (a + b)
                fm = airy_determinant(mid)
                if (fm < 0.0) == (fa < 0.0):
                    a, fa = mid, fm
                else:
                    b = mid
            roots.append(0.5 * (a + b))
    return roots
