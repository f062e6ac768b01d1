"""Expansions in a computed eigenbasis and the operators diagonal in it."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .eigensolver import Basis
from .errors import DegenerateOperatorError, PreconditionError, ShapeError
from .grid import DEFAULT_TAU, GridFunction, count_sign_changes, h1_seminorm, l2_norm

PARSEVAL_SLACK = 1e-4
TAIL_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class Expansion:
    """Coefficients ``c_n = <f, phi_n>_w`` against ``basis``.

    ``source_norm_sq`` is ``||f||_w^2`` of the function the expansion was
    built from (``None`` for synthetic coefficient vectors).
    """

    basis: Basis
    coeffs: np.ndarray
    source_norm_sq: float | None = None

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (len(self.basis),):
            raise ShapeError(f"{c.size} coefficients for a basis of size {len(self.basis)}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.source_norm_sq is not None:
            energy = float(np.dot(c, c))
            if energy > (1.0 + PARSEVAL_SLACK) * self.source_norm_sq:
                raise ShapeError(
                    f"Bessel inequality violated: sum c^2 = {energy:.6g} > ||f||^2 = "
                    f"{self.source_norm_sq:.6g}; basis not orthonormal on this grid")

    @property
    def lambdas(self) -> np.ndarray:
        return self.basis.lambdas

    def with_coeffs(self, coeffs) -> "Expansion":
        return Expansion(self.basis, coeffs)


def expand(f: GridFunction, basis: Basis) -> Expansion:
    if f.grid != basis.grid:
        raise ShapeError("function and basis live on different grids")
    wts = basis.grid.simpson_weights * basis.weight.values
    fw = f.values * wts
    coeffs = basis.matrix @ fw
    return Expansion(basis, coeffs, float(np.dot(fw, f.values)))


def synthesize(e: Expansion) -> GridFunction:
    return GridFunction(e.basis.grid, e.coeffs @ e.basis.matrix)


def iterate_inverse(e: Expansion, ell: int) -> Expansion:
    """Apply the inverse operator ``ell`` times, sup-normalized.

    Coefficients become ``c_n lam_n^(-ell)``, formed as
    ``exp(log|c_n| - ell log lam_n - shift)`` so large ``ell`` cannot
    underflow, then rescaled so the synthesized function has sup norm 1.
    """
    if ell < 0:
        raise ShapeError(f"ell must be >= 0, got {ell}")
    c = e.coeffs
    lam = e.lambdas
    nz = c != 0.0
    if not nz.any():
        raise DegenerateOperatorError("cannot normalize the zero expansion")
    if ell > 0 and np.any(lam[nz] <= 0.0):
        raise DegenerateOperatorError("zero eigenvalue with nonzero coefficient")
    logmag = np.full(c.shape, -np.inf)
    logmag[nz] = np.log(np.abs(c[nz])) - ell * np.log(lam[nz]) if ell else np.log(np.abs(c[nz]))
    logmag -= logmag.max()
    scaled = np.sign(c) * np.exp(logmag)
    sup = np.max(np.abs(scaled @ e.basis.matrix))
    if sup == 0.0:
        raise DegenerateOperatorError("iterated function vanishes on the grid")
    return e.with_coeffs(scaled / sup)


def heat_flow(e: Expansion, t: float) -> Expansion:
    """Solution of ``u_t = (p u')' - q u`` at time ``t`` (weight ``w``), coefficientwise."""
    if t < 0:
        raise ShapeError(f"heat flow needs t >= 0, got {t}")
    return e.with_coeffs(e.coeffs * np.exp(-e.lambdas * t))


@dataclass(frozen=True)
class SobolevRatio:
    lhs: float
    rhs: float
    ratio: float
    lower: float
    upper: float

    @property
    def within(self) -> bool:
        return self.lower <= self.ratio <= self.upper


def sobolev_bounds(problem) -> tuple:
    """(L, U) with L <= ||f'||^2 / sum lam_n c_n^2 <= U for f with a root."""
    c = problem.coefficients
    lower = 1.0 / (c.p_max * (1.0 + c.q_max * problem.length ** 2 / c.p_min))
    return lower, 1.0 / c.p_min


def sobolev_ratio(f: GridFunction, e: Expansion, tau: float = DEFAULT_TAU) -> SobolevRatio:
    """Compare ``||f'||^2`` with ``sum lam_n c_n^2``.

    Requires an interior sign change of ``f`` and an expansion that
    reproduces ``f`` to relative L2 error 1e-3.
    """
    if count_sign_changes(f, tau) < 1:
        raise PreconditionError("f must change sign inside the interval")
    w = e.basis.weight
    resid = l2_norm(f - synthesize(e), w)
    fn = l2_norm(f, w)
    if resid > TAIL_TOL * fn:
        raise PreconditionError(
            f"expansion tail too large: ||f - S_N f|| / ||f|| = {resid / fn:.3g} > {TAIL_TOL}")
    lhs = h1_seminorm(f) ** 2
    rhs = float(np.dot(e.lambdas, e.coeffs ** 2))
    lower, upper = sobolev_bounds(e.basis.problem)
    return SobolevRatio(lhs, rhs, lhs / rhs, lower, upper)


@dataclass(frozen=True)
class FlowStep:
    ell: int
    sign_changes: int
    dominant_index: int
    dominance_ratio: float


def root_trajectory(e: Expansion, ell_max: int, tau: float = DEFAULT_TAU) -> list:
    """Sign changes, dominant mode and sum|c|/|c_k| for ell = 0..ell_max."""
    if ell_max < 1:
        raise ShapeError(f"ell_max must be >= 1, got {ell_max}")
    steps = []
    for ell in range(ell_max + 1):
        it = iterate_inverse(e, ell)
        mag = np.abs(it.coeffs)
        k = int(np.argmax(mag))
        steps.append(FlowStep(ell, count_sign_changes(synthesize(it), tau), k + 1,
                              float(mag.sum() / mag[k])))
    return steps


def root_monotonicity_check(e: Expansion, ell_max: int, tau: float = DEFAULT_TAU) -> list:
    """Sign-change counts of the normalized iterates for ell = 0..ell_max."""
    return [s.sign_changes for s in root_trajectory(e, ell_max, tau)]


def is_nonincreasing(seq) -> bool:
    return all(b <= a for a, b in zip(seq, seq[1:]))


def trajectory_to_csv(steps, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["ell", "sign_changes", "dominant_index", "dominance_ratio"])
    for s in steps:
        writer.writerow([s.ell, s.sign_changes, s.dominant_index, f"{s.dominance_ratio:.17g}"])


def parseval_defect(e: Expansion) -> float:
    """| sum c_n^2 - ||synthesize(e)||_w^2 |."""
    g = synthesize(e)
    return abs(float(np.dot(e.coeffs, e.coeffs)) - l2_norm(g, e.basis.weight) ** 2)


__all__ = [
    "Expansion", "expand", "synthesize", "iterate_inverse", "heat_flow",
    "SobolevRatio", "sobolev_bounds", "sobolev_ratio", "FlowStep", "root_trajectory",
    "root_monotonicity_check", "is_nonincreasing", "trajectory_to_csv", "parseval_defect",
]
