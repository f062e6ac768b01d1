"""Uniformly sampled functions: Simpson quadrature, differences, sign changes."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateInputError, SamplingError, ShapeError

DEFAULT_TAU = 1e-9
DEFAULT_M = 2048


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``m`` subintervals (``m + 1`` nodes) on ``[a, b]``."""

    a: float
    b: float
    m: int = DEFAULT_M

    def __post_init__(self):
        if not self.a < self.b:
            raise ShapeError(f"grid needs a < b, got [{self.a}, {self.b}]")
        if self.m < 8 or self.m % 2:
            raise ShapeError(f"grid needs even m >= 8, got m={self.m}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "m", int(self.m))

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.m

    @cached_property
    def nodes(self) -> np.ndarray:
        x = self.a + self.h * np.arange(self.m + 1)
        x[-1] = self.b
        x.setflags(write=False)
        return x

    @cached_property
    def simpson_weights(self) -> np.ndarray:
        wts = np.full(self.m + 1, 2.0)
        wts[1::2] = 4.0
        wts[0] = wts[-1] = 1.0
        wts *= self.h / 3.0
        wts.setflags(write=False)
        return wts

    @classmethod
    def for_problem(cls, problem, m: int = DEFAULT_M) -> "Grid":
        return cls(problem.a, problem.b, m)


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.m + 1,):
            raise ShapeError(f"expected {self.grid.m + 1} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise SamplingError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def _check(self, other):
        if other.grid != self.grid:
            raise ShapeError("grid functions live on different grids")

    def __add__(self, other):
        self._check(other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, s):
        return GridFunction(self.grid, self.values * float(s))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def to_csv(self, fh) -> None:
        """Write ``x,value`` rows with 17 significant digits."""
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "value"])
        for x, v in zip(self.grid.nodes, self.values):
            writer.writerow([f"{x:.17g}", f"{v:.17g}"])


def sample(func, grid: Grid) -> GridFunction:
    """Evaluate ``func`` at every node; ``func`` may be scalar or vectorized."""
    x = grid.nodes
    try:
        vals = np.asarray(func(x), dtype=float)
        if vals.shape == ():
            vals = np.full(x.shape, float(vals))
    except (TypeError, ValueError):
        vals = None
    if vals is None or vals.shape != x.shape:
        vals = np.array([float(func(t)) for t in x])
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        j = int(bad[0])
        raise SamplingError(f"non-finite value at node {j} (x={x[j]!r})")
    return GridFunction(grid, vals)


def constant(value: float, grid: Grid) -> GridFunction:
    return GridFunction(grid, np.full(grid.m + 1, float(value)))


def integrate(f: GridFunction) -> float:
    """Composite Simpson rule (exact for cubics)."""
    return float(np.dot(f.grid.simpson_weights, f.values))


def inner_product(f: GridFunction, g: GridFunction, w: GridFunction | None = None) -> float:
    if g.grid != f.grid or (w is not None and w.grid != f.grid):
        raise ShapeError("inner product of functions on different grids")
    prod = f.values * g.values
    if w is not None:
        prod = prod * w.values
    return float(np.dot(f.grid.simpson_weights, prod))


def derivative(f: GridFunction) -> GridFunction:
    """Central differences inside, second-order one-sided stencils at the ends."""
    return GridFunction(f.grid, np.gradient(f.values, f.grid.h, edge_order=2))


def l2_norm(f: GridFunction, w: GridFunction | None = None) -> float:
    return math.sqrt(max(inner_product(f, f, w), 0.0))


def h1_seminorm(f: GridFunction) -> float:
    """``sqrt(int f'^2 dx)`` (unweighted)."""
    return l2_norm(derivative(f))


def count_sign_changes(f: GridFunction, tau: float = DEFAULT_TAU) -> int:
    """Number of sign changes of the samples strictly inside ``(a, b)``.

    Samples with ``|v| <= tau * max|f|`` count as zero and are dropped before
    comparing neighbouring signs. This sees simple (odd-order) roots only;
    multiplicity is invisible to samples.
    """
    if not 0.0 <= tau < 1.0:
        raise DegenerateInputError(f"tau must lie in [0, 1), got {tau}")
    v = f.values
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        raise DegenerateInputError("sign changes of the zero function are undefined")
    s = np.sign(v[np.abs(v) > tau * scale])
    return int(np.count_nonzero(s[1:] != s[:-1]))
