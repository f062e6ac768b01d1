"""Sturm-Liouville problem data.

A problem is ``-(p y')' + q y = lam w y`` on ``(a, b)`` with separated
boundary conditions

    p(a) y'(a) - alpha y(a) = 0,      p(b) y'(b) + beta y(b) = 0,

where ``alpha``/``beta`` may be the tag :data:`INFINITY` (Dirichlet).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError


class _Infinity:
    """Tag for a Dirichlet endpoint. Never used as a number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, coefficients lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if not c:
            c = (0.0,)
        if not all(math.isfinite(v) for v in c):
            raise DomainError("polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x):
        c = self.coeffs
        if isinstance(x, np.ndarray):
            acc = np.full(x.shape, c[-1])
        else:
            acc = c[-1]
        for v in reversed(c[:-1]):
            acc = acc * x + v
        return acc

    def bounds(self, a, b):
        """Exact (min, max) over [a, b] from endpoint and critical values."""
        pts = [a, b]
        if len(self.coeffs) > 2:
            deriv = np.polynomial.polynomial.polyder(self.coeffs)
            for r in np.polynomial.polynomial.polyroots(deriv):
                if abs(r.imag) < 1e-12 and a < r.real < b:
                    pts.append(r.real)
        vals = [self(float(t)) for t in pts]
        return min(vals), max(vals)


def _sample(func, x):
    try:
        v = np.asarray(func(x), dtype=float)
        if v.shape == x.shape:
            return v
        if v.shape == ():
            return np.full(x.shape, float(v))
    except (TypeError, ValueError):
        pass
    return np.array([float(func(t)) for t in x])


@dataclass(frozen=True)
class CoefficientSet:
    """Coefficient maps p, q, w with caller-declared bounds."""

    p: Callable
    q: Callable
    w: Callable
    p_min: float
    p_max: float
    q_max: float
    w_min: float
    w_max: float

    @classmethod
    def from_polynomials(cls, p: Sequence[float], q: Sequence[float],
                         w: Sequence[float], a: float, b: float) -> "CoefficientSet":
        pp, qq, ww = Polynomial(tuple(p)), Polynomial(tuple(q)), Polynomial(tuple(w))
        p_lo, p_hi = pp.bounds(a, b)
        _, q_hi = qq.bounds(a, b)
        w_lo, w_hi = ww.bounds(a, b)
        return cls(pp, qq, ww, p_lo, p_hi, max(q_hi, 0.0), w_lo, w_hi)

    def validate(self, a: float, b: float, samples: int = 10_000) -> None:
        """Check positivity and the declared bounds on a dense uniform sample."""
        if not self.p_min > 0.0 or not self.w_min > 0.0:
            raise DomainError("p_min and w_min must be positive")
        if self.q_max < 0.0:
            raise DomainError("q_max must be nonnegative")
        x = np.linspace(a, b, samples)
        pv, qv, wv = _sample(self.p, x), _sample(self.q, x), _sample(self.w, x)
        for name, v in (("p", pv), ("q", qv), ("w", wv)):
            if not np.all(np.isfinite(v)):
                raise DomainError(f"coefficient {name} is not finite on [{a}, {b}]")
        if pv.min() < self.p_min or pv.max() > self.p_max:
            raise DomainError(f"p outside declared [{self.p_min}, {self.p_max}]")
        if wv.min() < self.w_min or wv.max() > self.w_max:
            raise DomainError(f"w outside declared [{self.w_min}, {self.w_max}]")
        if qv.min() < 0.0:
            raise DomainError("q must be nonnegative")
        if qv.max() > self.q_max:
            raise DomainError(f"q exceeds declared q_max={self.q_max}")


@dataclass(frozen=True)
class BoundaryCondition:
    alpha: object = INFINITY
    beta: object = INFINITY

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if v is INFINITY:
                continue
            v = float(v)
            if not (math.isfinite(v) and v >= 0.0):
                raise DomainError(f"{name} must be >= 0 or INFINITY, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def left_dirichlet(self) -> bool:
        return self.alpha is INFINITY

    @property
    def right_dirichlet(self) -> bool:
        return self.beta is INFINITY


@dataclass(frozen=True)
class ProblemSpec:
    a: float
    b: float
    coefficients: CoefficientSet
    bc: BoundaryCondition = BoundaryCondition()
    name: str = "custom"

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise DomainError(f"need finite a < b, got a={self.a}, b={self.b}")
        self.coefficients.validate(self.a, self.b)

    @property
    def length(self) -> float:
        return self.b - self.a

    def to_json(self) -> dict:
        doc = {
            "a": self.a,
            "b": self.b,
            "alpha": _bc_to_json(self.bc.alpha),
            "beta": _bc_to_json(self.bc.beta),
        }
        if self.name in PRESETS:
            doc["preset"] = self.name
        else:
            c = self.coefficients
            if all(isinstance(f, Polynomial) for f in (c.p, c.q, c.w)):
                doc["p"] = list(c.p.coeffs)
                doc["q"] = list(c.q.coeffs)
                doc["w"] = list(c.w.coeffs)
            else:
                doc["coefficients"] = "custom"
        return doc


def _bc_to_json(v):
    return "inf" if v is INFINITY else v


def _bc_from_json(v):
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity"):
            return INFINITY
        raise DomainError(f"boundary parameter must be a number or 'inf', got {v!r}")
    return float(v)


def preset_dirichlet_laplacian(b: float = math.pi) -> ProblemSpec:
    """``-y'' = lam y`` on ``(0, b)``, Dirichlet at both ends.

    The default ``b = pi`` gives eigenvalues ``n**2`` and eigenfunctions
    proportional to ``sin(n x)``.
    """
    coeffs = CoefficientSet.from_polynomials([1.0], [0.0], [1.0], 0.0, b)
    return ProblemSpec(0.0, float(b), coeffs, BoundaryCondition(), "dirichlet_laplacian")


def preset_airy() -> ProblemSpec:
    """``-y'' + (1 + x) y = lam y`` on ``(0, 1)``, Dirichlet at both ends."""
    coeffs = CoefficientSet.from_polynomials([1.0], [1.0, 1.0], [1.0], 0.0, 1.0)
    return ProblemSpec(0.0, 1.0, coeffs, BoundaryCondition(), "airy")


PRESETS = {
    "dirichlet_laplacian": preset_dirichlet_laplacian,
    "airy": preset_airy,
}


def problem_from_json(doc: dict) -> ProblemSpec:
    """Build a problem from its JSON document form.

    Either ``{"preset": ...}`` (``a``/``b``/``alpha``/``beta`` optional
    overrides) or polynomial coefficient lists ``{"p", "q", "w"}`` with
    ``a``, ``b``, ``alpha``, ``beta`` given explicitly.
    """
    if "preset" in doc:
        name = doc["preset"]
        if name not in PRESETS:
            raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        base = PRESETS[name]()
        a = float(doc.get("a", base.a))
        b = float(doc.get("b", base.b))
        alpha = _bc_from_json(doc["alpha"]) if "alpha" in doc else base.bc.alpha
        beta = _bc_from_json(doc["beta"]) if "beta" in doc else base.bc.beta
        if name == "dirichlet_laplacian":
            coeffs = CoefficientSet.from_polynomials([1.0], [0.0], [1.0], a, b)
        else:
            coeffs = CoefficientSet.from_polynomials([1.0], [1.0, 1.0], [1.0], a, b)
        same = (a, b, alpha, beta) == (base.a, base.b, base.bc.alpha, base.bc.beta)
        return ProblemSpec(a, b, coeffs, BoundaryCondition(alpha, beta),
                           name if same else "custom")
    missing = [k for k in ("a", "b", "alpha", "beta", "p", "q", "w") if k not in doc]
    if missing:
        raise DomainError(f"problem JSON missing fields: {missing}")
    a, b = float(doc["a"]), float(doc["b"])
    if not a < b:
        raise DomainError(f"need a < b, got a={a}, b={b}")
    coeffs = CoefficientSet.from_polynomials(doc["p"], doc["q"], doc["w"], a, b)
    bc = BoundaryCondition(_bc_from_json(doc["alpha"]), _bc_from_json(doc["beta"]))
    return ProblemSpec(a, b, coeffs, bc)
