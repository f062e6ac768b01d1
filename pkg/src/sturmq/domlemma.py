"""Dominance of one geometrically decaying term.

Given ``a_i >= 0`` (not all zero), ``0 < b_1 < ... < b_n`` and
``eps in (0, 1/2]`` there is an exponent ``ell`` and an index ``k`` with

    sum_i a_i / b_i**ell  <=  (1 + eps) * a_k / b_k**ell,

and ``ell <= n log(9 n / eps^2) / log(min_i b_i / b_{i-1})``.
:func:`find_witness` returns the smallest such ``ell``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import DegenerateInputError, DomainError, SearchError

# first chunk of exponents scanned at once; doubles up to _CHUNK_MAX
_CHUNK0 = 64
_CHUNK_MAX = 1 << 16


@dataclass(frozen=True)
class LemmaInstance:
    a: tuple
    b: tuple
    eps: float

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        eps = float(self.eps)
        if not a:
            raise DomainError("need at least one term")
        if len(a) != len(b):
            raise DomainError(f"a has {len(a)} entries but b has {len(b)}")
        if not all(math.isfinite(v) for v in a + b):
            raise DomainError("a and b must be finite")
        if any(v < 0 for v in a):
            raise DomainError("a must be nonnegative")
        if not any(v > 0 for v in a):
            raise DegenerateInputError("a must not be identically zero")
        if not b[0] > 0 or any(y <= x for x, y in zip(b, b[1:])):
            raise DomainError("b must satisfy 0 < b_1 < ... < b_n")
        if not 0.0 < eps <= 0.5:
            raise DomainError(f"eps must lie in (0, 1/2], got {eps}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "eps", eps)

    @property
    def n(self) -> int:
        return len(self.a)

    @classmethod
    def from_json(cls, doc: dict) -> "LemmaInstance":
        try:
            return cls(tuple(doc["a"]), tuple(doc["b"]), doc["eps"])
        except KeyError as exc:
            raise DomainError(f"lemma JSON missing field {exc.args[0]!r}") from None


@dataclass(frozen=True)
class LemmaWitness:
    ell: int
    k: int  # 1-based
    dominance_ratio: float

    def to_json(self, bound: float | None = None) -> dict:
        doc = {"ell": self.ell, "k": self.k, "dominance_ratio": self.dominance_ratio}
        if bound is not None:
            doc["bound"] = bound
        return doc


def lemma_bound(inst: LemmaInstance) -> float:
    n = inst.n
    if n == 1:
        return 0.0
    b = np.asarray(inst.b)
    gap = float(np.min(np.log(b[1:]) - np.log(b[:-1])))
    return n * math.log(9 * n / inst.eps ** 2) / gap


def dominance_ratio(inst: LemmaInstance, ell: int, k: int) -> float:
    """``(sum_i a_i b_i^-ell) / (a_k b_k^-ell)`` evaluated in the log domain."""
    a, b = np.asarray(inst.a), np.asarray(inst.b)
    if a[k - 1] == 0:
        return math.inf
    pos = a > 0
    t = np.log(a[pos]) - ell * np.log(b[pos])
    return math.exp(logsumexp(t) - (math.log(a[k - 1]) - ell * math.log(b[k - 1])))


def find_witness(inst: LemmaInstance, max_ell: int | None = None) -> LemmaWitness:
    """Smallest ``ell`` at which the largest term carries the sum to ``1 + eps``.

    The exponents are scanned in vectorized chunks. For each ``ell`` the
    best index is the largest term (ties to the smaller index), so the
    condition reduces to ``logsumexp(t) - max(t) <= log(1 + eps)``.
    ``max_ell`` defaults to a safety cap well past the proven bound.
    """
    a, b = np.asarray(inst.a), np.asarray(inst.b)
    idx = np.flatnonzero(a > 0)
    la, lb = np.log(a[idx]), np.log(b[idx])
    thresh = math.log1p(inst.eps)
    if max_ell is None:
        max_ell = 2 * math.ceil(lemma_bound(inst)) + 2
    start, chunk = 0, _CHUNK0
    while start <= max_ell:
        ells = np.arange(start, min(start + chunk, max_ell + 1))
        t = la[None, :] - ells[:, None] * lb[None, :]
        top = np.argmax(t, axis=1)
        tmax = t[np.arange(ells.size), top]
        excess = logsumexp(t - tmax[:, None], axis=1)
        ok = np.flatnonzero(excess <= thresh)
        if ok.size:
            j = int(ok[0])
            return LemmaWitness(int(ells[j]), int(idx[top[j]]) + 1, float(math.exp(excess[j])))
        start += chunk
        chunk = min(2 * chunk, _CHUNK_MAX)
    raise SearchError(f"no dominance witness with ell <= {max_ell}")


def solve_json(doc: dict) -> dict:
    """``{"a","b","eps"}`` to ``{"ell","k","dominance_ratio","bound"}``."""
    inst = LemmaInstance.from_json(doc)
    return find_witness(inst).to_json(lemma_bound(inst))
