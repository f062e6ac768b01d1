"""Input functions for the command line.

The accepted language is linear combinations of

    coef*sin(k*x),  coef*cos(k*x),  polynomials in x

where coefficients and frequencies are constant expressions (numbers,
``pi``, ``+ - * / ^``). Multiplication by a number may be implicit
(``3x``, ``2pi``, ``0.5sin(x)``). Anything else, such as ``x*sin(x)`` or
``sin(x^2)``, is rejected.

    >>> f = parse_function("sin(3x) - 0.1*cos(2*pi*x) + x*(1 - x)")
"""

from __future__ import annotations

import math
import re

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|(\*\*|[-+*/^()])|([A-Za-z_]+))")

# A parsed value is a polynomial (coefficient array, lowest degree first)
# plus a list of (amplitude, kind, frequency) trig terms.


class _Value:
    __slots__ = ("poly", "trig")

    def __init__(self, poly=(0.0,), trig=()):
        self.poly = np.trim_zeros(np.asarray(poly, dtype=float), "b")
        if self.poly.size == 0:
            self.poly = np.zeros(1)
        self.trig = tuple(trig)

    @property
    def is_const(self):
        return not self.trig and self.poly.size == 1

    @property
    def const(self):
        return float(self.poly[0])

    def scale(self, s):
        return _Value(self.poly * s, [(amp * s, kind, k) for amp, kind, k in self.trig])

    def __add__(self, other):
        return _Value(P.polyadd(self.poly, other.poly), self.trig + other.trig)

    def __neg__(self):
        return self.scale(-1.0)

    def __mul__(self, other):
        if self.is_const:
            return other.scale(self.const)
        if other.is_const:
            return self.scale(other.const)
        if self.trig or other.trig:
            raise DomainError("products of trig terms with non-constants are outside the grammar")
        return _Value(P.polymul(self.poly, other.poly))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip() == "":
                    break
                raise DomainError(f"unexpected character {text[pos]!r} at {pos} in {text!r}")
            num, op, name = m.groups()
            if num is not None:
                self.toks.append(("num", float(num)))
            elif op is not None:
                self.toks.append(("op", "^" if op == "**" else op))
            else:
                self.toks.append(("name", name.lower()))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            want = val or kind or "token"
            raise DomainError(f"expected {want!r} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        v = self.expr()
        if self.i != len(self.toks):
            raise DomainError(f"trailing input {self.toks[self.i][1]!r} in {self.text!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            v = v + (rhs if op == "+" else -rhs)
        return v

    def _starts_factor(self):
        kind, val = self.peek()
        return kind in ("num", "name") or (kind, val) == ("op", "(")

    def term(self):
        v = self.unary()
        while True:
            kind, val = self.peek()
            if (kind, val) == ("op", "*"):
                self.take()
                v = v * self.unary()
            elif (kind, val) == ("op", "/"):
                self.take()
                d = self.unary()
                if not d.is_const or d.const == 0.0:
                    raise DomainError("division is only by nonzero constants")
                v = v.scale(1.0 / d.const)
            elif self._starts_factor():
                v = v * self.power()  # implicit multiplication
            else:
                return v

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            e = self.unary()
            if not e.is_const:
                raise DomainError("exponents must be constants")
            if base.is_const:
                return _Value([base.const ** e.const])
            n = e.const
            if base.trig or n != int(n) or n < 0:
                raise DomainError("only polynomials may be raised to nonnegative integer powers")
            return _Value(P.polypow(base.poly, int(n)))
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return _Value([val])
        if kind == "op" and val == "(":
            v = self.expr()
            self.take("op", ")")
            return v
        if kind == "name":
            if val == "x":
                return _Value([0.0, 1.0])
            if val == "pi":
                return _Value([math.pi])
            if val in ("sin", "cos"):
                self.take("op", "(")
                arg = self.expr()
                self.take("op", ")")
                if arg.trig or arg.poly.size > 2 or arg.poly[0] != 0.0:
                    raise DomainError(f"{val} takes an argument of the form k*x")
                k = float(arg.poly[1]) if arg.poly.size == 2 else 0.0
                if val == "sin":
                    return _Value(trig=[(1.0, "sin", k)]) if k else _Value()
                return _Value(trig=[(1.0, "cos", k)]) if k else _Value([1.0])
            raise DomainError(f"unknown name {val!r}")
        raise DomainError(f"unexpected {val!r} in {self.text!r}")


class InputFunction:
    """Vectorized callable produced by :func:`parse_function`."""

    def __init__(self, text, value):
        self.text = text
        self.poly = value.poly
        self.trig = value.trig

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = P.polyval(x, self.poly) * np.ones_like(x)
        for amp, kind, k in self.trig:
            out = out + amp * (np.sin(k * x) if kind == "sin" else np.cos(k * x))
        return out

    def __repr__(self):
        return f"InputFunction({self.text!r})"


def parse_function(text: str) -> InputFunction:
    if not text or not text.strip():
        raise DomainError("empty function expression")
    return InputFunction(text, _Parser(text).parse())
