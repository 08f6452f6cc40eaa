"""Polynomial test functions and the real sl(2) generators acting on them.

A field of scaling dimension ``a`` is smeared with test functions from a
space carrying the generators

    P = d/dx,   D = x d/dx + (1 - a),   K = x^2 d/dx + 2 (1 - a) x

(the physical generators carry an extra global factor ``i``, which drops out
of every linear intertwining condition).  Polynomials are enough to check
every identity used downstream, degree by degree.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import format_rational, parse_rational


def _is_zero(c) -> bool:
    return c == 0


class Poly:
    """Polynomial in ``x`` with exact coefficients, degree-ascending.

    Coefficients may be ``Fraction`` or ``RegulatedScalar``; trailing zeros
    are stripped so equality is structural.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [x if not isinstance(x, int) else Fraction(x) for x in coeffs]
        while c and _is_zero(c[-1]):
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, k: int, coeff=1) -> "Poly":
        return cls([0] * k + [coeff])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == Poly([other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self + (-other)

    def __rsub__(self, other):
        return Poly([other]) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(c * other for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [0] * (len(a) + len(b) - 1)
        nz = [(j, q) for j, q in enumerate(b) if not _is_zero(q)]
        for i, p in enumerate(a):
            if _is_zero(p):
                continue
            for j, q in nz:
                out[i + j] = out[i + j] + p * q
        return Poly(out)

    def __rmul__(self, other):
        return Poly(other * c for c in self.coeffs)

    def deriv(self, k: int = 1) -> "Poly":
        c = self.coeffs
        if k == 0:
            return self
        out = []
        for i in range(k, len(c)):
            # falling factorial i (i-1) ... (i-k+1)
            ff = 1
            for t in range(i - k + 1, i + 1):
                ff *= t
            out.append(c[i] * ff if not _is_zero(c[i]) else c[i])
        return Poly(out)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "Poly":
        return cls(parse_rational(s) for s in data)

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        return "Poly(" + ", ".join(str(c) for c in self.coeffs) + ")"


class Generator(str, Enum):
    P = "P"
    D = "D"
    K = "K"


def sl2_apply(g, a, f: Poly) -> Poly:
    """Apply generator ``g`` in the representation of dimension ``a``."""
    g = Generator(g)
    df = f.deriv()
    if g is Generator.P:
        return df
    xp = Poly.x()
    if g is Generator.D:
        return xp * df + f * (1 - a)
    return xp * xp * df + xp * f * (2 * (1 - a))


def coproduct_apply(g, dims: Sequence, fs: Sequence[Poly]) -> list[list[Poly]]:
    """Leibniz summands of ``Delta(g)`` on a tuple: slot ``i`` gets ``g``."""
    if len(dims) != len(fs):
        raise ValueError(f"{len(dims)} dimensions for {len(fs)} test functions")
    if not fs:
        raise ValueError("coproduct needs at least one factor")
    out = []
    for i in range(len(fs)):
        row = list(fs)
        row[i] = sl2_apply(g, dims[i], fs[i])
        out.append(row)
    return out


def commutator(g1, g2, a, f: Poly) -> Poly:
    return sl2_apply(g1, a, sl2_apply(g2, a, f)) - sl2_apply(g2, a, sl2_apply(g1, a, f))
