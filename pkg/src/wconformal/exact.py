"""Exact scalars: rationals, rational functions of one regulator, Pochhammer symbols.

Every coefficient in the package is either a :class:`fractions.Fraction` or a
:class:`RegulatedScalar`, a canonical quotient of two polynomials in a single
formal regulator ``eps``.  Dimensions are shifted by rational multiples of
``eps`` so that matrix entries which are singular at integer dimensions become
well-defined rational functions; :meth:`RegulatedScalar.limit` removes the
regulator again.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, gcd, lcm
from typing import Iterable, Sequence, Union

Rational = Fraction
Coeffs = tuple  # tuple of Fraction, ascending degree, no trailing zeros

_ZERO = Fraction(0)
_ONE = Fraction(1)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"not an exact rational: {x!r}")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; floats are rejected."""
    text = text.strip()
    if any(ch in text for ch in ".eE"):
        raise ValueError(f"floating point literal not allowed: {text!r}")
    return Fraction(text)


def format_rational(x) -> str:
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# dense univariate polynomials over Q


def _strip(c: Iterable[Fraction]) -> Coeffs:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(p: Coeffs, q: Coeffs) -> Coeffs:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] += c
    return _strip(out)


def poly_neg(p: Coeffs) -> Coeffs:
    return tuple(-c for c in p)


def poly_sub(p: Coeffs, q: Coeffs) -> Coeffs:
    return poly_add(p, poly_neg(q))


def poly_scale(p: Coeffs, s: Fraction) -> Coeffs:
    if s == 0:
        return ()
    return tuple(c * s for c in p)


def poly_mul(p: Coeffs, q: Coeffs) -> Coeffs:
    if not p or not q:
        return ()
    if len(p) == 1:
        return poly_scale(q, p[0])
    if len(q) == 1:
        return poly_scale(p, q[0])
    out = [_ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _strip(out)


def poly_divmod(p: Coeffs, q: Coeffs) -> tuple[Coeffs, Coeffs]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    if len(p) < len(q):
        return (), p
    rem = list(p)
    lead = q[-1]
    dq = len(q) - 1
    quo = [_ZERO] * (len(p) - dq)
    for k in range(len(p) - 1, dq - 1, -1):
        c = rem[k]
        if c == 0:
            continue
        c = c / lead
        quo[k - dq] = c
        for j, b in enumerate(q):
            rem[k - dq + j] -= c * b
    return _strip(quo), _strip(rem[:dq])


def poly_monic(p: Coeffs) -> Coeffs:
    if not p or p[-1] == 1:
        return p
    lead = p[-1]
    return tuple(c / lead for c in p)


def _primitive_int(p: Coeffs) -> list[int]:
    """Integer multiple of ``p`` with content 1 and positive leading coefficient."""
    den = 1
    for c in p:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if ints[-1] < 0:
        g = -g
    return [c // g for c in ints]


def _int_prem(p: list[int], q: list[int]) -> list[int]:
    """Pseudo-remainder ``lc(q)^k p mod q`` over the integers, trailing zeros stripped."""
    rem = list(p)
    lead = q[-1]
    dq = len(q) - 1
    for k in range(len(rem) - 1, dq - 1, -1):
        c = rem[k]
        if c == 0:
            continue
        rem = [x * lead for x in rem]
        for j, b in enumerate(q):
            rem[k - dq + j] -= c * b
    rem = rem[:dq]
    while rem and rem[-1] == 0:
        rem.pop()
    return rem


def poly_gcd(p: Coeffs, q: Coeffs) -> Coeffs:
    """Monic gcd via the primitive pseudo-remainder sequence over the integers."""
    if not p:
        return poly_monic(q)
    if not q:
        return poly_monic(p)
    if len(p) == 1 or len(q) == 1:
        return (_ONE,)
    a, b = _primitive_int(p), _primitive_int(q)
    while b:
        r = _int_prem(a, b)
        if not r:
            a = b
            break
        g = 0
        for c in r:
            g = gcd(g, c)
        a, b = b, [c // g for c in r]
        if len(b) == 1:
            return (_ONE,)
    lead = a[-1]
    return tuple(Fraction(c, lead) for c in a)


def poly_eval(p: Coeffs, x) -> Fraction:
    acc = _ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_valuation(p: Coeffs) -> int:
    """Multiplicity of the root 0 (``p`` nonzero)."""
    for i, c in enumerate(p):
        if c != 0:
            return i
    raise ValueError("valuation of the zero polynomial")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PoleReport:
    """Result of removing the regulator from a value singular at ``eps = 0``.

    ``order`` is the pole order and ``leading`` the coefficient of
    ``eps**-order`` in the Laurent expansion.
    """

    order: int
    leading: Fraction


class RegulatedScalar:
    """Canonical rational function ``num(eps) / den(eps)`` over Q.

    Canonical form: ``gcd(num, den) = 1``, ``den`` monic, zero is ``0/1``.
    Instances are immutable and hashable.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Sequence = (), den: Sequence = (_ONE,), *, _canonical=False):
        if _canonical:
            self.num, self.den = num, den
        else:
            n = _strip(as_fraction(c) for c in num)
            d = _strip(as_fraction(c) for c in den)
            if not d:
                raise ZeroDivisionError("RegulatedScalar with zero denominator")
            self.num, self.den = _canonical_pair(n, d)
        self._hash = None

    # construction helpers
    @classmethod
    def const(cls, x) -> "RegulatedScalar":
        x = as_fraction(x)
        return cls((x,) if x else (), (_ONE,), _canonical=True)

    @classmethod
    def linear(cls, c0, c1) -> "RegulatedScalar":
        """``c0 + c1*eps``."""
        return cls(_strip((as_fraction(c0), as_fraction(c1))), (_ONE,), _canonical=True)

    @classmethod
    def coerce(cls, x) -> "RegulatedScalar":
        if isinstance(x, RegulatedScalar):
            return x
        return cls.const(x)

    # predicates
    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, RegulatedScalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            if other == 0:
                return self
            other = RegulatedScalar.const(other)
        if len(self.den) == 1 and len(other.den) == 1:
            return RegulatedScalar(poly_add(self.num, other.num), (_ONE,), _canonical=True)
        if self.den == other.den:
            return RegulatedScalar(poly_add(self.num, other.num), self.den)
        num = poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den))
        return RegulatedScalar(num, poly_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RegulatedScalar(poly_neg(self.num), self.den, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, (RegulatedScalar, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RegulatedScalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            if other == 0:
                return RegulatedScalar()
            return RegulatedScalar(poly_scale(self.num, as_fraction(other)), self.den, _canonical=True)
        if len(self.den) == 1 and len(other.den) == 1:
            return RegulatedScalar(poly_mul(self.num, other.num), (_ONE,), _canonical=True)
        if len(other.num) == 1 and len(other.den) == 1:
            return self * other.num[0]
        if len(self.num) == 1 and len(self.den) == 1:
            return other * self.num[0]
        # cross-cancel before multiplying
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1, d2 = poly_divmod(self.num, g1)[0], poly_divmod(other.den, g1)[0]
        n2, d1 = poly_divmod(other.num, g2)[0], poly_divmod(self.den, g2)[0]
        num, den = poly_mul(n1, n2), poly_mul(d1, d2)
        lead = den[-1]
        if lead != 1:
            num, den = poly_scale(num, 1 / lead), poly_scale(den, 1 / lead)
        return RegulatedScalar(num, den, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "RegulatedScalar":
        if not self.num:
            raise ZeroDivisionError("inverse of zero RegulatedScalar")
        lead = self.num[-1]
        return RegulatedScalar(poly_scale(self.den, 1 / lead), poly_scale(self.num, 1 / lead), _canonical=True)

    def __truediv__(self, other):
        if not isinstance(other, RegulatedScalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return RegulatedScalar(poly_scale(self.num, 1 / as_fraction(other)), self.den, _canonical=True)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RegulatedScalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = RegulatedScalar.const(1)
        for _ in range(k):
            out = out * self
        return out

    # comparison / hashing
    def __eq__(self, other):
        if isinstance(other, RegulatedScalar):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return len(self.den) == 1 and self.num == ((Fraction(other),) if other else ())
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.num[0] if self.num else _ZERO)
            else:
                self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # evaluation and the regulator limit
    def __call__(self, eps) -> Fraction:
        eps = as_fraction(eps)
        d = poly_eval(self.den, eps)
        if d == 0:
            raise ZeroDivisionError(f"pole at eps={eps}")
        return poly_eval(self.num, eps) / d

    def pole_order(self) -> int:
        """Order of the pole at ``eps = 0`` (0 when finite)."""
        if not self.num:
            return 0
        return max(0, poly_valuation(self.den) - poly_valuation(self.num))

    def limit(self) -> Union[Fraction, PoleReport]:
        if self.den[0] != 0:
            return self.num[0] / self.den[0] if self.num else _ZERO
        vd = poly_valuation(self.den)
        vn = poly_valuation(self.num)
        return PoleReport(order=vd - vn, leading=self.num[vn] / self.den[vd])

    def finite_limit(self) -> Fraction:
        lim = self.limit()
        if isinstance(lim, PoleReport):
            raise ZeroDivisionError(f"regulated value has a pole of order {lim.order} at eps=0")
        return lim

    def laurent(self, upto: int = 0) -> dict[int, Fraction]:
        """Laurent coefficients at ``eps = 0`` for orders ``<= upto``.

        Only nonzero coefficients are returned.
        """
        if not self.num:
            return {}
        vd = poly_valuation(self.den)
        d = self.den[vd:]
        # power series of num / d up to degree upto + vd
        top = upto + vd
        if top < 0:
            return {}
        series = []
        num = list(self.num) + [_ZERO] * max(0, top + 1 - len(self.num))
        d0 = d[0]
        for k in range(top + 1):
            acc = num[k]
            for j in range(1, min(k, len(d) - 1) + 1):
                acc -= d[j] * series[k - j]
            series.append(acc / d0)
        return {k - vd: c for k, c in enumerate(series) if c != 0}

    def __repr__(self):
        if self.is_constant():
            return f"RegulatedScalar({format_rational(self.num[0] if self.num else 0)})"
        return f"RegulatedScalar({_fmt_poly(self.num)} / {_fmt_poly(self.den)})"

    def to_json(self):
        lim = self.limit()
        if isinstance(lim, PoleReport):
            return {"num": [format_rational(c) for c in self.num], "den": [format_rational(c) for c in self.den]}
        if self.is_constant():
            return format_rational(lim)
        return {"num": [format_rational(c) for c in self.num], "den": [format_rational(c) for c in self.den]}


def _canonical_pair(n: Coeffs, d: Coeffs) -> tuple[Coeffs, Coeffs]:
    if not n:
        return (), (_ONE,)
    if len(d) > 1:
        g = poly_gcd(n, d)
        if len(g) > 1:
            n = poly_divmod(n, g)[0]
            d = poly_divmod(d, g)[0]
    lead = d[-1]
    if lead != 1:
        inv = 1 / lead
        n = poly_scale(n, inv)
        d = poly_scale(d, inv)
    return n, d


def _fmt_poly(p: Coeffs) -> str:
    if not p:
        return "0"
    terms = []
    for k, c in enumerate(p):
        if c == 0:
            continue
        s = format_rational(c)
        terms.append(s if k == 0 else f"{s}*eps" + (f"^{k}" if k > 1 else ""))
    return "(" + " + ".join(terms) + ")"


EPS = RegulatedScalar.linear(0, 1)

Scalar = Union[Fraction, RegulatedScalar]


def is_zero(x) -> bool:
    return x == 0


def exact_limit(x) -> Union[Fraction, PoleReport]:
    """``x`` at ``eps = 0``; rationals pass through."""
    if isinstance(x, RegulatedScalar):
        return x.limit()
    return as_fraction(x)


def pochhammer(x, n: int):
    """Rising factorial ``x (x+1) ... (x+n-1)``; ``1`` for ``n = 0``."""
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    out = 1
    for k in range(n):
        out = out * (x + k)
    if isinstance(out, int):
        return Fraction(out)
    return out


def binomial(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


def fact(n: int) -> int:
    return factorial(n)


def multinomials(total: int, parts: int):
    """Yield ``(composition, multinomial coefficient)`` over all compositions."""
    if parts == 1:
        yield (total,), 1
        return
    for first in range(total + 1):
        c = comb(total, first)
        for rest, m in multinomials(total - first, parts - 1):
            yield (first,) + rest, c * m


def compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative ints summing to ``total`` (lexicographic)."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest
