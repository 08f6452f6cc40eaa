"""Local intertwiners and the multi-argument intertwiner bases built from them.

The two-argument local intertwiner of dimensions ``(a, b) -> c`` is

    lam(f, g) = sum_{p+q = a+b-c-1} (-1)^q (c+b-a)_p/p! (c+a-b)_q/q! f^(p) g^(q).

Multi-argument bases nest these along a bracket scheme.  A scheme is a
binary tree written as nested 2-tuples whose leaves are the argument
positions ``0..n-1`` in order, e.g. ``(0, (1, 2))`` (the default right comb)
or ``((0, 1), 2)``.  The m-index of an internal node is the derivative count
``m`` of its intertwiner; internal nodes are numbered in pre-order, so for
the right comb ``m_1`` belongs to the outermost bracket.

Dimensions may be integers, fractions or regulated scalars; all coefficient
formulas are written in terms of ``(a, b, m)`` so that the derivative counts
stay integer while the dimensions carry the regulator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

from .exact import compositions, fact, multinomials, pochhammer
from .testfn import Poly

Scheme = Union[int, tuple]


# ---------------------------------------------------------------------------
# two-argument intertwiners


@lru_cache(maxsize=None)
def node_coeff(a, b, m: int, p: int):
    """Coefficient of ``f^(p) g^(m-p)`` in the intertwiner of order ``m``."""
    q = m - p
    if p < 0 or q < 0:
        return Fraction(0)
    sign = -1 if q % 2 else 1
    return sign * pochhammer(2 * b - 1 - m, p) * pochhammer(2 * a - 1 - m, q) / (fact(p) * fact(q))


def lambda_coeff(a: int, b: int, c: int, p: int, q: int) -> Fraction:
    m = a + b - c - 1
    if m < 0 or p < 0 or q < 0 or p + q != m:
        return Fraction(0)
    return node_coeff(a, b, m, p)


def lambda_table(a: int, b: int, c: int) -> dict[tuple[int, int], Fraction]:
    m = a + b - c - 1
    if m < 0:
        return {}
    return {(p, m - p): node_coeff(a, b, m, p) for p in range(m + 1)}


def lambda_apply_m(a, b, m: int, f: Poly, g: Poly) -> Poly:
    out = Poly()
    for p in range(m + 1):
        c = node_coeff(a, b, m, p)
        if c != 0:
            out = out + (f.deriv(p) * g.deriv(m - p)) * c
    return out


def lambda_apply(a: int, b: int, c: int, f: Poly, g: Poly) -> Poly:
    m = a + b - c - 1
    if m < 0:
        raise ValueError(f"no local intertwiner {a}x{b}->{c}: need c < a+b")
    return lambda_apply_m(a, b, m, f, g)


# ---------------------------------------------------------------------------
# bracket schemes


def default_scheme(n: int) -> Scheme:
    """Right comb ``(0, (1, (2, ...)))`` on ``n`` leaves."""
    if n < 1:
        raise ValueError("a scheme needs at least one leaf")
    tree: Scheme = n - 1
    for i in range(n - 2, -1, -1):
        tree = (i, tree)
    return tree


S_SCHEME: Scheme = ((0, 1), 2)


def leaves(scheme: Scheme) -> list[int]:
    if isinstance(scheme, int):
        return [scheme]
    return leaves(scheme[0]) + leaves(scheme[1])


def validate_scheme(scheme: Scheme, n: int | None = None) -> int:
    if not isinstance(scheme, int):
        if not (isinstance(scheme, tuple) and len(scheme) == 2):
            raise ValueError(f"malformed bracket scheme: {scheme!r}")
    lv = leaves(scheme)
    if lv != list(range(len(lv))):
        raise ValueError(f"scheme leaves must be 0..n-1 in order, got {lv}")
    if n is not None and len(lv) != n:
        raise ValueError(f"scheme has {len(lv)} leaves, expected {n}")
    return len(lv)


def internal_count(scheme: Scheme) -> int:
    return 0 if isinstance(scheme, int) else 1 + internal_count(scheme[0]) + internal_count(scheme[1])


def node_dims(scheme: Scheme, dims: Sequence, m: Sequence[int]) -> list:
    """Output dimension of every internal node, in pre-order."""
    out: list = []

    def walk(node, k):
        # returns (dimension, next m position)
        if isinstance(node, int):
            return dims[node], k
        idx = len(out)
        out.append(None)
        dl, k2 = walk(node[0], k + 1)
        dr, k3 = walk(node[1], k2)
        out[idx] = dl + dr - 1 - m[k]
        return out[idx], k3

    walk(scheme, 0)
    return out


def intermediate_dims(dims: Sequence, m: Sequence[int]) -> tuple:
    """``(eps_1, ..., eps_{n-2}, e)`` of the default basis element."""
    n = len(dims)
    if len(m) != n - 1:
        raise ValueError(f"need {n - 1} m-indices for {n} dimensions, got {len(m)}")
    eps = []
    for i in range(1, n - 1):
        eps.append(sum(dims[i:]) - sum(m[i:]) - n + i + 1)
    e = sum(dims) - sum(m) - n + 1
    return tuple(eps) + (e,)


def total_m(dims: Sequence, e) -> int:
    return sum(dims) - e - len(dims) + 1


@dataclass(frozen=True)
class BasisElement:
    scheme: Scheme
    dims: tuple
    m: tuple

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def target(self):
        if self.n == 1:
            return self.dims[0]
        return node_dims(self.scheme, self.dims, self.m)[0]

    @property
    def node_dims(self) -> list:
        return node_dims(self.scheme, self.dims, self.m)

    def to_json(self) -> dict:
        from .io import scalar_json

        return {
            "scheme": _scheme_json(self.scheme),
            "dims": [scalar_json(d) for d in self.dims],
            "m": list(self.m),
            "intermediate": [scalar_json(d) for d in self.node_dims[1:]],
            "target": scalar_json(self.target),
        }


def _scheme_json(s: Scheme):
    return s if isinstance(s, int) else [_scheme_json(s[0]), _scheme_json(s[1])]


def basis_element(dims: Sequence, m: Sequence[int], scheme: Scheme | None = None) -> BasisElement:
    dims = tuple(dims)
    if scheme is None:
        scheme = default_scheme(len(dims))
    validate_scheme(scheme, len(dims))
    if len(m) != len(dims) - 1 or any(x < 0 for x in m):
        raise ValueError(f"invalid m-tuple {m} for {len(dims)} arguments")
    return BasisElement(scheme, dims, tuple(m))


def _satisfies_bounds(dims: Sequence[int], m: Sequence[int]) -> bool:
    # default-basis bounds: intermediate dimensions stay within the allowed range
    n = len(dims)
    if n < 2:
        return True
    *eps, e = intermediate_dims(dims, m)
    if n >= 3:
        if eps[-1] > dims[-2] + dims[-1] - 1:
            return False
        if eps[0] < e - dims[0] + 1:
            return False
        for i in range(1, n - 2):
            if eps[i - 1] > sum(dims[i:]) - n + i + 1:
                return False
    else:
        if e > dims[0] + dims[1] - 1:
            return False
    return True


def enumerate_m_tuples(scheme: Scheme | None, dims: Sequence[int], e: int) -> list[BasisElement]:
    """Basis of the intertwiner space ``pi_{a_1} x ... x pi_{a_n} -> pi_e``."""
    dims = tuple(dims)
    n = len(dims)
    if scheme is None:
        scheme = default_scheme(n)
    validate_scheme(scheme, n)
    total = total_m(dims, e)
    if total < 0:
        return []
    out = []
    for m in compositions(total, n - 1):
        if scheme == default_scheme(n) and not _satisfies_bounds(dims, m):
            continue
        out.append(BasisElement(scheme, dims, m))
    return out


# ---------------------------------------------------------------------------
# action on test functions and monomial expansion


def t_apply(elem: BasisElement, fs: Sequence[Poly]) -> Poly:
    if len(fs) != elem.n:
        raise ValueError(f"{elem.n}-argument intertwiner applied to {len(fs)} functions")
    counter = iter(elem.m)

    def walk(node):
        if isinstance(node, int):
            return fs[node], elem.dims[node]
        m = next(counter)
        fl, dl = walk(node[0])
        fr, dr = walk(node[1])
        return lambda_apply_m(dl, dr, m, fl, fr), dl + dr - 1 - m

    return walk(elem.scheme)[0]


def t_monomial_coeffs(elem: BasisElement) -> dict[tuple[int, ...], object]:
    """Coefficients of ``prod_i f_i^(r_i)`` in the expansion of ``elem``."""
    return _monomial_table(elem.scheme, elem.dims, elem.m)


@lru_cache(maxsize=None)
def _monomial_table(scheme, dims, m):
    n = len(dims)
    counter = iter(m)

    def walk(node):
        # table keyed by derivative orders of the leaves under ``node``
        if isinstance(node, int):
            return [node], {(0,): Fraction(1)}, dims[node]
        mm = next(counter)
        lv_l, tl, dl = walk(node[0])
        lv_r, tr, dr = walk(node[1])
        nl, nr = len(lv_l), len(lv_r)
        table: dict = {}
        for p in range(mm + 1):
            c = node_coeff(dl, dr, mm, p)
            if c == 0:
                continue
            q = mm - p
            dist_l = list(multinomials(p, nl))
            dist_r = list(multinomials(q, nr))
            for rl, cl in tl.items():
                for rr, cr in tr.items():
                    base = c * cl * cr
                    for jl, ml in dist_l:
                        kl = tuple(x + y for x, y in zip(rl, jl))
                        for jr, mr in dist_r:
                            key = kl + tuple(x + y for x, y in zip(rr, jr))
                            table[key] = table.get(key, 0) + base * (ml * mr)
        return lv_l + lv_r, table, dl + dr - 1 - mm

    lv, table, _ = walk(scheme)
    # leaves of a valid scheme are already in positional order
    assert lv == list(range(n))
    return {k: v for k, v in table.items() if v != 0}
