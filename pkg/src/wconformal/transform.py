"""Transformation matrices between intertwiner bases.

Storage convention for every matrix ``M`` of this module: rows are indexed
by the basis an element is expanded *into*, columns by the element being
expanded, i.e. ``element[col] = sum_row M[row][col] * basis[row]``.  With
this convention composition is the ordinary matrix product.

For three arguments the block of total order ``n`` is indexed by
``m2 = 0..n`` (the m-tuple is ``(n - m2, m2)``).  ``Y_abc(n)`` expands
``T_abc(f, g, h)`` in the basis ``T_cab(h, f, g)``:

    T_abc^{(n-j, j)}(f,g,h) = sum_i Y[i][j] T_cab^{(n-i, i)}(h,f,g).

Regulated dimensions: the k-th dimension of a tuple is shifted by
``mult_k * eps`` with ``mult_k = 3**(k-1)`` (or ``5**(k-1)``); every
intermediate dimension inherits the shift of the leaves it is built from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations as _perms
from typing import Sequence

from . import linalg
from .exact import RegulatedScalar, as_fraction, binomial, compositions, exact_limit, fact, pochhammer
from .intertwiner import Scheme, basis_element, default_scheme, t_monomial_coeffs, validate_scheme

REGULATOR_SETS = {"3pow": 3, "5pow": 5}


def multipliers(n: int, regulator_set: str = "3pow") -> tuple[int, ...]:
    base = REGULATOR_SETS[regulator_set]
    return tuple(base**k for k in range(n))


def regulate(dims: Sequence, mults: Sequence | None = None, regulator_set: str = "3pow") -> tuple:
    """Shift integer dimensions by rational multiples of ``eps``."""
    if mults is None:
        mults = multipliers(len(dims), regulator_set)
    return tuple(RegulatedScalar.linear(as_fraction(a), as_fraction(mu)) for a, mu in zip(dims, mults))


@dataclass
class TransformMatrix:
    rows: list
    cols: list
    entries: list
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "TransformMatrix") -> "TransformMatrix":
        return TransformMatrix(self.rows, other.cols, linalg.matmul(self.entries, other.entries))

    def limit(self) -> list[list]:
        """Entrywise ``eps -> 0``; pole entries become :class:`PoleReport`."""
        return [[exact_limit(x) for x in row] for row in self.entries]

    def is_identity(self) -> bool:
        return linalg.is_identity(self.entries)

    def m_tilde_sums(self) -> list:
        """For each target index ``m~`` (a row here), the sum over all ``m``."""
        return [sum(row, Fraction(0)) for row in self.entries]


def _block_tuples3(n: int) -> list[tuple[int, int]]:
    return [(n - k, k) for k in range(n + 1)]


def block_tuples(nargs: int, total: int) -> list[tuple[int, ...]]:
    """m-tuples of a block, ordered by the reversed tuple (m2 ascending for 3 args)."""
    return sorted(compositions(total, nargs - 1), key=lambda m: m[::-1])


# ---------------------------------------------------------------------------
# Y three ways


@lru_cache(maxsize=None)
def y_closed(a, b, c, n: int) -> TransformMatrix:
    """Closed single-sum expression for ``Y_abc(n)``."""
    rows = []
    for mt in range(n + 1):
        pre_row = pochhammer(2 * mt - 2 * a - 2 * b + 4, n - mt)
        row = []
        for m in range(n + 1):
            acc = 0
            for s in range(mt + 1):
                bn = binomial(n - m, s)
                if bn == 0:
                    continue
                term = (
                    bn
                    * binomial(n - s, mt - s)
                    * pochhammer(n + m - s - 2 * b - 2 * c + 4, s)
                    * pochhammer(s - 2 * a + 2, n - m - s)
                    * pochhammer(n - mt - 2 * c + 2, mt - s)
                    / pochhammer(2 * a + 2 * b - 2 * mt - 2, mt - s)
                )
                acc = acc + term
            sign = -1 if (n - mt) % 2 else 1
            val = (
                sign
                * Fraction(binomial(n, m), binomial(n, mt))
                * pochhammer(2 - 2 * b, m)
                / pochhammer(2 - 2 * b, mt)
                / pre_row
                * acc
            )
            row.append(val)
        rows.append(row)
    return TransformMatrix(_block_tuples3(n), _block_tuples3(n), rows, {"dims": (a, b, c), "method": "closed"})


def _t3_tables(a, b, c, n):
    """Monomial tables of ``T_abc(f,g,h)`` and of ``T_cab(h,f,g)`` keyed by (r_f, r_g, r_h)."""
    tabc = [t_monomial_coeffs(basis_element((a, b, c), m)) for m in _block_tuples3(n)]
    tcab = []
    for m in _block_tuples3(n):
        raw = t_monomial_coeffs(basis_element((c, a, b), m))
        tcab.append({(r[1], r[2], r[0]): v for r, v in raw.items()})
    return tabc, tcab


class DegenerateRegulatorError(ArithmeticError):
    """The chosen regulator multipliers make a basis degenerate; re-regulate."""


@lru_cache(maxsize=None)
def y_recursive(a, b, c, n: int) -> TransformMatrix:
    """Triangular recursion on the probe triples ``(k, 0, n-k)``."""
    tabc, tcab = _t3_tables(a, b, c, n)
    for k in range(n + 1):
        for j in range(k + 1, n + 1):
            if tcab[j].get((k, 0, n - k), 0) != 0:
                raise AssertionError(f"triangularity fails at j={j}, k={k}")
    y = [[None] * (n + 1) for _ in range(n + 1)]
    for m in range(n + 1):
        for mt in range(n + 1):
            key = (mt, 0, n - mt)
            num = tabc[m].get(key, 0)
            for j in range(mt):
                t = tcab[j].get(key, 0)
                if t != 0:
                    num = num - y[j][m] * t
            den = tcab[mt].get(key, 0)
            if den == 0:
                raise DegenerateRegulatorError(f"vanishing pivot T_cab at m2={mt}, n={n}")
            y[mt][m] = num / den
    return TransformMatrix(_block_tuples3(n), _block_tuples3(n), y, {"dims": (a, b, c), "method": "recursive"})


@lru_cache(maxsize=None)
def y_oracle(a, b, c, n: int) -> TransformMatrix:
    """Brute-force solve over all monomials of total order ``n``."""
    tabc, tcab = _t3_tables(a, b, c, n)
    monos = list(compositions(n, 3))
    mat = [[tcab[i].get(r, Fraction(0)) for i in range(n + 1)] for r in monos]
    rhs = [[tabc[m].get(r, Fraction(0)) for m in range(n + 1)] for r in monos]
    try:
        y = linalg.solve_unique_many(mat, rhs)
    except linalg.SingularSystemError as exc:
        raise DegenerateRegulatorError(str(exc)) from exc
    return TransformMatrix(_block_tuples3(n), _block_tuples3(n), y, {"dims": (a, b, c), "method": "oracle"})


Y_METHODS = {"closed": y_closed, "recursive": y_recursive, "oracle": y_oracle}


def y_matrix(a, b, c, n: int, method: str = "closed") -> TransformMatrix:
    return Y_METHODS[method](a, b, c, n)


def i_matrix(n: int) -> TransformMatrix:
    ent = [[Fraction((-1) ** j) if i == j else Fraction(0) for j in range(n + 1)] for i in range(n + 1)]
    return TransformMatrix(_block_tuples3(n), _block_tuples3(n), ent, {"method": "flip"})


def x_matrix(a, b, c, n: int) -> TransformMatrix:
    """Expansion of ``T_abc(f,g,h)`` in the re-bracketed basis ``T_S,abc(f,g,h)``.

    In the storage convention this is ``(-1)^n I @ Y_abc(n)``.
    """
    y = y_closed(a, b, c, n)
    sign = -1 if n % 2 else 1
    ent = [[sign * (-1) ** i * y.entries[i][j] for j in range(n + 1)] for i in range(n + 1)]
    return TransformMatrix(y.rows, y.cols, ent, {"dims": (a, b, c), "method": "x"})


# ---------------------------------------------------------------------------
# permutation matrices Z for the default basis


def _compose(rho: tuple, sigma: tuple) -> tuple:
    # (rho o sigma)_j = rho_{sigma_j}, 1-based entries
    return tuple(rho[s - 1] for s in sigma)


def permute(perm: Sequence[int], xs: Sequence) -> tuple:
    """``sigma(x)_k = x_{i_k}`` for the 1-based permutation tuple ``perm``."""
    return tuple(xs[i - 1] for i in perm)


def perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def _identity_block(nargs: int, total: int) -> TransformMatrix:
    bt = block_tuples(nargs, total)
    return TransformMatrix(bt, bt, linalg.identity(len(bt)), {"method": "identity"})


@lru_cache(maxsize=None)
def transposition_matrix(dims: tuple, k: int, total: int) -> TransformMatrix:
    """``Z`` for swapping positions ``k, k+1`` (1-based) in the default basis."""
    nargs = len(dims)
    bt = block_tuples(nargs, total)
    index = {m: i for i, m in enumerate(bt)}
    ent = linalg.zeros(len(bt), len(bt))
    swapped = list(dims)
    swapped[k - 1], swapped[k] = swapped[k], swapped[k - 1]
    for col, mt in enumerate(bt):
        if k == nargs - 1:
            ent[col][col] = Fraction(-1 if mt[k - 1] % 2 else 1)
            continue
        # local three-argument structure (x, y, rest) of the unswapped element
        rest = _subcomb_dim(dims, mt, k + 1)
        x, y = dims[k - 1], dims[k]
        local = mt[k - 1] + mt[k]
        blk = _local_swap(x, y, rest, local)
        for j in range(local + 1):
            m = list(mt)
            m[k - 1], m[k] = local - j, j
            val = blk.entries[j][mt[k]]
            if val != 0:
                ent[index[tuple(m)]][col] = val
    return TransformMatrix(bt, bt, ent, {"dims": dims, "swap": k, "method": "transposition"})


def _subcomb_dim(dims, m, start):
    """Output dimension of the default sub-comb on leaves ``start..n`` (1-based start)."""
    tail = dims[start:]
    mt = m[start:]
    if len(tail) == 1:
        return tail[0]
    return sum(tail) - sum(mt) - len(tail) + 1


@lru_cache(maxsize=None)
def _local_swap(x, y, z, n):
    # T_{yxz}(v,u,w) in the basis T_{xyz}(u,v,w):  Y_{yzx} @ I
    return y_closed(y, z, x, n) @ i_matrix(n)


def reduced_word(perm: Sequence[int], choose=None) -> list[int]:
    """Adjacent transpositions ``s_k`` with ``perm = s_{k_1} o ... o s_{k_r}``.

    ``choose`` picks which descent to peel off first (default: leftmost).
    """
    p = list(perm)
    word: list[int] = []
    while True:
        descents = [k for k in range(1, len(p)) if p[k - 1] > p[k]]
        if not descents:
            break
        k = choose(descents) if choose else descents[0]
        p[k - 1], p[k] = p[k], p[k - 1]
        word.append(k)
    return word[::-1]


def z_default(dims: Sequence, perm: Sequence[int], total: int, word: Sequence[int] | None = None) -> TransformMatrix:
    """``Z`` with ``T_{sigma(a)} o tau_sigma = Z . T_a`` in the default basis."""
    dims = tuple(dims)
    perm = tuple(perm)
    if sorted(perm) != list(range(1, len(dims) + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{len(dims)}")
    if word is None:
        return _z_default_cached(dims, perm, total)
    return _z_from_word(dims, tuple(word), total)


@lru_cache(maxsize=None)
def _z_default_cached(dims, perm, total):
    return _z_from_word(dims, tuple(reduced_word(perm)), total)


def _z_from_word(dims, word, total):
    # perm = s_{w1} o s_{w2} o ... ;  Z_{rho o sigma}(a) = Z_rho(a) Z_sigma(rho(a))
    nargs = len(dims)
    out = _identity_block(nargs, total)
    current = tuple(range(1, nargs + 1))
    for k in word:
        s = list(range(1, nargs + 1))
        s[k - 1], s[k] = s[k], s[k - 1]
        out = out @ transposition_matrix(permute(current, dims), k, total)
        current = _compose(current, tuple(s))
    return out


def all_reduced_words(perm: Sequence[int]) -> list[list[int]]:
    perm = list(perm)
    descents = [k for k in range(1, len(perm)) if perm[k - 1] > perm[k]]
    if not descents:
        return [[]]
    out = []
    for k in descents:
        p = list(perm)
        p[k - 1], p[k] = p[k], p[k - 1]
        for w in all_reduced_words(p):
            out.append(w + [k])
    return out


# ---------------------------------------------------------------------------
# general bracket schemes


def _s_to_default(x, y, z, n):
    # T_S,xyz(u,v,w) = (-1)^{m1} T_zxy(w,u,v); expand that via Z_{(3,1,2)}
    zm = z_default((x, y, z), (3, 1, 2), n)
    ent = [[zm.entries[i][j] * (-1 if (n - j) % 2 else 1) for j in range(n + 1)] for i in range(n + 1)]
    return TransformMatrix(zm.rows, zm.cols, ent)


def _comb_dim(dims, m):
    if len(dims) == 1:
        return dims[0]
    return sum(dims) - sum(m) - len(dims) + 1


def _combine(mu, ldims, lm, rdims, rm):
    """Expand ``lam_mu(comb_L, comb_R)`` as a combination of default combs."""
    if len(ldims) == 1:
        return {(mu,) + tuple(rm): Fraction(1)}
    x = ldims[0]
    inner_dims, inner_m = ldims[1:], lm[1:]
    dl_inner = _comb_dim(inner_dims, inner_m)
    dr = _comb_dim(rdims, rm)
    n = mu + lm[0]
    w = _s_to_default(x, dl_inner, dr, n)
    out: dict = {}
    col = lm[0]  # S-scheme tuple (mu, lm[0]) has m2 = lm[0]
    for i in range(n + 1):
        coeff = w.entries[i][col]
        if coeff == 0:
            continue
        n1, n2 = n - i, i
        for tail, c2 in _combine(n2, inner_dims, inner_m, rdims, rm).items():
            key = (n1,) + tail
            out[key] = out.get(key, 0) + coeff * c2
    return {k: v for k, v in out.items() if v != 0}


def scheme_expansion(scheme: Scheme, dims: Sequence, m: Sequence[int]) -> dict:
    """``T_{B,a}^m`` as ``{default m-tuple: coefficient}`` via flips and Y-moves."""
    dims = tuple(dims)
    counter = iter(m)

    def walk(node):
        if isinstance(node, int):
            return [dims[node]], {(): Fraction(1)}
        mu = next(counter)
        ld, lexp = walk(node[0])
        rd, rexp = walk(node[1])
        out: dict = {}
        for lm, lc in lexp.items():
            for rm, rc in rexp.items():
                for key, c in _combine(mu, ld, lm, rd, rm).items():
                    out[key] = out.get(key, 0) + lc * rc * c
        return ld + rd, {k: v for k, v in out.items() if v != 0}

    return walk(scheme)[1]


def scheme_matrix(scheme: Scheme, dims: Sequence, total: int) -> TransformMatrix:
    """``W`` with ``T_B = W . T_default`` on one block."""
    nargs = len(dims)
    validate_scheme(scheme, nargs)
    bt = block_tuples(nargs, total)
    index = {m: i for i, m in enumerate(bt)}
    ent = linalg.zeros(len(bt), len(bt))
    for col, m in enumerate(bt):
        for key, c in scheme_expansion(scheme, dims, m).items():
            ent[index[key]][col] = c
    return TransformMatrix(bt, bt, ent, {"scheme": scheme, "dims": tuple(dims)})


def z_matrix(
    dims: Sequence,
    perm: Sequence[int],
    source: Scheme | None = None,
    target: Scheme | None = None,
    total: int = 0,
) -> TransformMatrix:
    """``T_{B1, sigma(a)} o tau_sigma = Z . T_{B2, a}`` on the block of total order ``total``."""
    dims = tuple(dims)
    nargs = len(dims)
    dflt = default_scheme(nargs)
    source = dflt if source is None else source
    target = dflt if target is None else target
    z = z_default(dims, perm, total)
    if source != dflt:
        z = z @ scheme_matrix(source, permute(perm, dims), total)
    if target != dflt:
        w = scheme_matrix(target, dims, total)
        z = TransformMatrix(w.rows, z.cols, linalg.matmul(linalg.inverse(w.entries), z.entries))
    z.meta = {"dims": dims, "perm": tuple(perm), "source": source, "target": target, "total": total}
    return z


def all_permutations(n: int):
    return list(_perms(range(1, n + 1)))


def chain_sum(a, b, s: int, m: int):
    """Sum over chains ``s = j_1 < ... < j_l = m`` from the Y recursion.

    Each chain contributes ``(-1)^(l-1)`` times the product over consecutive
    steps of ``(2a + 2b - 2 j' - 3)_(j' - j) / (j' - j)!``.
    """
    if m < s:
        raise ValueError("chains need s <= m")
    inner = range(s + 1, m)
    total = Fraction(0)
    for k in range(len(inner) + 1):
        for mid in combinations(inner, k):
            chain = (s, *mid, m) if m > s else (s,)
            term = Fraction((-1) ** (len(chain) - 1))
            for lo, hi in zip(chain, chain[1:]):
                term *= pochhammer(2 * a + 2 * b - 2 * hi - 3, hi - lo) / fact(hi - lo)
            total += term
    return total


def chain_sum_closed(a, b, s: int, m: int):
    """Closed form of :func:`chain_sum`."""
    if m == s:
        return Fraction(1)
    num = (2 * a + 2 * b - 2 * m - 3) * pochhammer(2 * a + 2 * b - m - s - 2, m - s - 1)
    return Fraction((-1) ** (m - s)) * num / fact(m - s)
