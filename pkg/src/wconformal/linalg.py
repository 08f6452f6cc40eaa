"""Exact dense linear algebra over Q and over Q(eps).

Matrices are lists of row lists.  Entries may be ``Fraction`` or
``RegulatedScalar``; all routines only use field operations and ``== 0``.
Ranks of rational matrices use fraction-free (Bareiss) elimination on
integer-scaled rows.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


class SingularSystemError(ArithmeticError):
    """Raised when an exact linear system has no (unique) solution."""


def zeros(r: int, c: int) -> list[list]:
    return [[Fraction(0)] * c for _ in range(r)]


def identity(n: int) -> list[list]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    if not a:
        return []
    inner = len(b)
    if len(a[0]) != inner:
        raise ValueError(f"shape mismatch {len(a)}x{len(a[0])} @ {len(b)}x{len(b[0]) if b else 0}")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new = []
        for j in range(cols):
            acc = 0
            for k in range(inner):
                x = row[k]
                if x != 0:
                    y = b[k][j]
                    if y != 0:
                        acc = acc + x * y
            new.append(acc if not isinstance(acc, int) else Fraction(acc))
        out.append(new)
    return out


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    out = []
    for row in a:
        acc = 0
        for x, y in zip(row, v):
            if x != 0 and y != 0:
                acc = acc + x * y
        out.append(acc if not isinstance(acc, int) else Fraction(acc))
    return out


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)] if a else []


def is_identity(a: Sequence[Sequence]) -> bool:
    return all(a[i][j] == (1 if i == j else 0) for i in range(len(a)) for j in range(len(a[i])))


def rref(a: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns (leftmost pivots first)."""
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv if x != 0 else x for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y if y != 0 else x for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def _integer_rows(a: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for row in a:
        den = 1
        for x in row:
            den = lcm(den, Fraction(x).denominator)
        out.append([int(Fraction(x) * den) for x in row])
    return out


def rank(a: Sequence[Sequence]) -> int:
    """Exact rank; Bareiss on integer rows for rational input."""
    if not a or not a[0]:
        return 0
    if not all(isinstance(x, (int, Fraction)) for row in a for x in row):
        return len(rref(a)[1])
    m = _integer_rows(a)
    rows, cols = len(m), len(m[0])
    r = 0
    prev = 1
    for c in range(cols):
        if r >= rows:
            break
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, rows):
            mic = m[i][c]
            m[i] = [(p * m[i][j] - mic * m[r][j]) // prev for j in range(cols)]
        prev = p
        r += 1
    return r


def nullspace(a: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Basis of ``{x : a x = 0}`` from the reduced row echelon form."""
    if not a:
        n = ncols or 0
        return identity(n)
    n = len(a[0])
    red, piv = rref(a)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(red, piv):
            if row[f] != 0:
                v[pc] = -row[f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> list:
    """A particular solution of ``a x = b``; free variables are set to zero.

    This is the solution supported on the leftmost pivot columns.  Raises
    :class:`SingularSystemError` when the system is inconsistent.
    """
    if not a:
        if any(x != 0 for x in b):
            raise SingularSystemError("inconsistent empty system")
        return []
    n = len(a[0])
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, piv = rref(aug)
    if n in piv:
        raise SingularSystemError("inconsistent linear system")
    x = [Fraction(0)] * n
    for row, pc in zip(red, piv):
        x[pc] = row[n]
    return x


def solve_unique(a: Sequence[Sequence], b: Sequence) -> list:
    return [col[0] for col in solve_unique_many(a, [[bi] for bi in b])]


def solve_unique_many(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    """Solve ``a x = b`` for several right-hand sides (columns of ``b``) in one elimination."""
    n = len(a[0]) if a else 0
    k = len(b[0]) if b else 0
    red, piv = rref([list(row) + list(bi) for row, bi in zip(a, b)])
    if any(p >= n for p in piv):
        raise SingularSystemError("inconsistent linear system")
    if len(piv) < n:
        raise SingularSystemError("underdetermined linear system")
    x = [[Fraction(0)] * k for _ in range(n)]
    for row, pc in zip(red, piv):
        x[pc] = row[n:]
    return x


def inverse(a: Sequence[Sequence]) -> list[list]:
    n = len(a)
    aug = [list(row) + idrow for row, idrow in zip(a, identity(n))]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise SingularSystemError("matrix is not invertible")
    return [row[n:] for row in red]


def in_column_space(a: Sequence[Sequence], b: Sequence) -> bool:
    try:
        solve(a, b)
    except SingularSystemError:
        return False
    return True
