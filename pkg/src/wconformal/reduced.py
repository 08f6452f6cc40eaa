"""The reduced field space, the multi-component bracket and its constraints.

Vectors in the reduced space are sparse dicts ``label -> scalar``.  The
bracket ``gamma(A, B)_m`` lands in grade ``a + b - 1 - m`` and is read off
the structure constants ``F[A, B, C]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from . import linalg
from .exact import RegulatedScalar, as_fraction, pochhammer
from .transform import regulate, y_closed

Label = str
Vector = dict  # label -> scalar


class SpaceError(ValueError):
    """Invalid reduced space or structure-constant data."""


def vadd(u: Mapping, v: Mapping, scale=1) -> Vector:
    out = dict(u)
    for k, x in v.items():
        y = out.get(k, 0) + scale * x
        if y == 0:
            out.pop(k, None)
        else:
            out[k] = y
    return out


def vscale(u: Mapping, s) -> Vector:
    if s == 0:
        return {}
    return {k: x * s for k, x in u.items() if x * s != 0}


def vclean(u: Mapping) -> Vector:
    return {k: x for k, x in u.items() if x != 0}


@dataclass
class ReducedSpace:
    grades: dict  # grade -> list of labels

    def __post_init__(self):
        self.grades = {int(a): list(fs) for a, fs in sorted(self.grades.items()) if fs}
        self._grade_of: dict[str, int] = {}
        for a, fs in self.grades.items():
            if a < 1:
                raise SpaceError(
                    f"grade {a} violates the unitarity bound; the identity field is excluded from the reduced space"
                )
            for f in fs:
                if f in self._grade_of:
                    raise SpaceError(f"duplicate field label {f!r}")
                self._grade_of[f] = a

    def grade(self, label: Label) -> int:
        try:
            return self._grade_of[label]
        except KeyError:
            raise SpaceError(f"unknown field label {label!r}") from None

    def fields(self, grade: int) -> list[Label]:
        return self.grades.get(grade, [])

    @property
    def labels(self) -> list[Label]:
        return [f for a in self.grades for f in self.grades[a]]

    def labels_up_to(self, cutoff: int) -> list[Label]:
        return [f for a in self.grades if a <= cutoff for f in self.grades[a]]

    def populated(self, grade) -> bool:
        return bool(self.grades.get(grade))


def symmetry_sign(a: int, b: int, c: int) -> int:
    return -1 if (a + b - c) % 2 else 1


@dataclass
class StructureConstants:
    space: ReducedSpace
    table: dict = field(default_factory=dict)  # (A, B, C) -> Fraction

    def get(self, a: Label, b: Label, c: Label) -> Fraction:
        return self.table.get((a, b, c), Fraction(0))

    def scaled(self, s) -> "StructureConstants":
        return StructureConstants(self.space, {k: v * s for k, v in self.table.items() if v * s != 0})

    @classmethod
    def from_entries(cls, space: ReducedSpace, entries: Iterable[tuple], complete: bool = True) -> "StructureConstants":
        """Build a table, filling the opposite orientation by graded symmetry.

        Conflicting orientations raise :class:`SpaceError`.
        """
        table: dict = {}
        for a_lab, b_lab, c_lab, value in entries:
            a, b, c = space.grade(a_lab), space.grade(b_lab), space.grade(c_lab)
            if a + b - 1 - c < 0:
                raise SpaceError(f"F[{a_lab},{b_lab},{c_lab}]: grade {c} is not a+b-1-m for any m >= 0")
            value = as_fraction(value)
            pairs = [((a_lab, b_lab, c_lab), value)]
            if complete:
                pairs.append(((b_lab, a_lab, c_lab), symmetry_sign(a, b, c) * value))
            for key, v in pairs:
                if key in table and table[key] != v:
                    raise SpaceError(f"symmetry conflict at F[{key[0]},{key[1]},{key[2]}]: {table[key]} vs {v}")
                table[key] = v
        return cls(space, {k: v for k, v in table.items() if v != 0})


def gamma_apply(space: ReducedSpace, F: StructureConstants, a_lab: Label, b_lab: Label, m: int) -> Vector:
    """``gamma(A, B)_m`` as a sparse vector in grade ``a + b - 1 - m``."""
    c = space.grade(a_lab) + space.grade(b_lab) - 1 - m
    out = {}
    for c_lab in space.fields(c):
        v = F.get(a_lab, b_lab, c_lab)
        if v != 0:
            out[c_lab] = v
    return out


def gamma_vec(space, F, a_lab: Label, vec: Mapping, m: int, left: bool = True) -> Vector:
    """Bilinear extension: ``gamma(A, v)_m`` (or ``gamma(v, A)_m`` when ``left`` is false)."""
    out: Vector = {}
    for lab, x in vec.items():
        g = gamma_apply(space, F, a_lab, lab, m) if left else gamma_apply(space, F, lab, a_lab, m)
        out = vadd(out, g, x)
    return out


def check_symmetry(space: ReducedSpace, F: StructureConstants) -> list[dict]:
    out = []
    seen = set()
    for (a_lab, b_lab, c_lab), v in sorted(F.table.items()):
        key = tuple(sorted((a_lab, b_lab))) + (c_lab,)
        sign = symmetry_sign(space.grade(a_lab), space.grade(b_lab), space.grade(c_lab))
        w = F.get(b_lab, a_lab, c_lab)
        if v != sign * w and key not in seen:
            seen.add(key)
            out.append({"A": a_lab, "B": b_lab, "C": c_lab, "value": v, "swapped": w, "required_sign": sign})
    return out


# ---------------------------------------------------------------------------
# reduced Jacobi identity


def _nested(space, F, x: Label, y: Label, z: Label, n: int) -> list[Vector]:
    """``gamma(x, gamma(y, z)_{m2})_{m1}`` for ``m2 = 0..n`` with ``m1 = n - m2``."""
    out = []
    for m2 in range(n + 1):
        inner = gamma_apply(space, F, y, z, m2)
        out.append(gamma_vec(space, F, x, inner, n - m2) if inner else {})
    return out


def rji_matrices(a, b, c, n: int, regulator_set: str = "3pow", dims=None):
    """Regulated ``(Y_bca, Y_bca Y_cab)`` for the three cyclic terms.

    ``dims`` overrides the regulated dimensions of ``(a, b, c)``. Callers
    must not mutate the returned matrices (they are cached).
    """
    return _rji_matrices(a, b, c, n, regulator_set, None if dims is None else tuple(dims))


@lru_cache(maxsize=None)
def _rji_matrices(a, b, c, n, regulator_set, dims):
    ra, rb, rc = dims if dims is not None else regulate((a, b, c), regulator_set=regulator_set)
    ybca = y_closed(rb, rc, ra, n).entries
    ycab = y_closed(rc, ra, rb, n).entries
    return ybca, linalg.matmul(ybca, ycab)


def rji_block(space, F, A: Label, B: Label, C: Label, e: int, regulator_set: str = "3pow", dims=None) -> list[Vector]:
    """All components ``RJI(A,B,C)_{(n-m2, m2)}`` of the block with target grade ``e``."""
    a, b, c = (space.grade(x) for x in (A, B, C))
    n = a + b + c - e - 2
    if n < 0:
        raise ValueError(f"target grade {e} too large for grades {(a, b, c)}")
    g1 = _nested(space, F, A, B, C, n)
    g2 = _nested(space, F, B, C, A, n)
    g3 = _nested(space, F, C, A, B, n)
    y1, y2 = rji_matrices(a, b, c, n, regulator_set, dims)
    out = []
    for i in range(n + 1):
        v = dict(g1[i])
        for j in range(n + 1):
            if y1[i][j] != 0 and g2[j]:
                v = vadd(v, g2[j], y1[i][j])
            if y2[i][j] != 0 and g3[j]:
                v = vadd(v, g3[j], y2[i][j])
        out.append(v)
    return out


def rji_evaluate(space, F, A: Label, B: Label, C: Label, e: int, m1: int, m2: int, regulator_set: str = "3pow") -> Vector:
    a, b, c = (space.grade(x) for x in (A, B, C))
    if m1 + m2 != a + b + c - e - 2 or m1 < 0 or m2 < 0:
        raise ValueError(f"need m1 + m2 = a+b+c-e-2 >= 0, got {(m1, m2)} for grades {(a, b, c)}, e={e}")
    return rji_block(space, F, A, B, C, e, regulator_set)[m2]


# ---------------------------------------------------------------------------
# quadratic constraints


def canonical_var(space: ReducedSpace, a_lab: Label, b_lab: Label, c_lab: Label):
    """``(sign, key)`` with ``F[A,B,C] = sign * F[key]``; ``sign == 0`` when forced zero."""
    s = symmetry_sign(space.grade(a_lab), space.grade(b_lab), space.grade(c_lab))
    if a_lab == b_lab:
        return (0, None) if s < 0 else (1, (a_lab, b_lab, c_lab))
    if a_lab < b_lab:
        return 1, (a_lab, b_lab, c_lab)
    return s, (b_lab, a_lab, c_lab)


def _sym_nested(space, x, y, z, n, target):
    """Nested bracket as a polynomial ``{(var1, var2): coeff}`` per ``m2`` for output ``target``."""
    out = []
    for m2 in range(n + 1):
        poly: dict = {}
        e2 = space.grade(y) + space.grade(z) - 1 - m2
        for mid in space.fields(e2):
            s2, v2 = canonical_var(space, y, z, mid)
            s1, v1 = canonical_var(space, x, mid, target)
            if s1 == 0 or s2 == 0:
                continue
            if space.grade(x) + e2 - 1 - (n - m2) != space.grade(target):
                continue
            key = tuple(sorted((v1, v2)))
            poly[key] = poly.get(key, 0) + s1 * s2
        out.append({k: v for k, v in poly.items() if v != 0})
    return out


@dataclass
class Constraint:
    context: dict
    monomials: dict  # (var1, var2) -> Fraction
    eps_order: int = 0

    def evaluate(self, F: StructureConstants) -> Fraction:
        total = Fraction(0)
        for (v1, v2), c in self.monomials.items():
            total += c * F.get(*v1) * F.get(*v2)
        return total

    @property
    def is_trivial(self) -> bool:
        return not self.monomials


@dataclass
class ConstraintSystem:
    constraints: list
    meta: dict = field(default_factory=dict)

    def variables(self) -> set:
        return {v for c in self.constraints for pair in c.monomials for v in pair}


def clear_denominators(poly: Mapping, all_orders: bool = False) -> list[tuple[int, dict]]:
    """Multiply by ``eps^k`` (k the maximal pole order) and expand at ``eps = 0``.

    Returns ``[(k, coefficients of eps^0)]`` or, with ``all_orders``, one
    entry per Laurent order ``-k..0`` tagged with its pole order.
    """
    k = 0
    for c in poly.values():
        if isinstance(c, RegulatedScalar):
            k = max(k, c.pole_order())
    orders = range(k, -1, -1) if all_orders else [k]
    out = []
    for p in orders:
        coeffs = {}
        for key, c in poly.items():
            if isinstance(c, RegulatedScalar):
                v = c.laurent(upto=-p).get(-p, Fraction(0))
            else:
                v = as_fraction(c) if p == 0 else Fraction(0)
            if v != 0:
                coeffs[key] = v
        out.append((p, coeffs))
    return out


def generate_constraints(
    space: ReducedSpace,
    max_total_grade: int,
    regulator_set: str = "3pow",
    all_orders: bool = False,
    include_trivial: bool = False,
) -> ConstraintSystem:
    """One quadratic constraint per ``(A, B, C, E, m1, m2)``."""
    out = []
    labels = space.labels
    trivial = 0
    for A, B, C in product(labels, repeat=3):
        a, b, c = (space.grade(x) for x in (A, B, C))
        if a + b + c > max_total_grade:
            continue
        for e in space.grades:
            n = a + b + c - e - 2
            if n < 0:
                continue
            y1, y2 = rji_matrices(a, b, c, n, regulator_set)
            for E in space.fields(e):
                g1 = _sym_nested(space, A, B, C, n, E)
                g2 = _sym_nested(space, B, C, A, n, E)
                g3 = _sym_nested(space, C, A, B, n, E)
                for i in range(n + 1):
                    poly = dict(g1[i])
                    for j in range(n + 1):
                        for g, y in ((g2[j], y1[i][j]), (g3[j], y2[i][j])):
                            if y == 0:
                                continue
                            for key, v in g.items():
                                poly[key] = poly.get(key, 0) + v * y
                    poly = {k: v for k, v in poly.items() if v != 0}
                    ctx = {"A": A, "B": B, "C": C, "E": E, "m1": n - i, "m2": i}
                    for order, coeffs in clear_denominators(poly, all_orders):
                        if not coeffs and not include_trivial:
                            trivial += 1
                            continue
                        out.append(Constraint(dict(ctx), coeffs, order))
    return ConstraintSystem(out, {"max_total_grade": max_total_grade, "regulator_set": regulator_set, "trivial": trivial})


def check_constraints(system: ConstraintSystem, F: StructureConstants, require_all: bool = True) -> dict:
    if require_all:
        missing = sorted(v for v in system.variables() if v[0] not in F.space._grade_of or v[1] not in F.space._grade_of)
        if missing:
            raise KeyError(f"assignment lacks variables {missing}")
    residuals = [(c, c.evaluate(F)) for c in system.constraints]
    violations = [{"context": c.context, "epsOrder": c.eps_order, "residual": r} for c, r in residuals if r != 0]
    return {"checked": len(residuals), "violations": violations}


# ---------------------------------------------------------------------------
# two-point amplitudes


@dataclass
class QuadraticForm:
    blocks: dict  # grade -> square matrix (list of lists) over space.fields(grade)

    def value(self, space: ReducedSpace, x: Label, y: Label) -> Fraction:
        a, b = space.grade(x), space.grade(y)
        if a != b:
            return Fraction(0)
        labs = space.fields(a)
        return as_fraction(self.blocks[a][labs.index(x)][labs.index(y)])

    @classmethod
    def identity(cls, space: ReducedSpace) -> "QuadraticForm":
        return cls({a: linalg.identity(len(fs)) for a, fs in space.grades.items()})


def invariance_residuals(space: ReducedSpace, F: StructureConstants, G: QuadraticForm) -> list[dict]:
    """``(-1)^c (2c)_{a+b-c-1} <gamma(A,B), C> - (-1)^a (2a)_{b+c-a-1} <A, gamma(B,C)>``."""
    out = []
    labels = space.labels
    for A, B, C in product(labels, repeat=3):
        a, b, c = (space.grade(x) for x in (A, B, C))
        if a + b - c - 1 < 0 or b + c - a - 1 < 0:
            continue
        lhs = sum((F.get(A, B, Cp) * G.value(space, Cp, C) for Cp in space.fields(c)), Fraction(0))
        rhs = sum((F.get(B, C, Ap) * G.value(space, Ap, A) for Ap in space.fields(a)), Fraction(0))
        lhs *= (-1) ** c * pochhammer(2 * c, a + b - c - 1)
        rhs *= (-1) ** a * pochhammer(2 * a, b + c - a - 1)
        out.append({"A": A, "B": B, "C": C, "residual": lhs - rhs})
    return out


def gram_positivity_check(G: QuadraticForm) -> tuple[bool, dict | None]:
    """Exact Sylvester test per grade; the witness is a vector with ``v.Gv <= 0``."""
    for a, block in sorted(G.blocks.items()):
        mat = [[as_fraction(x) for x in row] for row in block]
        n = len(mat)
        for i in range(n):
            for j in range(n):
                if mat[i][j] != mat[j][i]:
                    return False, {"grade": a, "reason": "not symmetric", "entry": [i, j]}
        minors = leading_minors(mat)
        if any(d <= 0 for d in minors):
            return False, {"grade": a, "minors": minors, "vector": _nonpositive_direction(mat)}
    return True, None


def _nonpositive_direction(mat):
    # LDL^T without pivoting; a nonpositive pivot d_k yields v = L^{-T} e_k
    n = len(mat)
    work = [row[:] for row in mat]
    lower = linalg.identity(n)
    for k in range(n):
        pivot = work[k][k]
        if pivot <= 0:
            e = [Fraction(int(i == k)) for i in range(n)]
            # solve L^T v = e_k
            v = [Fraction(0)] * n
            for i in range(n - 1, -1, -1):
                v[i] = e[i] - sum((lower[j][i] * v[j] for j in range(i + 1, n)), Fraction(0))
            return v
        for i in range(k + 1, n):
            lower[i][k] = work[i][k] / pivot
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                work[i][j] -= lower[i][k] * work[k][j]
    return None


def leading_minors(mat) -> list[Fraction]:
    out = []
    for k in range(1, len(mat) + 1):
        out.append(_det([row[:k] for row in mat[:k]]))
    return out


def _det(m) -> Fraction:
    m = [[as_fraction(x) for x in row] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det
