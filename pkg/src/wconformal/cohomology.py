"""Z-symmetric cochains, the coboundary operators and cohomology dimensions.

A degree-n cochain assigns to a tuple of field labels ``X = (X_1..X_n)`` and
an m-tuple ``(m_1..m_{n-1})`` a vector of grade
``e = sum a_i - sum m_i - n + 1``.  Components are only nonzero when every
intermediate dimension of the default bracket scheme is >= 0.

Cochains are evaluated lazily.  ``dims`` passed to :meth:`Cochain.block`
are the (possibly regulated) dimensions of the argument fields; cochains
produced by the coboundary need them to build their Z matrices, stored
cochains ignore them.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations, product
from typing import Callable, Iterable, Mapping, Sequence

from . import linalg
from .exact import PoleReport, exact_limit
from .intertwiner import intermediate_dims
from .reduced import ReducedSpace, StructureConstants, gamma_apply, gamma_vec, vadd, vscale
from .transform import block_tuples, perm_sign, permute, regulate, z_default


class SingularBlockError(ArithmeticError):
    """A Z block needed at eps -> 0 has a pole; the sector cannot be evaluated at the limit."""


class SectorError(ValueError):
    """The requested sector is not closed under the coboundary."""


def slot_allowed(grades: Sequence[int], m: Sequence[int]) -> bool:
    """Bound on the m-indices: all intermediate dimensions and the target are >= 0."""
    if len(grades) <= 1:
        return True
    return all(d >= 0 for d in intermediate_dims(grades, m))


def target_grade(grades: Sequence[int], total: int) -> int:
    return sum(grades) - total - len(grades) + 1


def blocks_for(space: ReducedSpace, grades: Sequence[int]) -> list[int]:
    """Block totals ``N`` whose target grade is populated."""
    n = len(grades)
    if n <= 1:
        return [0] if n == 0 or space.populated(grades[0]) else []
    out = []
    for e in space.grades:
        total = sum(grades) - e - n + 1
        if total >= 0:
            out.append(total)
    return sorted(out)


class Cochain:
    """Base class: subclasses implement :meth:`_block`."""

    def __init__(self, space: ReducedSpace, degree: int):
        self.space = space
        self.degree = degree
        self._memo: dict = {}

    def grades(self, labels: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.space.grade(x) for x in labels)

    def block(self, labels: Sequence[str], total: int, dims: Sequence | None = None) -> list[dict]:
        """Vectors for every m-tuple of the block, in ``block_tuples`` order."""
        labels = tuple(labels)
        if len(labels) != self.degree:
            raise ValueError(f"degree-{self.degree} cochain evaluated on {len(labels)} arguments")
        grades = self.grades(labels)
        if dims is None:
            dims = grades
        key = (labels, total, tuple(dims))
        if key not in self._memo:
            e = target_grade(grades, total)
            tuples = block_tuples(self.degree, total) if self.degree >= 2 else [()]
            if total < 0 or not self.space.populated(e) or (self.degree < 2 and total != 0):
                vals = [{} for _ in tuples]
            else:
                vals = self._block(labels, grades, total, tuple(dims))
                vals = [v if slot_allowed(grades, m) else {} for v, m in zip(vals, tuples)]
            self._memo[key] = vals
        return self._memo[key]

    def value(self, labels: Sequence[str], m: Sequence[int], dims: Sequence | None = None) -> dict:
        m = tuple(m)
        total = sum(m)
        tuples = block_tuples(self.degree, total) if self.degree >= 2 else [()]
        return self.block(labels, total, dims)[tuples.index(m)]

    def _block(self, labels, grades, total, dims) -> list[dict]:
        raise NotImplementedError

    def limit(self) -> "Cochain":
        return LimitCochain(self)


class ZeroCochain(Cochain):
    def _block(self, labels, grades, total, dims):
        n = len(block_tuples(self.degree, total)) if self.degree >= 2 else 1
        return [{} for _ in range(n)]


class TableCochain(Cochain):
    """Explicit components ``{(labels, m): vector}``; absent slots are zero."""

    def __init__(self, space: ReducedSpace, degree: int, data: Mapping | None = None):
        super().__init__(space, degree)
        self.data = {(tuple(k[0]), tuple(k[1])): dict(v) for k, v in (data or {}).items()}

    def _block(self, labels, grades, total, dims):
        tuples = block_tuples(self.degree, total) if self.degree >= 2 else [()]
        return [dict(self.data.get((labels, m), {})) for m in tuples]

    def items(self):
        return self.data.items()


class FunctionCochain(Cochain):
    """Components from a callable ``fn(labels, m) -> vector`` (stored cochains, no dims)."""

    def __init__(self, space: ReducedSpace, degree: int, fn: Callable):
        super().__init__(space, degree)
        self.fn = fn

    def _block(self, labels, grades, total, dims):
        tuples = block_tuples(self.degree, total) if self.degree >= 2 else [()]
        return [self.fn(labels, m) for m in tuples]


class LimitCochain(Cochain):
    """Entrywise ``eps -> 0`` of a regulated cochain."""

    def __init__(self, inner: Cochain):
        super().__init__(inner.space, inner.degree)
        self.inner = inner

    def _block(self, labels, grades, total, dims):
        out = []
        for vec in self.inner.block(labels, total, regulate(grades)):
            new = {}
            for k, x in vec.items():
                lim = exact_limit(x)
                if isinstance(lim, PoleReport):
                    raise SingularBlockError(f"pole of order {lim.order} at {labels}, block {total}")
                if lim != 0:
                    new[k] = lim
            out.append(new)
        return out


def gamma_cochain(space: ReducedSpace, F: StructureConstants) -> Cochain:
    """The bracket as a degree-2 cochain: ``omega(A, B)_(m) = gamma(A, B)_m``."""
    return FunctionCochain(space, 2, lambda labels, m: gamma_apply(space, F, labels[0], labels[1], m[0]))


def identity_cochain(space: ReducedSpace) -> Cochain:
    return FunctionCochain(space, 1, lambda labels, m: {labels[0]: Fraction(1)})


def linear_map_cochain(space: ReducedSpace, images: Mapping[str, Mapping]) -> Cochain:
    """Degree-1 cochain from ``{label: image vector}`` (grade preserving)."""
    for lab, vec in images.items():
        for k in vec:
            if space.grade(k) != space.grade(lab):
                raise ValueError(f"degree-1 cochains preserve grades: {lab} -> {k}")
    return FunctionCochain(space, 1, lambda labels, m: dict(images.get(labels[0], {})))


# ---------------------------------------------------------------------------
# Z-symmetry


def z_epsilon(dims: Sequence, perm: Sequence[int], total: int) -> list[list]:
    """``sign(perm) * Z_perm(dims)`` on one block."""
    z = z_default(tuple(dims), tuple(perm), total).entries
    s = perm_sign(perm)
    return z if s == 1 else [[-x for x in row] for row in z]


def _apply_matrix(mat, vectors: Sequence[Mapping]) -> list[dict]:
    out = []
    for row in mat:
        acc: dict = {}
        for coeff, vec in zip(row, vectors):
            if coeff != 0 and vec:
                acc = vadd(acc, vec, coeff)
        out.append(acc)
    return out


def permuted_block(omega: Cochain, labels, perm, total, dims) -> list[dict]:
    """``sign * Z_perm(dims) . omega(perm X)`` as a block."""
    if omega.degree < 2:
        return omega.block(permute(perm, labels), total, permute(perm, dims))
    mat = z_epsilon(dims, perm, total)
    return _apply_matrix(mat, omega.block(permute(perm, labels), total, permute(perm, dims)))


def _domain(space: ReducedSpace, degree: int, cutoff: int | None, labels: Iterable[str] | None = None):
    pool = list(labels) if labels is not None else (space.labels if cutoff is None else space.labels_up_to(cutoff))
    return product(pool, repeat=degree)


def zsym_check(
    omega: Cochain,
    cutoff: int | None = None,
    labels: Iterable[str] | None = None,
    regulated: bool = True,
    at_limit: bool = False,
) -> list[dict]:
    """Violations of Z-symmetry under the adjacent transpositions.

    With ``at_limit`` the comparison is made after ``eps -> 0``.
    """
    n = omega.degree
    if n < 2:
        return []
    out = []
    pool = list(labels) if labels is not None else None
    for xs in _domain(omega.space, n, cutoff, pool):
        grades = omega.grades(xs)
        dims = regulate(grades) if regulated else grades
        for total in blocks_for(omega.space, grades):
            lhs = omega.block(xs, total, dims)
            for k in range(1, n):
                perm = list(range(1, n + 1))
                perm[k - 1], perm[k] = perm[k], perm[k - 1]
                rhs = permuted_block(omega, xs, tuple(perm), total, dims)
                for m, u, v in zip(block_tuples(n, total), lhs, rhs):
                    if not slot_allowed(grades, m):
                        continue
                    diff = vadd(u, v, -1)
                    if at_limit:
                        diff = {key: exact_limit(x) for key, x in diff.items()}
                        diff = {key: x for key, x in diff.items() if x != 0}
                    if diff:
                        out.append({"labels": xs, "m": m, "swap": k, "difference": diff})
    return out


class ProjectedCochain(Cochain):
    """Average of ``sign * Z . raw(sigma X)`` over all permutations."""

    def __init__(self, raw: Cochain):
        super().__init__(raw.space, raw.degree)
        self.raw = raw

    def _block(self, labels, grades, total, dims):
        n = self.degree
        perms = list(permutations(range(1, n + 1)))
        acc = [{} for _ in block_tuples(n, total)]
        for p in perms:
            for i, v in enumerate(permuted_block(self.raw, labels, p, total, dims)):
                acc[i] = vadd(acc[i], v)
        scale = Fraction(1, len(perms))
        return [vscale(v, scale) for v in acc]


def zsym_project(raw: Cochain) -> Cochain:
    if raw.degree < 2:
        return raw
    if raw.degree == 2:
        # Z for two arguments is (-1)^m, no regulator needed
        def fn(labels, m):
            a = raw.value(labels, m)
            b = raw.value((labels[1], labels[0]), m)
            sign = -1 if m[0] % 2 == 0 else 1
            return vscale(vadd(a, b, sign), Fraction(1, 2))

        return FunctionCochain(raw.space, 2, fn)
    return ProjectedCochain(raw)


class RandomCochain(Cochain):
    """Seeded raw random components, reproducible per ``(seed, slot)``."""

    def __init__(self, space: ReducedSpace, degree: int, seed: int, span: int = 3):
        super().__init__(space, degree)
        self.seed = seed
        self.span = span

    def _block(self, labels, grades, total, dims):
        e = target_grade(grades, total)
        tuples = block_tuples(self.degree, total) if self.degree >= 2 else [()]
        out = []
        for m in tuples:
            rng = random.Random(f"{self.seed}|{','.join(labels)}|{m}")
            vec = {}
            for lab in self.space.fields(e):
                x = Fraction(rng.randint(-self.span, self.span))
                if x:
                    vec[lab] = x
            out.append(vec)
        return out


def random_symmetric_cochain(space: ReducedSpace, degree: int, seed: int) -> Cochain:
    return zsym_project(RandomCochain(space, degree, seed))


# ---------------------------------------------------------------------------
# coboundary


class CoboundaryCochain(Cochain):
    """``b^n omega`` in the reduced-sum form with default bracket schemes only."""

    def __init__(self, omega: Cochain, F: StructureConstants):
        super().__init__(omega.space, omega.degree + 1)
        self.omega = omega
        self.F = F

    def _block(self, labels, grades, total, dims):
        n = self.omega.degree
        space, F = self.space, self.F
        size = len(block_tuples(n + 1, total))
        out = [{} for _ in range(size)]
        tuples = block_tuples(n + 1, total)
        if n == 0:
            raise ValueError("degree-0 cochains use coboundary_zero")
        idx = list(range(1, n + 2))
        # Gamma(X_i, omega(rest)), arranged as T_{(a_i, rest)}
        for i in idx:
            perm = (i,) + tuple(k for k in idx if k != i)
            rest = permute(perm[1:], labels)
            rest_dims = permute(perm[1:], dims)
            coeffs = []
            for m in tuples:
                sub = m[1:] if n >= 2 else ()
                inner = self.omega.block(rest, sum(sub), rest_dims)
                vec = inner[_index(n, sub)] if inner else {}
                coeffs.append(gamma_vec(space, F, labels[i - 1], vec, m[0]) if vec else {})
            mat = z_epsilon(dims, perm, total)
            sign = -1 if n % 2 else 1
            for r, v in enumerate(_apply_matrix(mat, coeffs)):
                if v:
                    out[r] = vadd(out[r], v, sign)
        # omega(rest, Gamma(X_j, X_k)), arranged as T_{(rest, a_j, a_k)}
        for j in idx:
            for k in idx:
                if k <= j:
                    continue
                perm = tuple(x for x in idx if x not in (j, k)) + (j, k)
                rest = permute(perm[:-2], labels)
                rest_dims = permute(perm[:-2], dims)
                coeffs = []
                for m in tuples:
                    mu = m[-1]
                    y = gamma_apply(space, F, labels[j - 1], labels[k - 1], mu)
                    if not y:
                        coeffs.append({})
                        continue
                    ydim = dims[j - 1] + dims[k - 1] - 1 - mu
                    sub = m[:-1]
                    acc: dict = {}
                    for lab, x in y.items():
                        inner = self.omega.block(rest + (lab,), sum(sub), rest_dims + (ydim,))
                        acc = vadd(acc, inner[_index(n, sub)], x)
                    coeffs.append(acc)
                mat = z_epsilon(dims, perm, total)
                for r, v in enumerate(_apply_matrix(mat, coeffs)):
                    if v:
                        out[r] = vadd(out[r], v)
        return out


def _index(degree: int, m: tuple) -> int:
    if degree < 2:
        return 0
    return block_tuples(degree, sum(m)).index(tuple(m))


class ZeroCoboundary(Cochain):
    """``b^0 X``: the grade-preserving map ``A -> gamma(A, X)_{x-1}``."""

    def __init__(self, space: ReducedSpace, vector: Mapping[str, Fraction], F: StructureConstants):
        super().__init__(space, 1)
        self.vector = dict(vector)
        self.F = F

    def _block(self, labels, grades, total, dims):
        a_lab = labels[0]
        out: dict = {}
        for lab, x in self.vector.items():
            m = self.space.grade(lab) - 1
            out = vadd(out, gamma_apply(self.space, self.F, a_lab, lab, m), x)
        return [out]


def coboundary(n: int, omega, F: StructureConstants, space: ReducedSpace | None = None) -> Cochain:
    """``b^n omega``.  For ``n = 0`` pass a vector ``{label: coeff}``."""
    if n == 0:
        if space is None:
            raise ValueError("b^0 needs the reduced space")
        return ZeroCoboundary(space, omega, F)
    if omega.degree != n:
        raise ValueError(f"b^{n} applied to a degree-{omega.degree} cochain")
    return CoboundaryCochain(omega, F)


def coboundary_fully_symmetrized(n: int, omega: Cochain, F: StructureConstants) -> Cochain:
    """The form summing over all permutations (with 1/n! and 1/(2(n-1)!) weights)."""
    return _SymmetrizedCoboundary(omega, F)


class _SymmetrizedCoboundary(Cochain):
    def __init__(self, omega: Cochain, F: StructureConstants):
        super().__init__(omega.space, omega.degree + 1)
        self.omega = omega
        self.F = F

    def _block(self, labels, grades, total, dims):
        n = self.omega.degree
        space, F = self.space, self.F
        tuples = block_tuples(n + 1, total)
        out = [{} for _ in tuples]
        w1 = Fraction(-1 if n % 2 else 1, _fact(n))
        w2 = Fraction(1, 2 * _fact(n - 1))
        for perm in permutations(range(1, n + 2)):
            xs = permute(perm, labels)
            ds = permute(perm, dims)
            first, second = [], []
            for m in tuples:
                sub = m[1:]
                inner = self.omega.block(xs[1:], sum(sub), ds[1:])
                vec = inner[_index(n, sub)]
                first.append(gamma_vec(space, F, xs[0], vec, m[0]) if vec else {})
                y = gamma_apply(space, F, xs[-2], xs[-1], m[-1])
                acc: dict = {}
                ydim = ds[-2] + ds[-1] - 1 - m[-1]
                for lab, x in y.items():
                    inner2 = self.omega.block(xs[:-2] + (lab,), sum(m[:-1]), ds[:-2] + (ydim,))
                    acc = vadd(acc, inner2[_index(n, m[:-1])], x)
                second.append(acc)
            mat = z_epsilon(dims, perm, total)
            for r, v in enumerate(_apply_matrix(mat, first)):
                if v:
                    out[r] = vadd(out[r], v, w1)
            for r, v in enumerate(_apply_matrix(mat, second)):
                if v:
                    out[r] = vadd(out[r], v, w2)
        return out


def _fact(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def is_zero_on(omega: Cochain, cutoff: int, at_limit: bool = True, labels: Iterable[str] | None = None) -> dict | None:
    """First nonzero slot of ``omega`` on tuples with grades <= cutoff, or ``None``."""
    for xs in _domain(omega.space, omega.degree, cutoff, labels):
        grades = omega.grades(xs)
        for total in blocks_for(omega.space, grades):
            blk = omega.block(xs, total, regulate(grades))
            tuples = block_tuples(omega.degree, total) if omega.degree >= 2 else [()]
            for m, vec in zip(tuples, blk):
                for key, x in vec.items():
                    val = exact_limit(x) if at_limit else x
                    if val != 0:
                        return {"labels": xs, "m": m, "component": key, "value": val}
    return None


def bb_test(space: ReducedSpace, F: StructureConstants, degree: int, seed: int, cutoff: int = 2) -> dict:
    """Evaluate ``b^{n+1} b^n omega`` for a seeded random Z-symmetric ``omega``."""
    omega = random_symmetric_cochain(space, degree, seed)
    bb = coboundary(degree + 1, coboundary(degree, omega, F), F)
    generic = is_zero_on(bb, cutoff, at_limit=False)
    return {"degree": degree, "seed": seed, "pass": generic is None, "offending": generic}


# ---------------------------------------------------------------------------
# finite sectors and cohomology dimensions


def sector_closed(space: ReducedSpace, F: StructureConstants, sector: Iterable[int]) -> list[dict]:
    """Brackets leaving the sector (empty when it is closed)."""
    sector = set(sector)
    out = []
    for (a_lab, b_lab, c_lab), v in sorted(F.table.items()):
        if v == 0:
            continue
        if space.grade(a_lab) in sector and space.grade(b_lab) in sector and space.grade(c_lab) not in sector:
            out.append({"A": a_lab, "B": b_lab, "C": c_lab})
    return out


def _slots(space: ReducedSpace, degree: int, sector: Sequence[int]):
    """Coordinates ``(labels, m, output label)`` of the sector's slot space."""
    pool = [lab for a in sorted(sector) for lab in space.fields(a)]
    if degree == 0:
        return [((), (), lab) for lab in pool]
    out = []
    for xs in product(pool, repeat=degree):
        grades = tuple(space.grade(x) for x in xs)
        for e in sorted(sector):
            total = sum(grades) - e - degree + 1
            if total < 0 or (degree == 1 and total != 0):
                continue
            tuples = block_tuples(degree, total) if degree >= 2 else [()]
            for m in tuples:
                if not slot_allowed(grades, m):
                    continue
                for lab in space.fields(e):
                    out.append((xs, m, lab))
    return out


def _finite(x):
    lim = exact_limit(x)
    if isinstance(lim, PoleReport):
        raise SingularBlockError(f"Z block has a pole of order {lim.order} at eps = 0")
    return lim


def cochain_space_basis(space: ReducedSpace, degree: int, sector: Sequence[int]) -> tuple[list, list[list[Fraction]]]:
    """Slot coordinates and a basis of the Z-symmetric subspace (eps -> 0 matrices)."""
    slots = _slots(space, degree, sector)
    if degree < 2:
        return slots, linalg.identity(len(slots))
    index = {s: i for i, s in enumerate(slots)}
    rows = []
    seen = set()
    for xs, m, lab in slots:
        grades = tuple(space.grade(x) for x in xs)
        total = sum(m)
        dims = regulate(grades)
        tuples = block_tuples(degree, total)
        for k in range(1, degree):
            perm = list(range(1, degree + 1))
            perm[k - 1], perm[k] = perm[k], perm[k - 1]
            key = (xs, m, lab, k)
            if key in seen:
                continue
            seen.add(key)
            mat = z_epsilon(dims, tuple(perm), total)
            ys = permute(perm, xs)
            row = [Fraction(0)] * len(slots)
            row[index[(xs, m, lab)]] += 1
            r = tuples.index(m)
            for c, mt in enumerate(tuples):
                coeff = _finite(mat[r][c])
                if coeff == 0:
                    continue
                j = index.get((ys, mt, lab))
                if j is None:
                    # partner slot lies outside the bound: the relation pins this slot
                    continue
                row[j] -= coeff
            if any(row):
                rows.append(row)
    basis = linalg.nullspace(rows, len(slots)) if rows else linalg.identity(len(slots))
    return slots, basis


def cochain_from_coordinates(space, degree, slots, coords) -> Cochain:
    data: dict = {}
    for (xs, m, lab), x in zip(slots, coords):
        if x != 0:
            data.setdefault((xs, m), {})[lab] = x
    if degree == 0:
        return {lab: x for (_, _, lab), x in zip(slots, coords) if x != 0}
    return TableCochain(space, degree, data)


def coordinates_of(omega: Cochain, slots) -> list[Fraction]:
    out = []
    for xs, m, lab in slots:
        if omega.degree == 0:
            raise ValueError("degree-0 cochains are vectors")
        vec = omega.value(xs, m, regulate(omega.grades(xs)))
        out.append(_finite(vec.get(lab, 0)))
    return out


def coboundary_matrix(space, F, degree: int, sector: Sequence[int]):
    """Matrix of ``b^degree`` from the Z-symmetric basis into slot coordinates."""
    src_slots, src_basis = cochain_space_basis(space, degree, sector)
    dst_slots = _slots(space, degree + 1, sector)
    cols = []
    for vec in src_basis:
        omega = cochain_from_coordinates(space, degree, src_slots, vec)
        b = coboundary(degree, omega, F, space)
        cols.append(coordinates_of(b, dst_slots))
    return linalg.transpose(cols) if cols else [], len(src_basis), len(dst_slots)


def rlh_dims(space: ReducedSpace, F: StructureConstants, degree: int, sector: Sequence[int]) -> dict:
    """``dim Z^n``, ``dim B^n`` and ``dim RLH^n`` on a closed sector."""
    leaks = sector_closed(space, F, sector)
    if leaks:
        raise SectorError(f"sector {sorted(sector)} is not closed: {leaks[:3]}")
    out_mat, dim_c, _ = coboundary_matrix(space, F, degree, sector)
    rank_out = linalg.rank(out_mat) if out_mat else 0
    if degree == 0:
        dim_b = 0
    else:
        in_mat, _, _ = coboundary_matrix(space, F, degree - 1, sector)
        dim_b = linalg.rank(in_mat) if in_mat else 0
    dim_z = dim_c - rank_out
    return {"dimC": dim_c, "dimZ": dim_z, "dimB": dim_b, "dimRLH": dim_z - dim_b}
