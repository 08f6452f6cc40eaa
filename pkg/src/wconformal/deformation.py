"""Formal deformations of the reduced bracket, order by order.

A deformation series is ``gamma(lambda) = gamma_0 + lambda gamma_1 + ...``
with every ``gamma_i`` a Z-symmetric degree-2 cochain.  All solving happens
on a closed sector (a set of grades the bracket does not leave), where the
cochain spaces are finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .cohomology import (
    Cochain,
    FunctionCochain,
    SectorError,
    _apply_matrix,
    _slots,
    coboundary,
    coboundary_matrix,
    cochain_from_coordinates,
    cochain_space_basis,
    coordinates_of,
    is_zero_on,
    sector_closed,
)
from .reduced import ReducedSpace, StructureConstants, gamma_apply, vadd
from .transform import block_tuples, y_closed


@dataclass
class DeformationSeries:
    base: StructureConstants
    terms: list = field(default_factory=list)  # gamma_1, gamma_2, ...

    def order(self, k: int) -> Cochain:
        """``gamma_k`` as a cochain (``k = 0`` is the undeformed bracket)."""
        if k == 0:
            from .cohomology import gamma_cochain

            return gamma_cochain(self.base.space, self.base)
        return self.terms[k - 1]


@dataclass
class Obstructed:
    order: int
    witness: dict

    def __bool__(self):
        return False


def _sector_labels(space: ReducedSpace, sector: Sequence[int]) -> list[str]:
    return [lab for a in sorted(sector) for lab in space.fields(a)]


def _require_closed(space, F, sector):
    leaks = sector_closed(space, F, sector)
    if leaks:
        raise SectorError(f"sector {sorted(sector)} is not closed: {leaks[:3]}")


class JacobiCombination(Cochain):
    """``outer(A, inner(B, C)) + Y_bca outer(B, inner(C, A)) + Y_bca Y_cab outer(C, inner(A, B))``."""

    def __init__(self, outer: Cochain, inner: Cochain):
        super().__init__(outer.space, 3)
        self.outer = outer
        self.inner = inner

    def _nested(self, x, y, z, total, dx, dy, dz):
        out = []
        for m2 in range(total + 1):
            e2 = self.space.grade(y) + self.space.grade(z) - 1 - m2
            vec = self.inner.value((y, z), (m2,), (dy, dz)) if e2 >= 1 else {}
            acc: dict = {}
            for lab, c in vec.items():
                acc = vadd(acc, self.outer.value((x, lab), (total - m2,), (dx, dy + dz - 1 - m2)), c)
            out.append(acc)
        return out

    def _block(self, labels, grades, total, dims):
        A, B, C = labels
        da, db, dc = dims
        g1 = self._nested(A, B, C, total, da, db, dc)
        g2 = self._nested(B, C, A, total, db, dc, da)
        g3 = self._nested(C, A, B, total, dc, da, db)
        ybca = y_closed(db, dc, da, total).entries
        y2 = linalg.matmul(ybca, y_closed(dc, da, db, total).entries)
        out = [dict(v) for v in g1]
        for i, v in enumerate(_apply_matrix(ybca, g2)):
            out[i] = vadd(out[i], v)
        for i, v in enumerate(_apply_matrix(y2, g3)):
            out[i] = vadd(out[i], v)
        return out


class _Sum(Cochain):
    def __init__(self, parts: Sequence[tuple[object, Cochain]], degree: int, space):
        super().__init__(space, degree)
        self.parts = list(parts)

    def _block(self, labels, grades, total, dims):
        size = len(block_tuples(self.degree, total)) if self.degree >= 2 else 1
        out = [{} for _ in range(size)]
        for s, c in self.parts:
            for i, v in enumerate(c.block(labels, total, dims)):
                out[i] = vadd(out[i], v, s)
        return out


def jacobi_terms(series: DeformationSeries, n: int, lo: int, hi: int) -> Cochain:
    """``sum_{k=lo}^{hi} J(gamma_k, gamma_{n-k})``."""
    parts = [(1, JacobiCombination(series.order(k), series.order(n - k))) for k in range(lo, hi + 1)]
    return _Sum(parts, 3, series.base.space)


def first_order_cocycle_check(
    space: ReducedSpace, F: StructureConstants, gamma1: Cochain, sector: Sequence[int] = (1,)
) -> tuple[bool, dict | None]:
    """``b^2 gamma_1 = 0`` on the closed sector; returns the first nonzero slot otherwise."""
    _require_closed(space, F, sector)
    res = is_zero_on(coboundary(2, gamma1, F), max(sector), labels=_sector_labels(space, sector))
    return res is None, res


def trivial_first_order(space: ReducedSpace, F: StructureConstants, q: Cochain) -> Cochain:
    """``gamma(A, qB)_m + gamma(qA, B)_m - q(gamma(A, B)_m)`` (equals ``-b^1 q``)."""

    def fn(labels, m):
        A, B = labels
        mm = m[0]
        out: dict = {}
        for lab, c in q.value((B,), ()).items():
            out = vadd(out, gamma_apply(space, F, A, lab, mm), c)
        for lab, c in q.value((A,), ()).items():
            out = vadd(out, gamma_apply(space, F, lab, B, mm), c)
        for lab, c in gamma_apply(space, F, A, B, mm).items():
            out = vadd(out, q.value((lab,), ()), -c)
        return out

    return FunctionCochain(space, 2, fn)


def obstruction_Gn(space: ReducedSpace, series: DeformationSeries, n: int) -> Cochain:
    """``G^n = -sum_{k=1}^{n-1} J(gamma_k, gamma_{n-k})``."""
    if n < 2:
        raise ValueError("obstruction operators start at order 2")
    if len(series.terms) < n - 1:
        raise ValueError(f"order {n} needs gamma_1..gamma_{n - 1}")
    return _Sum([(-1, jacobi_terms(series, n, 1, n - 1))], 3, space)


def _left_witness(mat, rhs):
    """A row vector ``y`` with ``y.mat = 0`` and ``y.rhs != 0``."""
    cols = len(mat[0]) if mat else 0
    if not mat:
        return None
    for y in linalg.nullspace(linalg.transpose(mat), len(mat)) if cols else linalg.identity(len(mat)):
        if sum((a * b for a, b in zip(y, rhs)), Fraction(0)) != 0:
            return y
    return None


def integrate_step(
    space: ReducedSpace, F: StructureConstants, series: DeformationSeries, n: int, sector: Sequence[int] = (1,)
):
    """Solve ``b^2 gamma_n = G^n`` on the sector, or return :class:`Obstructed`."""
    _require_closed(space, F, sector)
    mat, dim_c2, _ = coboundary_matrix(space, F, 2, sector)
    dst = _slots(space, 3, sector)
    rhs = coordinates_of(obstruction_Gn(space, series, n), dst)
    src_slots, basis = cochain_space_basis(space, 2, sector)
    if not mat or not mat[0]:
        if any(rhs):
            return Obstructed(n, {"G": _nonzero_slots(dst, rhs), "reason": "coboundary vanishes on the sector"})
        coords = [Fraction(0)] * len(src_slots)
        return {"gamma": cochain_from_coordinates(space, 2, src_slots, coords), "ambiguity_dim": dim_c2}
    try:
        x = linalg.solve(mat, rhs)
    except linalg.SingularSystemError:
        y = _left_witness(mat, rhs)
        return Obstructed(n, {"G": _nonzero_slots(dst, rhs), "cocycle_pairing": _nonzero_slots(dst, y or [])})
    coords = [sum((xi * v[j] for xi, v in zip(x, basis)), Fraction(0)) for j in range(len(src_slots))]
    gamma = cochain_from_coordinates(space, 2, src_slots, coords)
    ambiguity = dim_c2 - linalg.rank(mat)
    return {"gamma": gamma, "ambiguity_dim": ambiguity}


def _nonzero_slots(slots, coords):
    return [{"labels": list(s[0]), "m": list(s[1]), "component": s[2], "value": c} for s, c in zip(slots, coords) if c != 0]


def in_coboundary_image(space, F, omega: Cochain, degree: int, sector: Sequence[int] = (1,)) -> bool:
    """Whether ``omega`` (degree ``degree``) lies in ``b^{degree-1}`` of the sector."""
    mat, _, _ = coboundary_matrix(space, F, degree - 1, sector)
    rhs = coordinates_of(omega, _slots(space, degree, sector))
    if not mat or not mat[0]:
        return not any(rhs)
    return linalg.in_column_space(mat, rhs)


def bG_test(
    space: ReducedSpace, F: StructureConstants, series: DeformationSeries, n: int, sector: Sequence[int] = (1,)
) -> dict:
    """Evaluate ``b^3 G^n`` on the sector and report the outcome (never assumed)."""
    _require_closed(space, F, sector)
    g = obstruction_Gn(space, series, n)
    res = is_zero_on(coboundary(3, g, F), max(sector), labels=_sector_labels(space, sector))
    return {"order": n, "holds": res is None, "offending": res}
