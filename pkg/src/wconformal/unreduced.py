"""The unreduced picture: fields smeared with polynomial test functions.

An element of the smeared algebra is a dict ``label -> Poly``.  The bracket
is ``[A(f), B(g)] = sum_m gamma(A, B)_m (lam_m(f, g))`` with the local
intertwiners at exact integer dimensions, so no regulator is involved.
This gives an independent route to the Jacobi identity and to the
coboundary: a reduced cochain ``omega`` defines the multilinear map
``Omega(X_i(f_i)) = sum_m omega(X)_m (T^m(f))`` and ``b^n omega`` must
correspond to ``(-1)^n`` times the Chevalley-Eilenberg differential of
``Omega``.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .cohomology import Cochain, blocks_for
from .exact import PoleReport, exact_limit
from .intertwiner import basis_element, lambda_apply_m, t_apply
from .reduced import ReducedSpace, StructureConstants, gamma_apply
from .testfn import Poly
from .transform import block_tuples, regulate

Element = dict  # label -> Poly


def eadd(u: Element, v: Element, scale=1) -> Element:
    out = dict(u)
    for k, p in v.items():
        q = out.get(k, Poly()) + p * scale
        if q.is_zero():
            out.pop(k, None)
        else:
            out[k] = q
    return out


def bracket(space: ReducedSpace, F: StructureConstants, x: Element, y: Element) -> Element:
    out: Element = {}
    for a_lab, f in x.items():
        a = space.grade(a_lab)
        for b_lab, g in y.items():
            b = space.grade(b_lab)
            for m in range(a + b - 1):
                vec = gamma_apply(space, F, a_lab, b_lab, m)
                if not vec:
                    continue
                h = lambda_apply_m(a, b, m, f, g)
                if h.is_zero():
                    continue
                for c_lab, coeff in vec.items():
                    out = eadd(out, {c_lab: h}, coeff)
    return out


def jacobiator(space, F, x: Element, y: Element, z: Element) -> Element:
    out = bracket(space, F, x, bracket(space, F, y, z))
    out = eadd(out, bracket(space, F, y, bracket(space, F, z, x)))
    return eadd(out, bracket(space, F, z, bracket(space, F, x, y)))


def _finite(x):
    lim = exact_limit(x)
    if isinstance(lim, PoleReport):
        raise ArithmeticError("cochain component has a pole at eps = 0")
    return lim


def smeared(omega: Cochain, args: Sequence[tuple[str, Poly]]) -> Element:
    """``Omega(X_1(f_1), ..., X_n(f_n))`` for pure tensors.

    Components may have poles at ``eps = 0`` where the matching intertwiner
    degenerates, so the sum is formed at regulated dimensions and the limit
    is taken coefficientwise at the end.
    """
    labels = tuple(lab for lab, _ in args)
    polys = [p for _, p in args]
    grades = omega.grades(labels)
    dims = regulate(grades)
    acc: dict = {}
    if omega.degree == 1:
        for lab, x in omega.block(labels, 0, dims)[0].items():
            acc[lab] = polys[0] * x
    else:
        for total in blocks_for(omega.space, grades):
            blk = omega.block(labels, total, dims)
            for m, vec in zip(block_tuples(omega.degree, total), blk):
                if not vec:
                    continue
                t = t_apply(basis_element(dims, m), polys)
                if t.is_zero():
                    continue
                for lab, x in vec.items():
                    acc[lab] = acc.get(lab, Poly()) + t * x
    out: Element = {}
    for lab, p in acc.items():
        q = Poly(_finite(c) for c in p.coeffs)
        if not q.is_zero():
            out[lab] = q
    return out


def smeared_general(omega: Cochain, elements: Sequence[Element]) -> Element:
    """Multilinear extension of :func:`smeared` to general elements."""
    out: Element = {}

    def rec(i, chosen):
        nonlocal out
        if i == len(elements):
            out = eadd(out, smeared(omega, chosen))
            return
        for lab, p in elements[i].items():
            rec(i + 1, chosen + [(lab, p)])

    rec(0, [])
    return out


def ce_differential(space, F, omega: Cochain, args: Sequence[tuple[str, Poly]]) -> Element:
    """Chevalley-Eilenberg differential with adjoint coefficients, on pure tensors."""
    xs = [{lab: p} for lab, p in args]
    n1 = len(xs)
    out: Element = {}
    for i in range(n1):
        rest = xs[:i] + xs[i + 1 :]
        val = smeared_general(omega, rest)
        out = eadd(out, bracket(space, F, xs[i], val), (-1) ** i)
    for i, j in combinations(range(n1), 2):
        rest = [x for k, x in enumerate(xs) if k not in (i, j)]
        br = bracket(space, F, xs[i], xs[j])
        if not br:
            continue
        val = smeared_general(omega, [br] + rest)
        out = eadd(out, val, (-1) ** (i + j))
    return out
