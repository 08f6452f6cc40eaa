from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wconformal.intertwiner import (
    basis_element,
    enumerate_m_tuples,
    intermediate_dims,
    lambda_apply,
    lambda_coeff,
    t_apply,
    t_monomial_coeffs,
)
from wconformal.testfn import Generator, Poly, commutator, coproduct_apply, sl2_apply

X = Poly.x()
GENS = list(Generator)


def mono(k, c=1):
    return Poly.monomial(k, c)


polys = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), max_size=7).map(Poly)


# -- test functions ---------------------------------------------------------


def test_generator_examples():
    assert sl2_apply("P", 2, mono(3)) == mono(2, 3)
    assert sl2_apply("D", 2, X).is_zero()
    assert sl2_apply("K", 1, mono(0)).is_zero()


def test_coproduct_examples():
    assert coproduct_apply("P", [1, 1], [X, mono(0)]) == [[mono(0), mono(0)], [X, Poly()]]
    assert coproduct_apply("D", [1], [X]) == [[X]]
    assert coproduct_apply("K", [1, 1], [mono(0), mono(0)]) == [[Poly(), mono(0)], [mono(0), Poly()]]
    with pytest.raises(ValueError):
        coproduct_apply("P", [1, 2], [X])


def test_commutation_relations_real_forms():
    # real operators; the i-carrying generators satisfy the negated relations
    for a in range(-3, 7):
        for k in range(11):
            f = mono(k)
            assert commutator("D", "P", a, f) == -sl2_apply("P", a, f)
            assert commutator("D", "K", a, f) == sl2_apply("K", a, f)
            assert commutator("K", "P", a, f) == sl2_apply("D", a, f) * (-2)


@given(polys, polys, st.sampled_from(GENS), st.integers(-3, 6))
def test_generators_linear(f, g, gen, a):
    assert sl2_apply(gen, a, f + g * 3) == sl2_apply(gen, a, f) + sl2_apply(gen, a, g) * 3


def test_poly_json_roundtrip():
    p = Poly([Fraction(1, 2), 0, -3])
    assert p.to_json() == ["1/2", "0", "-3"]
    assert Poly.from_json(p.to_json()) == p


# -- two-argument intertwiners ----------------------------------------------


def test_lambda_examples():
    assert lambda_coeff(1, 1, 1, 0, 0) == 1
    assert lambda_coeff(2, 2, 2, 1, 0) == 2
    assert lambda_coeff(2, 2, 2, 0, 1) == -2
    assert lambda_coeff(2, 1, 1, 1, 0) == 0
    assert lambda_coeff(2, 2, 2, 2, 0) == 0


def test_lambda_apply_examples():
    assert lambda_apply(1, 1, 1, X, mono(0)) == X
    assert lambda_apply(2, 2, 2, mono(2), X) == mono(2, 2)
    assert lambda_apply(2, 2, 2, mono(0), mono(0)).is_zero()


def intertwines(a, b, c, f, g, gen):
    lhs = sum((lambda_apply(a, b, c, *pair) for pair in coproduct_apply(gen, [a, b], [f, g])), Poly())
    rhs = sl2_apply(gen, c, lambda_apply(a, b, c, f, g))
    return lhs == rhs


@settings(max_examples=80)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(-3, 5), polys, polys, st.sampled_from(GENS))
def test_intertwining_property(a, b, shift, f, g, gen):
    c = a + b - 1 - abs(shift)
    assert intertwines(a, b, c, f, g, gen)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 6), polys, polys)
def test_graded_symmetry(a, b, m, f, g):
    c = a + b - 1 - m
    assert lambda_apply(a, b, c, f, g) == lambda_apply(b, a, c, g, f) * (-1) ** m


def test_wrong_target_does_not_intertwine():
    # the plain product f g intertwines into dimension a+b-1 only
    f, g = X, mono(2)
    lhs = sum((p * q for p, q in coproduct_apply("K", [2, 2], [f, g])), Poly())
    assert lhs == sl2_apply("K", 3, f * g)
    assert lhs != sl2_apply("K", 2, f * g)


# -- multi-argument bases ---------------------------------------------------


def test_enumerate_examples():
    assert [b.m for b in enumerate_m_tuples(None, (2, 2, 2), 2)] == [(0, 2), (1, 1), (2, 0)]
    one = enumerate_m_tuples(None, (1, 1), 1)
    assert len(one) == 1 and one[0].m == (0,)
    assert enumerate_m_tuples(None, (2, 2), 4) == []


def test_intermediate_dims_examples():
    assert intermediate_dims((2, 2, 2), (1, 1)) == (2, 2)
    assert intermediate_dims((2, 2, 2), (0, 2)) == (1, 2)
    assert intermediate_dims((1, 1, 1), (0, 0)) == (1, 1)


def test_t_apply_examples():
    f, g, h = Poly([1, 2, 0, 1]), Poly([0, 3, 1]), Poly([2, -1, 0, 0, 1])
    elem = basis_element((2, 2, 2), (0, 1))
    assert t_apply(elem, [f, g, h]) == f * (g.deriv() * h * 2 - g * h.deriv() * 2)
    assert t_apply(basis_element((1, 1, 1), (0, 0)), [X, mono(0), mono(0)]) == X
    for m in [(1, 0), (0, 1), (2, 1)]:
        assert t_apply(basis_element((3, 2, 2), m), [mono(0)] * 3).is_zero()


def test_t_monomial_examples():
    assert t_monomial_coeffs(basis_element((2, 2, 2), (0, 1))) == {(0, 1, 0): 2, (0, 0, 1): -2}
    assert t_monomial_coeffs(basis_element((1, 1, 1), (0, 0))) == {(0, 0, 0): 1}


@pytest.mark.parametrize("dims,m", [((2, 2, 2), (1, 1)), ((3, 1, 2), (2, 0)), ((2, 3, 2, 1), (1, 0, 2))])
def test_monomial_table_matches_application(dims, m):
    elem = basis_element(dims, m)
    table = t_monomial_coeffs(elem)
    assert all(sum(r) == sum(m) for r in table)
    for degs in product(range(4), repeat=len(dims)):
        fs = [mono(k) for k in degs]
        expected = Poly()
        for r, c in table.items():
            term = Poly([c])
            for k, rk in zip(degs, r):
                term = term * mono(k).deriv(rk)
            expected = expected + term
        assert t_apply(elem, fs) == expected


@pytest.mark.parametrize("dims", [(2, 2, 2), (1, 3, 2), (3, 2, 1)])
def test_flip_relation(dims):
    a, b, c = dims
    fs = [Poly([1, -2, 3, 1]), Poly([0, 1, 0, 2, 1]), Poly([5, 0, -1, 0, 0, 1])]
    for e in range(1, a + b + c):
        for elem in enumerate_m_tuples(None, dims, e):
            m1, m2 = elem.m
            flipped = basis_element((a, c, b), (m1, m2))
            assert t_apply(elem, fs) == t_apply(flipped, [fs[0], fs[2], fs[1]]) * (-1) ** m2


@pytest.mark.parametrize("dims,e", [((2, 2, 2), 2), ((1, 2, 3), 2), ((2, 1, 1, 2), 1)])
def test_basis_elements_intertwine(dims, e):
    for elem in enumerate_m_tuples(None, dims, e):
        for degs in product(range(3), repeat=len(dims)):
            fs = [mono(k) for k in degs]
            for gen in GENS:
                lhs = sum((t_apply(elem, row) for row in coproduct_apply(gen, list(dims), fs)), Poly())
                assert lhs == sl2_apply(gen, e, t_apply(elem, fs))
