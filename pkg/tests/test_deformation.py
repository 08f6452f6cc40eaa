import random
from fractions import Fraction as Fr

import pytest

from wconformal.cohomology import (
    _slots,
    coboundary,
    coordinates_of,
    gamma_cochain,
    is_zero_on,
    linear_map_cochain,
    rlh_dims,
    ZeroCochain,
)
from wconformal.deformation import (
    DeformationSeries,
    Obstructed,
    bG_test,
    first_order_cocycle_check,
    in_coboundary_image,
    integrate_step,
    obstruction_Gn,
    trivial_first_order,
)
from wconformal.reduced import ReducedSpace, StructureConstants

from .spaces import NON_LIE, SU2, SU2_U1, levi_civita

Q_SU2 = {"X1": {"X1": Fr(2), "X2": Fr(1)}, "X2": {"X3": Fr(-1)}, "X3": {"X1": Fr(1), "X3": Fr(3)}}


def _coords_equal(space, a, b, degree):
    slots = _slots(space, degree, [1])
    return coordinates_of(a, slots) == coordinates_of(b, slots)


def _random_q(space, seed):
    rng = random.Random(seed)
    labs = space.labels
    return linear_map_cochain(space, {a: {b: Fr(rng.randint(-2, 2)) for b in labs} for a in labs})


def test_trivial_first_order_is_minus_b1():
    F = levi_civita()
    q = linear_map_cochain(SU2, Q_SU2)
    minus = coboundary(1, q, F)
    g1 = trivial_first_order(SU2, F, q)
    slots = _slots(SU2, 2, [1])
    assert coordinates_of(g1, slots) == [-x for x in coordinates_of(minus, slots)]


@pytest.mark.parametrize("seed", range(5))
def test_trivial_first_order_is_cocycle(seed):
    F = levi_civita(SU2_U1)
    ok, residual = first_order_cocycle_check(SU2_U1, F, trivial_first_order(SU2_U1, F, _random_q(SU2_U1, seed)))
    assert ok, residual


def test_su2_trivial_deformation_unobstructed():
    F = levi_civita()
    series = DeformationSeries(F, [trivial_first_order(SU2, F, linear_map_cochain(SU2, Q_SU2))])
    g2 = obstruction_Gn(SU2, series, 2)
    # for a pure coboundary on su(2) the quadratic term cancels
    assert is_zero_on(g2, 1) is None
    assert bG_test(SU2, F, series, 2)["holds"]
    step = integrate_step(SU2, F, series, 2)
    assert not isinstance(step, Obstructed)
    series.terms.append(step["gamma"])
    assert _coords_equal(SU2, coboundary(2, step["gamma"], F), g2, 3)
    assert bG_test(SU2, F, series, 3)["holds"]


def test_su2_u1_second_and_third_order():
    F = levi_civita(SU2_U1)
    series = DeformationSeries(F, [trivial_first_order(SU2_U1, F, _random_q(SU2_U1, 4))])
    g2 = obstruction_Gn(SU2_U1, series, 2)
    assert sum(1 for x in coordinates_of(g2, _slots(SU2_U1, 3, [1])) if x) == 84
    assert in_coboundary_image(SU2_U1, F, g2, 3)
    step = integrate_step(SU2_U1, F, series, 2)
    assert step["ambiguity_dim"] == 12
    assert _coords_equal(SU2_U1, coboundary(2, step["gamma"], F), g2, 3)
    series.terms.append(step["gamma"])
    assert bG_test(SU2_U1, F, series, 3)["holds"]
    assert not isinstance(integrate_step(SU2_U1, F, series, 3), Obstructed)


def test_su2_u1_cohomology():
    F = levi_civita(SU2_U1)
    assert rlh_dims(SU2_U1, F, 2, [1])["dimRLH"] == 0
    assert rlh_dims(SU2_U1, F, 3, [1])["dimRLH"] == 1


def test_first_order_equal_to_bracket_has_no_obstruction():
    F = levi_civita()
    series = DeformationSeries(F, [gamma_cochain(SU2, F)])
    assert first_order_cocycle_check(SU2, F, series.order(1))[0]
    assert is_zero_on(obstruction_Gn(SU2, series, 2), 1) is None


def test_zero_first_order():
    F = levi_civita()
    series = DeformationSeries(F, [ZeroCochain(SU2, 2)])
    step = integrate_step(SU2, F, series, 2)
    assert is_zero_on(step["gamma"], 1) is None


def test_abelian_non_lie_obstructed():
    space = ReducedSpace({1: ["X1", "X2", "X3"]})
    zero = StructureConstants.from_entries(space, [])
    g1 = gamma_cochain(space, StructureConstants.from_entries(space, NON_LIE))
    # every 2-cochain is closed over the abelian bracket
    assert first_order_cocycle_check(space, zero, g1)[0]
    step = integrate_step(space, zero, DeformationSeries(zero, [g1]), 2)
    assert isinstance(step, Obstructed) and not step
    assert step.order == 2
    g2 = obstruction_Gn(space, DeformationSeries(zero, [g1]), 2)
    assert g2.value(("X1", "X2", "X3"), (0, 0)) == {"X1": -1, "X2": 1, "X3": 1}


def test_ambiguity_lies_in_cocycles():
    F = levi_civita(SU2_U1)
    series = DeformationSeries(F, [trivial_first_order(SU2_U1, F, _random_q(SU2_U1, 1))])
    step = integrate_step(SU2_U1, F, series, 2)
    assert step["ambiguity_dim"] == rlh_dims(SU2_U1, F, 2, [1])["dimZ"]
