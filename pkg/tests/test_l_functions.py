import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cases import Q, catalog, rational_place, shriek_over_Q
from wesv.exact_linalg import IntMatrix
from wesv.exact_values import ExactValue
from wesv.galois_modules import FrobeniusModule
from wesv.l_functions import (
    LocalFactor,
    charpoly_det,
    dedekind_factor,
    divide_one_minus_t,
    euler_product_truncation,
    global_factorization,
    grouped_factor,
    leading_value,
    local_factor_dual,
    poly_eval,
    poly_mul,
    q_factor,
    vanishing_order_formula,
)
from wesv.number_fields import field_from_disc, places_above
from wesv.sheaf_catalog import ConstantFinite, ConstantZ, PushforwardConstant, Sum, trivial_skyscraper

one = Fraction(1)


def F(*c):
    return tuple(Fraction(x) for x in c)


def test_q_factor_examples():
    assert q_factor(FrobeniusModule(IntMatrix([[1]]), 5)).denominator == F(1, -1)
    assert q_factor(FrobeniusModule(IntMatrix([[-1]]), 5)).denominator == F(1, 1)
    assert q_factor(FrobeniusModule(IntMatrix([[0, 1], [1, 0]]), 5)).denominator == F(1, 0, -1)
    assert q_factor(FrobeniusModule(IntMatrix([[1]]), 5), shift=1).denominator == (one, Fraction(-1, 5))
    assert q_factor(FrobeniusModule(IntMatrix.zeros(0, 0), 5)).denominator == F(1)


@given(st.lists(st.integers(-3, 3), min_size=9, max_size=9))
def test_charpoly_matches_numpy(entries):
    A = np.array(entries).reshape(3, 3)
    c = charpoly_det(IntMatrix(A.tolist()))
    ref = np.round(np.poly(A)).astype(int)  # det(xI - A), highest degree first
    got = list(c) + [0] * (4 - len(c))
    assert [int(x) for x in got] == ref.tolist()


def test_divide_one_minus_t():
    m, q = divide_one_minus_t(poly_mul(F(1, -1), poly_mul(F(1, -1), F(2, 3))))
    assert m == 2 and q == F(2, 3)


@pytest.mark.parametrize("D", [1, -3, -4, -7, -20, 5, 12, 13])
def test_constant_z_factor_is_shifted_dedekind(D):
    K = field_from_disc(D)
    for p in (2, 3, 5, 7, 11, 13, 29):
        assert grouped_factor(ConstantZ(K), p).same_function(dedekind_factor(D, p))


@pytest.mark.parametrize("D", [-3, -4, 5, -20])
def test_pushforward_factor_is_dedekind_of_top_field(D):
    Fp = PushforwardConstant(Q(), field_from_disc(D))
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23):
        assert grouped_factor(Fp, p).same_function(dedekind_factor(D, p)), p


@pytest.mark.parametrize("label,G", catalog(), ids=[c[0] for c in catalog()])
def test_global_factorization_reproduces_local_factors(label, G):
    g = global_factorization(G)
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        assert g.factor_at(G, p).same_function(grouped_factor(G, p)), p


@pytest.mark.parametrize("label,G", catalog(), ids=[c[0] for c in catalog()])
def test_factor_is_one_at_t_zero(label, G):
    for p in (2, 3, 5, 7):
        for x in places_above(G.field, p):
            assert local_factor_dual(G, x)(0) == 1


def test_skyscraper_leading_value_exact():
    sky = trivial_skyscraper(Q(), rational_place(2))
    lv = leading_value(sky)
    assert lv.order == -1 and lv.exact_form == ExactValue.log(2).inverse()
    # dual factor is 1/(1 - 2^{-s}); at s = 1 it is exactly 2
    R = local_factor_dual(sky, rational_place(2))
    assert R(Fraction(1, 2)) == 2


def test_zeta_and_shriek_leading_values():
    lv = leading_value(ConstantZ(Q()))
    assert (lv.order, lv.coefficient) == (-1, 1.0)
    lv = leading_value(shriek_over_Q([2, 3]))
    assert lv.order == 1
    assert lv.exact_form == ExactValue.log(2) * ExactValue.log(3)


def test_quadratic_leading_value_uses_L1():
    lv = leading_value(ConstantZ(field_from_disc(-4)))
    assert lv.order == -1 and lv.coefficient == pytest.approx(math.pi / 4, rel=1e-12)
    assert lv.exact_form is None


def test_constant_finite_is_trivial():
    G = ConstantFinite(Q(), 6)
    assert leading_value(G).order == 0 and leading_value(G).exact_form == ExactValue.one()
    assert euler_product_truncation(G, 1.0, 100).value == 1.0
    for x in places_above(Q(), 7):
        assert local_factor_dual(G, x).same_function(LocalFactor(x, F(1), F(1)))


@pytest.mark.parametrize("label,G", catalog(), ids=[c[0] for c in catalog()])
def test_vanishing_order_formula(label, G):
    assert leading_value(G).order == vanishing_order_formula(G)


def test_euler_product_zeta_two():
    tp = euler_product_truncation(ConstantZ(Q()), 1.0, 100000)
    assert tp.value == pytest.approx(math.pi**2 / 6, rel=1e-4)
    assert tp.tail_estimate > 0


def test_euler_product_rejects_nonpositive_s():
    with pytest.raises(ValueError):
        euler_product_truncation(ConstantZ(Q()), 0.0, 10)


def test_sum_is_multiplicative():
    a, b = ConstantZ(Q()), trivial_skyscraper(Q(), rational_place(3))
    S = Sum(Q(), (a, b))
    for p in (2, 3, 5):
        x = rational_place(p)
        assert local_factor_dual(S, x).same_function(local_factor_dual(a, x) * local_factor_dual(b, x))
    assert leading_value(S).order == leading_value(a).order + leading_value(b).order


def test_poly_eval():
    assert poly_eval(F(1, 2, 3), Fraction(1, 2)) == Fraction(11, 4)
