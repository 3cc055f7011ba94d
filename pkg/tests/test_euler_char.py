import math

import pytest

from cases import CLASSNUMBER_DISCS, Q, catalog, rational_place, shriek_over_Q
from wesv.euler_char import (
    EulerCharInputs,
    chi,
    chi_exact,
    chi_of,
    chi_on_base,
    chi_via_decomposition,
    multiplicativity_check,
)
from wesv.exact_values import ExactValue
from wesv.l_functions import leading_value, vanishing_order_formula
from wesv.number_fields import dirichlet_L_at_1, field_from_disc, places_above, s_data
from wesv.sheaf_catalog import (
    ConstantFinite,
    ConstantZ,
    PushforwardConstant,
    SheafError,
    ShriekZ,
    Sum,
    UntameError,
    trivial_skyscraper,
)


def test_examples():
    assert chi_of(ConstantZ(Q())) == pytest.approx(1.0, rel=1e-12)
    assert chi_of(ConstantZ(field_from_disc(-4))) == pytest.approx(math.pi / 4, rel=1e-12)
    assert chi_of(trivial_skyscraper(Q(), rational_place(5))) == pytest.approx(1 / math.log(5), rel=1e-12)
    assert chi_exact(trivial_skyscraper(Q(), rational_place(2))) == ExactValue.log(2).inverse()
    assert chi_of(ConstantFinite(Q(), 6)) == 1.0


@pytest.mark.parametrize("D", CLASSNUMBER_DISCS)
def test_class_number_formula(D):
    # chi(Z) on X = Spec O_K equals L(1, chi_D), the residue of zeta_K(s+1) at s = 0
    assert chi_of(ConstantZ(field_from_disc(D))) == pytest.approx(dirichlet_L_at_1(D), rel=1e-9)


@pytest.mark.parametrize("label,F", catalog(), ids=[c[0] for c in catalog()])
def test_special_value_identity(label, F):
    lv = leading_value(F)
    assert lv.order == vanishing_order_formula(F)
    assert abs(lv.coefficient) == pytest.approx(chi_of(F), rel=1e-9)
    ex = chi_exact(F)
    if ex is not None and lv.exact_form is not None:
        assert abs(lv.exact_form) == ex


def test_inputs_validation():
    with pytest.raises(ValueError):
        EulerCharInputs(0, 1, 1, 1, 0, 0, 1, 1, 1.0, 1.0)
    with pytest.raises(ValueError):
        EulerCharInputs(1, 1, 1, 1, 0, 0, 1, 1, -1.0, 1.0)
    assert chi(EulerCharInputs(1, 1, 2, 1, 1, 0, 1, 1, 1.0, 1.0)) == 1.0


@pytest.mark.parametrize("D", [1, -3, -4, -20, 5, 13])
def test_multiplicativity_shriek(D):
    K = field_from_disc(D)
    S = places_above(K, 2) + places_above(K, 3)
    sub = ShriekZ(K, s_data(K, S))
    quot = Sum(K, tuple(trivial_skyscraper(K, x) for x in S))
    assert multiplicativity_check(sub, ConstantZ(K), quot) < 1e-9


@pytest.mark.parametrize("n", [2, 3, 6])
def test_multiplicativity_finite(n):
    assert multiplicativity_check(ConstantZ(Q()), ConstantZ(Q()), ConstantFinite(Q(), n)) == 0.0


def test_multiplicativity_rejects_other_patterns():
    with pytest.raises(SheafError):
        multiplicativity_check(ConstantZ(Q()), ConstantZ(Q()), ConstantZ(Q()))
    sub = shriek_over_Q([2])
    with pytest.raises(SheafError):
        multiplicativity_check(sub, ConstantZ(Q()), trivial_skyscraper(Q(), rational_place(3)))


@pytest.mark.parametrize("D", [1, -4, -23, 5])
def test_decomposition_invariance(D):
    K = field_from_disc(D)
    base = chi_of(ConstantZ(K))
    for S in (places_above(K, 2), places_above(K, 3) + places_above(K, 7)):
        assert chi_via_decomposition(ConstantZ(K), S) == pytest.approx(base, rel=1e-9)


@pytest.mark.parametrize("D", [-3, -7, -15, 5, 13, 21])
def test_pushforward_base_and_top_agree(D):
    F = PushforwardConstant(Q(), field_from_disc(D))
    assert chi_on_base(F) == pytest.approx(chi_of(F), rel=1e-9)


def test_wild_pushforward():
    F = PushforwardConstant(Q(), field_from_disc(-4))
    assert chi_of(F) == pytest.approx(math.pi / 4, rel=1e-12)
    with pytest.raises(UntameError):
        chi_on_base(F)


def test_sum_is_product():
    a, b = ConstantZ(Q()), trivial_skyscraper(Q(), rational_place(7))
    assert chi_of(Sum(Q(), (a, b))) == pytest.approx(chi_of(a) * chi_of(b))
