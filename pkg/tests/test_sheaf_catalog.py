import itertools

import pytest

from cases import Q, catalog, rational_place
from wesv.exact_linalg import IntMatrix
from wesv.galois_modules import FrobeniusModule
from wesv.number_fields import field_from_disc
from wesv.sheaf_catalog import (
    ConstantFinite,
    ConstantZ,
    PushforwardConstant,
    SheafError,
    Skyscraper,
    Sum,
    UntameError,
    archimedean_invariants,
    compact_support_cohomology,
    etale_cohomology,
    galois_data,
    is_tame,
    lie_data,
    narrow_class_torsion,
    point_data,
    sheaf_from_record,
    weil_etale_cohomology,
)

CASES = [c for c in catalog() if not isinstance(c[1], ConstantFinite)]
TAME = [c for c in CASES if is_tame(c[1])]


def test_constant_z_tables():
    K = field_from_disc(5)
    F = ConstantZ(K)
    assert etale_cohomology(F).degrees == {0: (1, 1), 1: (0, 1)}
    c = compact_support_cohomology(F)
    assert c.rank(-1) == 1 and c.torsion(-1) == 1 and c.torsion(0) == K.narrow_class_number
    K = field_from_disc(-3)
    assert weil_etale_cohomology(ConstantZ(K)).torsion(-1) == 6


def test_archimedean_invariants():
    assert archimedean_invariants(ConstantZ(Q())) .r1F == 1
    a = archimedean_invariants(ConstantZ(field_from_disc(-4)))
    assert (a.r1F, a.r2F) == (0, 1)
    a = archimedean_invariants(ConstantZ(field_from_disc(12)))
    assert (a.r1F, a.r2F) == (2, 0)
    # pushforward: the invariants of the top field
    a = archimedean_invariants(PushforwardConstant(Q(), field_from_disc(-7)))
    assert (a.r1F, a.r2F) == (0, 1)
    assert archimedean_invariants(trivial_sky()).r1F == 0


def trivial_sky():
    from wesv.sheaf_catalog import trivial_skyscraper

    return trivial_skyscraper(Q(), rational_place(2))


@pytest.mark.parametrize("label,F", TAME, ids=[c[0] for c in TAME])
def test_weil_etale_rank_identity(label, F):
    # sum (-1)^i rank H^i_{W,c} = -rank H^{-1}(Lie)
    h = weil_etale_cohomology(F)
    assert sum((-1) ** i * r for i, (r, _) in h.degrees.items()) == -lie_data(F).h_minus1_rank


def _brute_point(M: FrobeniusModule):
    """H^0 torsion and H^1 order of the finite part by enumeration."""
    d = M.torsion_orders
    T = M.torsion_frobenius
    elts = list(itertools.product(*[range(k) for k in d]))
    act = lambda x: tuple(sum(T[i, j] * x[j] for j in range(len(d))) % d[i] for i in range(len(d)))
    fixed = sum(1 for x in elts if act(x) == x)
    image = {tuple((a - b) % k for a, b, k in zip(act(x), x, d)) for x in elts}
    return fixed, len(elts) // len(image)


@pytest.mark.parametrize("orders,T", [((2,), [[1]]), ((4,), [[3]]), ((4,), [[1]]), ((2, 2), [[0, 1], [1, 0]]), ((3, 3), [[0, 2], [1, 2]])])
def test_point_data_torsion_matches_enumeration(orders, T):
    M = FrobeniusModule(IntMatrix.zeros(0, 0), 5, orders, IntMatrix(T))
    pd = point_data(M)
    assert (pd.h0_tor, pd.h1_order) == _brute_point(M)


def test_point_data_free():
    pd = point_data(FrobeniusModule(IntMatrix([[0, 1], [1, 0]]), 3))
    assert (pd.h0_rank, pd.h1_order, pd.pairing_regulator) == (1, 1, 2)
    pd = point_data(FrobeniusModule(IntMatrix([[-1]]), 3))
    assert (pd.h0_rank, pd.h1_order) == (0, 2)


def test_narrow_class_torsion():
    assert narrow_class_torsion(field_from_disc(-23), 3) == 3
    assert narrow_class_torsion(field_from_disc(-23), 2) == 1
    assert narrow_class_torsion(field_from_disc(-84), 2) == 4
    assert narrow_class_torsion(field_from_disc(12), 2) == 2
    assert etale_cohomology(ConstantFinite(Q(), 5)).degrees == {0: (0, 5), 1: (0, 1)}


def test_pushforward_stalks():
    F = PushforwardConstant(Q(), field_from_disc(-4))
    assert not F.tame and is_tame(PushforwardConstant(Q(), field_from_disc(5)))
    assert galois_data(F, rational_place(5)).stalk.rank == 2
    assert galois_data(F, rational_place(3)).stalk.order == 2
    assert galois_data(F, rational_place(2)).stalk.rank == 1
    with pytest.raises(UntameError):
        lie_data(F)


def test_sum_adds_tables():
    F = Sum(Q(), (ConstantZ(Q()), trivial_sky()))
    assert etale_cohomology(F).rank(0) == 2


def test_records():
    F = sheaf_from_record({"type": "shriek_z", "disc": -20, "S": [{"p": 3}]})
    assert F.S.class_number == 1
    F = sheaf_from_record({"type": "skyscraper", "base_field": {"disc": 1}, "place": {"p": 3},
                           "module": {"frobenius": [[0, 1], [1, 0]], "torsion": {"orders": [2], "frobenius": [[1]]}}})
    assert isinstance(F, Skyscraper) and F.module.rank == 2
    for bad in (
        {"type": "nope", "disc": 1},
        {"type": "constant_z", "disc": 1, "maximal_order": False},
        {"type": "shriek_z", "disc": 1, "S": []},
        {"type": "constant_finite", "disc": 1, "n": 1},
        {"type": "skyscraper", "disc": 1, "place": {"p": 3}, "module": {"frobenius": [[2]]}},
        {"type": "constant_z"},
    ):
        with pytest.raises((SheafError, ValueError)):
            sheaf_from_record(bad)
