import pytest
from hypothesis import given
from hypothesis import strategies as st

from wesv.exact_linalg import IntMatrix
from wesv.galois_modules import (
    FiniteGroup,
    FrobeniusModule,
    GroupError,
    IntegralGModule,
    character_module,
    cyclic_group,
    direct_product,
    direct_sum,
    dual,
    induce,
    invariants_coinvariants,
    permutation_module,
    rationalized_invariants,
    regular_module,
    restrict,
    symmetric_group,
    trivial_group,
    trivial_module,
)
from wesv.rng import split_rngs
from wesv.tate_duality import random_module, standard_groups

GROUPS = standard_groups()


@pytest.mark.parametrize("name", list(GROUPS))
def test_group_axioms(name):
    G = GROUPS[name]
    e = G.identity
    for a in G.elements:
        assert G.mul(a, e) == a == G.mul(e, a)
        assert G.mul(a, G.inv(a)) == e
        for b in G.elements:
            for c in G.elements:
                assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert set(G.generated(G.generators)) == set(G.elements)


def test_group_facts():
    assert symmetric_group(3).order == 6 and not symmetric_group(3).is_cyclic()
    assert cyclic_group(4).is_cyclic()
    assert not direct_product(cyclic_group(2), cyclic_group(2)).is_cyclic()
    assert direct_product(cyclic_group(2), cyclic_group(3)).is_cyclic()
    assert len(symmetric_group(3).subgroups()) == 6
    assert trivial_group().order == 1


def test_bad_table_rejected():
    with pytest.raises(GroupError):
        FiniteGroup(((0, 1), (0, 1)))


def test_module_validation_negative_controls():
    C2 = cyclic_group(2)
    with pytest.raises(GroupError):
        IntegralGModule(C2, (IntMatrix.identity(1), IntMatrix([[2]])))  # not unimodular
    with pytest.raises(GroupError):
        IntegralGModule(cyclic_group(3), (IntMatrix.identity(1), IntMatrix([[-1]]), IntMatrix([[-1]])))  # not a hom
    with pytest.raises(GroupError):
        # Z/2 -> Z/4 generator map that does not respect orders
        IntegralGModule(C2, (IntMatrix.zeros(0, 0),) * 2, (2, 4), (IntMatrix.identity(2), IntMatrix([[1, 0], [1, 1]])))


@pytest.mark.parametrize("name", list(GROUPS))
def test_regular_module_invariants_are_norms(name):
    G = GROUPS[name]
    inv, (free, tors) = invariants_coinvariants(regular_module(G))
    assert inv.cols == 1 and set(inv.column(0)) == {1} or set(inv.column(0)) == {-1}
    assert free == 1 and tors.order == 1


def test_sign_module_coinvariants():
    inv, (free, tors) = invariants_coinvariants(character_module(cyclic_group(2), (1, -1)))
    assert inv.cols == 0 and free == 0 and tors.invariant_factors == (2,)


@pytest.mark.parametrize("name", list(GROUPS))
def test_induction_rank_and_character(name):
    G = GROUPS[name]
    for H in G.subgroups():
        Hg, emb = G.subgroup(H)
        Ind = induce(G, emb, trivial_module(Hg))
        assert Ind.rank == G.order // len(H)
        # Ind of trivial = permutation module on cosets: same character
        assert Ind.character() == permutation_module(G, H).character()


@given(st.integers(0, 2**32))
def test_double_dual_is_identity(seed):
    rng = split_rngs(seed, 1)[0]
    name = sorted(GROUPS)[int(rng.integers(len(GROUPS)))]
    M = random_module(rng, GROUPS[name]).free_part()
    assert dual(dual(M)).action == M.action


@given(st.integers(0, 2**32))
def test_restriction_of_direct_sum(seed):
    rng = split_rngs(seed, 1)[0]
    G = GROUPS["S3"]
    M = random_module(rng, G)
    N = random_module(rng, G)
    S = direct_sum([M, N])
    assert S.rank == M.rank + N.rank
    R = restrict(S, (0,) + tuple(g for g in G.elements if G.element_order(g) == 2)[:1])
    assert R.rank == S.rank


def test_frobenius_module_order_and_bound():
    rot = IntMatrix([[0, -1], [1, 1]])
    M = FrobeniusModule(rot, 5)
    assert M.order == 6 and M.to_gmodule().group.order == 6
    assert rationalized_invariants(M).cols == 0
    with pytest.raises(GroupError):
        FrobeniusModule(rot, 5, order_bound=4)
    with pytest.raises(GroupError):
        FrobeniusModule(IntMatrix([[2, 1], [1, 1]]), 5)  # infinite order
    T = FrobeniusModule(IntMatrix.identity(1), 3, (4,), IntMatrix([[3]]))
    assert T.order == 2
    assert T.dual_free() == IntMatrix.identity(1)
