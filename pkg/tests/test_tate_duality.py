import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wesv.exact_linalg import IntMatrix
from wesv.galois_modules import IntegralGModule, character_module, cyclic_group, regular_module, trivial_module
from wesv.rng import split_rngs
from wesv.tate_duality import (
    PairingMatrix,
    duality_pairing,
    pairing_is_perfect,
    random_instance,
    random_module,
    random_shapiro_instance,
    shapiro_check,
    standard_groups,
    tate_cohomology,
    tate_h0,
    tate_hminus1,
)

C2, C3 = cyclic_group(2), cyclic_group(3)


def test_h0_examples():
    assert tate_h0(trivial_module(C2)).group.invariant_factors == (2,)
    assert tate_h0(regular_module(C2)).order == 1
    assert tate_h0(trivial_module(C3)).group.invariant_factors == (3,)


def test_hminus1_examples():
    assert tate_hminus1(character_module(C2, (1, -1))).group.invariant_factors == (2,)
    assert tate_hminus1(trivial_module(C2)).order == 1
    assert tate_hminus1(regular_module(standard_groups()["S3"])).order == 1


def test_pairing_examples():
    res = duality_pairing(trivial_module(C2))
    assert res.free.values == ((Fraction(1, 2),),)
    assert res.perfect
    res = duality_pairing(regular_module(C2))
    assert res.free.values == () and res.perfect
    Z2 = IntegralGModule(C2, (IntMatrix.zeros(0, 0),) * 2, (2,), (IntMatrix.identity(1),) * 2)
    res = duality_pairing(Z2)
    assert res.torsion.left_orders == (2,) and res.torsion.right_orders == (2,)
    assert res.perfect


def test_degenerate_pairing_is_not_perfect():
    # the zero pairing on Z/2 x Z/2 and a pairing between groups of unequal order
    assert not pairing_is_perfect(PairingMatrix(((Fraction(0),),), (2,), (2,)))
    assert not pairing_is_perfect(PairingMatrix(((Fraction(1, 2),),), (2,), (4,)))
    # generator of Z/4 paired to 2/4: not injective
    assert not pairing_is_perfect(PairingMatrix(((Fraction(1, 2),),), (4,), (4,)))
    assert pairing_is_perfect(PairingMatrix(((Fraction(3, 4),),), (4,), (4,)))


def _elements(orders):
    return list(itertools.product(*[range(d) for d in orders]))


def _act(T, x, orders):
    return tuple(sum(T[i, j] * x[j] for j in range(len(x))) % orders[i] for i in range(len(x)))


def _add(x, y, orders):
    return tuple((a + b) % d for a, b, d in zip(x, y, orders))


def _span(gens, orders):
    zero = tuple(0 for _ in orders)
    seen = {zero}
    frontier = [zero]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = _add(x, g, orders)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


def brute_force_tate(M):
    """|H^0| and |H^-1| of a finite module by enumerating its elements."""
    G, d = M.group, M.torsion_orders
    elts = _elements(d)
    acts = [M.torsion_action[g] for g in G.elements]
    fixed = [x for x in elts if all(_act(T, x, d) == x for T in acts)]
    def norm(x):
        acc = tuple(0 for _ in d)
        for T in acts:
            acc = _add(acc, _act(T, x, d), d)
        return acc
    norms = {norm(x) for x in elts}
    zero = tuple(0 for _ in d)
    kerN = [x for x in elts if norm(x) == zero]
    aug = _span([_add(_act(T, x, d), tuple(-a % k for a, k in zip(x, d)), d) for T in acts for x in elts], d)
    return len(fixed) // len(norms), len(kerN) // len(aug)


@given(st.integers(0, 2**32))
def test_finite_modules_match_enumeration(seed):
    rng = split_rngs(seed, 1)[0]
    groups = standard_groups()
    G = groups[sorted(groups)[int(rng.integers(len(groups)))]]
    M = random_module(rng, G, max_rank=0, max_torsion_gens=2)
    if not M.torsion_orders:
        return
    h0, hm1 = brute_force_tate(M)
    assert tate_h0(M).order == h0
    assert tate_hminus1(M).order == hm1


@pytest.mark.parametrize("seed", range(40))
def test_random_instances_are_perfect(seed):
    name, M = random_instance(split_rngs(seed, 1)[0])
    res = duality_pairing(M)
    assert res.perfect, name
    n = M.group.order
    for i in (-1, 0):
        assert tate_cohomology(M, i).group.exponent in [k for k in range(1, n + 1) if n % k == 0]


@pytest.mark.parametrize("seed", range(40))
def test_shapiro(seed):
    _, emb, M, Ind = random_shapiro_instance(split_rngs(seed + 1000, 1)[0])
    assert shapiro_check(M, Ind)


def test_induced_modules_are_acyclic():
    G = standard_groups()["C2xC2"]
    for i in (-1, 0):
        assert tate_cohomology(regular_module(G), i).order == 1


@given(st.integers(0, 2**32), st.sampled_from(["C2", "C3", "C4"]))
def test_cyclic_periodicity(seed, name):
    rng = split_rngs(seed, 1)[0]
    M = random_module(rng, standard_groups()[name])
    assert tate_cohomology(M, 2).order == tate_cohomology(M, 0).order
    assert tate_cohomology(M, 1).order == tate_cohomology(M, -1).order


def test_split_rngs_are_reproducible():
    a = [g.integers(0, 2**63) for g in split_rngs(42, 3)]
    b = [g.integers(0, 2**63) for g in split_rngs(42, 3)]
    assert a == b and len(set(a)) == 3
