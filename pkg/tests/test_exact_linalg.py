from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from wesv.exact_linalg import (
    FiniteAbelianGroup,
    IntMatrix,
    cokernel,
    diagonal,
    hstack,
    integer_coordinates,
    inverse_unimodular,
    is_saturated,
    kernel_basis,
    lattice_basis,
    preimage_lattice,
    rank,
    rational_solve,
    smith_normal_form,
    subquotient,
)


def int_matrices(max_rows=4, max_cols=4, bound=9):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(
                st.lists(st.integers(-bound, bound), min_size=n, max_size=n), min_size=m, max_size=m
            )
        )
    ).map(IntMatrix)


@given(int_matrices())
def test_smith_form_reconstructs(A):
    U, D, V = smith_normal_form(A)
    assert U @ A @ V == D
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    d = diagonal(D)
    nz = [x for x in d if x]
    assert all(x > 0 for x in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    for i in range(D.rows):
        for j in range(D.cols):
            if i != j:
                assert D[i, j] == 0


@given(int_matrices())
def test_smith_invariants_match_sympy(A):
    ours = [x for x in diagonal(smith_normal_form(A)[1]) if x]
    theirs = [abs(int(x)) for x in invariant_factors(Matrix(A.tolist()), domain=ZZ) if x]
    assert ours == sorted(theirs)


@given(int_matrices())
def test_rank_matches_numpy(A):
    assert rank(A) == np.linalg.matrix_rank(np.array(A.tolist(), dtype=float))


@given(int_matrices())
def test_kernel_is_saturated_and_complete(A):
    K = kernel_basis(A)
    assert K.cols == A.cols - rank(A)
    if K.cols:
        assert (A @ K).is_zero()
        assert is_saturated(K)


@given(int_matrices(4, 4, 5))
def test_det_matches_fraction_elimination(A):
    if A.rows != A.cols:
        return
    M = np.array(A.tolist(), dtype=float)
    assert A.det() == round(np.linalg.det(M))


def test_cokernel_examples():
    assert cokernel(IntMatrix([[2, 0], [0, 3]])) == (0, FiniteAbelianGroup((6,)))
    free, tors = cokernel(IntMatrix([[2], [4]]))
    assert free == 1 and tors.invariant_factors == (2,)
    assert cokernel(IntMatrix.identity(3)) == (0, FiniteAbelianGroup())


def test_finite_abelian_group_normalises():
    assert FiniteAbelianGroup.from_orders([4, 6]).invariant_factors == (2, 12)
    assert FiniteAbelianGroup.from_orders([2, 3]).order == 6
    with pytest.raises(ValueError):
        FiniteAbelianGroup((4, 2))
    with pytest.raises(ValueError):
        FiniteAbelianGroup.from_orders([0])


def test_subquotient_counts_index():
    A = IntMatrix.identity(2)
    B = IntMatrix([[2, 0], [0, 4]])
    sq = subquotient(A, B)
    assert sq.group.invariant_factors == (2, 4) and sq.free_rank == 0
    sq = subquotient(A, IntMatrix([[3], [0]]))
    assert sq.free_rank == 1 and sq.group.invariant_factors == (3,)
    with pytest.raises(ValueError):
        sq.order


def test_preimage_lattice():
    # x with 2x in 4Z: x in 2Z
    L = preimage_lattice(IntMatrix([[2]]), IntMatrix([[4]]))
    assert abs(L.det()) == 2


def test_rational_solve_and_coordinates():
    A = [[2, 1], [1, 3]]
    x = rational_solve(A, [1, 2])
    assert x == [Fraction(1, 5), Fraction(3, 5)]
    B = lattice_basis(IntMatrix([[2, 0], [0, 3]]))
    assert integer_coordinates(B, (4, 9)) is not None


@given(st.integers(2, 4), st.integers(0, 2**32))
def test_inverse_unimodular(n, seed):
    from wesv.tate_duality import random_unimodular

    U = random_unimodular(np.random.default_rng(seed), n)
    assert U @ inverse_unimodular(U) == IntMatrix.identity(n)


def test_shape_errors():
    with pytest.raises(ValueError):
        IntMatrix([[1, 2], [3]])
    assert hstack([IntMatrix.identity(2), IntMatrix.zeros(2, 1)]).cols == 3
