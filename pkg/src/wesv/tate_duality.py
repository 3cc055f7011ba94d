"""Tate cohomology in degrees -1 and 0, and the duality pairing between them.

Every module is handled in presented form Z^m / R (R spanned by d_k e_k on the
finite coordinates), so the free part, the finite part and mixtures all go
through the same lattice subquotient code.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exact_linalg import (
    FiniteAbelianGroup,
    IntMatrix,
    hstack,
    kernel_basis,
    preimage_lattice,
    subquotient,
    vstack,
)
from .galois_modules import (
    FiniteGroup,
    IntegralGModule,
    character_module,
    conjugate,
    cyclic_group,
    direct_product,
    direct_sum,
    dual,
    induce,
    permutation_module,
    restrict_action_to,
    symmetric_group,
    trivial_module,
)


@dataclass(frozen=True)
class TateGroup:
    degree: int
    group: FiniteAbelianGroup
    lifts: tuple[tuple[int, ...], ...]  # one lift per invariant factor

    @property
    def order(self) -> int:
        return self.group.order


@dataclass(frozen=True)
class PairingMatrix:
    values: tuple[tuple[Fraction, ...], ...]
    left_orders: tuple[int, ...]
    right_orders: tuple[int, ...]

    def is_perfect(self) -> bool:
        return pairing_is_perfect(self)


@dataclass(frozen=True)
class DualityResult:
    free: PairingMatrix
    torsion: PairingMatrix

    @property
    def perfect(self) -> bool:
        return self.free.is_perfect() and self.torsion.is_perfect()


class NonSplitModuleError(ValueError):
    pass


def norm_lift(M: IntegralGModule) -> IntMatrix:
    acc = IntMatrix.zeros(M.ambient_rank, M.ambient_rank)
    for g in M.group.elements:
        acc = acc + M.lift(g)
    return acc


def _to_tate(sq, degree) -> TateGroup:
    if sq.free_rank:
        raise AssertionError("Tate cohomology came out infinite")
    return TateGroup(degree, sq.group, sq.torsion_lifts)


def tate_h0(M: IntegralGModule) -> TateGroup:
    """M^G / N M."""
    m = M.ambient_rank
    if m == 0:
        return TateGroup(0, FiniteAbelianGroup(), ())
    R = M.relations()
    I = IntMatrix.identity(m)
    G = M.group
    stacked = vstack([M.lift(g) - I for g in G.elements], m)
    Rbig = _repeat_relations(R, G.order)
    fixed = preimage_lattice(stacked, Rbig)
    image = hstack([norm_lift(M), R])
    return _to_tate(subquotient(fixed, image), 0)


def tate_hminus1(M: IntegralGModule) -> TateGroup:
    """ker N / sum of Im(1 - g)."""
    m = M.ambient_rank
    if m == 0:
        return TateGroup(-1, FiniteAbelianGroup(), ())
    R = M.relations()
    I = IntMatrix.identity(m)
    ker = preimage_lattice(norm_lift(M), R)
    image = hstack([I - M.lift(g) for g in M.group.elements] + [R])
    return _to_tate(subquotient(ker, image), -1)


def _repeat_relations(R: IntMatrix, k: int) -> IntMatrix:
    m = R.rows
    cols = []
    for b in range(k):
        for j in range(R.cols):
            v = [0] * (m * k)
            for i in range(m):
                v[b * m + i] = R[i, j]
            cols.append(v)
    return IntMatrix.from_columns(cols, m * k) if cols else IntMatrix.zeros(m * k, 0)


def tate_cohomology(M: IntegralGModule, i: int) -> TateGroup:
    """Any degree for cyclic G, via 2-periodicity; degrees -1 and 0 otherwise."""
    if i in (0, -1):
        return tate_h0(M) if i == 0 else tate_hminus1(M)
    if not M.group.is_cyclic():
        raise NotImplementedError("degrees outside {-1, 0} need a cyclic group")
    base = tate_h0(M) if i % 2 == 0 else tate_hminus1(M)
    return TateGroup(i, base.group, base.lifts)


def pontryagin_dual(M: IntegralGModule) -> IntegralGModule:
    """M* = Hom(M_tor, Q/Z) in the dual basis, with g acting through g^-1."""
    d = M.torsion_orders
    G = M.group
    k = len(d)

    def star(T: IntMatrix) -> IntMatrix:
        return IntMatrix([[T[i, j] * d[j] // d[i] for i in range(k)] for j in range(k)], k, k)

    acts = tuple(IntMatrix.zeros(0, 0) for _ in G.elements)
    return IntegralGModule(G, acts, d, tuple(star(M.torsion_action[G.inv(g)]) for g in G.elements))


def _pair(left: TateGroup, right: TateGroup, form) -> PairingMatrix:
    vals = tuple(tuple(form(a, b) % 1 for b in right.lifts) for a in left.lifts)
    return PairingMatrix(vals, left.group.invariant_factors, right.group.invariant_factors)


def duality_pairing(M: IntegralGModule) -> DualityResult:
    """Degree-0 evaluation pairing on the free part, degree (-1, 0) Pontryagin pairing on torsion."""
    G = M.group
    free = M.free_part()
    left = tate_h0(dual(free))
    right = tate_h0(free)
    n = G.order
    free_pm = _pair(left, right, lambda f, x: Fraction(sum(a * b for a, b in zip(f, x)), n))

    if M.torsion_orders:
        tm = M.torsion_module()
        d = tm.torsion_orders
        tl = tate_hminus1(pontryagin_dual(tm))
        tr = tate_h0(tm)
        tors_pm = _pair(tl, tr, lambda a, b: sum(Fraction(x * y, dk) for x, y, dk in zip(a, b, d)))
    else:
        tors_pm = PairingMatrix((), (), ())
    return DualityResult(free_pm, tors_pm)


def pairing_is_perfect(P: PairingMatrix) -> bool:
    e, f = P.left_orders, P.right_orders
    oe = int(np.prod(e, dtype=object)) if e else 1
    of = int(np.prod(f, dtype=object)) if f else 1
    if oe != of:
        return False
    if not e:
        return True
    # well defined: e_i * u_i must pair to zero
    for i, ei in enumerate(e):
        if any((ei * v) % 1 for v in P.values[i]):
            return False
    for j, fj in enumerate(f):
        if any((fj * P.values[i][j]) % 1 for i in range(len(e))):
            return False
    # left group -> Hom(right, Q/Z) = sum Z/f_j is injective
    A = IntMatrix([[int(fj * P.values[i][j]) for i in range(len(e))] for j, fj in enumerate(f)], len(f), len(e))
    F = IntMatrix.diag(list(f))
    L = preimage_lattice(A, F)
    return abs(L.det()) == oe


# ---------------------------------------------------------------- random instances


def standard_groups() -> dict[str, FiniteGroup]:
    return _standard_groups()


@lru_cache(maxsize=None)
def _standard_groups():
    c2 = cyclic_group(2)
    return {
        "C2": c2,
        "C3": cyclic_group(3),
        "C4": cyclic_group(4),
        "C2xC2": direct_product(c2, c2),
        "S3": symmetric_group(3),
    }


@lru_cache(maxsize=None)
def unit_characters(G: FiniteGroup, d: int) -> tuple[tuple[int, ...], ...]:
    """All homomorphisms G -> (Z/d)^x, as value tuples. d = 0 means Z^x = {1, -1}."""
    units = [1, -1] if d == 0 else [u for u in range(1, d) if np.gcd(u, d) == 1]

    def mul(a, b):
        return a * b if d == 0 else (a * b) % d

    out = []
    gens = G.generators
    for choice in np.ndindex(*([len(units)] * len(gens))) if gens else [()]:
        val = {G.identity: 1}
        frontier = [G.identity]
        ok = True
        while frontier and ok:
            x = frontier.pop()
            for gi, c in zip(gens, choice):
                y = G.mul(x, gi)
                v = mul(val[x], units[c])
                if y in val:
                    ok = ok and val[y] == v
                else:
                    val[y] = v
                    frontier.append(y)
        if ok and all(mul(val[a], val[b]) == val[G.mul(a, b)] for a in G.elements for b in G.elements):
            out.append(tuple(val[g] for g in G.elements))
    return tuple(sorted(set(out)))


def augmentation_kernel(P: IntegralGModule) -> IntegralGModule | None:
    if P.rank < 2:
        return None
    B = kernel_basis(IntMatrix([[1] * P.rank]))
    return IntegralGModule(P.group, tuple(restrict_action_to(B, A) for A in P.action))


def _free_blocks(G: FiniteGroup, max_rank: int) -> list[IntegralGModule]:
    blocks = [trivial_module(G)]
    blocks += [character_module(G, s) for s in unit_characters(G, 0) if any(x == -1 for x in s)]
    for H in G.subgroups():
        if H == G.elements or len(H) == G.order:
            continue
        if G.order // len(H) <= max_rank:
            P = permutation_module(G, H)
            blocks.append(P)
            aug = augmentation_kernel(P)
            if aug is not None:
                blocks.append(aug)
    return blocks


def _torsion_blocks(G: FiniteGroup, d: int) -> list[IntegralGModule]:
    out = []
    empty = tuple(IntMatrix.zeros(0, 0) for _ in G.elements)
    for chi in unit_characters(G, d):
        out.append(IntegralGModule(G, empty, (d,), tuple(IntMatrix([[u]]) for u in chi)))
    for H in G.subgroups():
        if G.order // len(H) == 2:
            P = permutation_module(G, H)
            out.append(IntegralGModule(G, empty, (d, d), P.action))
    return out


def random_unimodular(rng: np.random.Generator, n: int, steps: int = 4) -> IntMatrix:
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    if n < 2:
        return IntMatrix(M, n, n)
    for _ in range(steps):
        i, j = rng.choice(n, size=2, replace=False)
        c = int(rng.integers(-2, 3))
        for r in range(n):
            M[r][i] += c * M[r][j]
    return IntMatrix(M, n, n)


def random_module(
    rng: np.random.Generator,
    G: FiniteGroup,
    max_rank: int = 4,
    torsion_factors: Sequence[int] = (2, 3, 4, 8),
    max_torsion_gens: int = 3,
) -> IntegralGModule:
    target = int(rng.integers(0, max_rank + 1))
    blocks = _free_blocks(G, max_rank)
    parts: list[IntegralGModule] = []
    rank = 0
    for _ in range(8):
        if rank >= target:
            break
        fits = [b for b in blocks if rank + b.rank <= target]
        if not fits:
            break
        b = fits[int(rng.integers(len(fits)))]
        parts.append(b)
        rank += b.rank
    tgens = 0
    for _ in range(int(rng.integers(0, 3))):
        d = int(torsion_factors[int(rng.integers(len(torsion_factors)))])
        cands = [b for b in _torsion_blocks(G, d) if tgens + len(b.torsion_orders) <= max_torsion_gens]
        if cands:
            b = cands[int(rng.integers(len(cands)))]
            parts.append(b)
            tgens += len(b.torsion_orders)
    if not parts:
        parts = [IntegralGModule(G, tuple(IntMatrix.zeros(0, 0) for _ in G.elements))]
    M = direct_sum(parts)
    if M.rank >= 2:
        M = conjugate(M, random_unimodular(rng, M.rank))
    return M


def random_instance(rng: np.random.Generator) -> tuple[str, IntegralGModule]:
    groups = standard_groups()
    name = list(groups)[int(rng.integers(len(groups)))]
    return name, random_module(rng, groups[name])


def random_shapiro_instance(rng: np.random.Generator):
    """(G name, subgroup indices, H-module M, Ind_H^G M)."""
    groups = standard_groups()
    name = list(groups)[int(rng.integers(len(groups)))]
    G = groups[name]
    subs = [H for H in G.subgroups() if len(H) < G.order]
    Hidx = subs[int(rng.integers(len(subs)))]
    H, emb = G.subgroup(Hidx)
    # keep induced rank at most 4 * index small enough for quick SNF
    M = random_module(rng, H, max_rank=2, max_torsion_gens=2)
    return name, emb, M, induce(G, emb, M)


def shapiro_check(M: IntegralGModule, induced: IntegralGModule) -> bool:
    """Orders of H^-1 and H^0 agree for H acting on M and G acting on Ind_H^G M."""
    return all(
        tate_cohomology(M, i).order == tate_cohomology(induced, i).order for i in (-1, 0)
    )
