"""Finite groups given by multiplication tables, and integral modules over them.

Modules are split: a free part Z^n with unimodular matrices, plus an optional
finite part presented as Z/d_1 + ... + Z/d_k with integer matrices acting on
lifts. Profinite actions (Frobenius, inertia) go through a finite quotient.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .exact_linalg import (
    FiniteAbelianGroup,
    IntMatrix,
    block_diag,
    cokernel,
    kernel_basis,
    vstack,
)


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    table: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()
    generators: tuple[int, ...] = ()

    def __post_init__(self):
        n = len(self.table)
        if any(len(r) != n for r in self.table) or n == 0:
            raise GroupError("multiplication table must be square and non-empty")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))
        e = self.identity
        if e is None:
            raise GroupError("no identity element")
        for a in range(n):
            if sorted(self.table[a]) != list(range(n)):
                raise GroupError("row is not a permutation")
            if e not in self.table[a]:
                raise GroupError("missing inverse")
        for a, b, c in itertools.product(range(n), repeat=3):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise GroupError("table is not associative")
        if not self.generators:
            object.__setattr__(self, "generators", tuple(_greedy_generators(self)))

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def elements(self) -> range:
        return range(self.order)

    @property
    def identity(self):
        n = len(self.table)
        for e in range(n):
            if all(self.table[e][a] == a and self.table[a][e] == a for a in range(n)):
                return e
        return None

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        e = self.identity
        return self.table[a].index(e)

    def power(self, a: int, k: int) -> int:
        r = self.identity
        for _ in range(k % self.element_order(a)):
            r = self.mul(r, a)
        return r

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def is_cyclic(self) -> bool:
        return any(self.element_order(a) == self.order for a in self.elements)

    def is_subgroup(self, idx: Sequence[int]) -> bool:
        s = set(idx)
        return bool(s) and self.identity in s and all(self.mul(a, b) in s for a in s for b in s)

    def generated(self, gens: Sequence[int]) -> tuple[int, ...]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return tuple(sorted(seen))

    def subgroups(self) -> list[tuple[int, ...]]:
        found = set()
        for a in self.elements:
            for b in self.elements:
                found.add(self.generated([a, b]))
        return sorted(found, key=lambda s: (len(s), s))

    def subgroup(self, idx: Sequence[int]) -> tuple["FiniteGroup", tuple[int, ...]]:
        """The subgroup on idx as its own FiniteGroup, plus the embedding list."""
        idx = tuple(sorted(idx)) if self.identity in idx else tuple(idx)
        if not self.is_subgroup(idx):
            raise GroupError(f"{idx} is not closed under multiplication")
        pos = {g: i for i, g in enumerate(idx)}
        table = tuple(tuple(pos[self.mul(a, b)] for b in idx) for a in idx)
        return FiniteGroup(table, tuple(self.labels[g] for g in idx)), idx

    def left_cosets(self, H: Sequence[int]) -> list[int]:
        """Representatives r_i with G = union of r_i H, smallest index first."""
        reps, covered = [], set()
        for g in self.elements:
            if g in covered:
                continue
            reps.append(g)
            covered.update(self.mul(g, h) for h in H)
        return reps


def _greedy_generators(G: FiniteGroup) -> list[int]:
    gens: list[int] = []
    span = G.generated([])
    for a in G.elements:
        if a not in span:
            gens.append(a)
            span = G.generated(gens)
    return gens


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup(
        tuple(tuple((a + b) % n for b in range(n)) for a in range(n)),
        tuple(f"s^{a}" for a in range(n)),
        (1 % n,) if n > 1 else (),
    )


def trivial_group() -> FiniteGroup:
    return cyclic_group(1)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    pairs = [(a, b) for a in G.elements for b in H.elements]
    pos = {p: i for i, p in enumerate(pairs)}
    table = tuple(
        tuple(pos[(G.mul(a, c), H.mul(b, d))] for (c, d) in pairs) for (a, b) in pairs
    )
    return FiniteGroup(table, tuple(f"({G.labels[a]},{H.labels[b]})" for a, b in pairs))


def symmetric_group(n: int) -> FiniteGroup:
    perms = sorted(itertools.permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    # (p*q)(i) = p(q(i))
    table = tuple(tuple(pos[tuple(p[q[i]] for i in range(n))] for q in perms) for p in perms)
    return FiniteGroup(table, tuple("".join(map(str, p)) for p in perms))


# ---------------------------------------------------------------- modules


def _mod_reduce(T: IntMatrix, orders: Sequence[int]) -> tuple:
    return tuple(tuple(T[i, j] % orders[i] for j in range(T.cols)) for i in range(T.rows))


@dataclass(frozen=True)
class IntegralGModule:
    """Split module Z^n + (Z/d_1 + ... + Z/d_k) with a G-action.

    `action[g]` acts on the free part, `torsion_action[g]` on lifts of the
    finite part; column j of torsion_action[g] is the image of generator j.
    """

    group: FiniteGroup
    action: tuple[IntMatrix, ...]
    torsion_orders: tuple[int, ...] = ()
    torsion_action: tuple[IntMatrix, ...] = ()

    def __post_init__(self):
        G = self.group
        if len(self.action) != G.order:
            raise GroupError("need one action matrix per group element")
        n = self.rank
        for A in self.action:
            if A.rows != n or A.cols != n:
                raise GroupError("action matrices must be square of the module rank")
            if abs(A.det()) != 1:
                raise GroupError("action matrix is not unimodular")
        if self.action[G.identity] != IntMatrix.identity(n):
            raise GroupError("identity does not act trivially")
        for a in G.elements:
            for b in G.elements:
                if self.action[a] @ self.action[b] != self.action[G.mul(a, b)]:
                    raise GroupError(f"action is not a homomorphism at ({a},{b})")
        d = self.torsion_orders
        if any(x < 2 for x in d):
            raise GroupError("torsion orders must be >= 2")
        if d:
            if len(self.torsion_action) != G.order:
                raise GroupError("need one torsion matrix per group element")
            for T in self.torsion_action:
                for i in range(len(d)):
                    for j in range(len(d)):
                        if (d[j] * T[i, j]) % d[i]:
                            raise GroupError("torsion matrix does not respect the orders")
            red = [_mod_reduce(T, d) for T in self.torsion_action]
            if red[G.identity] != _mod_reduce(IntMatrix.identity(len(d)), d):
                raise GroupError("identity does not act trivially on torsion")
            for a in G.elements:
                for b in G.elements:
                    if _mod_reduce(self.torsion_action[a] @ self.torsion_action[b], d) != red[G.mul(a, b)]:
                        raise GroupError("torsion action is not a homomorphism")
                # invertibility: some power returns identity, guaranteed by group law above

    @property
    def rank(self) -> int:
        return self.action[0].rows

    @property
    def torsion_part(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup.from_orders(self.torsion_orders)

    @property
    def has_torsion(self) -> bool:
        return bool(self.torsion_orders)

    def free_part(self) -> "IntegralGModule":
        return IntegralGModule(self.group, self.action)

    def torsion_module(self) -> "IntegralGModule":
        G = self.group
        return IntegralGModule(G, tuple(IntMatrix.zeros(0, 0) for _ in G.elements), self.torsion_orders, self.torsion_action)

    # presented form: Z^(n+k) / relations
    def lift(self, g: int) -> IntMatrix:
        if self.torsion_orders:
            return block_diag([self.action[g], self.torsion_action[g]])
        return self.action[g]

    def relations(self) -> IntMatrix:
        n, d = self.rank, self.torsion_orders
        tot = n + len(d)
        return IntMatrix.from_columns(
            [[d[k] if i == n + k else 0 for i in range(tot)] for k in range(len(d))], tot
        ) if d else IntMatrix.zeros(tot, 0)

    @property
    def ambient_rank(self) -> int:
        return self.rank + len(self.torsion_orders)

    def character(self) -> tuple[int, ...]:
        return tuple(sum(A[i, i] for i in range(A.rows)) for A in self.action)


def trivial_module(G: FiniteGroup, n: int = 1) -> IntegralGModule:
    return IntegralGModule(G, tuple(IntMatrix.identity(n) for _ in G.elements))


def character_module(G: FiniteGroup, signs: Sequence[int]) -> IntegralGModule:
    """Rank-one module where g acts by signs[g] in {+1, -1}."""
    return IntegralGModule(G, tuple(IntMatrix([[s]]) for s in signs))


def permutation_module(G: FiniteGroup, H: Sequence[int]) -> IntegralGModule:
    """Z[G/H] with G permuting left cosets."""
    reps = G.left_cosets(H)
    Hs = set(H)

    def coset_of(x):
        for i, r in enumerate(reps):
            if G.mul(G.inv(r), x) in Hs:
                return i
        raise AssertionError

    k = len(reps)
    mats = []
    for g in G.elements:
        cols = []
        for r in reps:
            j = coset_of(G.mul(g, r))
            cols.append([int(i == j) for i in range(k)])
        mats.append(IntMatrix.from_columns(cols, k))
    return IntegralGModule(G, tuple(mats))


def regular_module(G: FiniteGroup) -> IntegralGModule:
    return permutation_module(G, [G.identity])


def conjugate(M: IntegralGModule, P: IntMatrix) -> IntegralGModule:
    """Same module in a new basis: g acts by P^-1 A_g P (P unimodular)."""
    from .exact_linalg import inverse_unimodular

    Pi = inverse_unimodular(P)
    return IntegralGModule(M.group, tuple(Pi @ A @ P for A in M.action), M.torsion_orders, M.torsion_action)


def direct_sum(mods: Sequence[IntegralGModule]) -> IntegralGModule:
    G = mods[0].group
    acts = tuple(block_diag([m.action[g] for m in mods]) for g in G.elements)
    orders = tuple(d for m in mods for d in m.torsion_orders)
    tacts = ()
    if orders:
        tacts = tuple(
            block_diag([m.torsion_action[g] for m in mods if m.torsion_orders]) for g in G.elements
        )
    return IntegralGModule(G, acts, orders, tacts)


def dual(M: IntegralGModule) -> IntegralGModule:
    """Hom(M_free, Z): g acts by the transpose of action(g^-1). Torsion is dropped;
    its Pontryagin dual lives in tate_duality."""
    G = M.group
    return IntegralGModule(G, tuple(M.action[G.inv(g)].T for g in G.elements))


def restrict(M: IntegralGModule, H_idx: Sequence[int]) -> IntegralGModule:
    H, emb = M.group.subgroup(H_idx)
    return IntegralGModule(
        H,
        tuple(M.action[g] for g in emb),
        M.torsion_orders,
        tuple(M.torsion_action[g] for g in emb) if M.torsion_orders else (),
    )


def induce(G: FiniteGroup, embedding: Sequence[int], M: IntegralGModule) -> IntegralGModule:
    """Ind_H^G M where H = M.group sits in G via embedding[h] = index in G."""
    H = M.group
    if len(embedding) != H.order or len(set(embedding)) != H.order:
        raise GroupError("embedding must be injective on H")
    if not G.is_subgroup(embedding):
        raise GroupError("embedding is not closed under multiplication")
    for a in H.elements:
        for b in H.elements:
            if G.mul(embedding[a], embedding[b]) != embedding[H.mul(a, b)]:
                raise GroupError("embedding is not a homomorphism")
    back = {g: h for h, g in enumerate(embedding)}
    reps = G.left_cosets(embedding)
    k = len(reps)

    def decompose(x):  # x = reps[i] * h
        for i, r in enumerate(reps):
            h = G.mul(G.inv(r), x)
            if h in back:
                return i, back[h]
        raise AssertionError

    def blocks(mats, size):
        out = []
        for g in G.elements:
            big = [[0] * (k * size) for _ in range(k * size)]
            for i, r in enumerate(reps):
                j, h = decompose(G.mul(g, r))
                A = mats[h]
                for a in range(size):
                    for b in range(size):
                        big[j * size + a][i * size + b] = A[a, b]
            out.append(IntMatrix(big, k * size, k * size))
        return tuple(out)

    acts = blocks(M.action, M.rank)
    if M.torsion_orders:
        d = M.torsion_orders
        return IntegralGModule(G, acts, tuple(d) * k, blocks(M.torsion_action, len(d)))
    return IntegralGModule(G, acts)


def _stacked(M: IntegralGModule, elems=None) -> IntMatrix:
    n = M.rank
    I = IntMatrix.identity(n)
    elems = M.group.elements if elems is None else elems
    return vstack([M.action[g] - I for g in elems], n)


def invariants_coinvariants(M: IntegralGModule) -> tuple[IntMatrix, tuple[int, FiniteAbelianGroup]]:
    """(basis of M^G, M_G as (rank, torsion)) for the free part."""
    n = M.rank
    if n == 0:
        return IntMatrix.zeros(0, 0), (0, FiniteAbelianGroup())
    inv = kernel_basis(_stacked(M))
    I = IntMatrix.identity(n)
    from .exact_linalg import hstack

    co = cokernel(hstack([M.action[g] - I for g in M.group.elements]))
    return inv, co


def rationalized_invariants(M, subgroup: Sequence[int] | None = None) -> IntMatrix:
    """Saturated basis of the fixed lattice of the free part (optionally of a subgroup)."""
    if isinstance(M, FrobeniusModule):
        if M.rank == 0:
            return IntMatrix.zeros(0, 0)
        return kernel_basis(M.frobenius - IntMatrix.identity(M.rank))
    if M.rank == 0:
        return IntMatrix.zeros(0, 0)
    return kernel_basis(_stacked(M, subgroup))


def restrict_action_to(B: IntMatrix, A: IntMatrix) -> IntMatrix:
    """Matrix of A on the A-stable lattice with basis B (columns)."""
    from .exact_linalg import integer_coordinates

    cols = [integer_coordinates(B, (A @ IntMatrix.from_columns([B.column(j)], B.rows)).column(0)) for j in range(B.cols)]
    return IntMatrix.from_columns(cols, B.cols) if cols else IntMatrix.zeros(0, 0)


# ---------------------------------------------------------------- Frobenius modules


DEFAULT_ORDER_BOUND = 24


def matrix_order(A: IntMatrix, bound: int, orders: Sequence[int] = ()) -> int | None:
    n = A.rows
    I = IntMatrix.identity(n)
    P = A
    for k in range(1, bound + 1):
        if (P == I) if not orders else _mod_reduce(P, orders) == _mod_reduce(I, orders):
            return k
        P = P @ A
    return None


@dataclass(frozen=True)
class FrobeniusModule:
    """Discrete module for the absolute Galois group of a finite field, via geometric Frobenius."""

    frobenius: IntMatrix
    residue_size: int
    torsion_orders: tuple[int, ...] = ()
    torsion_frobenius: IntMatrix | None = None
    order_bound: int = DEFAULT_ORDER_BOUND
    order: int = field(init=False)

    def __post_init__(self):
        phi = self.frobenius
        if phi.rows != phi.cols:
            raise GroupError("Frobenius must be square")
        if abs(phi.det()) != 1:
            raise GroupError("Frobenius is not unimodular")
        o = matrix_order(phi, self.order_bound) if phi.rows else 1
        if o is None:
            raise GroupError(f"Frobenius order exceeds bound {self.order_bound}")
        d = tuple(self.torsion_orders)
        object.__setattr__(self, "torsion_orders", d)
        if d:
            T = self.torsion_frobenius
            if T is None or T.rows != len(d) or T.cols != len(d):
                raise GroupError("torsion Frobenius missing or of wrong size")
            ot = matrix_order(T, self.order_bound, d)
            if ot is None:
                raise GroupError("torsion Frobenius is not of finite order within bound")
            o = o * ot // _gcd(o, ot)
        if o > self.order_bound:
            raise GroupError(f"Frobenius order {o} exceeds bound {self.order_bound}")
        object.__setattr__(self, "order", o)
        if self.residue_size < 2:
            raise GroupError("residue field size must be >= 2")

    @property
    def rank(self) -> int:
        return self.frobenius.rows

    def to_gmodule(self) -> IntegralGModule:
        """The module over the cyclic quotient Z/order through which Frobenius acts."""
        m = self.order
        G = cyclic_group(m)
        acts, tacts = [], []
        A = IntMatrix.identity(self.rank)
        T = IntMatrix.identity(len(self.torsion_orders))
        for _ in range(m):
            acts.append(A)
            tacts.append(T)
            A = A @ self.frobenius
            if self.torsion_orders:
                T = IntMatrix([[x % self.torsion_orders[i] for x in row] for i, row in enumerate((T @ self.torsion_frobenius).tolist())])
        return IntegralGModule(G, tuple(acts), self.torsion_orders, tuple(tacts) if self.torsion_orders else ())

    def dual_free(self) -> IntMatrix:
        """Frobenius on Hom(M_free, Z): transpose of the inverse."""
        from .exact_linalg import inverse_unimodular

        if self.rank == 0:
            return self.frobenius
        return inverse_unimodular(self.frobenius).T


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a
