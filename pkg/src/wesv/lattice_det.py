"""det_{Z,R} of acyclic real complexes with lattices, and the complexes B and D.

A term of a complex is a lattice given by basis columns in some ambient R^m;
the real vector space is their span. Boundary maps act on ambient
coordinates and must send span to span.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exact_linalg import IntMatrix, kernel_basis
from .rng import split_rngs
from .sheaf_catalog import (
    ArchModel,
    ConstantFinite,
    Skyscraper,
    Sum,
    UntameError,
    archimedean_invariants,
    archimedean_model,
    is_tame,
)

RANK_TOL = 1e-8


class NonAcyclicError(ValueError):
    def __init__(self, degree: int, detail: str):
        super().__init__(f"complex is not acyclic at degree {degree}: {detail}")
        self.degree = degree


def _arr(M) -> np.ndarray:
    if isinstance(M, IntMatrix):
        return np.array(M.tolist(), dtype=float).reshape(M.rows, M.cols)
    return np.asarray(M, dtype=float)


@dataclass
class LatticeComplex:
    start: int
    lattices: list  # ambient m_i x k_i basis columns
    maps: list  # maps[i]: ambient_i -> ambient_{i+1}, len = len(lattices) - 1

    def __post_init__(self):
        self.lattices = [_arr(L) for L in self.lattices]
        self.maps = [_arr(d) for d in self.maps]
        if len(self.maps) != max(len(self.lattices) - 1, 0):
            raise ValueError("need one map between consecutive terms")
        for i, d in enumerate(self.maps):
            m0, m1 = self.lattices[i].shape[0], self.lattices[i + 1].shape[0]
            if d.shape != (m1, m0):
                raise ValueError(f"map {i} has shape {d.shape}, expected {(m1, m0)}")

    @property
    def degrees(self) -> range:
        return range(self.start, self.start + len(self.lattices))

    def dims(self) -> list[int]:
        return [L.shape[1] for L in self.lattices]

    def shift(self, k: int = 1) -> "LatticeComplex":
        """C[k]: degree i of C[k] is degree i + k of C (differential signs do not affect |det|)."""
        return LatticeComplex(self.start - k, self.lattices, self.maps)


def _orthonormal_span(B: np.ndarray) -> np.ndarray:
    m, k = B.shape
    if k == 0:
        return np.zeros((m, 0))
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    if s[-1] <= RANK_TOL * max(1.0, s[0]):
        raise ValueError("lattice basis is not of full column rank")
    return U[:, :k]


def _row_space(D: np.ndarray) -> tuple[int, np.ndarray]:
    if D.size == 0:
        return 0, np.zeros((D.shape[1], 0))
    _, s, Vt = np.linalg.svd(D)
    scale = max(1.0, s[0]) if s.size else 1.0
    r = int(np.sum(s > RANK_TOL * scale))
    return r, Vt[:r].T


def det_zr(C: LatticeComplex) -> float:
    return math.exp(log_det_zr(C))


def log_det_zr(C: LatticeComplex) -> float:
    Ls = C.lattices
    n = len(Ls)
    Q = [_orthonormal_span(L) for L in Ls]
    Lc = [Q[i].T @ Ls[i] for i in range(n)]
    D = []
    for i, d in enumerate(C.maps):
        img = d @ Q[i]
        Di = Q[i + 1].T @ img
        if np.linalg.norm(img - Q[i + 1] @ Di) > 1e-7 * max(1.0, np.linalg.norm(img)):
            raise ValueError(f"map at degree {C.start + i} leaves the span of the target lattice")
        D.append(Di)
    for i in range(len(D) - 1):
        comp = D[i + 1] @ D[i]
        if comp.size and np.abs(comp).max() > 1e-10 * max(1.0, np.abs(D[i]).max() * np.abs(D[i + 1]).max()):
            raise ValueError(f"d o d != 0 at degree {C.start + i}")
    ranks, comps = [], []
    for i in range(n):
        if i < len(D):
            r, c = _row_space(D[i])
        else:
            r, c = 0, np.zeros((Lc[i].shape[0], 0))
        ranks.append(r)
        comps.append(c)
    total = 0.0
    for i in range(n):
        k = Lc[i].shape[0]
        prev = ranks[i - 1] if i > 0 else 0
        if ranks[i] + prev != k:
            raise NonAcyclicError(C.start + i, f"dim {k}, incoming rank {prev}, outgoing rank {ranks[i]}")
        if k == 0:
            continue
        cols = []
        if i > 0 and prev:
            cols.append(D[i - 1] @ comps[i - 1])
        if ranks[i]:
            cols.append(comps[i])
        frame = np.hstack(cols)
        x = abs(np.linalg.det(frame)) / abs(np.linalg.det(Lc[i]))
        total += (-1) ** (C.start + i + 1) * math.log(x)
    return total


def direct_sum(A: LatticeComplex, B: LatticeComplex) -> LatticeComplex:
    lo = min(A.start, B.start)
    hi = max(A.start + len(A.lattices), B.start + len(B.lattices))

    def term(C, deg):
        j = deg - C.start
        if 0 <= j < len(C.lattices):
            return C.lattices[j]
        return np.zeros((0, 0))

    def dmap(C, deg):
        j = deg - C.start
        if 0 <= j < len(C.maps):
            return C.maps[j]
        return np.zeros((term(C, deg + 1).shape[0], term(C, deg).shape[0]))

    lats, maps = [], []
    for deg in range(lo, hi):
        a, b = term(A, deg), term(B, deg)
        L = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]))
        L[: a.shape[0], : a.shape[1]] = a
        L[a.shape[0]:, a.shape[1]:] = b
        lats.append(L)
        if deg + 1 < hi:
            da, db = dmap(A, deg), dmap(B, deg)
            M = np.zeros((da.shape[0] + db.shape[0], da.shape[1] + db.shape[1]))
            M[: da.shape[0], : da.shape[1]] = da
            M[da.shape[0]:, da.shape[1]:] = db
            maps.append(M)
    return LatticeComplex(lo, lats, maps)


# ---------------------------------------------------------------- B and D from the archimedean model


def _block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols))
    r = c = 0
    for b in blocks:
        out[r: r + b.shape[0], c: c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def _fixed_dual_lattice(P: IntMatrix, sign: int) -> np.ndarray:
    """Integral f in Hom(F_v, Z) with f o P = sign * f, as coordinate columns."""
    n = P.rows
    if n == 0:
        return np.zeros((0, 0))
    return _arr(kernel_basis(P.T - IntMatrix.identity(n).scale(sign)))


def b_complex(F) -> LatticeComplex:
    if isinstance(F, Skyscraper):
        return _skyscraper_b(F)
    model = archimedean_model(F)
    return _b_from_model(model)


def _b_from_model(model: ArchModel) -> LatticeComplex:
    ranks = [v.rank for v in model.places]
    R = sum(ranks)
    s = model.n_finite
    # degree -1: sum-zero vectors in Z^{S_f}
    if s >= 2:
        Vm1 = _arr(kernel_basis(IntMatrix([[1] * s])))
    else:
        Vm1 = np.zeros((s, 0))
    units = []
    for u, fin in zip(model.units, model.unit_fin):
        vec = [x for place in u for x in place] + list(fin)
        units.append(vec)
    V0 = np.array(units, dtype=float).T if units else np.zeros((R + s, 0))
    V1 = _block_diag([_fixed_dual_lattice(v.conj, 1) for v in model.places]) if model.places else np.zeros((0, 0))
    h = len(model.h0)
    V2 = np.eye(h)
    d_m1 = np.vstack([np.zeros((R, s)), np.eye(s)])
    d_0 = np.hstack([np.eye(R), np.zeros((R, s))])
    d_1 = np.array([[x for place in sec for x in place] for sec in model.h0], dtype=float).reshape(h, R)
    return LatticeComplex(-1, [Vm1, V0, V1, V2], [d_m1, d_0, d_1])


def _skyscraper_b(F: Skyscraper) -> LatticeComplex:
    M = F.module
    n = M.rank
    if n == 0:
        return LatticeComplex(2, [np.zeros((0, 0))], [])
    fixed = kernel_basis(M.frobenius - IntMatrix.identity(n))
    homs = kernel_basis(M.frobenius.T - IntMatrix.identity(n))
    k = fixed.cols
    if k == 0:
        return LatticeComplex(2, [np.zeros((0, 0))], [])
    P = _arr(fixed.T @ homs)  # P[i][j] = f_j(s_i)
    # (H^0)^vee -> Hom_{G_x}(M, R): y |-> f with f(s_i) log N(x) = y(s_i)
    A = np.linalg.inv(P) / math.log(F.place.norm)
    return LatticeComplex(2, [np.eye(k), np.eye(k)], [A])


def d_complex(F) -> LatticeComplex:
    if not is_tame(F):
        raise UntameError("Disc(F) is only defined for tamely ramified sheaves")
    if isinstance(F, Skyscraper):
        return LatticeComplex(-1, [np.zeros((0, 0))], [])
    model = archimedean_model(F)
    ranks = [v.rank for v in model.places]
    R = sum(ranks)
    blocks_m1, blocks_1, re_rows = [], [], []
    for v in model.places:
        r = v.rank
        if v.kind == "real":
            n = _fixed_dual_lattice(v.conj, -1)
        else:
            n = np.eye(r)
        # (Re, Im) interleaved per coordinate
        emb = np.zeros((2 * r, n.shape[1]))
        emb[1::2, :] = 2 * math.pi * n
        blocks_m1.append(emb)
        blocks_1.append(_fixed_dual_lattice(v.conj, 1) if v.kind == "real" else np.eye(r))
        w = 1.0 if v.kind == "real" else 2.0
        re = np.zeros((r, 2 * r))
        for k in range(r):
            re[k, 2 * k] = w
        re_rows.append(re)
    Dm1 = _block_diag(blocks_m1)
    lie = []
    for vec in model.lie:
        col = []
        for place in vec:
            for z in place:
                z = complex(z)
                col += [z.real, z.imag]
        lie.append(col)
    D0 = np.array(lie, dtype=float).T
    D1 = _block_diag(blocks_1)
    return LatticeComplex(-1, [Dm1, D0, D1], [np.eye(2 * R), _block_diag(re_rows)])


def regulator_RFD(F) -> float:
    if isinstance(F, Sum):
        return math.prod(regulator_RFD(s) for s in F.summands)
    if isinstance(F, ConstantFinite):
        raise ValueError("R(F^D) is not formed for Z/n; use the ratio rule")
    return det_zr(b_complex(F))


def discriminant(F) -> float:
    if isinstance(F, Sum):
        return math.prod(discriminant(s) for s in F.summands)
    if isinstance(F, ConstantFinite):
        raise ValueError("Disc is not formed for Z/n; use the ratio rule")
    r2 = archimedean_invariants(F).r2F
    return (2 * math.pi) ** r2 * det_zr(d_complex(F))


# ---------------------------------------------------------------- bicomplex identity


@dataclass
class DoubleComplex:
    lattices: list  # grid[i][j]
    horizontal: list  # h[i][j]: (i,j) -> (i+1,j)
    vertical: list  # v[i][j]: (i,j) -> (i,j+1)

    def row(self, i: int) -> LatticeComplex:
        return LatticeComplex(0, self.lattices[i], self.vertical[i])

    def column(self, j: int) -> LatticeComplex:
        n = len(self.lattices)
        return LatticeComplex(0, [self.lattices[i][j] for i in range(n)], [self.horizontal[i][j] for i in range(n - 1)])


def bicomplex_identity_check(C: DoubleComplex) -> tuple[float, float, float]:
    n, m = len(C.lattices), len(C.lattices[0])
    for i in range(n - 1):
        for j in range(m - 1):
            a = C.vertical[i + 1][j] @ C.horizontal[i][j]
            b = C.horizontal[i][j + 1] @ C.vertical[i][j]
            if np.abs(a - b).max() > 1e-9 * max(1.0, np.abs(a).max()):
                raise ValueError(f"square ({i},{j}) does not commute")
    lhs = sum((-1) ** i * log_det_zr(C.row(i)) for i in range(n))
    rhs = sum((-1) ** j * log_det_zr(C.column(j)) for j in range(m))
    L, R = math.exp(lhs), math.exp(rhs)
    return L, R, abs(L - R) / max(abs(L), abs(R))


def _random_unimodular(rng: np.random.Generator, n: int) -> np.ndarray:
    from .tate_duality import random_unimodular

    return _arr(random_unimodular(rng, n))


def random_acyclic_three_term(rng: np.random.Generator) -> tuple[list[int], list[np.ndarray]]:
    """0 -> Z^a -> Z^(a+b) -> Z^b -> 0 from unimodular-conjugated diagonal maps."""
    a, b = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    n = a + b
    U = _random_unimodular(rng, n)
    Uinv = np.round(np.linalg.inv(U))
    k = rng.integers(1, 4, size=a)
    m = rng.integers(1, 4, size=b)
    d0 = U @ np.vstack([np.diag(k), np.zeros((b, a))])
    d1 = np.hstack([np.zeros((b, a)), np.diag(m)]) @ Uinv
    return [a, n, b], [d0, d1]


def _random_lattice(rng: np.random.Generator, k: int) -> np.ndarray:
    while True:
        B = rng.integers(-3, 4, size=(k, k)).astype(float) + 4 * np.eye(k)
        if abs(np.linalg.det(B)) > 0.5:
            return B * rng.uniform(0.5, 2.0)


def random_double_complex(rng: np.random.Generator) -> DoubleComplex:
    """Tensor product of two random acyclic three-term complexes, with random lattices."""
    da, mA = random_acyclic_three_term(rng)
    db, mB = random_acyclic_three_term(rng)
    lat = [[_random_lattice(rng, da[i] * db[j]) for j in range(3)] for i in range(3)]
    hor = [[np.kron(mA[i], np.eye(db[j])) for j in range(3)] for i in range(2)]
    ver = [[np.kron(np.eye(da[i]), mB[j]) for j in range(2)] for i in range(3)]
    return DoubleComplex(lat, hor, ver)


def bicomplex_trials(n: int, seed: int) -> list[tuple[float, float, float]]:
    return [bicomplex_identity_check(random_double_complex(r)) for r in split_rngs(seed, n)]
