"""Exact integer linear algebra: Smith form, kernels, cokernels and lattice subquotients.

Matrices are tiny here (a handful of rows), so everything is done with Python
integers and Fractions. No modular tricks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence


class IntMatrix:
    """Immutable integer matrix, row-major."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries: Iterable[Iterable[int]], rows: int | None = None, cols: int | None = None):
        data = tuple(tuple(int(x) for x in r) for r in entries)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(f"entry count does not match shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self._e = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        return cls([[c[i] for c in columns] for i in range(nrows)], nrows, len(columns))

    @classmethod
    def diag(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._e]

    def row(self, i: int) -> tuple[int, ...]:
        return self._e[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._e)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix([[self._e[i][j] for i in range(self.rows)] for j in range(self.cols)], self.cols, self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        oc = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in oc] for r in self._e], self.rows, other.cols
        )

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self._e)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)], self.rows, self.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)], self.rows, self.cols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self._e], self.rows, self.cols)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * a for a in r] for r in self._e], self.rows, self.cols)

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and (self.rows, self.cols, self._e) == (other.rows, other.cols, other._e)

    def __hash__(self):
        return hash((self.rows, self.cols, self._e))

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r})" if self.rows else f"IntMatrix.zeros(0, {self.cols})"

    def is_zero(self) -> bool:
        return all(a == 0 for r in self._e for a in r)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        return bareiss_det(self.tolist())


def hstack(mats: Sequence[IntMatrix], nrows: int | None = None) -> IntMatrix:
    if not mats:
        return IntMatrix.zeros(nrows or 0, 0)
    n = mats[0].rows
    return IntMatrix([sum((m.row(i) for m in mats), ()) for i in range(n)], n, sum(m.cols for m in mats))


def vstack(mats: Sequence[IntMatrix], ncols: int | None = None) -> IntMatrix:
    if not mats:
        return IntMatrix.zeros(0, ncols or 0)
    c = mats[0].cols
    return IntMatrix([r for m in mats for r in m.tolist()], sum(m.rows for m in mats), c)


def block_diag(mats: Sequence[IntMatrix]) -> IntMatrix:
    n = sum(m.rows for m in mats)
    k = sum(m.cols for m in mats)
    out = [[0] * k for _ in range(n)]
    r0 = c0 = 0
    for m in mats:
        for i in range(m.rows):
            for j in range(m.cols):
                out[r0 + i][c0 + j] = m[i, j]
        r0 += m.rows
        c0 += m.cols
    return IntMatrix(out, n, k)


def bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z/d1 + ... + Z/dk with d1 | d2 | ... and every d >= 2."""

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        f = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", f)
        if any(d < 2 for d in f):
            raise ValueError(f"invariant factors must be >= 2, got {f}")
        if any(f[i + 1] % f[i] for i in range(len(f) - 1)):
            raise ValueError(f"divisibility chain fails for {f}")

    @property
    def order(self) -> int:
        return reduce(lambda x, y: x * y, self.invariant_factors, 1)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "FiniteAbelianGroup":
        """Normalise an arbitrary product of cyclic groups Z/n_i."""
        orders = [abs(int(n)) for n in orders]
        if any(n == 0 for n in orders):
            raise ValueError("infinite cyclic factor")
        _, tors = cokernel(IntMatrix.diag(orders)) if orders else (0, cls())
        return tors

    def __str__(self) -> str:
        return " + ".join(f"Z/{d}" for d in self.invariant_factors) or "0"


# ---------------------------------------------------------------- Smith form


def _find_pivot(D, t, m, n):
    best = None
    for i in range(t, m):
        for j in range(t, n):
            v = D[i][j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
    return best


def smith_normal_form(A: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, D, V) with U*A*V = D diagonal, d_i | d_{i+1}, U and V unimodular.

    Pivot = smallest absolute value, first in row-major scan order.
    """
    m, n = A.rows, A.cols
    D = A.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        D[i], D[k] = D[k], D[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for r in D:
            r[j], r[k] = r[k], r[j]
        for r in V:
            r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in D:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    t = 0
    while t < min(m, n):
        piv = _find_pivot(D, t, m, n)
        if piv is None:
            break
        _, i, j = piv
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    dirty = dirty or D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    dirty = dirty or D[t][j] != 0
            if dirty:
                # a smaller remainder appeared in row/column t; move it to the pivot
                best = None
                for i in range(t, m):
                    if D[i][t] and (best is None or abs(D[i][t]) < best[0]):
                        best = (abs(D[i][t]), i, t)
                for j in range(t, n):
                    if D[t][j] and (best is None or abs(D[t][j]) < best[0]):
                        best = (abs(D[t][j]), t, j)
                _, i, j = best
                if i != t:
                    swap_rows(i, t)
                if j != t:
                    swap_cols(j, t)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return IntMatrix(U, m, m), IntMatrix(D, m, n), IntMatrix(V, n, n)


def diagonal(D: IntMatrix) -> list[int]:
    return [D[i, i] for i in range(min(D.rows, D.cols))]


def rank(A: IntMatrix) -> int:
    return sum(1 for d in diagonal(smith_normal_form(A)[1]) if d)


def cokernel(A: IntMatrix) -> tuple[int, FiniteAbelianGroup]:
    """coker(Z^cols -> Z^rows) as (free rank, torsion)."""
    if A.cols == 0:
        return A.rows, FiniteAbelianGroup()
    d = diagonal(smith_normal_form(A)[1])
    r = sum(1 for x in d if x)
    return A.rows - r, FiniteAbelianGroup(tuple(x for x in d if x > 1))


def hermite_rows(B: IntMatrix) -> IntMatrix:
    """Row-style Hermite normal form of the row lattice (zero rows dropped)."""
    rows = [list(r) for r in B.tolist()]
    n = B.cols
    out: list[list[int]] = []
    col = 0
    while rows and col < n:
        nz = [r for r in rows if r[col]]
        if not nz:
            col += 1
            continue
        while len([r for r in rows if r[col]]) > 1:
            nz = sorted((r for r in rows if r[col]), key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                q = r[col] // p[col]
                for k in range(n):
                    r[k] -= q * p[k]
        p = next(r for r in rows if r[col])
        rows.remove(p)
        if p[col] < 0:
            p = [-x for x in p]
        for r in out:
            q = r[col] // p[col]
            if q:
                for k in range(n):
                    r[k] -= q * p[k]
        out.append(p)
        rows = [r for r in rows if any(r)]
        col += 1
    return IntMatrix(out, len(out), n) if out else IntMatrix.zeros(0, n)


def column_hermite(B: IntMatrix) -> IntMatrix:
    """Hermite-reduced basis of the column lattice of B, as columns."""
    return hermite_rows(B.T).T if B.cols else B


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Columns form a saturated Z-basis of {x : A x = 0}, Hermite-reduced."""
    n = A.cols
    if A.rows == 0:
        return IntMatrix.identity(n)
    _, D, V = smith_normal_form(A)
    r = sum(1 for x in diagonal(D) if x)
    cols = [V.column(j) for j in range(r, n)]
    if not cols:
        return IntMatrix.zeros(n, 0)
    return column_hermite(IntMatrix.from_columns(cols, n))


def is_saturated(B: IntMatrix) -> bool:
    if B.cols == 0:
        return True
    d = diagonal(smith_normal_form(B)[1])
    return all(x == 1 for x in d) and len(d) == B.cols


# ---------------------------------------------------------------- rational helpers


def rational_solve(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Solve A x = b over Q for A with full column rank; None when inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[Fraction(x) for x in row] + [Fraction(bb)] for row, bb in zip(A, b)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    if any(M[i][n] != 0 for i in range(r, m)):
        return None
    if len(piv_cols) < n:
        raise ValueError("matrix does not have full column rank")
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = M[i][n]
    return x


def integer_coordinates(basis: IntMatrix, v: Sequence[int]) -> list[int]:
    """Coordinates of v in a lattice basis (columns); raise if v is not in the lattice."""
    x = rational_solve(basis.tolist(), v)
    if x is None or any(c.denominator != 1 for c in x):
        raise ValueError(f"vector {tuple(v)} not in lattice")
    return [int(c) for c in x]


def lattice_basis(gens: IntMatrix) -> IntMatrix:
    """Basis (columns) of the lattice spanned by the columns of gens."""
    return column_hermite(gens)


def preimage_lattice(F: IntMatrix, R: IntMatrix) -> IntMatrix:
    """Basis of {x in Z^n : F x in span_Z(R)} where R holds generators as columns."""
    n = F.cols
    if R.cols == 0:
        return kernel_basis(F)
    K = kernel_basis(hstack([F, -R]))
    proj = IntMatrix([K.row(i) for i in range(n)], n, K.cols)
    return lattice_basis(proj)


@dataclass(frozen=True)
class Subquotient:
    """A/B for lattices B <= A <= Z^n, with generator lifts adapted to the decomposition."""

    group: FiniteAbelianGroup
    free_rank: int
    torsion_lifts: tuple[tuple[int, ...], ...]  # one lift per invariant factor
    free_lifts: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        if self.free_rank:
            raise ValueError("subquotient is infinite")
        return self.group.order


def subquotient(A: IntMatrix, B: IntMatrix) -> Subquotient:
    """A (basis or generators, columns) modulo B (generators, columns); B must lie in A."""
    A = lattice_basis(A)
    r = A.cols
    if r == 0:
        return Subquotient(FiniteAbelianGroup(), 0, (), ())
    Bb = lattice_basis(B) if B.cols else B
    coords = [integer_coordinates(A, Bb.column(j)) for j in range(Bb.cols)]
    C = IntMatrix.from_columns(coords, r) if coords else IntMatrix.zeros(r, 0)
    if C.cols == 0:
        return Subquotient(FiniteAbelianGroup(), r, (), tuple(A.columns()))
    U, D, _ = smith_normal_form(C)
    Uinv = inverse_unimodular(U)
    gens = A @ Uinv  # columns adapted to the Smith diagonal
    d = diagonal(D) + [0] * (r - min(D.rows, D.cols))
    tors, tl, fl = [], [], []
    for k in range(r):
        dk = d[k] if k < len(d) else 0
        if dk == 0:
            fl.append(gens.column(k))
        elif dk > 1:
            tors.append(dk)
            tl.append(gens.column(k))
    return Subquotient(FiniteAbelianGroup(tuple(tors)), len(fl), tuple(tl), tuple(fl))


def inverse_unimodular(U: IntMatrix) -> IntMatrix:
    n = U.rows
    cols = [integer_coordinates(U, [int(i == j) for i in range(n)]) for j in range(n)]
    return IntMatrix.from_columns(cols, n)


def content(v: Iterable[int]) -> int:
    return reduce(gcd, (abs(int(x)) for x in v), 0)
