"""Local Euler factors of F^D, their global assembly and the leading term at s = 0.

Polynomials are tuples of Fractions, lowest degree first. A local factor is a
rational function R(t) = numerator/denominator with t = N(x)^{-s}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact_linalg import IntMatrix, kernel_basis
from .exact_values import ExactValue
from .galois_modules import FrobeniusModule, dual, restrict_action_to
from .number_fields import (
    FieldError,
    NumberFieldData,
    PlaceData,
    dirichlet_L_at_1,
    kronecker,
    places_above,
    places_up_to,
)
from .sheaf_catalog import (
    ConstantFinite,
    ConstantZ,
    PushforwardConstant,
    ShriekZ,
    Skyscraper,
    Sum,
    etale_cohomology,
    galois_data,
    _stack_minus_identity,
)

Poly = tuple  # of Fraction


# ---------------------------------------------------------------- polynomial helpers


def _trim(a) -> Poly:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return tuple(Fraction(x) for x in a) if a else (Fraction(0),)


def poly_mul(a: Poly, b: Poly) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_prod(polys) -> Poly:
    acc: Poly = (Fraction(1),)
    for p in polys:
        acc = poly_mul(acc, p)
    return acc


def poly_eval(a: Poly, t):
    v = 0
    for c in reversed(a):
        v = v * t + c
    return v


def poly_substitute_power(a: Poly, f: int) -> Poly:
    """a(t^f)."""
    out = [Fraction(0)] * ((len(a) - 1) * f + 1)
    for i, c in enumerate(a):
        out[i * f] = c
    return _trim(out)


def poly_scale_variable(a: Poly, c: Fraction) -> Poly:
    """a(c t)."""
    return _trim(x * c**i for i, x in enumerate(a))


def divide_one_minus_t(a: Poly) -> tuple[int, Poly]:
    """Write a = (1 - t)^m b with b(1) != 0; return (m, b)."""
    m = 0
    a = _trim(a)
    if a == (0,):
        raise ValueError("zero polynomial")
    while poly_eval(a, 1) == 0:
        # synthetic division by (t - 1), then flip sign
        n = len(a) - 1
        q = [Fraction(0)] * n
        acc = Fraction(0)
        for i in range(n, 0, -1):
            acc = acc + a[i]
            q[i - 1] = acc
        a = _trim(-x for x in q)
        m += 1
    return m, a


def charpoly_det(phi: IntMatrix) -> Poly:
    """det(I - t phi) via Faddeev-LeVerrier (exact)."""
    n = phi.rows
    if n == 0:
        return (Fraction(1),)
    A = [[Fraction(phi[i, j]) for j in range(n)] for i in range(n)]
    c = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I ; c_k = -tr(A M_k)/k
        prev = Mk
        Mk = [[sum(A[i][l] * prev[l][j] for l in range(n)) + (c[-1] if i == j else 0) for j in range(n)] for i in range(n)]
        AM = [[sum(A[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        c.append(-sum(AM[i][i] for i in range(n)) / k)
    # det(xI - A) = sum c_k x^(n-k) so det(I - tA) = sum c_k t^k
    return _trim(c)


# ---------------------------------------------------------------- local factors


@dataclass(frozen=True)
class LocalFactor:
    place: PlaceData | None
    numerator: Poly
    denominator: Poly

    def __mul__(self, other: "LocalFactor") -> "LocalFactor":
        return LocalFactor(self.place, poly_mul(self.numerator, other.numerator), poly_mul(self.denominator, other.denominator))

    def inverse(self) -> "LocalFactor":
        return LocalFactor(self.place, self.denominator, self.numerator)

    def __call__(self, t):
        return poly_eval(self.numerator, t) / poly_eval(self.denominator, t)

    def same_function(self, other: "LocalFactor") -> bool:
        return poly_mul(self.numerator, other.denominator) == poly_mul(other.numerator, self.denominator)

    def at_s(self, s: float) -> float:
        return float(self(self.place.norm ** (-s)))


def q_factor(M: FrobeniusModule, shift: int = 0, place: PlaceData | None = None) -> LocalFactor:
    if shift not in (0, 1):
        raise ValueError("shift must be 0 or 1")
    P = charpoly_det(M.frobenius)
    if shift:
        P = poly_scale_variable(P, Fraction(1, M.residue_size))
    return LocalFactor(place, (Fraction(1),), P)


def _dual_invariants_frobenius(gd) -> IntMatrix:
    """Frobenius on (F_eta^vee)^{I} as an integer matrix."""
    D = dual(gd.generic.free_part()) if gd.generic.rank else gd.generic.free_part()
    if D.rank == 0:
        return IntMatrix.zeros(0, 0)
    B = kernel_basis(_stack_minus_identity(D, gd.inertia))
    if B.cols == 0:
        return IntMatrix.zeros(0, 0)
    return restrict_action_to(B, D.action[gd.frobenius])


def local_factor_dual(F, x: PlaceData) -> LocalFactor:
    if isinstance(F, Sum):
        acc = LocalFactor(x, (Fraction(1),), (Fraction(1),))
        for s in F.summands:
            acc = acc * local_factor_dual(s, x)
        return acc
    gd = galois_data(F, x)
    N = x.norm
    gen = FrobeniusModule(_dual_invariants_frobenius(gd), N)
    stalk_dual = FrobeniusModule(gd.stalk.dual_free(), N)
    num = q_factor(gen, 1, x) * q_factor(stalk_dual, 0, x)
    return num * q_factor(gen, 0, x).inverse()


def grouped_factor(F, p: int) -> LocalFactor:
    """Product over places x | p of R_x(u^{f_x}), in the variable u = p^{-s}."""
    acc = LocalFactor(None, (Fraction(1),), (Fraction(1),))
    for x in places_above(F.field, p):
        R = local_factor_dual(F, x)
        acc = acc * LocalFactor(None, poly_substitute_power(R.numerator, x.f), poly_substitute_power(R.denominator, x.f))
    return acc


def dedekind_factor(D: int, p: int, shift: int = 1) -> LocalFactor:
    """Euler factor of zeta_K(s + shift) at p for the quadratic field of discriminant D (or Q when D = 1)."""
    u = Fraction(1, p) if shift else Fraction(1)
    one = Fraction(1)
    if D == 1:
        return LocalFactor(None, (one,), (one, -u))
    k = kronecker(D, p)
    if k == 1:
        den = poly_mul((one, -u), (one, -u))
    elif k == -1:
        den = (one, Fraction(0), -u * u)
    else:
        den = (one, -u)
    return LocalFactor(None, (one,), _trim(den))


# ---------------------------------------------------------------- global assembly


@dataclass(frozen=True)
class Constituent:
    kind: str  # "zeta" | "dirichlet"
    disc: int
    exponent: int = 1

    def factor(self, p: int) -> LocalFactor:
        one = Fraction(1)
        chi = 1 if self.kind == "zeta" else kronecker(self.disc, p)
        base = LocalFactor(None, (one,), _trim((one, -Fraction(chi, p))))
        out = LocalFactor(None, (one,), (one,))
        e = self.exponent
        for _ in range(abs(e)):
            out = out * (base if e > 0 else base.inverse())
        return out


@dataclass(frozen=True)
class GlobalFactorization:
    constituents: tuple[Constituent, ...]
    corrections: tuple[LocalFactor, ...]

    def factor_at(self, F, p: int) -> LocalFactor:
        acc = LocalFactor(None, (Fraction(1),), (Fraction(1),))
        for c in self.constituents:
            acc = acc * c.factor(p)
        for R in self.corrections:
            if R.place.p == p:
                f = R.place.f
                acc = acc * LocalFactor(None, poly_substitute_power(R.numerator, f), poly_substitute_power(R.denominator, f))
        return acc


def _field_constituents(K: NumberFieldData) -> list[Constituent]:
    if K.is_rational:
        return [Constituent("zeta", 1)]
    if K.degree == 2:
        return [Constituent("zeta", 1), Constituent("dirichlet", K.discriminant)]
    raise FieldError("L-functions are only assembled over Q and quadratic fields")


def global_factorization(F) -> GlobalFactorization:
    if isinstance(F, Sum):
        cons, corr = [], []
        for s in F.summands:
            g = global_factorization(s)
            cons += g.constituents
            corr += g.corrections
        return GlobalFactorization(tuple(cons), tuple(corr))
    if isinstance(F, ConstantZ):
        return GlobalFactorization(tuple(_field_constituents(F.field)), ())
    if isinstance(F, ShriekZ):
        one = Fraction(1)
        corr = tuple(LocalFactor(x, (one, -one), (one,)) for x in F.S.places)
        return GlobalFactorization(tuple(_field_constituents(F.field)), corr)
    if isinstance(F, Skyscraper):
        return GlobalFactorization((), (local_factor_dual(F, F.place),))
    if isinstance(F, PushforwardConstant):
        _field_constituents(F.field)
        return GlobalFactorization(tuple(_field_constituents(F.extension)), ())
    if isinstance(F, ConstantFinite):
        return GlobalFactorization((), ())
    raise FieldError(f"unsupported sheaf {F!r}")


# ---------------------------------------------------------------- leading value


@dataclass(frozen=True)
class LeadingValue:
    order: int
    coefficient: float
    exact_form: ExactValue | None = None


def local_leading(R: LocalFactor) -> tuple[int, ExactValue]:
    """Order and leading coefficient at s = 0 of R(N^{-s})."""
    mn, bn = divide_one_minus_t(R.numerator)
    md, bd = divide_one_minus_t(R.denominator)
    m = mn - md
    r = poly_eval(bn, 1) / poly_eval(bd, 1)
    x = R.place
    # 1 - N^{-s} = s f log p + O(s^2)
    c = ExactValue.make(r * Fraction(x.f) ** m if m >= 0 else r / Fraction(x.f) ** (-m), {x.p: m})
    return m, c


def leading_value(F) -> LeadingValue:
    g = global_factorization(F)
    order = 0
    exact = ExactValue.one()
    transcendental = 1.0
    has_float = False
    for c in g.constituents:
        if c.kind == "zeta":
            order -= c.exponent
        else:
            transcendental *= dirichlet_L_at_1(c.disc) ** c.exponent
            has_float = True
    for R in g.corrections:
        m, v = local_leading(R)
        order += m
        exact = exact * v
    coeff = float(exact) * transcendental
    return LeadingValue(order, coeff, None if has_float else exact)


def vanishing_order_formula(F) -> int:
    """Signed dimension sum of H_{ar,c}; reduces to rank H^1(X,F) - rank H^0(X,F)."""
    h = etale_cohomology(F)
    return h.rank(1) - h.rank(0)


# ---------------------------------------------------------------- Euler product


@dataclass(frozen=True)
class TruncatedProduct:
    value: float
    tail_estimate: float
    places: int


def euler_product_truncation(F, s: float, bound: int) -> TruncatedProduct:
    if s <= 0:
        raise ValueError("the Euler product of F^D is only evaluated for s > 0")
    if isinstance(F, ConstantFinite):
        return TruncatedProduct(1.0, 0.0, 0)
    logv = 0.0
    count = 0
    for x in places_up_to(F.field, bound):
        R = local_factor_dual(F, x)
        logv += math.log(abs(float(poly_eval(R.numerator, x.norm ** (-s)) / poly_eval(R.denominator, x.norm ** (-s)))))
        count += 1
    r = _generic_rank(F)
    tail = r * bound ** (-s) / (s * math.log(bound)) if r else 0.0
    return TruncatedProduct(math.exp(logv), tail, count)


def _generic_rank(F) -> int:
    if isinstance(F, Sum):
        return sum(_generic_rank(s) for s in F.summands)
    if isinstance(F, (ConstantZ, ShriekZ)):
        return F.field.degree
    if isinstance(F, PushforwardConstant):
        return 2
    return 0
