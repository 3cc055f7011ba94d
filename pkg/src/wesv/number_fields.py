"""Invariants of Q and of quadratic fields, plus S-unit data.

Imaginary quadratic class numbers and class-group arithmetic are computed
natively from binary quadratic forms. Real quadratic class numbers come from
a bundled table (or an explicit override); the fundamental unit comes from
the continued fraction of the standard generator of the ring of integers.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

from .exact_linalg import IntMatrix, lattice_basis

Form = tuple[int, int, int]


class FieldError(ValueError):
    pass


# ---------------------------------------------------------------- elementary


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def fundamental_discriminant(d: int) -> int:
    if d in (0, 1) or not is_squarefree(d):
        raise FieldError(f"d = {d} must be a squarefree integer other than 0 and 1")
    return d if d % 4 == 1 else 4 * d


def squarefree_part_of_disc(D: int) -> int:
    if D % 4 == 1:
        d = D
    elif D % 4 == 0:
        d = D // 4
    else:
        raise FieldError(f"{D} is not a discriminant")
    if fundamental_discriminant(d) != D:
        raise FieldError(f"{D} is not a fundamental discriminant")
    return d


def is_fundamental(D: int) -> bool:
    try:
        squarefree_part_of_disc(D)
        return True
    except FieldError:
        return False


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a|n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, v in enumerate(sieve) if v]


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, math.isqrt(n) + 1))


# ---------------------------------------------------------------- definite forms


def reduced_forms(D: int) -> list[Form]:
    """Reduced primitive positive definite forms of discriminant D < 0."""
    if D >= 0:
        raise FieldError("definite forms need D < 0")
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
        a += 1
    return out


def reduce_form(f: Form) -> Form:
    a, b, c = f
    while True:
        if not (-a < b <= a):
            k = (a - b) // (2 * a)
            # b + 2ak in (-a, a]
            b, c = b + 2 * a * k, a * k * k + b * k + c
            continue
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
            continue
        return (a, b, c)


class QuadraticOrderArithmetic:
    """Ideals of the maximal order as Z-lattices in the basis {1, w}, w = (D + sqrt D)/2."""

    def __init__(self, D: int):
        self.D = D
        self.wn = (D * D - D) // 4  # w^2 = D w - wn

    def mul(self, x, y):
        x0, x1 = x
        y0, y1 = y
        t = x1 * y1
        return (x0 * y0 - t * self.wn, x0 * y1 + x1 * y0 + t * self.D)

    def form_ideal(self, f: Form):
        a, b, _ = f
        # (-b + sqrt D)/2 = (-b - D)/2 + w
        return [(a, 0), ((-b - self.D) // 2, 1)]

    def ideal_form(self, gens) -> Form:
        B = lattice_basis(IntMatrix.from_columns([list(g) for g in gens], 2))
        # Hermite basis columns: put it into upper triangular shape [[alpha, beta], [0, gamma]]
        cols = B.columns()
        if len(cols) != 2:
            raise FieldError("ideal has rank < 2")
        M = [list(cols[0]), list(cols[1])]
        # row-reduce on the w coordinate
        while M[0][1] and M[1][1]:
            if abs(M[0][1]) > abs(M[1][1]):
                M[0], M[1] = M[1], M[0]
            q = M[1][1] // M[0][1]
            M[1] = [u - q * v for u, v in zip(M[1], M[0])]
        if M[0][1] == 0:
            M[0], M[1] = M[1], M[0]
        (beta, gamma), (alpha, _) = M[0], M[1]
        alpha, gamma = abs(alpha), gamma
        if gamma < 0:
            beta, gamma = -beta, -gamma
        if alpha % gamma or beta % gamma:
            raise FieldError("unexpected ideal shape")
        a = alpha // gamma
        b = -2 * (beta // gamma) - self.D
        b %= 2 * a
        if (b * b - self.D) % (4 * a):
            raise FieldError("ideal to form conversion failed")
        return (a, b, (b * b - self.D) // (4 * a))

    def compose(self, f: Form, g: Form) -> Form:
        I, J = self.form_ideal(f), self.form_ideal(g)
        prods = [self.mul(x, y) for x in I for y in J]
        return self.ideal_form(prods)


def compose_forms(f: Form, g: Form, D: int) -> Form:
    h = QuadraticOrderArithmetic(D).compose(f, g)
    return reduce_form(h) if D < 0 else h


def form_power(f: Form, k: int, D: int) -> Form:
    r = principal_form(D)
    for _ in range(k):
        r = compose_forms(r, f, D)
    return r


def principal_form(D: int) -> Form:
    s = D % 2
    return reduce_form((1, s, (s - D) // 4)) if D < 0 else (1, s, (s - D) // 4)


def form_order(f: Form, D: int) -> int:
    e = principal_form(D)
    g = reduce_form(f)
    k = 1
    while g != e:
        g = compose_forms(g, f, D)
        k += 1
        if k > 10_000:
            raise FieldError("form order search diverged")
    return k


# ---------------------------------------------------------------- units


def fundamental_unit(D: int) -> tuple[int, int]:
    """(x, y) with eps = (x + y sqrt D)/2 > 1 the fundamental unit of discriminant D > 0."""
    if D <= 0:
        raise FieldError("fundamental unit needs D > 0")
    s = D % 4  # 0 or 1
    # omega = (s + sqrt D)/2 ; expand (P + sqrt D)/Q with Q | D - P^2
    P, Q = s, 2
    r = math.isqrt(D)
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    for _ in range(100_000):
        a = _floor_quad(P, Q, r)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        # candidate p - q*omega; its norm
        nrm = p * p - p * q * s + q * q * (s * s - D) // 4
        if abs(nrm) == 1:
            x, y = 2 * p - q * s, q
            if x < 0:
                x, y = -x, -y
            return (x, abs(y)) if x * x - D * y * y in (4, -4) else _bad_unit(D)
        P = a * Q - P
        Q = (D - P * P) // Q
    raise FieldError("continued fraction did not produce a unit")


def _bad_unit(D):
    raise FieldError(f"unit search failed for D = {D}")


def _floor_quad(P: int, Q: int, r: int) -> int:
    """floor((P + sqrt D)/Q) for non-square D with isqrt(D) = r."""
    if Q > 0:
        return (P + r) // Q
    return -((P + r) // (-Q)) - 1


# ---------------------------------------------------------------- tables


def data_dir() -> Path:
    env = os.environ.get("WESV_DATA_DIR")
    if env:
        return Path(env)
    return Path(str(resources.files("wesv") / "data"))


@lru_cache(maxsize=8)
def _load_table(path: str) -> dict[int, dict]:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        return {}
    return {int(r["disc"]): r for r in raw["fields"]}


def real_quadratic_table() -> dict[int, dict]:
    return _load_table(str(data_dir() / "real_quadratic.json"))


def imaginary_quadratic_table() -> dict[int, dict]:
    return _load_table(str(data_dir() / "imaginary_quadratic.json"))


# ---------------------------------------------------------------- field data


@dataclass(frozen=True)
class NumberFieldData:
    label: str
    degree: int
    discriminant: int
    r1: int
    r2: int
    omega: int
    class_number: int
    narrow_class_number: int
    regulator: float
    integral_basis_embeddings: tuple[tuple[complex, ...], ...]
    fundamental_unit_embeddings: tuple[tuple[complex, ...], ...] = ()
    unit_signs_at_real_places: tuple[tuple[int, ...], ...] = ()
    provenance: str = "native"
    unit_xy: tuple[int, int] | None = None  # eps = (x + y sqrt D)/2 for real quadratic fields

    def __post_init__(self):
        if self.r1 + 2 * self.r2 != self.degree:
            raise FieldError("r1 + 2 r2 must equal the degree")
        if len(self.integral_basis_embeddings) != self.degree:
            raise FieldError("need one embedding row per complex embedding")

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    @property
    def is_quadratic(self) -> bool:
        return self.degree == 2 and self.provenance != "ingested-general"

    @property
    def unit_rank(self) -> int:
        return self.r1 + self.r2 - 1

    @property
    def has_real_place(self) -> bool:
        return self.r1 > 0

    def embedding_det_abs2(self) -> float:
        import numpy as np

        M = np.array(self.integral_basis_embeddings, dtype=complex)
        return abs(np.linalg.det(M)) ** 2

    @property
    def omega_basis(self) -> tuple[int, ...]:
        """For quadratic fields: s with omega = (s + sqrt D)/2."""
        return (self.discriminant % 4,)


def rational_field() -> NumberFieldData:
    return NumberFieldData("Q", 1, 1, 1, 0, 2, 1, 1, 1.0, ((1 + 0j,),), provenance="native")


def quadratic_field(d: int, h_override: int | None = None) -> NumberFieldData:
    D = fundamental_discriminant(d)
    s = D % 4
    sq = math.sqrt(abs(D))
    label = f"Q(sqrt({d}))"
    if D < 0:
        w = complex(s / 2, sq / 2)
        rows = ((1 + 0j, w), (1 + 0j, w.conjugate()))
        h = len(reduced_forms(D)) if h_override is None else h_override
        omega = 6 if D == -3 else 4 if D == -4 else 2
        return NumberFieldData(label, 2, D, 0, 1, omega, h, h, 1.0, rows, provenance="native")
    w1, w2 = (s + sq) / 2, (s - sq) / 2
    rows = ((1 + 0j, complex(w1)), (1 + 0j, complex(w2)))
    x, y = fundamental_unit(D)
    e1, e2 = (x + y * sq) / 2, (x - y * sq) / 2
    norm = (x * x - D * y * y) // 4
    if h_override is not None:
        h, prov = h_override, "override"
    else:
        row = real_quadratic_table().get(D)
        if row is None:
            raise FieldError(f"real quadratic discriminant {D} not in the class number table; pass an override")
        h, prov = int(row["h"]), "ingested"
    h_plus = h if norm == -1 else 2 * h
    return NumberFieldData(
        label, 2, D, 2, 0, 2, h, h_plus, math.log(e1), rows,
        fundamental_unit_embeddings=((complex(e1), complex(e2)),),
        unit_signs_at_real_places=((1 if e1 > 0 else -1, 1 if e2 > 0 else -1),),
        provenance=prov,
        unit_xy=(x, y),
    )


def field_from_disc(D: int, h_override: int | None = None) -> NumberFieldData:
    if D == 1:
        return rational_field()
    return quadratic_field(squarefree_part_of_disc(D), h_override)


def field_to_record(K: NumberFieldData) -> dict:
    return {
        "label": K.label,
        "degree": K.degree,
        "discriminant": K.discriminant,
        "r1": K.r1,
        "r2": K.r2,
        "omega": K.omega,
        "h": K.class_number,
        "h_plus": K.narrow_class_number,
        "regulator": K.regulator,
        "integral_basis_embeddings": [[[z.real, z.imag] for z in row] for row in K.integral_basis_embeddings],
        "units": [[[z.real, z.imag] for z in row] for row in K.fundamental_unit_embeddings],
        "provenance": K.provenance,
    }


def field_from_record(rec: dict) -> NumberFieldData:
    """Ingest a field record. Quadratic/rational discriminants are rebuilt natively when
    the record carries no embeddings; otherwise the record is taken as given."""
    try:
        if "integral_basis_embeddings" not in rec:
            h = rec.get("h")
            D = int(rec.get("discriminant", rec.get("disc")))
            K = field_from_disc(D, h_override=h if D > 0 else None)
            return K
        rows = tuple(tuple(complex(a, b) for a, b in row) for row in rec["integral_basis_embeddings"])
        units = tuple(tuple(complex(a, b) for a, b in row) for row in rec.get("units", []))
        r1, r2 = int(rec["r1"]), int(rec["r2"])
        signs = tuple(tuple(1 if u[i].real > 0 else -1 for i in range(r1)) for u in units)
        K = NumberFieldData(
            rec.get("label", "ingested"), int(rec["degree"]), int(rec["discriminant"]), r1, r2,
            int(rec["omega"]), int(rec["h"]), int(rec.get("h_plus", rec["h"])),
            float(rec.get("regulator", 1.0)), rows, units, signs,
            provenance="ingested-general" if int(rec["degree"]) > 2 else "ingested",
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FieldError(f"bad field record: {exc}") from exc
    if len(K.fundamental_unit_embeddings) != K.unit_rank:
        raise FieldError("number of units does not match the unit rank")
    return K


# ---------------------------------------------------------------- places


@dataclass(frozen=True)
class PlaceData:
    p: int
    f: int
    splitting: str  # "rational" | "split" | "inert" | "ramified"
    b: int = 0  # prime ideal <-> form (p, b, c) for split/ramified places of a quadratic field

    @property
    def norm(self) -> int:
        return self.p**self.f

    @property
    def label(self) -> str:
        if self.splitting in ("split", "ramified"):
            return f"p{self.p}[{self.b}]"
        return f"p{self.p}"


def splitting_type(D: int, p: int) -> str:
    k = kronecker(D, p)
    return "split" if k == 1 else "inert" if k == -1 else "ramified"


def places_above(K: NumberFieldData, p: int) -> list[PlaceData]:
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if K.is_rational:
        return [PlaceData(p, 1, "rational")]
    if K.degree != 2:
        raise FieldError("places are only enumerated for Q and quadratic fields")
    D = K.discriminant
    t = splitting_type(D, p)
    if t == "inert":
        return [PlaceData(p, 2, "inert")]
    bs = sorted({b for b in range(2 * p) if (b * b - D) % (4 * p) == 0})
    if t == "ramified":
        return [PlaceData(p, 1, "ramified", bs[0])]
    return [PlaceData(p, 1, "split", b) for b in bs]


def place_from_spec(K: NumberFieldData, spec: dict) -> PlaceData:
    p = int(spec["p"])
    cands = places_above(K, p)
    if "b" in spec and K.degree == 2:
        b = int(spec["b"]) % (2 * p)
        for c in cands:
            if c.splitting != "inert" and c.b == b:
                return c
        raise FieldError(f"no prime above {p} with b = {spec['b']}")
    return cands[int(spec.get("index", 0))]


def places_up_to(K: NumberFieldData, bound: int) -> list[PlaceData]:
    out = []
    for p in primes_up_to(bound):
        out.extend(x for x in places_above(K, p) if x.norm <= bound)
    return sorted(out, key=lambda x: (x.norm, x.p, x.b))


def prime_form(K: NumberFieldData, x: PlaceData) -> Form:
    D = K.discriminant
    if x.splitting == "inert":
        return principal_form(D)
    return (x.p, x.b, (x.b * x.b - D) // (4 * x.p))


def dirichlet_L_at_1(D: int) -> float:
    """L(1, chi_D) from the finite Gauss-sum formulas."""
    if D == 1 or not is_fundamental(D):
        raise FieldError(f"{D} is not a fundamental discriminant != 1")
    n = abs(D)
    if D < 0:
        s = sum(kronecker(D, a) * a for a in range(1, n))
        return math.pi / n**1.5 * abs(s)
    return -sum(kronecker(D, a) * math.log(math.sin(math.pi * a / n)) for a in range(1, n)) / math.sqrt(n)


# ---------------------------------------------------------------- S-data


@dataclass(frozen=True)
class SUnit:
    arch_log: tuple[float, ...]  # normalised log |sigma_v(u)|_v per archimedean place
    valuations: tuple[int, ...]  # per place in S
    norm_sign: int = 1


@dataclass(frozen=True)
class SPlaceSet:
    field: NumberFieldData
    places: tuple[PlaceData, ...]
    class_number: int
    narrow_class_number: int
    units: tuple[SUnit, ...]  # basis of S-units modulo torsion
    class_image_order: int = 1

    @property
    def unit_rank(self) -> int:
        return self.field.r1 + self.field.r2 - 1 + len(self.places)

    def regulator(self) -> float:
        """Covolume of the S-unit log lattice (drop the first archimedean row)."""
        import numpy as np

        if not self.units:
            return 1.0
        rows = []
        for u in self.units:
            fin = [-v * math.log(x.norm) for v, x in zip(u.valuations, self.places)]
            rows.append(list(u.arch_log[1:]) + fin)
        return abs(float(np.linalg.det(np.array(rows).T)))


def _arch_units(K: NumberFieldData, nS: int) -> list[SUnit]:
    out = []
    for emb in K.fundamental_unit_embeddings:
        logs = tuple(
            (1.0 if i < K.r1 else 2.0) * math.log(abs(z)) for i, z in enumerate(emb[: K.r1 + K.r2])
        )
        out.append(SUnit(logs, (0,) * nS))
    return out


def s_data(K: NumberFieldData, S: Sequence[PlaceData]) -> SPlaceSet:
    S = tuple(S)
    if len(set(S)) != len(S):
        raise FieldError("repeated place in S")
    n = len(S)
    if K.is_rational:
        units = [SUnit((math.log(x.p),), tuple(int(i == j) for j in range(n))) for i, x in enumerate(S)]
        return SPlaceSet(K, S, 1, 1, tuple(units), 1)
    if K.degree != 2:
        raise FieldError("S-data is only available for Q and quadratic fields")
    D = K.discriminant
    if D < 0:
        forms = [reduce_form(prime_form(K, x)) for x in S]
        orders = [form_order(f, D) for f in forms]
        e = principal_form(D)
        gens = []
        image = set()
        import itertools

        for a in itertools.product(*[range(o) for o in orders]):
            g = e
            for f, k in zip(forms, a):
                g = compose_forms(g, form_power(f, k, D), D) if k else g
            image.add(g)
            if g == e and any(a):
                gens.append(list(a))
        gens += [[o if i == j else 0 for j in range(n)] for i, o in enumerate(orders)]
        L = lattice_basis(IntMatrix.from_columns(gens, n)) if n else IntMatrix.zeros(0, 0)
        units = []
        for j in range(L.cols):
            a = L.column(j)
            units.append(SUnit((sum(ai * math.log(x.norm) for ai, x in zip(a, S)),), tuple(a)))
        k = len(image)
        if K.class_number % k:
            raise FieldError("class subgroup order does not divide h")
        hS = K.class_number // k
        return SPlaceSet(K, S, hS, hS, tuple(_arch_units(K, n) + units), k)
    # real quadratic: every S-prime must be principal
    units = _arch_units(K, n)
    negative = False
    for i, x in enumerate(S):
        if x.splitting == "inert":
            g = (x.p, 0)
        else:
            if K.class_number != 1:
                raise FieldError(
                    f"cannot locate the class of {x.label} in a real quadratic field with h = {K.class_number}"
                )
            g = _principal_generator(K, x)
        x0, y0 = g  # element x0 + y0*omega
        s = D % 4
        sq = math.sqrt(D)
        s1 = x0 + y0 * (s + sq) / 2
        s2 = x0 + y0 * (s - sq) / 2
        nrm = x0 * x0 + x0 * y0 * s + y0 * y0 * (s * s - D) // 4
        negative = negative or nrm < 0
        units.append(SUnit((math.log(abs(s1)), math.log(abs(s2))), tuple(int(i == j) for j in range(n)), 1 if nrm > 0 else -1))
    hS = 1 if K.class_number == 1 else K.class_number
    if K.narrow_class_number == K.class_number:
        hSp = hS
    else:
        hSp = 1 if negative else 2
    return SPlaceSet(K, S, hS, hSp, tuple(units), K.class_number // hS)


def _in_prime(K: NumberFieldData, x: PlaceData, elt) -> bool:
    """Is x0 + y0*omega in the prime ideal [p, (-b + sqrt D)/2]?"""
    D, p, b = K.discriminant, x.p, x.b
    s = D % 4
    x0, y0 = elt
    # omega = (s + sqrt D)/2 = (s + b)/2 + (-b + sqrt D)/2
    # element = x0 + y0 (s + b)/2 + y0 * gen ; need (x0 + y0 (s+b)/2) in pZ
    num = 2 * x0 + y0 * (s + b)
    return num % (2 * p) == 0


def _principal_generator(K: NumberFieldData, x: PlaceData, limit: int = 200_000):
    D = K.discriminant
    s = D % 4
    for y in range(1, limit):
        # norm(x0 + y omega) = x0^2 + s x0 y + y^2 (s^2 - D)/4 = +-p
        c0 = y * y * (s * s - D) // 4
        for target in (x.p, -x.p):
            disc = (s * y) ** 2 - 4 * (c0 - target)
            if disc < 0:
                continue
            r = math.isqrt(disc)
            if r * r != disc:
                continue
            for num in (-s * y + r, -s * y - r):
                if num % 2 == 0:
                    cand = (num // 2, y)
                    if _in_prime(K, x, cand):
                        return cand
    raise FieldError(f"no generator found for {x.label}")
