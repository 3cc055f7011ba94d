"""The supported sheaves on Spec(O_K) and their cohomology tables.

Each descriptor also exposes the Galois data the other modules need: the
generic fibre as a module over a finite quotient, stalks with Frobenius, and
an archimedean model (per infinite place: the module F_v with complex
conjugation, the Lie lattice, units and global sections in F_v coordinates).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .exact_linalg import IntMatrix, cokernel, kernel_basis, preimage_lattice, subquotient, hstack
from .galois_modules import (
    FrobeniusModule,
    IntegralGModule,
    cyclic_group,
    regular_module,
    restrict_action_to,
    trivial_group,
    trivial_module,
)
from .number_fields import (
    NumberFieldData,
    PlaceData,
    SPlaceSet,
    compose_forms,
    field_from_disc,
    place_from_spec,
    principal_form,
    reduced_forms,
    s_data,
    splitting_type,
)
from .tate_duality import tate_h0, tate_hminus1


class SheafError(ValueError):
    pass


class UntameError(SheafError):
    pass


# ---------------------------------------------------------------- descriptors


@dataclass(frozen=True)
class ConstantZ:
    field: NumberFieldData
    kind = "constant_z"


@dataclass(frozen=True)
class ShriekZ:
    field: NumberFieldData
    S: SPlaceSet
    kind = "shriek_z"

    def __post_init__(self):
        if not self.S.places:
            raise SheafError("j_! Z needs a non-empty set of removed places")


@dataclass(frozen=True)
class Skyscraper:
    field: NumberFieldData
    place: PlaceData
    module: FrobeniusModule
    kind = "skyscraper"

    def __post_init__(self):
        if self.module.residue_size != self.place.norm:
            raise SheafError("module residue size must equal N(x)")


@dataclass(frozen=True)
class PushforwardConstant:
    field: NumberFieldData
    extension: NumberFieldData
    kind = "pushforward_constant"

    def __post_init__(self):
        if not self.field.is_rational:
            raise SheafError("pushforwards are supported from quadratic fields down to Q only")
        if self.extension.degree != 2:
            raise SheafError("extension must be quadratic")

    @property
    def tame(self) -> bool:
        # a quadratic field is wildly ramified exactly at 2 when 4 | disc
        return self.extension.discriminant % 2 == 1


@dataclass(frozen=True)
class ConstantFinite:
    field: NumberFieldData
    n: int
    kind = "constant_finite"

    def __post_init__(self):
        if self.n < 2:
            raise SheafError("Z/n needs n >= 2")


@dataclass(frozen=True)
class Sum:
    field: NumberFieldData
    summands: tuple
    kind = "sum"

    def __post_init__(self):
        if any(isinstance(s, Sum) for s in self.summands):
            raise SheafError("sums must be flat")
        if any(s.field != self.field for s in self.summands):
            raise SheafError("summands must live over the same base field")


SheafDescriptor = Union[ConstantZ, ShriekZ, Skyscraper, PushforwardConstant, ConstantFinite, Sum]


def trivial_skyscraper(K: NumberFieldData, x: PlaceData) -> Skyscraper:
    return Skyscraper(K, x, FrobeniusModule(IntMatrix.identity(1), x.norm))


def is_tame(F) -> bool:
    if isinstance(F, PushforwardConstant):
        return F.tame
    if isinstance(F, Sum):
        return all(is_tame(s) for s in F.summands)
    return True


# ---------------------------------------------------------------- summaries


@dataclass(frozen=True)
class CohomologySummary:
    family: str  # "etale" | "compact" | "weil_etale"
    degrees: dict  # degree -> (rank, torsion_order)
    notes: tuple = ()

    def rank(self, i: int) -> int:
        return self.degrees.get(i, (0, 1))[0]

    def torsion(self, i: int) -> int:
        return self.degrees.get(i, (0, 1))[1]

    def __add__(self, other: "CohomologySummary") -> "CohomologySummary":
        keys = sorted(set(self.degrees) | set(other.degrees))
        return CohomologySummary(
            self.family,
            {k: (self.rank(k) + other.rank(k), self.torsion(k) * other.torsion(k)) for k in keys},
            self.notes + other.notes,
        )


def _sum_summaries(parts: Sequence[CohomologySummary], family: str) -> CohomologySummary:
    acc = CohomologySummary(family, {})
    for p in parts:
        acc = acc + p
    return acc


@dataclass(frozen=True)
class PointData:
    """Cohomology of the Frobenius module at a closed point."""

    h0_rank: int
    h0_tor: int
    h1_order: int  # H^1(G_x, M), finite
    hom_rank: int  # Hom_{G_x}(M, Z)
    h1_dual_order: int  # H^1(G_x, M^vee) for the derived dual
    pairing_regulator: int  # R(M)


def point_data(M: FrobeniusModule) -> PointData:
    n = M.rank
    phi = M.frobenius
    I = IntMatrix.identity(n)
    fixed = kernel_basis(phi - I) if n else IntMatrix.zeros(0, 0)
    h1_free = cokernel(phi - I)[1].order if n else 1
    dual_fixed = kernel_basis(phi.T - I) if n else IntMatrix.zeros(0, 0)
    h1_dual_free = cokernel(M.dual_free() - I)[1].order if n else 1
    # torsion part: fixed points and coinvariants of a finite module
    h0_tor, h1_tor = 1, 1
    if M.torsion_orders:
        d = M.torsion_orders
        k = len(d)
        R = IntMatrix.diag(list(d))
        T = M.torsion_frobenius
        Ik = IntMatrix.identity(k)
        fx = preimage_lattice(T - Ik, R)
        h0_tor = subquotient(fx, R).order
        h1_tor = subquotient(Ik, hstack([T - Ik, R])).order
    P = dual_fixed.T @ fixed if fixed.cols else IntMatrix.zeros(0, 0)
    reg = abs(P.det()) if fixed.cols else 1
    return PointData(
        h0_rank=fixed.cols,
        h0_tor=h0_tor,
        h1_order=h1_free * h1_tor,
        hom_rank=dual_fixed.cols,
        # the torsion part contributes H^0(G_x, M_tor^*), of the same order as H^1(G_x, M_tor)
        h1_dual_order=h1_dual_free * h1_tor,
        pairing_regulator=reg,
    )


def narrow_class_torsion(K: NumberFieldData, n: int) -> int:
    """Order of the n-torsion of Pic^+(X)."""
    hp = K.narrow_class_number
    if hp == 1:
        return 1
    if K.discriminant < 0 and K.degree == 2:
        D = K.discriminant
        e = principal_form(D)
        count = 0
        for f in reduced_forms(D):
            g = e
            for _ in range(n):
                g = compose_forms(g, f, D)
            count += g == e
        return count
    # cyclic is forced when h^+ is squarefree
    if all(hp % (p * p) for p in range(2, hp + 1)):
        return math.gcd(hp, n)
    raise SheafError(f"structure of the narrow class group of {K.label} is not available")


def etale_cohomology(F) -> CohomologySummary:
    if isinstance(F, Sum):
        return _sum_summaries([etale_cohomology(s) for s in F.summands], "etale")
    if isinstance(F, (ConstantZ, PushforwardConstant)):
        return CohomologySummary("etale", {0: (1, 1), 1: (0, 1)})
    if isinstance(F, ShriekZ):
        return CohomologySummary("etale", {0: (0, 1), 1: (len(F.S.places) - 1, 1)})
    if isinstance(F, Skyscraper):
        pd = point_data(F.module)
        return CohomologySummary("etale", {0: (pd.h0_rank, pd.h0_tor), 1: (0, pd.h1_order)})
    if isinstance(F, ConstantFinite):
        # from 0 -> Z -n-> Z -> Z/n -> 0 with H^1(X,Z) = 0 and H^2(X,Z) = Pic^+(X)^*
        return CohomologySummary("etale", {0: (0, F.n), 1: (0, narrow_class_torsion(F.field, F.n))})
    raise SheafError(f"unsupported sheaf {F!r}")


def _mu_plus(K: NumberFieldData) -> int:
    return 1 if K.r1 > 0 else K.omega


def compact_support_cohomology(F) -> CohomologySummary:
    if isinstance(F, Sum):
        return _sum_summaries([compact_support_cohomology(s) for s in F.summands], "compact")
    if isinstance(F, ConstantZ):
        K = F.field
        return CohomologySummary(
            "compact",
            {-1: (K.degree - 1, _mu_plus(K)), 0: (0, K.narrow_class_number), 1: (0, 1)},
            ("H^2 = Q/Z",),
        )
    if isinstance(F, ShriekZ):
        K = F.field
        s = len(F.S.places)
        return CohomologySummary(
            "compact",
            {-1: (K.degree - 1 + s, _mu_plus(K)), 0: (0, F.S.narrow_class_number), 1: (0, 1)},
            (f"H^1 = (Q/Z)^{s - 1}", "H^2 = 0"),
        )
    if isinstance(F, Skyscraper):
        pd = point_data(F.module)
        return CohomologySummary("compact", {-1: (0, 1), 0: (pd.hom_rank, 1), 1: (0, pd.h1_dual_order)})
    if isinstance(F, PushforwardConstant):
        L = F.extension
        return CohomologySummary(
            "compact", {-1: (L.degree - 1, _mu_plus(L)), 0: (0, L.narrow_class_number), 1: (0, 1)}, ("H^2 = Q/Z",)
        )
    if isinstance(F, ConstantFinite):
        raise SheafError("Z/n is handled through 0 -> Z -> Z -> Z/n -> 0 only")
    raise SheafError(f"unsupported sheaf {F!r}")


def weil_etale_cohomology(F) -> CohomologySummary:
    if isinstance(F, Sum):
        return _sum_summaries([weil_etale_cohomology(s) for s in F.summands], "weil_etale")
    if isinstance(F, (ConstantZ, PushforwardConstant)):
        K = F.field if isinstance(F, ConstantZ) else F.extension
        return CohomologySummary(
            "weil_etale",
            {-1: (K.degree - 1, _mu_plus(K)), 0: (0, K.narrow_class_number), 1: (1, 1), 2: (0, 1)},
        )
    if isinstance(F, ShriekZ):
        K = F.field
        s = len(F.S.places)
        return CohomologySummary(
            "weil_etale",
            {-1: (K.degree - 1 + s, _mu_plus(K)), 0: (s - 1, F.S.narrow_class_number), 1: (0, 1), 2: (0, 1)},
        )
    if isinstance(F, Skyscraper):
        pd = point_data(F.module)
        return CohomologySummary(
            "weil_etale",
            {-1: (0, 1), 0: (pd.hom_rank, 1), 1: (pd.h0_rank, pd.h1_order), 2: (0, pd.h0_tor)},
        )
    if isinstance(F, ConstantFinite):
        raise SheafError("Z/n is handled through 0 -> Z -> Z -> Z/n -> 0 only")
    raise SheafError(f"unsupported sheaf {F!r}")


# ---------------------------------------------------------------- archimedean side


@dataclass(frozen=True)
class ArchPlace:
    kind: str  # "real" | "complex"
    conj: IntMatrix  # complex conjugation on F_v (identity at complex places)

    @property
    def rank(self) -> int:
        return self.conj.rows


@dataclass(frozen=True)
class ArchModel:
    places: tuple[ArchPlace, ...]
    lie: tuple  # per Lie basis element: per place, tuple of complex values f(e_k)
    units: tuple  # per (S-)unit: per place, tuple of reals (normalised logs)
    unit_fin: tuple  # per (S-)unit: tuple of -v(u) log N(v) over finite removed places
    h0: tuple  # per basis element of H^0(X,F): per place, integer vector in F_v
    n_finite: int = 0


@dataclass(frozen=True)
class ArchimedeanInvariants:
    r1F: int
    r2F: int
    ext2_order: int
    n2_order: int


def _place_modules(F) -> list[ArchPlace]:
    K = F.field
    if isinstance(F, (ConstantZ, ShriekZ)):
        return [ArchPlace("real" if i < K.r1 else "complex", IntMatrix.identity(1)) for i in range(K.r1 + K.r2)]
    if isinstance(F, (Skyscraper, ConstantFinite)):
        return []
    if isinstance(F, PushforwardConstant):
        # one real place of Q; conjugation acts on Z[Gal(L/Q)] by the swap iff L is imaginary
        swap = IntMatrix([[0, 1], [1, 0]])
        return [ArchPlace("real", swap if F.extension.discriminant < 0 else IntMatrix.identity(2))]
    raise SheafError(f"no archimedean model for {F!r}")


def _c2_module(P: IntMatrix, twist: int) -> IntegralGModule:
    """Hom(F_v, Z) tensored with the sign character when twist = -1, over C2."""
    C2 = cyclic_group(2)
    n = P.rows
    from .exact_linalg import inverse_unimodular

    g = inverse_unimodular(P).T.scale(twist)
    return IntegralGModule(C2, (IntMatrix.identity(n), g))


def archimedean_invariants(F) -> ArchimedeanInvariants:
    if isinstance(F, Sum):
        parts = [archimedean_invariants(s) for s in F.summands]
        return ArchimedeanInvariants(
            sum(p.r1F for p in parts), sum(p.r2F for p in parts),
            math.prod(p.ext2_order for p in parts), math.prod(p.n2_order for p in parts),
        )
    if isinstance(F, ConstantFinite):
        raise SheafError("archimedean Ext groups of Z/n are not used; Z/n goes through the ratio rule")
    r1, r2, e2 = 0, 0, 1
    for v in _place_modules(F):
        if v.kind == "complex":
            r2 += v.rank
            continue
        # Hom_{C2}(F_v, Z(1)): fixed vectors of the sign-twisted dual
        N = _c2_module(v.conj, -1)
        r2 += kernel_basis(N.action[1] - IntMatrix.identity(v.rank)).cols if v.rank else 0
        ext1 = tate_hminus1(N).order  # H^1 = H^-1 for the cyclic group of order 2
        r1 += int(round(math.log2(ext1)))
        e2 *= tate_h0(N).order
    if e2 != 1:
        raise SheafError("N_2 is not determined for sheaves with archimedean Ext^2")
    return ArchimedeanInvariants(r1, r2, e2, 1)


def _field_arch_model(K: NumberFieldData, S: SPlaceSet | None) -> ArchModel:
    nplaces = K.r1 + K.r2
    places = tuple(ArchPlace("real" if i < K.r1 else "complex", IntMatrix.identity(1)) for i in range(nplaces))
    rows = K.integral_basis_embeddings
    lie = tuple(tuple((rows[v][j],) for v in range(nplaces)) for j in range(K.degree))
    units, fin = [], []
    if S is None:
        for emb in K.fundamental_unit_embeddings:
            units.append(tuple(((1.0 if v < K.r1 else 2.0) * math.log(abs(emb[v])),) for v in range(nplaces)))
            fin.append(())
        h0 = (tuple((1,) for _ in range(nplaces)),)
        return ArchModel(places, lie, tuple(units), tuple(fin), h0, 0)
    for u in S.units:
        units.append(tuple((u.arch_log[v],) for v in range(nplaces)))
        fin.append(tuple(-a * math.log(x.norm) for a, x in zip(u.valuations, S.places)))
    return ArchModel(places, lie, tuple(units), tuple(fin), (), len(S.places))


def archimedean_model(F) -> ArchModel:
    if isinstance(F, ConstantZ):
        return _field_arch_model(F.field, None)
    if isinstance(F, ShriekZ):
        return _field_arch_model(F.field, F.S)
    if isinstance(F, PushforwardConstant):
        L = F.extension
        place = _place_modules(F)[0]
        # embed L via its first embedding; Galois group {1, c} with c = conjugation of sqrt D
        rows = L.integral_basis_embeddings
        s = L.discriminant % 4

        def conj_value(z, j):
            # basis {1, omega}; c(omega) = s - omega
            return z if j == 0 else s - z

        lie = []
        for j in range(2):
            a = rows[0][j]
            lie.append(((a, conj_value(a, j)),))
        units = []
        for emb in L.fundamental_unit_embeddings:
            units.append(((math.log(abs(emb[0])), math.log(abs(emb[1]))),))
        return ArchModel((place,), tuple(lie), tuple(units), tuple(() for _ in units), (((1, 1),),), 0)
    if isinstance(F, Skyscraper):
        return ArchModel((), (), (), (), (), 0)
    raise SheafError(f"no archimedean model for {F!r}")


# ---------------------------------------------------------------- Lie data


@dataclass(frozen=True)
class LieData:
    h_minus1_rank: int
    h0_order: int
    lattice: tuple  # embedded basis (rows of complex numbers)


def lie_data(F) -> LieData:
    if not is_tame(F):
        raise UntameError("the tangent space is only defined for tamely ramified sheaves")
    if isinstance(F, Sum):
        parts = [lie_data(s) for s in F.summands]
        return LieData(sum(p.h_minus1_rank for p in parts), math.prod(p.h0_order for p in parts), ())
    K = F.field
    if isinstance(F, (ConstantZ, ShriekZ)):
        return LieData(K.degree, 1, K.integral_basis_embeddings)
    if isinstance(F, Skyscraper):
        return LieData(0, 1, ())
    if isinstance(F, ConstantFinite):
        return LieData(0, F.n**K.degree, ())
    if isinstance(F, PushforwardConstant):
        return LieData(2 * K.degree, 1, F.extension.integral_basis_embeddings)
    raise SheafError(f"unsupported sheaf {F!r}")


# ---------------------------------------------------------------- Galois side for L-functions


@dataclass(frozen=True)
class GaloisData:
    """Generic fibre over G = Gal(L/K) plus decomposition data at one place."""

    generic: IntegralGModule
    inertia: tuple[int, ...]
    frobenius: int  # a lift of geometric Frobenius in G
    stalk: FrobeniusModule


def galois_data(F, x: PlaceData) -> GaloisData:
    N = x.norm
    one = trivial_group()
    if isinstance(F, ConstantZ) or (isinstance(F, ShriekZ) and x not in F.S.places):
        return GaloisData(trivial_module(one), (0,), 0, FrobeniusModule(IntMatrix.identity(1), N))
    if isinstance(F, ShriekZ):
        return GaloisData(trivial_module(one), (0,), 0, FrobeniusModule(IntMatrix.zeros(0, 0), N))
    if isinstance(F, Skyscraper):
        empty = IntegralGModule(one, (IntMatrix.zeros(0, 0),))
        if x == F.place:
            return GaloisData(empty, (0,), 0, F.module)
        return GaloisData(empty, (0,), 0, FrobeniusModule(IntMatrix.zeros(0, 0), N))
    if isinstance(F, ConstantFinite):
        G = one
        Tn = IntegralGModule(G, (IntMatrix.zeros(0, 0),), (F.n,), (IntMatrix.identity(1),))
        return GaloisData(Tn, (0,), 0, FrobeniusModule(IntMatrix.zeros(0, 0), N, (F.n,), IntMatrix.identity(1)))
    if isinstance(F, PushforwardConstant):
        G = cyclic_group(2)
        Fe = regular_module(G)
        t = splitting_type(F.extension.discriminant, x.p)
        inertia = (0, 1) if t == "ramified" else (0,)
        frob = 1 if t == "inert" else 0
        B = kernel_basis(_stack_minus_identity(Fe, inertia))
        phi = restrict_action_to(B, Fe.action[frob])
        return GaloisData(Fe, inertia, frob, FrobeniusModule(phi, N))
    raise SheafError(f"unsupported sheaf {F!r}")


def _stack_minus_identity(M: IntegralGModule, elems) -> IntMatrix:
    from .exact_linalg import vstack

    I = IntMatrix.identity(M.rank)
    return vstack([M.action[g] - I for g in elems], M.rank)


def components(F) -> tuple:
    return F.summands if isinstance(F, Sum) else (F,)


# ---------------------------------------------------------------- JSON


def _field_of(rec: dict, default: NumberFieldData | None = None) -> NumberFieldData:
    from .number_fields import field_from_record

    if "base_field" in rec:
        bf = rec["base_field"]
        if set(bf) <= {"disc", "h"}:
            return field_from_disc(int(bf["disc"]), bf.get("h"))
        return field_from_record(bf)
    if "disc" in rec:
        return field_from_disc(int(rec["disc"]), rec.get("h"))
    if default is not None:
        return default
    raise SheafError("sheaf record has no base_field")


def _module_of(rec: dict, N: int) -> FrobeniusModule:
    phi = rec.get("frobenius", [])
    n = len(phi)
    phiM = IntMatrix(phi, n, n) if n else IntMatrix.zeros(0, 0)
    tors = rec.get("torsion")
    if tors:
        orders = tuple(int(d) for d in tors["orders"])
        T = IntMatrix(tors.get("frobenius", IntMatrix.identity(len(orders)).tolist()))
        return FrobeniusModule(phiM, N, orders, T, int(rec.get("order_bound", 24)))
    return FrobeniusModule(phiM, N, order_bound=int(rec.get("order_bound", 24)))


def sheaf_from_record(rec: dict, default_field: NumberFieldData | None = None):
    """Parse a sheaf record. Raise SheafError/FieldError on malformed input."""
    from .galois_modules import GroupError

    try:
        if rec.get("maximal_order") is False:
            raise SheafError("only the maximal order (regular X) is supported")
        K = _field_of(rec, default_field)
        t = rec.get("type")
        if t == "constant_z":
            return ConstantZ(K)
        if t == "shriek_z":
            S = [place_from_spec(K, p) for p in rec["S"]]
            return ShriekZ(K, s_data(K, S))
        if t == "skyscraper":
            x = place_from_spec(K, rec["place"])
            return Skyscraper(K, x, _module_of(rec.get("module", {"frobenius": [[1]]}), x.norm))
        if t == "pushforward_constant":
            ext = rec["extension"]
            L = field_from_disc(int(ext["disc"]), ext.get("h"))
            return PushforwardConstant(K, L)
        if t == "constant_finite":
            return ConstantFinite(K, int(rec["n"]))
        if t == "sum":
            return Sum(K, tuple(sheaf_from_record(s, K) for s in rec["summands"]))
        raise SheafError(f"unknown sheaf type {t!r}")
    except (KeyError, TypeError) as exc:
        raise SheafError(f"malformed sheaf record: {exc}") from exc
    except GroupError as exc:
        raise SheafError(str(exc)) from exc


def describe(F) -> str:
    K = F.field.label
    if isinstance(F, ConstantZ):
        return f"Z over {K}"
    if isinstance(F, ShriekZ):
        return f"j_!Z over {K}, S = {{{', '.join(x.label for x in F.S.places)}}}"
    if isinstance(F, Skyscraper):
        return f"i_*M at {F.place.label} over {K} (rank {F.module.rank}, torsion {F.module.torsion_orders})"
    if isinstance(F, PushforwardConstant):
        return f"pi_*Z for {F.extension.label}/{K}"
    if isinstance(F, ConstantFinite):
        return f"Z/{F.n} over {K}"
    return " + ".join(describe(s) for s in F.summands)
