"""The Weil-etale Euler characteristic chi_X(F^D) for catalog sheaves."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact_values import ExactValue
from .lattice_det import discriminant, regulator_RFD
from .number_fields import NumberFieldData
from .sheaf_catalog import (
    ConstantFinite,
    ConstantZ,
    PushforwardConstant,
    ShriekZ,
    Skyscraper,
    SheafError,
    Sum,
    UntameError,
    archimedean_invariants,
    is_tame,
    lie_data,
    point_data,
)


@dataclass(frozen=True)
class EulerCharInputs:
    h0_tor: int
    h1_tor: int
    hom_tor: int
    ext1_tor: int
    r1F: int
    r2F: int
    n2: int
    lie_h0: int
    disc: float
    reg: float

    def __post_init__(self):
        if min(self.h0_tor, self.h1_tor, self.hom_tor, self.ext1_tor, self.n2, self.lie_h0) < 1:
            raise ValueError("torsion orders must be >= 1")
        if self.disc <= 0 or self.reg <= 0:
            raise ValueError("Disc and R must be positive")


def chi(inp: EulerCharInputs) -> float:
    num = (2 * math.pi) ** inp.r2F * 2**inp.r1F * inp.h0_tor * inp.ext1_tor * inp.reg
    den = inp.h1_tor * inp.hom_tor * inp.lie_h0 * inp.n2 * inp.disc
    return num / den


def _field_inputs(K: NumberFieldData, F, ext1: int) -> EulerCharInputs:
    a = archimedean_invariants(F)
    return EulerCharInputs(1, 1, K.omega, ext1, a.r1F, a.r2F, a.n2_order, lie_data(F).h0_order, discriminant(F), regulator_RFD(F))


def euler_char_inputs(F) -> EulerCharInputs:
    """Inputs computed on X itself (no base change)."""
    if isinstance(F, ConstantZ):
        return _field_inputs(F.field, F, F.field.class_number)
    if isinstance(F, ShriekZ):
        return _field_inputs(F.field, F, F.S.class_number)
    if isinstance(F, Skyscraper):
        pd = point_data(F.module)
        return EulerCharInputs(pd.h0_tor, pd.h1_order, 1, 1, 0, 0, 1, 1, 1.0, regulator_RFD(F))
    if isinstance(F, PushforwardConstant):
        if not F.tame:
            raise UntameError(f"{F.extension.label}/Q is wildly ramified at 2")
        L = F.extension
        return _field_inputs(L, F, L.class_number)
    raise SheafError("no single set of inputs for this sheaf; use chi_of")


def chi_of(F) -> float:
    if isinstance(F, Sum):
        return math.prod(chi_of(s) for s in F.summands)
    if isinstance(F, ConstantFinite):
        # 0 -> Z -n-> Z -> Z/n -> 0
        z = chi_of(ConstantZ(F.field))
        return z / z
    if isinstance(F, PushforwardConstant):
        # chi_X((pi_* Z)^D) = chi_Y(Z^D)
        return chi_of(ConstantZ(F.extension))
    if not is_tame(F):
        raise UntameError("chi is only defined for tamely ramified sheaves")
    return chi(euler_char_inputs(F))


def chi_on_base(F: PushforwardConstant) -> float:
    """chi of pi_*Z computed directly on X; compare with chi_of (computed on Y)."""
    return chi(euler_char_inputs(F))


def chi_exact(F) -> ExactValue | None:
    """Closed form when chi is a rational times log monomial (Q-cases and points)."""
    if isinstance(F, Sum):
        parts = [chi_exact(s) for s in F.summands]
        if any(p is None for p in parts):
            return None
        out = ExactValue.one()
        for p in parts:
            out = out * p
        return out
    if isinstance(F, ConstantFinite):
        return ExactValue.one()
    if isinstance(F, Skyscraper):
        pd = point_data(F.module)
        x = F.place
        n = pd.h0_rank
        r = Fraction(pd.h0_tor, pd.h1_order * pd.pairing_regulator * x.f**n)
        return ExactValue.make(r, {x.p: -n})
    if F.field.is_rational:
        if isinstance(F, ConstantZ):
            return ExactValue.one()
        if isinstance(F, ShriekZ):
            # R_U = prod_{p in S} log p and 2^{r1} / omega = 1 over Q
            out = ExactValue.one()
            for x in F.S.places:
                out = out * ExactValue.log(x.p)
            return out
    return None


def chi_via_decomposition(F: ConstantZ, S) -> float:
    """chi(F) = chi(j_! F|U) * prod_{x in S} chi(i_* i^* F), for U = X - S."""
    from .number_fields import s_data
    from .sheaf_catalog import trivial_skyscraper

    K = F.field
    val = chi_of(ShriekZ(K, s_data(K, S)))
    for x in S:
        val *= chi_of(trivial_skyscraper(K, x))
    return val


def multiplicativity_check(sub, middle, quot) -> float:
    """Relative error of chi(middle) = chi(sub) chi(quot) for the built-in exact patterns."""
    from .sheaf_catalog import components

    if isinstance(sub, ShriekZ) and isinstance(middle, ConstantZ):
        pts = components(quot)
        K = middle.field
        if sub.field != K or not all(isinstance(q, Skyscraper) and q.module.rank == 1 and q.module.frobenius[0, 0] == 1 and not q.module.torsion_orders for q in pts):
            raise SheafError("quotient must be a sum of trivial skyscrapers over the same field")
        if sorted((q.place.p, q.place.b, q.place.f) for q in pts) != sorted((x.p, x.b, x.f) for x in sub.S.places):
            raise SheafError("skyscrapers must sit exactly at the removed places")
    elif isinstance(sub, ConstantZ) and isinstance(middle, ConstantZ) and isinstance(quot, ConstantFinite):
        if not (sub.field == middle.field == quot.field):
            raise SheafError("pattern Z -> Z -> Z/n needs one base field")
    else:
        raise SheafError("not one of the built-in exact patterns")
    m = chi_of(middle)
    return abs(m - chi_of(sub) * chi_of(quot)) / m
