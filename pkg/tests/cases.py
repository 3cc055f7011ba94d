"""Descriptors shared by several test modules."""
from wesv.number_fields import field_from_disc, place_from_spec, places_above, rational_field, s_data
from wesv.sheaf_catalog import ConstantFinite, ConstantZ, PushforwardConstant, ShriekZ, Skyscraper, Sum, trivial_skyscraper
from wesv.exact_linalg import IntMatrix
from wesv.galois_modules import FrobeniusModule

CLASSNUMBER_DISCS = (-3, -4, -7, -8, -11, -15, -20, -23, 5, 8, 12, 13)


def Q():
    return rational_field()


def rational_place(p):
    return place_from_spec(Q(), {"p": p})


def shriek_over_Q(primes):
    K = Q()
    return ShriekZ(K, s_data(K, [rational_place(p) for p in primes]))


def shriek_over(D, places):
    K = field_from_disc(D)
    return ShriekZ(K, s_data(K, places))


def catalog():
    """(label, descriptor) pairs covering every variant."""
    out = [("Z/Q", ConstantZ(Q()))]
    out += [(f"Z/{D}", ConstantZ(field_from_disc(D))) for D in CLASSNUMBER_DISCS]
    out += [("j!Z/Q{2}", shriek_over_Q([2])), ("j!Z/Q{3,5,7}", shriek_over_Q([3, 5, 7]))]
    K = field_from_disc(-20)
    out.append(("j!Z/-20{p3}", shriek_over(-20, places_above(K, 3)[:1])))
    K5 = field_from_disc(5)
    out.append(("j!Z/5{p11}", shriek_over(5, places_above(K5, 11)[:1])))
    out.append(("sky/Q,2", trivial_skyscraper(Q(), rational_place(2))))
    rot = IntMatrix([[0, -1], [1, -1]])
    out.append(("sky/Q,7,rot", Skyscraper(Q(), rational_place(7), FrobeniusModule(rot, 7))))
    out.append(("sky/Q,5,Z4", Skyscraper(Q(), rational_place(5), FrobeniusModule(IntMatrix([[-1]]), 5, (4,), IntMatrix([[3]])))))
    out += [(f"push/{D}", PushforwardConstant(Q(), field_from_disc(D))) for D in (-3, -4, 5, -20)]
    out += [(f"Z/{n}", ConstantFinite(Q(), n)) for n in (2, 6)]
    out.append(("sum", Sum(Q(), (ConstantZ(Q()), trivial_skyscraper(Q(), rational_place(3))))))
    return out
