"""Command line entry point: `wesv` (or `python -m wesv`)."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .euler_char import chi_exact, chi_of
from .l_functions import global_factorization, leading_value, local_factor_dual, vanishing_order_formula
from .lattice_det import bicomplex_trials
from .number_fields import FieldError, field_from_disc, field_from_record, field_to_record, places_above
from .rng import split_rngs
from .sheaf_catalog import SheafError, describe, sheaf_from_record
from .galois_modules import GroupError
from .tate_duality import duality_pairing, random_instance, random_shapiro_instance, shapiro_check


class InputError(Exception):
    pass


@dataclass
class ScenarioReport:
    scenario: str
    inputs: dict
    lhs: dict
    rhs: dict
    abs_err: float
    rel_err: float
    passed: bool
    runtime_ms: float
    provenance: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "inputs": self.inputs,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
            "provenance": self.provenance,
        }


def _poly(p) -> list[str]:
    return [str(c) for c in p]


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_sheaf(path: str):
    return sheaf_from_record(_load_json(path))


def _special_value_report(name: str, F, tol: float, inputs: dict) -> ScenarioReport:
    t0 = time.perf_counter()
    lv = leading_value(F)
    c = chi_of(F)
    order = vanishing_order_formula(F)
    ex = chi_exact(F)
    abs_err = abs(abs(lv.coefficient) - c)
    rel_err = abs_err / c
    ok = rel_err <= tol and lv.order == order
    if lv.exact_form is not None and ex is not None:
        ok = ok and abs(lv.exact_form) == ex
    lhs = {"order": lv.order, "coefficient": lv.coefficient}
    if lv.exact_form is not None:
        lhs["exact"] = str(lv.exact_form)
    rhs = {"chi": c, "order": order}
    if ex is not None:
        rhs["exact"] = str(ex)
    prov = [F.field.provenance]
    return ScenarioReport(name, inputs, lhs, rhs, abs_err, rel_err, ok, _ms(t0), prov)


def _ms(t0: float) -> float:
    return round((time.perf_counter() - t0) * 1000, 3)


# ---------------------------------------------------------------- subcommands


def cmd_field_info(args) -> tuple[object, bool]:
    if args.from_json:
        K = field_from_record(_load_json(args.from_json))
    elif args.disc is not None:
        K = field_from_disc(args.disc)
    else:
        raise InputError("give --disc or --from-json")
    return field_to_record(K), True


def cmd_lfn_factor(args):
    F = _load_sheaf(args.sheaf)
    out = []
    for x in places_above(F.field, args.prime):
        R = local_factor_dual(F, x)
        out.append({"place": x.label, "norm": x.norm, "numerator": _poly(R.numerator), "denominator": _poly(R.denominator)})
    return {"sheaf": describe(F), "prime": args.prime, "variable": "t = N(x)^-s", "factors": out}, True


def cmd_lfn_special_value(args):
    F = _load_sheaf(args.sheaf)
    lv = leading_value(F)
    g = global_factorization(F)
    return {
        "sheaf": describe(F),
        "order": lv.order,
        "coefficient": lv.coefficient,
        "exact": str(lv.exact_form) if lv.exact_form is not None else None,
        "constituents": [{"kind": c.kind, "disc": c.disc, "exponent": c.exponent} for c in g.constituents],
    }, True


def cmd_chi(args):
    F = _load_sheaf(args.sheaf)
    ex = chi_exact(F)
    return {"sheaf": describe(F), "chi": chi_of(F), "exact": str(ex) if ex is not None else None,
            "predicted_order": vanishing_order_formula(F)}, True


def _parse_disc_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise InputError(f"bad discriminant list: {text!r}") from exc


def cmd_verify_classnumber(args):
    from .sheaf_catalog import ConstantZ

    reports = []
    for D in _parse_disc_list(args.disc_list):
        K = field_from_disc(D)
        reports.append(_special_value_report(f"classnumber[{D}]", ConstantZ(K), args.tol, {"disc": D}))
    return reports, all(r.passed for r in reports)


def cmd_verify_tate(args):
    reports = []
    for k, rng in enumerate(split_rngs(args.seed, args.trials)):
        t0 = time.perf_counter()
        name, M = random_instance(rng)
        res = duality_pairing(M)
        _, emb, N, Ind = random_shapiro_instance(rng)
        sh = shapiro_check(N, Ind)
        reports.append(ScenarioReport(
            f"tate[{k}]",
            {"group": name, "rank": M.rank, "torsion": list(M.torsion_orders)},
            {"free_orders": list(res.free.left_orders), "torsion_orders": list(res.torsion.left_orders)},
            {"free_orders": list(res.free.right_orders), "torsion_orders": list(res.torsion.right_orders),
             "shapiro": sh},
            0.0, 0.0, res.perfect and sh, _ms(t0),
        ))
    return reports, all(r.passed for r in reports)


def cmd_verify_special_values(args):
    cat = _load_json(args.catalog)
    if not isinstance(cat, list):
        raise InputError("catalog must be a JSON list of {name, sheaf}")
    reports = []
    for entry in cat:
        try:
            F = sheaf_from_record(entry["sheaf"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad catalog entry: {exc}") from exc
        reports.append(_special_value_report(entry.get("name", describe(F)), F, args.tol, entry["sheaf"]))
    return reports, all(r.passed for r in reports)


def cmd_verify_bicomplex(args):
    reports = []
    for k, (lhs, rhs, err) in enumerate(bicomplex_trials(args.trials, args.seed)):
        reports.append(ScenarioReport(f"bicomplex[{k}]", {"seed": args.seed, "trial": k}, {"value": lhs}, {"value": rhs},
                                      abs(lhs - rhs), err, err <= args.tol, 0.0))
    return reports, all(r.passed for r in reports)


# ---------------------------------------------------------------- output


def _csv(payload) -> str:
    rows = payload if isinstance(payload, list) else [payload]
    flat = [_flatten(r) for r in rows]
    keys: list[str] = []
    for r in flat:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in flat:
        w.writerow(r)
    return buf.getvalue()


def _flatten(d, prefix="") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def _render(payload, fmt: str) -> str:
    if isinstance(payload, list) and payload and isinstance(payload[0], ScenarioReport):
        payload = [r.to_json() for r in payload]
        if fmt == "json":
            payload = {
                "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "passed": sum(r["pass"] for r in payload),
                "total": len(payload),
                "reports": payload,
            }
        return _csv(payload) if fmt == "csv" else json.dumps(payload, indent=2, sort_keys=True) + "\n"
    return _csv(payload) if fmt == "csv" else json.dumps(payload, indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="wesv", description="Special values of L-functions of duals of Z-constructible sheaves")
    sub = p.add_subparsers(dest="command", required=True)

    fld = sub.add_parser("field").add_subparsers(dest="action", required=True)
    fi = fld.add_parser("info", parents=[common])
    fi.add_argument("--disc", type=int)
    fi.add_argument("--from-json")
    fi.set_defaults(func=cmd_field_info)

    lfn = sub.add_parser("lfn").add_subparsers(dest="action", required=True)
    lf = lfn.add_parser("factor", parents=[common])
    lf.add_argument("--sheaf", required=True)
    lf.add_argument("--prime", type=int, required=True)
    lf.set_defaults(func=cmd_lfn_factor)
    ls = lfn.add_parser("special-value", parents=[common])
    ls.add_argument("--sheaf", required=True)
    ls.set_defaults(func=cmd_lfn_special_value)

    ch = sub.add_parser("chi", parents=[common])
    ch.add_argument("--sheaf", required=True)
    ch.set_defaults(func=cmd_chi)

    ver = sub.add_parser("verify").add_subparsers(dest="action", required=True)
    vc = ver.add_parser("classnumber", parents=[common])
    vc.add_argument("--disc-list", required=True)
    vc.add_argument("--tol", type=float, default=1e-9)
    vc.set_defaults(func=cmd_verify_classnumber)
    vt = ver.add_parser("tate", parents=[common])
    vt.add_argument("--trials", type=int, default=200)
    vt.add_argument("--seed", type=int, default=0)
    vt.set_defaults(func=cmd_verify_tate)
    vs = ver.add_parser("special-values", parents=[common])
    vs.add_argument("--catalog", default=str(Path(__file__).parent / "data" / "catalog.json"))
    vs.add_argument("--tol", type=float, default=1e-9)
    vs.set_defaults(func=cmd_verify_special_values)
    vb = ver.add_parser("bicomplex", parents=[common])
    vb.add_argument("--trials", type=int, default=50)
    vb.add_argument("--seed", type=int, default=0)
    vb.add_argument("--tol", type=float, default=1e-9)
    vb.set_defaults(func=cmd_verify_bicomplex)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if getattr(args, "trials", 1) < 1:
            raise InputError("--trials must be positive")
        payload, ok = args.func(args)
    except (InputError, FieldError, SheafError, GroupError) as exc:
        print(f"wesv: {exc}", file=sys.stderr)
        return 2
    text = _render(payload, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if not ok:
        print("wesv: one or more checks failed", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
