"""Regenerate src/wesv/data/real_quadratic.json.

Counts cycles of reduced indefinite binary quadratic forms (narrow class
number), then halves when the fundamental unit has norm +1. This is a one-off
data builder, kept out of the package on purpose; the package reads the JSON.
"""
import json
import math
import sys
from pathlib import Path


def is_fundamental(D):
    if D % 4 == 1:
        return all(D % (p * p) for p in range(2, math.isqrt(D) + 1))
    if D % 4 == 0:
        d = D // 4
        return d % 4 in (2, 3) and all(d % (p * p) for p in range(2, math.isqrt(d) + 1))
    return False


def reduced_forms(D):
    r = math.isqrt(D)
    out = []
    for b in range(1, r + 1):
        if (b * b - D) % 4:
            continue
        ac = (b * b - D) // 4  # negative
        for a in range(1, -ac + 1):
            if ac % a:
                continue
            for sa in (a, -a):
                c = ac // sa
                if r - b < 2 * a <= r + b and math.sqrt(D) - b < 2 * a < math.sqrt(D) + b:
                    out.append((sa, b, c))
    return sorted(set(out))


def rho(f, D):
    a, b, c = f
    s = math.sqrt(D)
    m = 2 * abs(c)
    # b' = -b mod 2|c| in (sqrt(D) - 2|c|, sqrt(D))
    bp = (-b) % m
    while bp < s - m:
        bp += m
    while bp > s:
        bp -= m
    return (c, bp, (bp * bp - D) // (4 * c))


def narrow_class_number(D):
    forms = set(reduced_forms(D))
    cycles = 0
    while forms:
        f = forms.pop()
        cycles += 1
        g = rho(f, D)
        while g != f:
            forms.discard(g)
            g = rho(g, D)
    return cycles


def unit_norm(D):
    y = 1
    while True:
        for sign in (-4, 4):
            x2 = D * y * y + sign
            x = math.isqrt(x2)
            if x * x == x2:
                return -1 if sign == -4 else 1
        y += 1


def main(limit=200):
    rows = []
    for D in range(5, limit + 1):
        if not is_fundamental(D):
            continue
        hp = narrow_class_number(D)
        n = unit_norm(D)
        h = hp if n == -1 else hp // 2
        rows.append({"disc": D, "h": h, "h_plus": hp})
    out = {
        "description": "class numbers of real quadratic fields, fundamental discriminant <= %d" % limit,
        "method": "cycles of reduced indefinite forms (scripts/build_real_quadratic_table.py)",
        "fields": rows,
    }
    path = Path(__file__).resolve().parents[1] / "src" / "wesv" / "data" / "real_quadratic.json"
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {len(rows)} fields to {path}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 200)
