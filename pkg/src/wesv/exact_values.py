"""Exact monomials rational * prod (log p)^e_p * pi^e."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class ExactValue:
    rational: Fraction
    log_exponents: tuple[tuple[int, int], ...] = ()  # sorted (p, e), e != 0
    pi_exponent: int = 0

    @classmethod
    def make(cls, rational, logs: dict | None = None, pi_exponent: int = 0) -> "ExactValue":
        logs = {p: e for p, e in (logs or {}).items() if e}
        return cls(Fraction(rational), tuple(sorted(logs.items())), pi_exponent)

    @classmethod
    def one(cls) -> "ExactValue":
        return cls(Fraction(1))

    @classmethod
    def log(cls, p: int, e: int = 1) -> "ExactValue":
        return cls.make(1, {p: e})

    def __mul__(self, other: "ExactValue") -> "ExactValue":
        logs = dict(self.log_exponents)
        for p, e in other.log_exponents:
            logs[p] = logs.get(p, 0) + e
        return ExactValue.make(self.rational * other.rational, logs, self.pi_exponent + other.pi_exponent)

    def inverse(self) -> "ExactValue":
        if self.rational == 0:
            raise ZeroDivisionError("zero has no inverse")
        return ExactValue.make(1 / self.rational, {p: -e for p, e in self.log_exponents}, -self.pi_exponent)

    def __truediv__(self, other: "ExactValue") -> "ExactValue":
        return self * other.inverse()

    def __pow__(self, k: int) -> "ExactValue":
        return ExactValue.make(
            self.rational**k, {p: e * k for p, e in self.log_exponents}, self.pi_exponent * k
        )

    def __abs__(self) -> "ExactValue":
        return ExactValue(abs(self.rational), self.log_exponents, self.pi_exponent)

    def __float__(self) -> float:
        v = float(self.rational)
        for p, e in self.log_exponents:
            v *= math.log(p) ** e
        return v * math.pi**self.pi_exponent

    def __str__(self) -> str:
        num, den = [], []
        r = self.rational
        if r.numerator != 1 or (not self.log_exponents and not self.pi_exponent):
            num.append(str(r.numerator))
        if r.denominator != 1:
            den.append(str(r.denominator))
        for p, e in self.log_exponents:
            term = f"log({p})" + (f"^{abs(e)}" if abs(e) != 1 else "")
            (num if e > 0 else den).append(term)
        if self.pi_exponent:
            term = "pi" + (f"^{abs(self.pi_exponent)}" if abs(self.pi_exponent) != 1 else "")
            (num if self.pi_exponent > 0 else den).append(term)
        top = "*".join(num) if num else "1"
        if not den:
            return top
        bottom = "*".join(den)
        return f"{top}/{bottom}" if len(den) == 1 else f"{top}/({bottom})"

    def to_json(self) -> dict:
        return {
            "rational": str(self.rational),
            "log": {str(p): e for p, e in self.log_exponents},
            "pi": self.pi_exponent,
            "text": str(self),
        }
