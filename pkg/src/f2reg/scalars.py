"""Exact scalars: dyadic rationals num/2^exp with a numerator capacity guard.

Dyadics are the default scalar for every regularity decision; thresholds
given as general rationals (``p/q``) are compared against dyadics exactly
through ``fractions.Fraction``.  The capacity guard rejects numerators that
leave the configured window instead of silently degrading to floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DyadicOverflow

#: numerators must satisfy |num| < 2**NUM_CAPACITY_BITS
NUM_CAPACITY_BITS = 128


def check_capacity(value: int) -> int:
    if abs(value) >> NUM_CAPACITY_BITS:
        raise DyadicOverflow(
            f"numerator needs {abs(value).bit_length()} bits, capacity is {NUM_CAPACITY_BITS}"
        )
    return value


@dataclass(frozen=True)
class Dyadic:
    """num / 2^exp in canonical form (num odd or zero, exp minimal)."""

    num: int
    exp: int = 0

    def __post_init__(self):
        num, exp = self.num, self.exp
        if exp < 0:
            num <<= -exp
            exp = 0
        while num and num % 2 == 0 and exp > 0:
            num //= 2
            exp -= 1
        if num == 0:
            exp = 0
        check_capacity(num)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    @staticmethod
    def from_fraction(q: Fraction | int) -> "Dyadic":
        q = Fraction(q)
        d = q.denominator
        if d & (d - 1):
            raise ValueError(f"{q} is not dyadic (denominator {d})")
        return Dyadic(q.numerator, d.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        e = max(self.exp, other.exp)
        return Dyadic((self.num << (e - self.exp)) + (other.num << (e - other.exp)), e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        return self + (-other)

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.num, self.exp)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.num), self.exp)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic(self.num * other.num, self.exp + other.exp)

    def __lt__(self, other):
        return self.to_fraction() < _as_fraction(other)

    def __le__(self, other):
        return self.to_fraction() <= _as_fraction(other)

    def __gt__(self, other):
        return self.to_fraction() > _as_fraction(other)

    def __ge__(self, other):
        return self.to_fraction() >= _as_fraction(other)

    def __str__(self) -> str:
        return f"{self.num}/2^{self.exp}" if self.exp else str(self.num)

    @staticmethod
    def parse(text: str) -> "Dyadic":
        text = text.strip()
        if "/2^" in text:
            num_s, exp_s = text.split("/2^")
            return Dyadic(int(num_s), int(exp_s))
        return Dyadic(int(text))


def _as_fraction(x) -> Fraction:
    if isinstance(x, Dyadic):
        return x.to_fraction()
    return Fraction(x)


def parse_rational(text: str) -> Fraction:
    """Parse an exact rational written P/Q or P."""
    text = text.strip()
    if "/" in text:
        p, q = text.split("/")
        return Fraction(int(p), int(q))
    return Fraction(int(text))


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"
