"""Generators for the function families used in the lower bounds and
applications, plus the randomized Boolean rounding.

All randomized generators take an explicit 64-bit seed and draw from
numpy's PCG64 stream, so identical parameters reproduce identical tables.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from . import f2core
from .errors import CapExceeded, EvenN, PreconditionViolated
from .spectrum import (
    FunctionTable,
    SparseSpectrum,
    inverse_wht,
)

PKC_TABLE_CAP = 16  # pkc_compose table form is limited to 4^k <= 2^PKC_TABLE_CAP


def majority(n: int) -> FunctionTable:
    """MAJ_n as a +-1 table: +1 iff the input has more zeros than ones."""
    if n % 2 == 0:
        raise EvenN("majority needs odd n")
    w = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    vals = np.where(2 * w < n, 1, -1).astype(np.int64)
    return FunctionTable.from_ints(n, vals.tolist(), 1, "pm1")


def majority_e1_magnitude(n: int) -> Fraction:
    """|MAJ_n^(e_1)| = 2 * binom(n-1, (n-1)/2) / 2^n, exactly."""
    if n % 2 == 0:
        raise EvenN("majority needs odd n")
    return Fraction(2 * math.comb(n - 1, (n - 1) // 2), 1 << n)


def majority_coeff_magnitude(n: int, t: int) -> Fraction:
    """Exact |MAJ_n^(gamma)| for any gamma of weight t: zero at even levels,
    and binom((n-1)/2,(t-1)/2)/binom(n-1,t-1) times |MAJ_n^(e_1)| at odd ones."""
    if n % 2 == 0:
        raise EvenN("majority needs odd n")
    if not 1 <= t <= n:
        raise PreconditionViolated(f"level t={t} out of range 1..{n}")
    if t % 2 == 0:
        return Fraction(0)
    ratio = Fraction(math.comb((n - 1) // 2, (t - 1) // 2), math.comb(n - 1, t - 1))
    return ratio * majority_e1_magnitude(n)


def _double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def majority_coeff_ratio_double_factorial(n: int, t: int) -> Fraction:
    """The same level-t ratio written (t-2)!! (n-t-1)!! / (n-2)!!."""
    if t % 2 == 0:
        return Fraction(0)
    return Fraction(_double_factorial(t - 2) * _double_factorial(n - t - 1),
                    _double_factorial(n - 2))


def mean_of_signs(n: int) -> FunctionTable:
    """f(x) = (1/n) sum_i (-1)^{x_i}: degree one, every level-1 coefficient 1/n.

    Dyadic when n is a power of two, exact-rational otherwise.
    """
    if n < 1:
        raise PreconditionViolated("n must be positive")
    w = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    nums = n - 2 * w
    return FunctionTable.from_ints(n, nums.tolist(), n, "bounded")


def random_homogeneous(n: int, d: int, seed: int) -> FunctionTable:
    """Homogeneous degree-d polynomial with seeded random signs: spectrum
    +-binom(n,d)^-1 on every weight-d vector, hence |f| <= 1."""
    if not 1 <= d <= n:
        raise PreconditionViolated("need 1 <= d <= n")
    rng = np.random.default_rng(np.random.PCG64(seed))
    denom = math.comb(n, d)
    coeffs = {}
    for comb in itertools.combinations(range(n), d):
        sign = 1 if rng.integers(0, 2) else -1
        coeffs[f2core.coords_to_mask(comb)] = Fraction(sign, denom)
    spec = SparseSpectrum.of(n, coeffs)
    return inverse_wht(spec.to_spectrum(), "bounded")


# ---------------------------------------------------------------------------
# the 4-bit parity-kill base function and its self-composition
# ---------------------------------------------------------------------------

def _pkc_bit(a: int, b: int, c: int, e: int) -> int:
    """(a+c)(a+b+1) + (a+e)(a+b) over F2."""
    return ((a ^ c) & (a ^ b ^ 1)) ^ ((a ^ e) & (a ^ b))


def pkc_base() -> FunctionTable:
    """The 4-bit F2-valued function f = (1-g)/2 whose +-1 form g has
    coefficient magnitude 1/2 on the four mixed pairs x1+x3, x2+x3, x1+x4,
    x2+x4 with signs (+, +, +, -)."""
    vals = []
    for x in range(16):
        a, b, c, e = (x >> 0) & 1, (x >> 1) & 1, (x >> 2) & 1, (x >> 3) & 1
        vals.append(_pkc_bit(a, b, c, e))
    return FunctionTable.from_ints(4, vals, 1, "int:1")


def pkc_base_pm1() -> FunctionTable:
    """The +-1 form g = 1 - 2f of the base function."""
    f = pkc_base()
    return FunctionTable.from_ints(4, (1 - 2 * f.nums).tolist(), 1, "pm1")


def pkc_evaluate(k: int, x: int) -> int:
    """Pointwise f^{o k}(x) on 4^k input bits, for k up to 6."""
    if not 1 <= k <= 6:
        raise CapExceeded("pkc evaluator supports 1 <= k <= 6")
    if k == 1:
        return _pkc_bit((x >> 0) & 1, (x >> 1) & 1, (x >> 2) & 1, (x >> 3) & 1)
    block = 4 ** (k - 1)
    mask = (1 << block) - 1
    sub = [pkc_evaluate(k - 1, (x >> (i * block)) & mask) for i in range(4)]
    return _pkc_bit(*sub)


def pkc_compose(k: int) -> FunctionTable:
    """Dense table of f^{o k} on 4^k bits (table form capped at k <= 2)."""
    n = 4 ** k
    if n > PKC_TABLE_CAP:
        raise CapExceeded(f"pkc_compose table form needs 4^k <= {PKC_TABLE_CAP}")
    if k == 1:
        return pkc_base()
    base = pkc_base().int_values()
    prev = pkc_compose(k - 1).int_values()
    block = 4 ** (k - 1)
    xs = np.arange(1 << n, dtype=np.int64)
    sub = np.zeros(1 << n, dtype=np.int64)
    for i in range(4):
        sub |= prev[(xs >> (i * block)) & ((1 << block) - 1)] << i
    return FunctionTable.from_ints(n, base[sub].tolist(), 1, "int:1")


# ---------------------------------------------------------------------------
# randomized constructions
# ---------------------------------------------------------------------------

def booleanize_sample(table: FunctionTable, seed: int) -> FunctionTable:
    """Round a bounded f to +-1 independently per point: +1 with probability
    (1 + f(x))/2, drawn exactly from 64-bit uniform integers."""
    if not table.is_exact():
        raise PreconditionViolated("booleanize needs an exact bounded table")
    table.validate_range()
    rng = np.random.default_rng(np.random.PCG64(seed))
    draws = rng.integers(0, 1 << 63, size=table.size, dtype=np.int64).astype(np.uint64)
    # threshold for P[+1] = (1 + f)/2 = (den + num) / (2 den), exact in 64 bits
    den2 = 2 * table.den
    thr = np.array([(int(v) + table.den) * (1 << 63) // den2 for v in table.nums.flat],
                   dtype=np.uint64)
    out = np.where(draws < thr, 1, -1)
    return FunctionTable.from_ints(table.n, out.tolist(), 1, "pm1")


def random_granular(n: int, d: int, g: Fraction, seed: int) -> FunctionTable:
    """Seeded G-granular table of degree at most d with |f| <= 1.

    For G < 2 the values are exact multiples of G (an integer multilinear
    polynomial scaled by G, terms dropped until bounded).  G = 2 produces the
    shifted-Boolean case: a +-1 junta on at most d coordinates, whose values
    are congruent modulo 2.
    """
    g = Fraction(g)
    if d > n:
        raise PreconditionViolated("need d <= n")
    den = g.denominator
    if den & (den - 1):
        raise PreconditionViolated("G must be dyadic")
    rng = np.random.default_rng(np.random.PCG64(seed))
    if g == 2:
        coords = sorted(int(c) for c in rng.choice(n, size=min(d, n), replace=False))
        bits = rng.integers(0, 2, size=1 << len(coords))
        vals = []
        for x in range(1 << n):
            key = f2core.compact_bits(x, coords)
            vals.append(1 if bits[key] else -1)
        return FunctionTable.from_ints(n, vals, 1, "pm1")
    terms = []
    for _ in range(max(2, n // 2)):
        size = int(rng.integers(0, d + 1))
        coords = sorted(int(c) for c in rng.choice(n, size=size, replace=False))
        coef = int(rng.integers(-2, 3))
        if coef:
            terms.append((f2core.coords_to_mask(coords), coef))
    xs = np.arange(1 << n, dtype=np.int64)
    while True:
        q = np.zeros(1 << n, dtype=np.int64)
        for mask, coef in terms:
            q += coef * ((xs & mask) == mask)
        top = int(np.abs(q).max(initial=0))
        if Fraction(top) * g <= 1:
            break
        terms.pop()
    nums = (q * g.numerator).tolist()
    return FunctionTable.from_ints(n, nums, g.denominator, "bounded")
