"""Function tables and Walsh-Hadamard spectra on F2^n.

A table stores f(x) for every x in [0, 2^n) with x indexed by the bitmask
convention of :mod:`f2reg.f2core`.  Exact tables keep integer numerators
over one common denominator, so the normalized transform

    coeffs[g] = E_x[f(x) * (-1)^<g, x>]

is computed with integer butterflies and stays exact; ``scalar`` is
``dyadic`` when the denominator is a power of two, ``rational`` otherwise.
Float tables exist for statistical experiments only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import _kernels, f2core
from .errors import (
    CapExceeded,
    DegreeTooHigh,
    DimensionMismatch,
    PreconditionViolated,
)
from .scalars import check_capacity

RANGE_BOUNDED = "bounded"
RANGE_PM1 = "pm1"
POINT_CAP_N = 24  # largest n a sparse spectrum will densify

_INT64_SAFE = 1 << 62


def _gcd_reduce(nums: np.ndarray) -> int:
    if nums.dtype == object:
        g = 0
        for v in nums.flat:
            g = math.gcd(g, abs(int(v)))
            if g == 1:
                break
        return g
    return int(np.gcd.reduce(np.abs(nums)))


def _exact_array(values: Iterable[int]) -> np.ndarray:
    vals = list(int(v) for v in values)
    if all(-_INT64_SAFE < v < _INT64_SAFE for v in vals):
        return np.array(vals, dtype=np.int64)
    arr = np.empty(len(vals), dtype=object)
    arr[:] = vals
    return arr


def _normalize(nums: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    if den <= 0:
        raise ValueError("denominator must be positive")
    g = math.gcd(_gcd_reduce(nums), den)
    if g > 1:
        nums = nums // g
        den //= g
    if nums.dtype == object and all(-_INT64_SAFE < int(v) < _INT64_SAFE for v in nums.flat):
        nums = nums.astype(np.int64)
    return nums, den


def _scalar_kind(den: int) -> str:
    return "dyadic" if den & (den - 1) == 0 else "rational"


class _ExactGrid:
    """Shared exact-value behaviour of tables and spectra."""

    n: int
    nums: np.ndarray
    den: int
    scalar: str

    @property
    def size(self) -> int:
        return 1 << self.n

    def is_exact(self) -> bool:
        return self.scalar != "float"

    def value(self, idx: int):
        if self.scalar == "float":
            return float(self.nums[idx])
        return Fraction(int(self.nums[idx]), self.den)

    def fractions(self) -> list[Fraction]:
        if self.scalar == "float":
            raise PreconditionViolated("float data has no exact fractions")
        return [Fraction(int(v), self.den) for v in self.nums]


@dataclass(frozen=True)
class FunctionTable(_ExactGrid):
    """Dense 2^n-entry value table with a range tag.

    range_tag is one of ``bounded`` (|f| <= 1), ``pm1`` (f in {-1, +1}) or
    ``int:C`` (f in {0, ..., C}).
    """

    n: int
    nums: np.ndarray
    den: int
    scalar: str
    range_tag: str

    @staticmethod
    def from_fractions(n: int, values: Iterable[Fraction], range_tag: str = RANGE_BOUNDED) -> "FunctionTable":
        vals = [Fraction(v) for v in values]
        if len(vals) != 1 << n:
            raise DimensionMismatch(f"expected {1 << n} values, got {len(vals)}")
        den = 1
        for v in vals:
            den = den * v.denominator // math.gcd(den, v.denominator)
        nums = _exact_array(v.numerator * (den // v.denominator) for v in vals)
        nums, den = _normalize(nums, den)
        t = FunctionTable(n, nums, den, _scalar_kind(den), range_tag)
        t.validate_range()
        return t

    @staticmethod
    def from_ints(n: int, values: Iterable[int], den: int = 1, range_tag: str = RANGE_BOUNDED) -> "FunctionTable":
        nums = _exact_array(values)
        if len(nums) != 1 << n:
            raise DimensionMismatch(f"expected {1 << n} values, got {len(nums)}")
        nums, den = _normalize(nums, den)
        t = FunctionTable(n, nums, den, _scalar_kind(den), range_tag)
        t.validate_range()
        return t

    @staticmethod
    def from_floats(n: int, values: Iterable[float], range_tag: str = RANGE_BOUNDED) -> "FunctionTable":
        arr = np.asarray(list(values), dtype=np.float64)
        if arr.shape != (1 << n,):
            raise DimensionMismatch(f"expected {1 << n} values, got {arr.shape}")
        return FunctionTable(n, arr, 1, "float", range_tag)

    def validate_range(self) -> None:
        tag = self.range_tag
        if self.scalar == "float":
            if tag == RANGE_BOUNDED and np.abs(self.nums).max(initial=0.0) > 1.0 + 1e-12:
                raise PreconditionViolated("bounded table has |value| > 1")
            return
        if tag == RANGE_BOUNDED:
            if any(abs(int(v)) > self.den for v in self.nums.flat):
                raise PreconditionViolated("bounded table has |value| > 1")
        elif tag == RANGE_PM1:
            if self.den != 1 or not all(int(v) in (-1, 1) for v in self.nums.flat):
                raise PreconditionViolated("pm1 table has a value outside {-1, +1}")
        elif tag.startswith("int:"):
            c = int(tag.split(":", 1)[1])
            if self.den != 1 or not all(0 <= int(v) <= c for v in self.nums.flat):
                raise PreconditionViolated(f"int-range table has a value outside 0..{c}")
        else:
            raise ValueError(f"unknown range tag {tag!r}")

    def int_values(self) -> np.ndarray:
        if self.scalar == "float" or self.den != 1:
            raise PreconditionViolated("not an integer-valued table")
        return self.nums

    def mean(self) -> Fraction:
        return Fraction(int(np.sum(self.nums, dtype=object)), self.den << self.n)


@dataclass(frozen=True)
class RegularityResult:
    regular: bool
    witness: int | None
    magnitude: Fraction | float

    def __bool__(self) -> bool:
        return self.regular


@dataclass(frozen=True)
class Spectrum(_ExactGrid):
    """Dense coefficient table indexed by the parity vector g."""

    n: int
    nums: np.ndarray
    den: int
    scalar: str

    def coeff(self, gamma: int):
        return self.value(gamma)

    def support(self) -> Iterator[int]:
        return iter(int(g) for g in np.nonzero(self.nums)[0])

    def degree(self) -> int:
        nz = np.nonzero(self.nums)[0]
        if nz.size == 0:
            return 0
        return int(np.bitwise_count(nz.astype(np.uint64)).max())

    def level_weights(self) -> np.ndarray:
        return np.bitwise_count(np.arange(self.size, dtype=np.uint64)).astype(np.int64)

    def max_nontrivial(self) -> tuple[Fraction | float, int | None]:
        """Largest |coeff(g)| over g != 0 with the smallest-g tie-break."""
        if self.size == 1:
            return (Fraction(0) if self.is_exact() else 0.0), None
        tail = np.abs(self.nums[1:])
        if tail.dtype == object:
            best, arg = -1, 0
            for i, v in enumerate(tail):
                if v > best:
                    best, arg = v, i
        else:
            arg = int(np.argmax(tail))
            best = tail[arg]
        witness = arg + 1
        mag = Fraction(int(best), self.den) if self.is_exact() else float(best)
        return mag, witness


def wht(table: FunctionTable) -> Spectrum:
    """Forward transform: coeffs[g] = E_x[f(x) (-1)^<g,x>], exact for exact tables."""
    if table.scalar == "float":
        work = table.nums.astype(np.float64, copy=True)
        _kernels.wht_inplace(work)
        return Spectrum(table.n, work / (1 << table.n), 1, "float")
    work = _exact_butterfly(table.nums, table.n)
    nums, den = _normalize(work, table.den << table.n)
    return Spectrum(table.n, nums, den, _scalar_kind(den))


def inverse_wht(spec: Spectrum, range_tag: str = RANGE_BOUNDED) -> FunctionTable:
    """Inverse transform; exact round-trip for exact spectra."""
    if spec.scalar == "float":
        work = spec.nums.astype(np.float64, copy=True)
        _kernels.wht_inplace(work)
        return FunctionTable(spec.n, work, 1, "float", range_tag)
    work = _exact_butterfly(spec.nums, spec.n)
    nums, den = _normalize(work, spec.den)
    t = FunctionTable(spec.n, nums, den, _scalar_kind(den), range_tag)
    t.validate_range()
    return t


def _exact_butterfly(nums: np.ndarray, n: int) -> np.ndarray:
    """Unnormalized butterfly with overflow-safe dtype selection and a capacity check."""
    if nums.dtype == np.int64:
        bound = int(np.abs(nums).max(initial=0)) << n
        if bound < _INT64_SAFE:
            work = nums.copy()
            _kernels.wht_inplace(work)
            return work
    work = np.empty(len(nums), dtype=object)
    work[:] = [int(v) for v in nums]
    _kernels.wht_inplace(work)
    for v in work.flat:
        check_capacity(int(v))
    return work


def degree(spec: Spectrum) -> int:
    return spec.degree()


def is_regular(spec: Spectrum, delta: Fraction | float) -> RegularityResult:
    """Check max_{g != 0} |coeff(g)| <= delta; exact comparison for exact spectra."""
    mag, witness = spec.max_nontrivial()
    if witness is None:
        return RegularityResult(True, None, mag)
    if spec.is_exact():
        ok = mag <= Fraction(delta)
    else:
        ok = mag <= float(delta)
    return RegularityResult(ok, None if ok else witness, mag)


def level_split(spec: Spectrum, d: int) -> tuple[Spectrum, Spectrum]:
    """Split into (levels < d, level == d); any mass above d raises DegreeTooHigh."""
    w = spec.level_weights()
    above = (w > d) & (spec.nums != 0)
    if bool(np.any(above)):
        g = int(np.nonzero(above)[0][0])
        raise DegreeTooHigh(f"coefficient at level {int(w[g])} (gamma={g}) above d={d}")
    below_nums = np.where(w < d, spec.nums, 0 if spec.is_exact() else 0.0)
    at_nums = np.where(w == d, spec.nums, 0 if spec.is_exact() else 0.0)
    if spec.is_exact():
        bn, bd = _normalize(below_nums, spec.den)
        an, ad = _normalize(at_nums, spec.den)
        return (Spectrum(spec.n, bn, bd, _scalar_kind(bd)),
                Spectrum(spec.n, an, ad, _scalar_kind(ad)))
    return (Spectrum(spec.n, below_nums, 1, "float"),
            Spectrum(spec.n, at_nums, 1, "float"))


def granularity_claim_check(table: FunctionTable, g: Fraction, d: int) -> bool:
    """Verify every coefficient of a G-granular degree-<=d table is a multiple of 2^-d G."""
    if not table.is_exact():
        raise PreconditionViolated("granularity check needs an exact table")
    g = Fraction(g)
    for v in table.fractions():
        if (v / g).denominator != 1:
            raise PreconditionViolated(f"value {v} is not an integer multiple of {g}")
    spec = wht(table)
    if spec.degree() > d:
        raise PreconditionViolated(f"degree {spec.degree()} exceeds d={d}")
    grid = g / (1 << d)
    return all((Fraction(int(v), spec.den) / grid).denominator == 1 for v in spec.nums.flat)


def tv_distance(table: FunctionTable, u: "f2core.AffineSubspace") -> Fraction:
    """Statistical distance between f's distribution on uniform U and uniform {0..C}."""
    if not table.range_tag.startswith("int:"):
        raise PreconditionViolated("tv_distance needs an int-range table")
    c = int(table.range_tag.split(":", 1)[1])
    if u.n != table.n:
        raise DimensionMismatch("subspace and table disagree on n")
    pts = u.point_array()
    vals = table.int_values()[pts]
    counts = np.bincount(vals.astype(np.int64), minlength=c + 1)
    total = int(pts.size)
    acc = Fraction(0)
    for cnt in counts[: c + 1]:
        acc += abs(Fraction(int(cnt), total) - Fraction(1, c + 1))
    return acc / 2


# ---------------------------------------------------------------------------
# sparse spectra (spectrum-backed pipeline evaluation)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparseSpectrum:
    """Exact sparse coefficient map, for functions given by few coefficients.

    The regularization pipeline works on these directly so that low-degree
    functions on large n (where 2^n tables are out of reach) stay cheap.
    """

    n: int
    coeffs: Mapping[int, Fraction]

    @staticmethod
    def of(n: int, coeffs: Mapping[int, Fraction]) -> "SparseSpectrum":
        return SparseSpectrum(n, {int(g): Fraction(v) for g, v in coeffs.items() if v != 0})

    @staticmethod
    def from_table(table: FunctionTable) -> "SparseSpectrum":
        spec = wht(table)
        return SparseSpectrum.of(spec.n, {g: spec.coeff(g) for g in spec.support()})

    @staticmethod
    def from_spectrum(spec: Spectrum) -> "SparseSpectrum":
        return SparseSpectrum.of(spec.n, {g: spec.coeff(g) for g in spec.support()})

    def coeff(self, gamma: int) -> Fraction:
        return self.coeffs.get(gamma, Fraction(0))

    def degree(self) -> int:
        return max((f2core.weight(g) for g in self.coeffs), default=0)

    def max_nontrivial(self) -> tuple[Fraction, int | None]:
        best, witness = Fraction(0), None
        for g in sorted(self.coeffs):
            if g == 0:
                continue
            mag = abs(self.coeffs[g])
            if mag > best:
                best, witness = mag, g
        return best, witness

    def is_regular(self, delta: Fraction) -> bool:
        mag, _ = self.max_nontrivial()
        return mag <= Fraction(delta)

    def scale(self, factor: Fraction) -> "SparseSpectrum":
        return SparseSpectrum.of(self.n, {g: v * factor for g, v in self.coeffs.items()})

    def level_below(self, d: int) -> "SparseSpectrum":
        return SparseSpectrum.of(self.n, {g: v for g, v in self.coeffs.items() if f2core.weight(g) < d})

    def level_at(self, d: int) -> "SparseSpectrum":
        return SparseSpectrum.of(self.n, {g: v for g, v in self.coeffs.items() if f2core.weight(g) == d})

    def compose_matrix(self, m: f2core.Mat2) -> "SparseSpectrum":
        """Spectrum of f o M: new coeff at M^T b equals old coeff at b."""
        mt = m.transpose()
        return SparseSpectrum.of(self.n, {mt.apply(g): v for g, v in self.coeffs.items()})

    def restrict_coords(self, fixed_mask: int, b: int) -> "SparseSpectrum":
        """Coordinate restriction, survivors compacted in increasing original order."""
        if b & ~fixed_mask:
            raise PreconditionViolated("fixing vector not supported on the fixed set")
        survivors = [i for i in range(self.n) if not (fixed_mask >> i) & 1]
        out: dict[int, Fraction] = {}
        for g, v in self.coeffs.items():
            beta = g & fixed_mask
            key = f2core.compact_bits(g & ~fixed_mask, survivors)
            sign = -1 if f2core.dot(beta, b) else 1
            out[key] = out.get(key, Fraction(0)) + sign * v
        return SparseSpectrum.of(len(survivors), out)

    def evaluate(self, x: int) -> Fraction:
        acc = Fraction(0)
        for g, v in self.coeffs.items():
            acc += -v if f2core.dot(g, x) else v
        return acc

    def to_spectrum(self) -> Spectrum:
        if self.n > POINT_CAP_N:
            raise CapExceeded(f"n = {self.n} too large to densify")
        den = 1
        for v in self.coeffs.values():
            den = den * v.denominator // math.gcd(den, v.denominator)
        nums = _exact_array([0] * (1 << self.n))
        if nums.dtype == np.int64 and any(abs(v.numerator * (den // v.denominator)) >= _INT64_SAFE for v in self.coeffs.values()):
            nums = nums.astype(object)
        for g, v in self.coeffs.items():
            nums[g] = v.numerator * (den // v.denominator)
        nums, den = _normalize(nums, den)
        return Spectrum(self.n, nums, den, _scalar_kind(den))

