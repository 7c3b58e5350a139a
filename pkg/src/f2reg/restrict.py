"""Restriction of functions to affine subspaces, three equivalent ways.

Route 1 (restrict_affine) enumerates the subspace through its RREF basis
and reads coefficients as expectations against the characters indexed by a
complement W of V-perp.  Route 2 (coset_sum_coefficient) evaluates the
signed sum of original coefficients over the coset g + V-perp; it is the
independent oracle for route 1.  Route 3 (restrict_via_transform) moves the
subspace onto a coordinate span with an invertible map and applies a plain
coordinate restriction.  Exact tables keep all three routes bit-exact.

Survivor coordinates of a coordinate restriction are always compacted in
increasing original order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import _kernels, f2core
from .errors import (
    CapExceeded,
    NotAComplement,
    SupportMismatch,
    ZeroGamma,
)
from .f2core import AffineSubspace, Mat2, Subspace
from .spectrum import (
    FunctionTable,
    SparseSpectrum,
    Spectrum,
    is_regular,
    wht,
)

COSET_ENUM_CAP = 20  # largest codim for coset-sum enumeration


def _as_mask(n: int, coords_or_mask: int | Iterable[int]) -> int:
    if isinstance(coords_or_mask, int):
        return coords_or_mask
    return f2core.coords_to_mask(coords_or_mask)


def restrict_coords(table: FunctionTable, fixed: int | Iterable[int], b: int) -> FunctionTable:
    """Fix the coordinates in ``fixed`` to the bits of b; survivors are compacted."""
    fmask = _as_mask(table.n, fixed)
    if b & ~fmask:
        raise SupportMismatch("fixing vector has bits outside the fixed set")
    survivors = [i for i in range(table.n) if not (fmask >> i) & 1]
    k = len(survivors)
    idx = _kernels.subset_xor([1 << s for s in survivors], k) ^ b
    return FunctionTable(k, table.nums[idx], table.den, table.scalar, table.range_tag)


def compose_linear(table: FunctionTable, m: Mat2) -> FunctionTable:
    """The table of g(x) = f(M x); M must be invertible."""
    if m.n != table.n:
        raise f2core.DimensionMismatch("matrix size differs from table")
    f2core.invert(m)  # raises SingularMatrix
    perm = m.apply_all()
    return FunctionTable(table.n, table.nums[perm], table.den, table.scalar, table.range_tag)


@dataclass(frozen=True)
class RestrictedCoefficients:
    """Coefficients of f on U = shift + V, indexed by the members of W.

    Internally one 2^dim(V) transform of the chart values; the coefficient at
    g in W is the chart coefficient at the bit pattern (<g, basis_i>)_i.
    """

    u: AffineSubspace
    w: Subspace
    chart_spectrum: Spectrum

    def _code(self, gamma: int) -> int:
        code = 0
        for i, bvec in enumerate(self.u.space.basis):
            if f2core.dot(gamma, bvec):
                code |= 1 << i
        return code

    def coeff(self, gamma: int):
        if not self.w.contains(gamma):
            raise ValueError("gamma is not a member of W")
        return self.chart_spectrum.coeff(self._code(gamma))

    def as_dict(self) -> dict[int, Fraction]:
        return {int(g): self.coeff(int(g)) for g in self.w.point_array()}

    def magnitudes(self) -> list:
        """Sorted multiset of all 2^dim coefficient magnitudes (routes agree on this)."""
        return sorted(abs(self.chart_spectrum.coeff(c)) for c in range(self.chart_spectrum.size))

    def is_regular(self, delta) -> bool:
        return is_regular(self.chart_spectrum, delta).regular


def restrict_affine(table: FunctionTable, u: AffineSubspace, w: Subspace) -> RestrictedCoefficients:
    """Coefficients of f_U against the characters of W, by chart enumeration."""
    if u.n != table.n or w.n != table.n:
        raise f2core.DimensionMismatch("operands disagree on n")
    if not f2core.direct_sum_check(w, f2core.orthogonal(u.space)):
        raise NotAComplement("W is not a complement of V-perp")
    k = u.dim
    idx = _kernels.subset_xor(u.space.basis, k) ^ u.shift
    chart = FunctionTable(k, table.nums[idx], table.den, table.scalar, table.range_tag)
    return RestrictedCoefficients(u, w, wht(chart))


def coset_sum_coefficient(spec: Spectrum, gamma: int, u: AffineSubspace):
    """Signed sum of f's coefficients over the coset gamma + V-perp."""
    vperp = f2core.orthogonal(u.space)
    if vperp.dim > COSET_ENUM_CAP:
        raise CapExceeded(f"codim {vperp.dim} exceeds coset enumeration cap")
    alpha = u.shift
    if spec.is_exact():
        acc = Fraction(0)
    else:
        acc = 0.0
    for v in vperp.point_array():
        beta = gamma ^ int(v)
        term = spec.coeff(beta)
        acc = acc + (-term if f2core.dot(beta, alpha) else term)
    return acc


def restrict_via_transform(table: FunctionTable, u: AffineSubspace, m: Mat2,
                           coords: Iterable[int]) -> FunctionTable:
    """Restrict by moving U onto a coordinate span: h = f o M^-1 fixed outside J.

    M must carry U's direction space onto span(J).  The output's coefficient
    magnitudes match restrict_affine under g -> M^T g.
    """
    j = tuple(sorted(set(coords)))
    if f2core.transform_subspace(m, u.space) != f2core.span_of_coords(table.n, j):
        raise f2core.MapDoesNotCarryBasis("M does not carry U's direction onto span(J)")
    h = compose_linear(table, f2core.invert(m))
    jmask = f2core.coords_to_mask(j)
    fixed = ((1 << table.n) - 1) ^ jmask
    b2 = m.apply(u.shift) & fixed
    return restrict_coords(h, fixed, b2)


def fix_single_parity(table: FunctionTable, gamma: int, bit: int) -> FunctionTable:
    """Restrict to the hyperplane <gamma, x> = bit, charted on the surviving
    coordinates (the lowest coordinate of gamma is eliminated)."""
    if gamma == 0:
        raise ZeroGamma("cannot fix the empty parity")
    p = (gamma & -gamma).bit_length() - 1
    survivors = [i for i in range(table.n) if i != p]
    emb = _kernels.subset_xor([1 << s for s in survivors], table.n - 1)
    pbit = (np.bitwise_count((emb & gamma).astype(np.uint64)).astype(np.int64) ^ bit) & 1
    idx = emb ^ (pbit << p)
    return FunctionTable(table.n - 1, table.nums[idx], table.den, table.scalar, table.range_tag)


# ---------------------------------------------------------------------------
# regularity certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularityCertificate:
    """(M, J, b, delta): f o M restricted by fixing the coordinates outside J
    to b is delta-regular.  J holds original coordinate indices."""

    n: int
    m: Mat2
    j: tuple[int, ...]
    b: int
    delta: Fraction

    def __post_init__(self):
        jmask = f2core.coords_to_mask(self.j)
        if self.b & jmask:
            raise SupportMismatch("certificate fixing vector overlaps the alive set")

    @property
    def codim(self) -> int:
        return self.n - len(self.j)

    def subspace(self) -> AffineSubspace:
        """The affine subspace this certificate denotes: {M(x+b) : x in span(J)}."""
        direction = f2core.transform_subspace(self.m, f2core.span_of_coords(self.n, self.j))
        return AffineSubspace(direction, self.m.apply(self.b))


def certificate_verify(table: FunctionTable, cert: RegularityCertificate) -> bool:
    """True iff the certified restriction of f is delta-regular; False on a
    malformed certificate rather than raising."""
    if cert.n != table.n:
        return False
    if not cert.m.is_invertible():
        return False
    h = compose_linear(table, cert.m)
    fixed = ((1 << table.n) - 1) ^ f2core.coords_to_mask(cert.j)
    restricted = restrict_coords(h, fixed, cert.b)
    return is_regular(wht(restricted), cert.delta).regular


def certificate_verify_sparse(spec: SparseSpectrum, cert: RegularityCertificate) -> bool:
    """Sparse-spectrum variant of certificate_verify for large-n pipelines."""
    if cert.n != spec.n or not cert.m.is_invertible():
        return False
    fixed = ((1 << spec.n) - 1) ^ f2core.coords_to_mask(cert.j)
    restricted = spec.compose_matrix(cert.m).restrict_coords(fixed, cert.b)
    return restricted.is_regular(cert.delta)


def affine_to_certificate(u: AffineSubspace, delta: Fraction) -> RegularityCertificate:
    """Build the canonical certificate whose subspace() equals U: M's columns
    place V's RREF basis at V's pivot coordinates and unit vectors elsewhere."""
    n = u.n
    pivots = u.space.pivots
    cols = {}
    for p, bvec in zip(pivots, u.space.basis):
        cols[p] = bvec
    for q in range(n):
        if q not in cols:
            cols[q] = 1 << q
    rows = []
    for r in range(n):
        row = 0
        for q in range(n):
            if (cols[q] >> r) & 1:
                row |= 1 << q
        rows.append(row)
    m = Mat2(n, tuple(rows))
    b = f2core.invert(m).apply(u.shift) & ~f2core.coords_to_mask(pivots)
    return RegularityCertificate(n, m, tuple(pivots), b, Fraction(delta))
