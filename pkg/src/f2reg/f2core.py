"""Exact linear algebra over F2^n.

Vectors are Python ints used as bitmasks: bit i (LSB first) is coordinate
x_{i+1}.  The same order indexes dense function tables, so f(x) lives at
table position ``x``.  Text form writes coordinate x_1 leftmost, i.e. the
string is the LSB-first binary expansion.

Subspaces are kept in reduced row echelon form with the pivot of a basis
vector defined as its lowest set coordinate; every pivot coordinate is set
in exactly one basis vector.  Affine subspaces canonicalize their shift to
be zero on all pivot coordinates, which makes structural equality coincide
with point-set equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import (
    CapExceeded,
    DimensionMismatch,
    InconsistentConstraints,
    MapDoesNotCarryBasis,
    SingularMatrix,
)

SUBSPACE_ENUM_CAP = 10   # largest n for full subspace enumeration
POINT_ENUM_CAP = 22      # largest dim for materializing a point set


def weight(v: int) -> int:
    return bin(v).count("1")


def dot(a: int, b: int) -> int:
    """Inner product over F2: parity of the AND."""
    return bin(a & b).count("1") & 1


def vec_to_str(v: int, n: int) -> str:
    return "".join("1" if (v >> i) & 1 else "0" for i in range(n))


def vec_from_str(s: str) -> int:
    v = 0
    for i, c in enumerate(s):
        if c == "1":
            v |= 1 << i
        elif c != "0":
            raise ValueError(f"bad bit character {c!r}")
    return v


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mat2:
    """Invertible-or-not n x n matrix over F2, rows as bitmasks.

    Acting on column vectors: bit i of M @ x equals <rows[i], x>.
    """

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise DimensionMismatch(f"expected {self.n} rows, got {len(self.rows)}")

    def apply(self, x: int) -> int:
        out = 0
        for i, r in enumerate(self.rows):
            out |= dot(r, x) << i
        return out

    def column(self, j: int) -> int:
        c = 0
        for i, r in enumerate(self.rows):
            c |= ((r >> j) & 1) << i
        return c

    def transpose(self) -> "Mat2":
        return Mat2(self.n, tuple(self.column(j) for j in range(self.n)))

    def mul(self, other: "Mat2") -> "Mat2":
        """Composition self @ other (apply ``other`` first)."""
        if self.n != other.n:
            raise DimensionMismatch("matrix sizes differ")
        new_rows = []
        for r in self.rows:
            acc = 0
            rr = r
            while rr:
                j = (rr & -rr).bit_length() - 1
                acc ^= other.rows[j]
                rr &= rr - 1
            new_rows.append(acc)
        return Mat2(self.n, tuple(new_rows))

    def rank(self) -> int:
        return _rank(self.rows)

    def is_invertible(self) -> bool:
        return self.rank() == self.n

    def apply_all(self) -> np.ndarray:
        """Permutation array p with p[x] = M @ x for every x in [0, 2^n)."""
        images = [self.apply(1 << i) for i in range(self.n)]
        return _kernels.subset_xor(images, self.n)

    @staticmethod
    def identity(n: int) -> "Mat2":
        return Mat2(n, tuple(1 << i for i in range(n)))


def _rank(rows: Iterable[int]) -> int:
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def invert(m: Mat2) -> Mat2:
    """Inverse matrix, raising SingularMatrix on rank deficiency."""
    n = m.n
    work = list(m.rows)
    inv = [1 << i for i in range(n)]
    row = 0
    for col in range(n):
        piv = None
        for r in range(row, n):
            if (work[r] >> col) & 1:
                piv = r
                break
        if piv is None:
            raise SingularMatrix(f"rank-deficient at column {col}")
        work[row], work[piv] = work[piv], work[row]
        inv[row], inv[piv] = inv[piv], inv[row]
        for r in range(n):
            if r != row and ((work[r] >> col) & 1):
                work[r] ^= work[row]
                inv[r] ^= inv[row]
        row += 1
    # work is now a permutation-free identity: row i has pivot at column i
    return Mat2(n, tuple(inv))


def random_invertible(n: int, rng: np.random.Generator) -> Mat2:
    """Uniformly random rows, resampled until invertible."""
    while True:
        rows = tuple(int(rng.integers(0, 1 << n)) for _ in range(n))
        if _rank(rows) == n:
            return Mat2(n, rows)


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    n: int
    basis: tuple[int, ...]
    pivots: tuple[int, ...] = field(default=())

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.n - len(self.basis)

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def reduce(self, v: int) -> int:
        """Remainder of v modulo the subspace (zero on all pivot coordinates)."""
        for b, p in zip(self.basis, self.pivots):
            if (v >> p) & 1:
                v ^= b
        return v

    def point_array(self) -> np.ndarray:
        if self.dim > POINT_ENUM_CAP:
            raise CapExceeded(f"dim {self.dim} exceeds point enumeration cap {POINT_ENUM_CAP}")
        return _kernels.subset_xor(self.basis, self.dim)

    def points(self) -> Iterator[int]:
        return iter(int(x) for x in self.point_array())

    def to_text(self) -> str:
        return "\n".join(vec_to_str(b, self.n) for b in self.basis)

    @staticmethod
    def from_text(text: str, n: int | None = None) -> "Subspace":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if n is None:
            if not lines:
                raise ValueError("cannot infer n from an empty basis")
            n = len(lines[0])
        return rref(n, [vec_from_str(ln) for ln in lines])


def rref(n: int, vectors: Sequence[int]) -> Subspace:
    """Canonical RREF span of the given vectors (empty list gives the zero subspace)."""
    basis: list[int] = []
    for v in vectors:
        if v >> n:
            raise DimensionMismatch(f"vector 0b{v:b} does not fit in {n} coordinates")
        for b in basis:
            p = (b & -b).bit_length() - 1
            if (v >> p) & 1:
                v ^= b
        if v == 0:
            continue
        p = (v & -v).bit_length() - 1
        basis = [b ^ v if (b >> p) & 1 else b for b in basis]
        basis.append(v)
    basis.sort(key=lambda b: (b & -b).bit_length())
    pivots = tuple((b & -b).bit_length() - 1 for b in basis)
    return Subspace(n, tuple(basis), pivots)


def full_space(n: int) -> Subspace:
    return Subspace(n, tuple(1 << i for i in range(n)), tuple(range(n)))


def zero_space(n: int) -> Subspace:
    return Subspace(n, (), ())


def span_of_coords(n: int, coords: Iterable[int]) -> Subspace:
    cs = tuple(sorted(set(coords)))
    return Subspace(n, tuple(1 << c for c in cs), cs)


def orthogonal(s: Subspace) -> Subspace:
    """The orthogonal subspace, via the standard RREF kernel construction."""
    pivset = set(s.pivots)
    free = [q for q in range(s.n) if q not in pivset]
    kernel = []
    for q in free:
        w = 1 << q
        for b, p in zip(s.basis, s.pivots):
            if (b >> q) & 1:
                w ^= 1 << p
        kernel.append(w)
    return rref(s.n, kernel)


def transform_subspace(m: Mat2, s: Subspace) -> Subspace:
    """Image subspace {M v : v in S}; M must be invertible."""
    if not m.is_invertible():
        raise SingularMatrix("transform_subspace needs an invertible map")
    return rref(s.n, [m.apply(b) for b in s.basis])


def direct_sum_check(a: Subspace, b: Subspace) -> bool:
    """True iff A and B are independent and together span all of F2^n."""
    if a.n != b.n:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    if a.dim + b.dim != a.n:
        return False
    return _rank(a.basis + b.basis) == a.n


def complement_of_perp(v: Subspace, coords: Iterable[int], m: Mat2) -> Subspace:
    """The complement W = {M^T g : g in span(J)} of V-perp, for M carrying V onto span(J)."""
    j = tuple(sorted(set(coords)))
    if len(j) != v.dim:
        raise DimensionMismatch(f"|J| = {len(j)} but dim(V) = {v.dim}")
    if not m.is_invertible():
        raise SingularMatrix("complement_of_perp needs an invertible map")
    image = rref(v.n, [m.apply(b) for b in v.basis])
    if image != span_of_coords(v.n, j):
        raise MapDoesNotCarryBasis("M does not carry a basis of V onto the coordinate span")
    mt = m.transpose()
    return rref(v.n, [mt.apply(1 << c) for c in j])


def enumerate_subspaces(n: int, dim: int, cap: int = SUBSPACE_ENUM_CAP) -> Iterator[Subspace]:
    """Stream every dim-dimensional subspace of F2^n exactly once, in canonical
    RREF profile order: pivot sets ascending, then free entries in integer order."""
    if n > cap:
        raise CapExceeded(f"n = {n} exceeds enumeration cap {cap}")
    if dim < 0 or dim > n:
        return
    for pivots in itertools.combinations(range(n), dim):
        pivset = set(pivots)
        # free slots of row i: non-pivot coordinates above its pivot
        slots = [[q for q in range(p + 1, n) if q not in pivset] for p in pivots]
        counts = [len(sl) for sl in slots]
        total = 1 << sum(counts)
        for code in range(total):
            basis = []
            c = code
            for i, p in enumerate(pivots):
                row = 1 << p
                for q in slots[i]:
                    if c & 1:
                        row |= 1 << q
                    c >>= 1
                basis.append(row)
            yield Subspace(n, tuple(basis), pivots)


def gaussian_binomial(n: int, k: int) -> int:
    """Number of k-dimensional subspaces of F2^n."""
    num = 1
    den = 1
    for i in range(k):
        num *= (1 << n) - (1 << i)
        den *= (1 << k) - (1 << i)
    return num // den


# ---------------------------------------------------------------------------
# affine subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineSubspace:
    space: Subspace
    shift: int

    def __post_init__(self):
        canon = self.space.reduce(self.shift)
        object.__setattr__(self, "shift", canon)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def codim(self) -> int:
        return self.space.codim

    def contains(self, v: int) -> bool:
        return self.space.contains(v ^ self.shift)

    def point_array(self) -> np.ndarray:
        return self.space.point_array() ^ self.shift

    def points(self) -> Iterator[int]:
        return iter(int(x) for x in self.point_array())

    def to_text(self) -> str:
        body = self.space.to_text()
        shift_line = f"shift={vec_to_str(self.shift, self.n)}"
        return f"{body}\n{shift_line}" if body else shift_line

    @staticmethod
    def from_text(text: str, n: int | None = None) -> "AffineSubspace":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        shift = 0
        basis_lines = []
        for ln in lines:
            if ln.startswith("shift="):
                shift = vec_from_str(ln[len("shift="):])
                if n is None:
                    n = len(ln) - len("shift=")
            else:
                basis_lines.append(ln)
        sub = Subspace.from_text("\n".join(basis_lines), n)
        return AffineSubspace(sub, shift)


def count_weight_t(u: AffineSubspace, t: int) -> int:
    """|U^{=t}|, by point enumeration (dim must be within the cap)."""
    pts = u.point_array()
    return int(np.count_nonzero(np.bitwise_count(pts.astype(np.uint64)) == t))


def weight_count_bound(dim: int, n: int, t: int) -> int:
    """The binom(dim+1, <= t*) ceiling on |U^{=t}| for dim-dimensional affine U."""
    import math

    tstar = min(t, n - t)
    return sum(math.comb(dim + 1, i) for i in range(tstar + 1))


# ---------------------------------------------------------------------------
# affine constraint systems
# ---------------------------------------------------------------------------

def solve_constraints(n: int, constraints: Sequence[tuple[int, int]]) -> AffineSubspace:
    """Solution set of the system <mask_r, x> = bit_r as an affine subspace.

    Raises InconsistentConstraints when the system has no solution.
    """
    rows = [(mask, bit & 1) for mask, bit in constraints]
    basis: list[tuple[int, int]] = []  # reduced rows with distinct pivots
    for mask, bit in rows:
        for bm, bb in basis:
            p = (bm & -bm).bit_length() - 1
            if (mask >> p) & 1:
                mask ^= bm
                bit ^= bb
        if mask == 0:
            if bit:
                raise InconsistentConstraints("0 = 1 after reduction")
            continue
        basis.append((mask, bit))
    # particular solution: set each pivot coordinate from its reduced row,
    # back-substituting in pivot order
    x = 0
    for bm, bb in sorted(basis, key=lambda r: -(r[0] & -r[0])):
        p = (bm & -bm).bit_length() - 1
        if dot(bm, x) != bb:
            x ^= 1 << p
    kernel = orthogonal(rref(n, [bm for bm, _ in basis]))
    return AffineSubspace(kernel, x)


# ---------------------------------------------------------------------------
# coordinate compaction
# ---------------------------------------------------------------------------

def compact_bits(v: int, survivors: Sequence[int]) -> int:
    """Gather the bits of v at the survivor positions into a dense word."""
    out = 0
    for i, s in enumerate(survivors):
        if (v >> s) & 1:
            out |= 1 << i
    return out


def embed_bits(v: int, survivors: Sequence[int]) -> int:
    """Scatter the low bits of v back to the survivor positions."""
    out = 0
    for i, s in enumerate(survivors):
        if (v >> i) & 1:
            out |= 1 << s
    return out


def mask_to_coords(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def coords_to_mask(coords: Iterable[int]) -> int:
    m = 0
    for c in coords:
        m |= 1 << c
    return m
