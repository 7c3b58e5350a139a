"""Checkers for the counting lemmas, lower-bound constructions, the
parity-kill composition theorem, and the disperser/extractor applications.

Each checker returns a JSON-ready report dict.  Checks are exhaustive where
the underlying claim is deterministic; probabilistic claims are scanned and
any counterexample is *reported* rather than asserted impossible.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import _kernels, f2core
from .errors import (
    CapExceeded,
    InconsistentConstraints,
    NotAComplement,
    PreconditionViolated,
)
from .f2core import AffineSubspace, Mat2, Subspace
from .families import mean_of_signs, random_homogeneous
from .regularize import (
    exact_regularity_number,
    min_certificate,
    parity_kill,
    regularize_bounded_degree,
)
from .restrict import certificate_verify, compose_linear, restrict_coords
from .spectrum import FunctionTable, tv_distance, wht

COSET_STATS_CAP = 20


# ---------------------------------------------------------------------------
# counting lemmas
# ---------------------------------------------------------------------------

def _decompose_standard_basis(w: Subspace, vperp: Subspace) -> list[int]:
    """W-part of each e_i under F2^n = W (+) V-perp."""
    n = w.n
    cols = list(w.basis) + list(vperp.basis)
    rows = []
    for r in range(n):
        row = 0
        for q, c in enumerate(cols):
            if (c >> r) & 1:
                row |= 1 << q
        rows.append(row)
    binv = f2core.invert(Mat2(n, tuple(rows)))
    parts = []
    for i in range(n):
        coords = binv.apply(1 << i)
        wpart = 0
        for q in range(w.dim):
            if (coords >> q) & 1:
                wpart ^= w.basis[q]
        parts.append(wpart)
    return parts


def std_basis_coset_stats(v: Subspace, w: Subspace) -> tuple[set[int], set[int]]:
    """(S, S1): members of W whose coset of V-perp holds at least one / exactly
    one standard basis vector.  |S| >= n - C and |S1| >= n - 2C."""
    vperp = f2core.orthogonal(v)
    if not f2core.direct_sum_check(w, vperp):
        raise NotAComplement("W is not a complement of V-perp")
    parts = _decompose_standard_basis(w, vperp)
    counts: dict[int, int] = {}
    for p in parts:
        counts[p] = counts.get(p, 0) + 1
    s = set(counts)
    s1 = {u for u, c in counts.items() if c == 1}
    return s, s1


def build_low_weight_sets(v: Subspace, w: Subspace, ell: int) -> list[set[int]]:
    """The greedy filtration S_1 >= S_2 >= ... >= S_ell: members keep exactly
    one weight-1 coset vector and at most 2*binom(2C+1, t-1) weight-t vectors
    for every t <= ell.  Returns [S_1, ..., S_ell]."""
    c = v.codim
    if ell > c + 1:
        raise PreconditionViolated("need ell <= codim + 1")
    if c > COSET_STATS_CAP:
        raise CapExceeded("codim too large to enumerate cosets")
    vperp = f2core.orthogonal(v)
    _, s1 = std_basis_coset_stats(v, w)
    n = v.n
    vpts = vperp.point_array()
    chain = [set(s1)]
    for t in range(2, ell + 1):
        bound = 2 * math.comb(2 * c + 1, t - 1)
        keep = set()
        for gamma in chain[-1]:
            cnt = int(np.count_nonzero(
                np.bitwise_count((vpts ^ gamma).astype(np.uint64)) == t))
            if cnt <= bound:
                keep.add(gamma)
        chain.append(keep)
    return chain


# ---------------------------------------------------------------------------
# affine subspace streams
# ---------------------------------------------------------------------------

def iter_affine_subspaces(n: int, dims: Sequence[int]) -> Iterator[AffineSubspace]:
    for dim in dims:
        for v in f2core.enumerate_subspaces(n, dim, cap=max(n, f2core.SUBSPACE_ENUM_CAP)):
            free = [q for q in range(n) if q not in set(v.pivots)]
            for sh in _kernels.subset_xor([1 << q for q in free], len(free)):
                yield AffineSubspace(v, int(sh))


def _max_restricted_coeff(table: FunctionTable, u: AffineSubspace) -> Fraction:
    chart = _kernels.subset_xor(u.space.basis, u.dim) ^ u.shift
    sub = FunctionTable(u.dim, table.nums[chart], table.den, table.scalar, table.range_tag)
    mag, _ = wht(sub).max_nontrivial()
    return mag


# ---------------------------------------------------------------------------
# lower-bound checkers
# ---------------------------------------------------------------------------

def check_degree_one_lb(n: int, delta: Fraction, max_codim: int,
                        force: bool = False) -> dict:
    """Exhaustively confirm mean-of-signs has no delta-regular restriction at
    codim <= min(max_codim, n/2 - 1); delta must be below 1/n."""
    delta = Fraction(delta)
    t0 = time.monotonic()
    if delta >= Fraction(1, n):
        raise PreconditionViolated("lemma regime needs delta < 1/n")
    cap = min(max_codim, n // 2 - 1)
    table = mean_of_signs(n)
    found = exact_regularity_number(table, delta, max_codim=cap, force=force) if cap >= 0 else None
    return {
        "claim": "degree-one-lower-bound",
        "n": n,
        "delta": str(delta),
        "codim_scanned": cap,
        "counterexamples": [] if found is None else [
            {"codim": found[0], "subspace": found[1].to_text()}],
        "holds": found is None,
        "elapsed_s": time.monotonic() - t0,
    }


def check_random_homogeneous_lb(n: int, d: int, delta: Fraction, seed: int,
                                mode: str = "exhaustive", dim_min: int | None = None,
                                samples: int = 50, force: bool = False) -> dict:
    """Scan restrictions of the random homogeneous family.

    exhaustive: every affine subspace of dimension >= dim_min is scanned and
    any delta-regular one is reported (the guarantee is probabilistic, so a
    find is a report, not a failure).  sampled: seeded subspaces only, also
    confirming the parity obstruction: an odd weight-d coset forces a
    coefficient of magnitude >= binom(n,d)^-1."""
    delta = Fraction(delta)
    t0 = time.monotonic()
    if delta >= Fraction(1, math.comb(n, d)):
        raise PreconditionViolated("lemma regime needs delta < binom(n,d)^-1")
    table = random_homogeneous(n, d, seed)
    spec = wht(table)
    if dim_min is None:
        dim_min = min(n, math.ceil(2 * d * n ** (1.0 / (d - 1)))) if d >= 2 else n
    regular_found = []
    obstruction_checks = 0
    rng = np.random.default_rng(np.random.PCG64(seed ^ 0x5EED))
    if mode == "exhaustive":
        if n > 6 and not force:
            raise CapExceeded("exhaustive homogeneous scan capped at n <= 6")
        subspaces: Iterator[AffineSubspace] = iter_affine_subspaces(n, range(dim_min, n + 1))
    elif mode == "sampled":
        def _sample() -> Iterator[AffineSubspace]:
            for _ in range(samples):
                dim = int(rng.integers(dim_min, n + 1))
                vecs = [int(rng.integers(1, 1 << n)) for _ in range(dim)]
                v = f2core.rref(n, vecs)
                yield AffineSubspace(v, int(rng.integers(0, 1 << n)))
        subspaces = _sample()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    binom_inv = Fraction(1, math.comb(n, d))
    for u in subspaces:
        mag = _max_restricted_coeff(table, u)
        if mag <= delta:
            regular_found.append({"dim": u.dim, "subspace": u.to_text()})
        vperp = f2core.orthogonal(u.space)
        vpts = vperp.point_array()
        wsub = _complement_of(vperp, u.n)
        for gamma in wsub.point_array():
            gamma = int(gamma)
            if gamma == 0:
                continue
            sizes = int(np.count_nonzero(
                np.bitwise_count((vpts ^ gamma).astype(np.uint64)) == d))
            if sizes % 2 == 1:
                acc = Fraction(0)
                for vv in vpts:
                    beta = gamma ^ int(vv)
                    term = spec.coeff(beta)
                    acc += -term if f2core.dot(beta, u.shift) else term
                assert abs(acc) >= binom_inv, "odd weight-d coset gave a small coefficient"
                obstruction_checks += 1
    return {
        "claim": "random-homogeneous-lower-bound",
        "n": n, "d": d, "delta": str(delta), "seed": seed, "mode": mode,
        "dim_min": dim_min,
        "regular_subspaces_found": regular_found,
        "odd_coset_obstructions_verified": obstruction_checks,
        "elapsed_s": time.monotonic() - t0,
    }


def _complement_of(vperp: Subspace, n: int) -> Subspace:
    """Any direct-sum complement of the given subspace (greedy basis extension)."""
    basis = list(vperp.basis)
    comp = []
    for q in range(n):
        cand = 1 << q
        if f2core._rank(basis + [cand]) > len(basis):
            basis.append(cand)
            comp.append(cand)
    return f2core.rref(n, comp)


def check_majority_lb(n: int, delta: Fraction, codim_cap: int,
                      force: bool = False) -> dict:
    """Exhaustively confirm MAJ_n has no delta-regular restriction at small codim."""
    from .families import majority

    delta = Fraction(delta)
    t0 = time.monotonic()
    table = majority(n)
    found = exact_regularity_number(table, delta, max_codim=codim_cap, force=force)
    return {
        "claim": "majority-lower-bound",
        "n": n, "delta": str(delta), "codim_cap": codim_cap,
        "counterexamples": [] if found is None else [
            {"codim": found[0], "subspace": found[1].to_text()}],
        "holds": found is None,
        "elapsed_s": time.monotonic() - t0,
    }


# ---------------------------------------------------------------------------
# parity-kill composition
# ---------------------------------------------------------------------------

def compose_tables(f: FunctionTable, g: FunctionTable) -> FunctionTable:
    """(f o g)(y_1, ..., y_m) = f(g(y_1), ..., g(y_m)) on m*r bits, F2-valued."""
    m, r = f.n, g.n
    fv, gv = f.int_values(), g.int_values()
    n = m * r
    xs = np.arange(1 << n, dtype=np.int64)
    inner = np.zeros(1 << n, dtype=np.int64)
    mask = (1 << r) - 1
    for i in range(m):
        inner |= gv[(xs >> (i * r)) & mask] << i
    return FunctionTable.from_ints(n, fv[inner].tolist(), 1, "int:1")


def _composition_inequality_holds(lhs: int, cpk_f: int, cmin_f: int, cpk_g: int) -> bool:
    """lhs >= cpk_f + cmin_f * B_g with B_g = max(log2(cpk_g) - 1, 1), exactly."""
    if cpk_g <= 4:
        return lhs >= cpk_f + cmin_f
    # B_g = log2(cpk_g) - 1:  lhs - cpk_f + cmin_f >= cmin_f * log2(cpk_g)
    lead = lhs - cpk_f + cmin_f
    if lead < 0:
        return False
    return (1 << lead) >= cpk_g ** cmin_f


def check_composition_theorem(f: FunctionTable, g: FunctionTable,
                              force: bool = False) -> dict:
    """Exact check of C+(f o g) >= C+(f) + C_min(f) * B_g.

    The theorem's hypothesis is C+(g) >= 2; with C+(g) <= 1 the instance is
    reported as not applicable (the raw inequality can genuinely fail there).
    """
    t0 = time.monotonic()
    comp = compose_tables(f, g)
    cpk_f = parity_kill(f, force=force)
    cmin_f = min_certificate(f, force=force)
    cpk_g = parity_kill(g, force=force)
    cpk_fg = parity_kill(comp, force=force)
    applicable = cpk_g >= 2
    holds = _composition_inequality_holds(cpk_fg, cpk_f, cmin_f, cpk_g) if applicable else None
    return {
        "claim": "parity-kill-composition",
        "paritykill_f": cpk_f, "mincert_f": cmin_f,
        "paritykill_g": cpk_g, "paritykill_composed": cpk_fg,
        "applicable": applicable,
        "holds": holds,
        "elapsed_s": time.monotonic() - t0,
    }


# ---------------------------------------------------------------------------
# canonization of product-space constraints
# ---------------------------------------------------------------------------

def _complete_rows(rows: list[int], n: int) -> Mat2:
    out = list(rows)
    for q in range(n):
        if f2core._rank(out + [1 << q]) > f2core._rank(out):
            out.append(1 << q)
        if len(out) == n:
            break
    return Mat2(n, tuple(out))


def canonize_affine_constraints(k: int, n: int,
                                constraints: Sequence[tuple[int, int]]) -> dict:
    """Split constraints on F2^k x F2^n into mixed / x-only / y-only blocks.

    Input masks use bits 0..k-1 for x and k..k+n-1 for y.  Returns L (block
    diagonal, invertible) and the canonical blocks: after the change of
    variables u' = L u, mixed constraints read x_i + y_i = s_i (i < t),
    x-only x_{t+j} = s (j < t'-t), y-only y_{t+j} = s (j < t''-t'), and
    t + (t'-t) + (t''-t') = codim(H).
    """
    xmask = (1 << k) - 1
    # reduce to an independent row basis, catching inconsistency
    basis: list[tuple[int, int]] = []
    for mask, bit in constraints:
        bit &= 1
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
    # P = rows of the space with zero y-part: eliminate y-parts over all rows
    pure_x: list[tuple[int, int]] = []
    red_y: list[tuple[int, int]] = []
    for m, b in basis:
        mm, bb = m, b
        for rm, rb in red_y:
            ym = rm >> k
            p = (ym & -ym).bit_length() - 1
            if (mm >> (k + p)) & 1:
                mm ^= rm
                bb ^= rb
        if mm >> k:
            red_y.append((mm, bb))
        else:
            pure_x.append((mm, bb))
    # Q = rows of the space with zero x-part: eliminate x-parts over all rows
    pure_y: list[tuple[int, int]] = []
    red_x: list[tuple[int, int]] = []
    for m, b in basis:
        mm, bb = m, b
        for rm, rb in red_x:
            xm = rm & xmask
            p = (xm & -xm).bit_length() - 1
            if (mm >> p) & 1:
                mm ^= rm
                bb ^= rb
        if mm & xmask:
            red_x.append((mm, bb))
        else:
            pure_y.append((mm, bb))
    # mixed rows: greedy extension of P + Q to the whole row space; their
    # x-parts stay independent of P's and y-parts independent of Q's.
    mixed: list[tuple[int, int]] = []
    span = [m for m, _ in pure_x] + [m for m, _ in pure_y]
    cur_rank = f2core._rank(span)
    for m, b in basis:
        if f2core._rank(span + [m]) > cur_rank:
            span.append(m)
            cur_rank += 1
            mixed.append((m, b))
    t = len(mixed)
    p_cnt = len(pure_x)
    q_cnt = len(pure_y)
    # build A (x-side) and B (y-side): mixed parts first, then pure parts
    a_rows = [m & xmask for m, _ in mixed] + [m & xmask for m, _ in pure_x]
    b_rows = [m >> k for m, _ in mixed] + [m >> k for m, _ in pure_y]
    a_mat = _complete_rows(a_rows, k)
    b_mat = _complete_rows(b_rows, n)
    l_rows = [a_mat.rows[i] for i in range(k)] + [b_mat.rows[i] << k for i in range(n)]
    l_mat = Mat2(k + n, tuple(l_rows))
    blocks_xy = [(i, (mixed[i][1])) for i in range(t)]
    blocks_x = [(t + j, pure_x[j][1]) for j in range(p_cnt)]
    blocks_y = [(t + j, pure_y[j][1]) for j in range(q_cnt)]
    canonical = (
        [((1 << i) | (1 << (k + i)), b) for i, b in blocks_xy]
        + [(1 << idx, b) for idx, b in blocks_x]
        + [(1 << (k + idx), b) for idx, b in blocks_y]
    )
    return {
        "L": l_mat,
        "blocks_xy": blocks_xy,
        "blocks_x": blocks_x,
        "blocks_y": blocks_y,
        "t": t, "t_prime": t + p_cnt, "t_double_prime": t + p_cnt + q_cnt,
        "codim": len(basis),
        "canonical_constraints": canonical,
    }


# ---------------------------------------------------------------------------
# applications: extractor and disperser
# ---------------------------------------------------------------------------

def check_extractor_implies_regular(table: FunctionTable, k: int,
                                    delta: Fraction | None = None) -> dict:
    """Measure the extractor error on dim >= k subspaces; every dim >= k+1
    restriction must then be 2*C*delta-regular.  Violations are bugs."""
    t0 = time.monotonic()
    if not table.range_tag.startswith("int:"):
        raise PreconditionViolated("extractor check needs an int-range table")
    c = int(table.range_tag.split(":", 1)[1])
    n = table.n
    measured = Fraction(0)
    for u in iter_affine_subspaces(n, range(k, n + 1)):
        measured = max(measured, tv_distance(table, u))
    eps = measured if delta is None else Fraction(delta)
    is_extractor = measured <= eps
    threshold = 2 * c * eps
    violations = []
    if is_extractor:
        for u in iter_affine_subspaces(n, range(k + 1, n + 1)):
            mag = _max_restricted_coeff(table, u)
            if mag > threshold:
                violations.append({"dim": u.dim, "subspace": u.to_text(),
                                   "coeff": str(mag)})
    return {
        "claim": "extractor-implies-regular",
        "n": n, "k": k, "C": c,
        "measured_delta": str(measured),
        "delta_used": str(eps),
        "is_extractor": is_extractor,
        "regular_threshold": str(threshold),
        "violations": violations,
        "holds": not violations,
        "elapsed_s": time.monotonic() - t0,
    }


def check_granular_disperser(table: FunctionTable, d: int, g: Fraction,
                             budget: int | None = None) -> dict:
    """Run the degree-d pipeline at delta = 2^-(d+1) G and confirm the
    certified restriction is constant (regular below the granularity floor).

    Granularity is taken up to a constant offset (all values congruent mod G),
    which covers +-1 tables at G = 2.
    """
    t0 = time.monotonic()
    g = Fraction(g)
    vals = table.fractions()
    base = vals[0]
    for v in vals:
        if ((v - base) / g).denominator != 1:
            raise PreconditionViolated("values are not congruent modulo G")
    delta = g / (1 << (d + 1))
    kwargs = {} if budget is None else {"budget": budget}
    res = regularize_bounded_degree(table, d, delta, **kwargs)
    cert = res.certificate
    ok = certificate_verify(table, cert)
    h = compose_linear(table, cert.m)
    fixed = ((1 << table.n) - 1) ^ f2core.coords_to_mask(cert.j)
    restricted = restrict_coords(h, fixed, cert.b)
    mag, _ = wht(restricted).max_nontrivial()
    constant = mag == 0
    return {
        "claim": "granular-disperser",
        "n": table.n, "d": d, "G": str(g), "delta": str(delta),
        "codim": cert.codim,
        "certificate_verified": ok,
        "restriction_constant": constant,
        "holds": ok and constant,
        "elapsed_s": time.monotonic() - t0,
    }
