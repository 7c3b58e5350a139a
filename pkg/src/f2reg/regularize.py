"""Regularization algorithms and exact brute-force oracles.

Everything exact runs on Fractions (sparse spectra) or on integer
numerators over a common denominator (dense scans), so every threshold
comparison is a pure integer comparison.  The pipeline never trusts a
search result: pigeonhole outcomes and per-iteration invariants are
re-checked from the spectrum and violations raise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels, f2core
from .errors import (
    CapExceeded,
    DegreeMismatch,
    NoCollisionWithinBudget,
    PreconditionViolated,
)
from .f2core import AffineSubspace, Mat2, Subspace
from .restrict import (
    RegularityCertificate,
    affine_to_certificate,
    certificate_verify_sparse,
    fix_single_parity,
)
from .spectrum import (
    FunctionTable,
    SparseSpectrum,
    Spectrum,
    is_regular,
    wht,
)

PIGEONHOLE_BUDGET = 1 << 24
EXHAUSTIVE_FULL_N = 6     # full regularity scans
EXHAUSTIVE_CAPPED_N = 10  # scans with max_codim <= EXHAUSTIVE_CAPPED_CODIM
EXHAUSTIVE_CAPPED_CODIM = 3
MIN_CERT_CAP_N = 14


def _as_sparse(f: FunctionTable | SparseSpectrum) -> SparseSpectrum:
    if isinstance(f, SparseSpectrum):
        return f
    return SparseSpectrum.from_table(f)


# ---------------------------------------------------------------------------
# greedy density increment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GreedyResult:
    subspace: AffineSubspace
    restricted: FunctionTable
    fixed_parities: tuple[tuple[int, int], ...]  # (parity in original coords, bit)
    trace: tuple[dict, ...]

    @property
    def codim(self) -> int:
        return len(self.fixed_parities)

    def certificate(self, delta: Fraction) -> RegularityCertificate:
        return affine_to_certificate(self.subspace, Fraction(delta))

    def report(self) -> dict:
        return {
            "algorithm": "greedy",
            "codim": self.codim,
            "steps": list(self.trace),
            "subspace": self.subspace.to_text(),
        }


def greedy_regularize(table: FunctionTable, delta: Fraction) -> GreedyResult:
    """Fix the largest violating parity with the mean-increasing sign until
    delta-regular; terminates within 1/delta steps on bounded tables."""
    delta = Fraction(delta)
    if delta <= 0:
        raise PreconditionViolated("greedy needs delta > 0")
    if not table.is_exact():
        raise PreconditionViolated("greedy regularization works on exact tables")
    n = table.n
    survivors = list(range(n))
    fixed: list[tuple[int, int]] = []
    trace: list[dict] = []
    cur = table
    max_steps = math.ceil(1 / delta) + 1
    for _ in range(max_steps + 1):
        spec = wht(cur)
        res = is_regular(spec, delta)
        if res.regular:
            break
        gamma = res.witness
        coeff = spec.coeff(gamma)
        mean = spec.coeff(0)
        if mean >= 0:
            bit = 0 if coeff > 0 else 1
        else:
            bit = 0 if coeff < 0 else 1
        new_mean = mean + (coeff if bit == 0 else -coeff)
        assert abs(new_mean) == abs(mean) + abs(coeff), "mean increment identity failed"
        gamma_orig = f2core.embed_bits(gamma, survivors)
        fixed.append((gamma_orig, bit))
        trace.append({
            "gamma": f2core.vec_to_str(gamma_orig, n),
            "bit": bit,
            "coeff": str(coeff),
            "mean_before": str(mean),
            "mean_after": str(new_mean),
        })
        p = (gamma & -gamma).bit_length() - 1
        cur = fix_single_parity(cur, gamma, bit)
        survivors = [s for i, s in enumerate(survivors) if i != p]
    else:
        raise AssertionError("greedy failed to terminate within the 1/delta bound")
    u = f2core.solve_constraints(n, fixed) if fixed else AffineSubspace(f2core.full_space(n), 0)
    return GreedyResult(u, cur, tuple(fixed), tuple(trace))


# ---------------------------------------------------------------------------
# partition refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    n: int
    parts: tuple[tuple[AffineSubspace, FunctionTable], ...]
    potential_trace: tuple[Fraction, ...]
    rounds: int

    def mass_check(self) -> bool:
        return sum(1 << u.dim for u, _ in self.parts) == 1 << self.n

    def report(self) -> dict:
        return {
            "algorithm": "partition",
            "rounds": self.rounds,
            "parts": len(self.parts),
            "codims": [u.codim for u, _ in self.parts],
            "potential": [str(p) for p in self.potential_trace],
        }


def partition_regularize(table: FunctionTable, delta: Fraction) -> Partition:
    """Refine the trivial partition by splitting every irregular part at its
    witness parity until at most a delta mass-fraction of parts is irregular."""
    delta = Fraction(delta)
    if not (0 < delta <= 1):
        raise PreconditionViolated("partition needs 0 < delta <= 1")
    if not table.is_exact():
        raise PreconditionViolated("partition regularization works on exact tables")
    for v in table.fractions():
        if not 0 <= v <= 1:
            raise PreconditionViolated("partition needs [0,1]-valued tables")
    n = table.n
    # part state: (constraints, survivors, table)
    parts: list[tuple[tuple[tuple[int, int], ...], tuple[int, ...], FunctionTable]] = [
        ((), tuple(range(n)), table)
    ]
    total = Fraction(1 << n)
    potentials: list[Fraction] = []
    max_rounds = math.ceil(1 / delta**3) + 1
    rounds = 0
    for _ in range(max_rounds + 1):
        specs = [wht(t) for _, _, t in parts]
        phi = sum((Fraction(1 << t.n) / total) * specs[i].coeff(0) ** 2
                  for i, (_, _, t) in enumerate(parts))
        potentials.append(phi)
        bad = []
        for i, spec in enumerate(specs):
            res = is_regular(spec, delta)
            if not res.regular:
                bad.append((i, res.witness, spec.coeff(res.witness)))
        bad_mass = sum(Fraction(1 << parts[i][2].n) / total for i, _, _ in bad)
        if bad_mass <= delta:
            break
        new_parts = list(parts)
        for i, gamma, _ in bad:
            constraints, survivors, t = parts[i]
            gamma_orig = f2core.embed_bits(gamma, survivors)
            p = (gamma & -gamma).bit_length() - 1
            sub_surv = tuple(s for k, s in enumerate(survivors) if k != p)
            halves = []
            for bit in (0, 1):
                halves.append((constraints + ((gamma_orig, bit),), sub_surv,
                               fix_single_parity(t, gamma, bit)))
            new_parts[i] = halves[0]
            new_parts.append(halves[1])
        parts = new_parts
        rounds += 1
    else:
        raise AssertionError("partition failed to settle within the 1/delta^3 bound")
    # potential must have increased by >= delta^3 on every executed round
    for a, b in zip(potentials, potentials[1:]):
        assert b - a >= delta**3, "potential increment below delta^3"
    out = []
    for constraints, _, t in parts:
        u = (f2core.solve_constraints(n, constraints) if constraints
             else AffineSubspace(f2core.full_space(n), 0))
        out.append((u, t))
    return Partition(n, tuple(out), tuple(potentials), rounds)


# ---------------------------------------------------------------------------
# pigeonhole step
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PigeonholeOutcome:
    s: tuple[int, ...]
    z: tuple[int, ...]  # +-1 aligned with s
    gammas: tuple[int, ...]
    sums: tuple[Fraction, ...]

    def sign(self, j: int) -> int:
        return self.z[self.s.index(j)]


def _coeff_getter(g):
    if isinstance(g, SparseSpectrum):
        return g.coeff
    if isinstance(g, Spectrum):
        return g.coeff
    raise TypeError("expected Spectrum or SparseSpectrum")


def pigeonhole_step(g: Spectrum | SparseSpectrum, k_coords: Sequence[int],
                    t_coords: Sequence[int], tau: Fraction, d: int,
                    budget: int = PIGEONHOLE_BUDGET) -> PigeonholeOutcome:
    """Find an even signed subset S of T whose coefficient sums over all
    weight-(d-1) gammas in span(K) are each at most tau in magnitude.

    Buckets the interval vectors of a_U = g^(gamma) + sum_{j in U} g^(gamma+e_j)
    over even subsets U in increasing size; the first same-bucket collision
    yields S = U xor U'.  The returned outcome is re-checked from the
    spectrum before being trusted.
    """
    tau = Fraction(tau)
    if tau <= 0:
        raise PreconditionViolated("tau must be positive")
    kset = set(k_coords)
    if kset & set(t_coords):
        raise PreconditionViolated("K and T overlap")
    coeff = _coeff_getter(g)
    gammas = [f2core.coords_to_mask(c) for c in itertools.combinations(sorted(kset), d - 1)]
    base = [coeff(gm) for gm in gammas]
    adds = {j: [coeff(gm | (1 << j)) for gm in gammas] for j in t_coords}
    top = math.ceil(Fraction(2) / tau) - 1

    def bucket(vec: list[Fraction]) -> tuple[int, ...]:
        out = []
        for a in vec:
            idx = math.floor((a + 1) / tau)
            out.append(min(max(idx, 0), top))
        return tuple(out)

    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    tried = 0
    t_list = list(t_coords)
    for size in range(0, len(t_list) + 1, 2):
        for u in itertools.combinations(t_list, size):
            if tried >= budget:
                raise NoCollisionWithinBudget(
                    f"no collision within {budget} subsets (|T|={len(t_list)})")
            tried += 1
            vec = list(base)
            for j in u:
                aj = adds[j]
                for i in range(len(vec)):
                    vec[i] += aj[i]
            key = bucket(vec)
            if key in seen:
                other = seen[key]
                s = tuple(sorted(set(u) ^ set(other)))
                zs = tuple(1 if j in u else -1 for j in s)
                sums = tuple(
                    sum(adds[j][i] * z for j, z in zip(s, zs))
                    for i in range(len(gammas))
                )
                if all(abs(v) <= tau for v in sums) and len(s) >= 2 and len(s) % 2 == 0:
                    return PigeonholeOutcome(s, zs, tuple(gammas), sums)
                # clamped-edge near-miss: keep searching
            else:
                seen[key] = u
    raise NoCollisionWithinBudget(
        f"exhausted all even subsets of |T|={len(t_list)} without a valid collision")


# ---------------------------------------------------------------------------
# top-level shrink (iterative pigeonhole)
# ---------------------------------------------------------------------------

def _lift_matrix(n: int, positions: Sequence[int], m_small: Mat2) -> Mat2:
    """Extend a matrix on the given coordinate positions by the identity."""
    pos = list(positions)
    rows = [1 << r for r in range(n)]
    for i, p in enumerate(pos):
        row = 0
        small = m_small.rows[i]
        while small:
            low = small & -small
            row |= 1 << pos[low.bit_length() - 1]
            small ^= low
        rows[p] = row
    return Mat2(n, tuple(rows))


def _t_need(m: int, tau: Fraction, limit: int) -> int | None:
    """Smallest t with 2^t >= (5/tau)^m, or None when it exceeds limit."""
    target = (Fraction(5) / tau) ** m
    num, den = target.numerator, target.denominator
    t = 0
    val = den
    while val < num:
        val <<= 1
        t += 1
        if t > limit:
            return None
    return t


@dataclass(frozen=True)
class ShrinkResult:
    m: Mat2
    j: tuple[int, ...]       # original coordinate ids kept alive (the set K)
    b: int                   # fixing vector on the complement, original coords
    final: SparseSpectrum    # restricted spectrum over the compacted alive set
    trace: tuple[dict, ...]
    tau: Fraction
    d: int

    def report(self) -> dict:
        return {
            "algorithm": "shrink",
            "d": self.d,
            "tau": str(self.tau),
            "alive": list(self.j),
            "iterations": list(self.trace),
        }


def _check_shrink_invariant(spec: SparseSpectrum, k_cur_mask: int, tau: Fraction, d: int) -> None:
    for gm, v in spec.coeffs.items():
        w = f2core.weight(gm)
        if w > d and v != 0:
            raise AssertionError("shrink invariant: mass above degree d")
        if w == d and (gm & ~k_cur_mask) == 0 and abs(v) > tau:
            raise AssertionError("shrink invariant: level-d coefficient in span(K) above tau")


def shrink_top_level(f: FunctionTable | SparseSpectrum, tau: Fraction, d: int,
                     budget: int = PIGEONHOLE_BUDGET) -> ShrinkResult:
    """Iteratively build (M, J, b) so that the restriction of f o M has all
    level-d coefficients at most tau and nothing above level d.

    Follows the invariant-preserving iteration: each round pigeonholes over
    fresh coordinates, merges the signed subset into one kept coordinate via
    an involution, and fixes the rest of the subset.  When the guarantee
    threshold for |T| cannot be met the round is still attempted with the
    available coordinates and the loop stops at the first failed search.
    """
    tau = Fraction(tau)
    if not (0 < tau < 1):
        raise PreconditionViolated("shrink needs tau in (0,1)")
    spec = _as_sparse(f)
    n = spec.n
    if spec.degree() > d:
        raise DegreeMismatch(f"degree {spec.degree()} exceeds d={d}")
    alive = list(range(n))
    k_orig = alive[: max(d - 1, 0)]
    m_total = Mat2.identity(n)
    b_total = 0
    trace: list[dict] = []
    iteration = 0
    while True:
        cur_index = {c: i for i, c in enumerate(alive)}
        k_cur = [cur_index[c] for c in k_orig]
        avail = [c for c in alive if c not in k_orig]
        m_vec = math.comb(len(k_orig), d - 1)
        need = _t_need(m_vec, tau, limit=4 * n + 64)
        guaranteed = need is not None and len(avail) >= need
        t_orig = avail[:need] if (need is not None and need <= len(avail)) else avail
        if len(t_orig) < 2:
            break
        t_cur = [cur_index[c] for c in t_orig]
        try:
            out = pigeonhole_step(spec, k_cur, t_cur, tau, d, budget=budget)
        except NoCollisionWithinBudget:
            if guaranteed:
                raise
            break
        iteration += 1
        pivot = out.s[0]
        signs = dict(zip(out.s, out.z))
        if signs[pivot] == -1:
            signs = {j: -z for j, z in signs.items()}
        smask = f2core.coords_to_mask(out.s)
        # involution on current coords: e_pivot -> sum of e_j over S
        rows = []
        for r in range(len(alive)):
            row = 1 << r
            if r != pivot and (smask >> r) & 1:
                row |= 1 << pivot
            rows.append(row)
        m_i = Mat2(len(alive), tuple(rows))
        j_i_cur = [j for j in out.s if j != pivot]
        b_i_cur = 0
        for j in j_i_cur:
            if signs[j] == -1:
                b_i_cur |= 1 << j
        spec = spec.compose_matrix(m_i).restrict_coords(f2core.coords_to_mask(j_i_cur), b_i_cur)
        m_total = m_total.mul(_lift_matrix(n, alive, m_i))
        for j in j_i_cur:
            if (b_i_cur >> j) & 1:
                b_total |= 1 << alive[j]
        consumed = [alive[j] for j in j_i_cur]
        k_orig = k_orig + [alive[pivot]]
        old_alive = alive
        alive = [c for c in alive if c not in consumed]
        # re-check the maintained invariant, never trust the search
        cur_index = {c: i for i, c in enumerate(alive)}
        k_mask = f2core.coords_to_mask(cur_index[c] for c in k_orig)
        _check_shrink_invariant(spec, k_mask, tau, d)
        trace.append({
            "iteration": iteration,
            "kept_original": k_orig[-1],
            "subset_original": [old_alive[j] for j in out.s],
            "signs": [signs[j] for j in out.s],
            "fixed_count": len(consumed),
            "subset_size": len(out.s),
            "guaranteed": guaranteed,
            "invariant_ok": True,
        })
    # fix every remaining non-K coordinate to zero
    rest = [c for c in alive if c not in k_orig]
    if rest:
        cur_index = {c: i for i, c in enumerate(alive)}
        spec = spec.restrict_coords(f2core.coords_to_mask(cur_index[c] for c in rest), 0)
        alive = [c for c in alive if c in k_orig]
    k_mask = (1 << len(alive)) - 1
    _check_shrink_invariant(spec, k_mask, tau, d)
    return ShrinkResult(m_total, tuple(sorted(k_orig)), b_total, spec, tuple(trace), tau, d)


def shrink_size_bound(n: int, tau: Fraction, d: int) -> tuple[bool, float]:
    """(applicable, bound): the promised |J| lower bound (d/4e)(n/log2(5/tau))^(1/d),
    applicable only when tau >= 5 * 2^(-n/(4e)^d)."""
    tau_f = float(tau)
    threshold = 5.0 * 2.0 ** (-n / (4 * math.e) ** d)
    bound = (d / (4 * math.e)) * (n / math.log2(5 / tau_f)) ** (1 / d)
    return tau_f >= threshold, bound


# ---------------------------------------------------------------------------
# main degree-d recursion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegreeRegResult:
    certificate: RegularityCertificate
    verified: bool
    shrink_traces: tuple[dict, ...]
    levels: int

    def report(self) -> dict:
        return {
            "algorithm": "degree-d",
            "levels": self.levels,
            "verified": self.verified,
            "codim": self.certificate.codim,
            "shrink": list(self.shrink_traces),
        }


def regularize_bounded_degree(f: FunctionTable | SparseSpectrum, d: int,
                              delta: Fraction,
                              budget: int = PIGEONHOLE_BUDGET) -> DegreeRegResult:
    """Degree-d regularization: shrink the top level, split off the level-d
    residue, recurse on the scaled lower part, and re-verify the composed
    certificate exactly."""
    delta = Fraction(delta)
    if not (0 < delta < 1):
        raise PreconditionViolated("delta must lie in (0,1)")
    spec = _as_sparse(f)
    n = spec.n
    if spec.degree() > max(d, 0):
        raise DegreeMismatch(f"degree {spec.degree()} exceeds d={d}")
    cert, traces, levels = _regularize_rec(spec, d, delta, budget)
    ok = certificate_verify_sparse(spec, cert)
    if not ok:
        raise AssertionError("composed certificate failed verification")
    return DegreeRegResult(cert, ok, tuple(traces), levels)


def _regularize_rec(spec: SparseSpectrum, d: int, delta: Fraction,
                    budget: int) -> tuple[RegularityCertificate, list[dict], int]:
    n = spec.n
    if d <= 0 or spec.degree() == 0:
        cert = RegularityCertificate(n, Mat2.identity(n), tuple(range(n)), 0, delta)
        return cert, [], 0
    if d == 1:
        sh = shrink_top_level(spec, delta, 1, budget=budget)
        cert = RegularityCertificate(n, sh.m, sh.j, sh.b, delta)
        return cert, [sh.report()], 1
    tau = delta / (3 * Fraction(n) ** d)
    sh = shrink_top_level(spec, tau, d, budget=budget)
    p = sh.final
    p_below = p.level_below(d)
    scale = 1 / (1 + delta / 3)
    inner = p_below.scale(scale)
    sub_cert, sub_traces, sub_levels = _regularize_rec(inner, d - 1, delta / 3, budget)
    positions = sorted(sh.j)
    m_final = sh.m.mul(_lift_matrix(n, positions, sub_cert.m))
    j_final = tuple(sorted(positions[i] for i in sub_cert.j))
    b_final = sh.b | f2core.embed_bits(sub_cert.b, positions)
    cert = RegularityCertificate(n, m_final, j_final, b_final, delta)
    return cert, [sh.report()] + sub_traces, sub_levels + 1


# ---------------------------------------------------------------------------
# exact oracles
# ---------------------------------------------------------------------------

def _check_scan_cap(n: int, limit: int, force: bool) -> None:
    if force:
        return
    if n <= EXHAUSTIVE_FULL_N:
        return
    if n <= EXHAUSTIVE_CAPPED_N and limit <= EXHAUSTIVE_CAPPED_CODIM:
        return
    raise CapExceeded(
        f"exhaustive scan at n={n}, max_codim={limit} exceeds the default caps")


def _canonical_shifts(v: Subspace) -> np.ndarray:
    free = [q for q in range(v.n) if q not in set(v.pivots)]
    return _kernels.subset_xor([1 << q for q in free], len(free))


def _int64_ready(table: FunctionTable, k: int) -> bool:
    return (table.is_exact() and table.nums.dtype == np.int64
            and int(np.abs(table.nums).max(initial=0)) << k < (1 << 62))


def _regular_threshold(table: FunctionTable, k: int, delta: Fraction) -> int:
    thr = (delta.numerator * (table.den << k)) // delta.denominator
    return min(thr, (1 << 62))


def scan_subspace_for_regular(table: FunctionTable, v: Subspace,
                              delta: Fraction) -> int | None:
    """First canonical shift making f restricted to shift+V delta-regular, or None."""
    k = v.dim
    shifts = _canonical_shifts(v)
    chart = _kernels.subset_xor(v.basis, k)
    if _int64_ready(table, k):
        idx = _kernels.scan_first_regular(table.nums, chart, shifts,
                                          _regular_threshold(table, k, delta))
        return int(shifts[idx]) if idx >= 0 else None
    for sh in shifts:
        vals = table.nums[chart ^ int(sh)]
        sub = FunctionTable(k, vals, table.den, table.scalar, table.range_tag)
        if is_regular(wht(sub), delta).regular:
            return int(sh)
    return None


def scan_subspace_for_constant(table: FunctionTable, v: Subspace) -> int | None:
    """First canonical shift on which f is constant, or None."""
    chart = _kernels.subset_xor(v.basis, v.dim)
    shifts = _canonical_shifts(v)
    if table.is_exact() and table.nums.dtype == np.int64:
        idx = _kernels.scan_first_constant(table.nums, chart, shifts)
        return int(shifts[idx]) if idx >= 0 else None
    for sh in shifts:
        vals = table.nums[chart ^ int(sh)]
        first = vals.flat[0]
        if all(x == first for x in vals.flat):
            return int(sh)
    return None


def exact_regularity_number(table: FunctionTable, delta: Fraction,
                            max_codim: int | None = None,
                            force: bool = False) -> tuple[int, AffineSubspace] | None:
    """Smallest codim c <= max_codim with a delta-regular restriction, with a
    witness subspace; None when no restriction below the cap qualifies."""
    delta = Fraction(delta)
    n = table.n
    limit = n if max_codim is None else min(max_codim, n)
    _check_scan_cap(n, limit, force)
    for c in range(limit + 1):
        for dperp in f2core.enumerate_subspaces(n, c, cap=max(n, f2core.SUBSPACE_ENUM_CAP)):
            v = f2core.orthogonal(dperp)
            sh = scan_subspace_for_regular(table, v, delta)
            if sh is not None:
                return c, AffineSubspace(v, sh)
    return None


def parity_kill(table: FunctionTable, max_codim: int | None = None,
                force: bool = False) -> int | None:
    """Minimum number of parity fixings making f constant (r(f, 0)); None below the cap."""
    n = table.n
    limit = n if max_codim is None else min(max_codim, n)
    _check_scan_cap(n, limit, force)
    for c in range(limit + 1):
        for dperp in f2core.enumerate_subspaces(n, c, cap=max(n, f2core.SUBSPACE_ENUM_CAP)):
            v = f2core.orthogonal(dperp)
            if scan_subspace_for_constant(table, v) is not None:
                return c
    return None


def min_certificate(table: FunctionTable, force: bool = False) -> int:
    """Minimum number of coordinates to fix to make f constant."""
    n = table.n
    if n > MIN_CERT_CAP_N and not force:
        raise CapExceeded(f"min_certificate cap is n <= {MIN_CERT_CAP_N}")
    for s in range(n + 1):
        for fcoords in itertools.combinations(range(n), s):
            survivors = [i for i in range(n) if i not in fcoords]
            chart = _kernels.subset_xor([1 << i for i in survivors], len(survivors))
            shifts = _kernels.subset_xor([1 << i for i in fcoords], s)
            if table.is_exact() and table.nums.dtype == np.int64:
                if _kernels.scan_first_constant(table.nums, chart, shifts) >= 0:
                    return s
            else:
                for sh in shifts:
                    vals = table.nums[chart ^ int(sh)]
                    first = vals.flat[0]
                    if all(x == first for x in vals.flat):
                        return s
    raise AssertionError("unreachable: fixing all coordinates is always constant")
