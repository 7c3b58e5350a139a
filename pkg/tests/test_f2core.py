import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complement_of, random_subspace
from f2reg import f2core
from f2reg.errors import CapExceeded, DimensionMismatch, MapDoesNotCarryBasis, SingularMatrix
from f2reg.f2core import AffineSubspace, Mat2, Subspace


def bits(s):
    return f2core.vec_from_str(s)


def test_rref_spec_examples():
    s = f2core.rref(3, [bits("110"), bits("011")])
    assert [f2core.vec_to_str(b, 3) for b in s.basis] == ["101", "011"]
    assert s.pivots == (0, 1)
    assert f2core.rref(3, []).dim == 0
    e1 = bits("100")
    assert f2core.rref(3, [e1, e1]).basis == (e1,)


def test_rref_idempotent_and_span_preserving():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        vecs = [int(rng.integers(0, 1 << n)) for _ in range(int(rng.integers(0, 5)))]
        s = f2core.rref(n, vecs)
        assert f2core.rref(n, list(s.basis)) == s
        for v in vecs:
            assert s.contains(v)


def test_orthogonal_examples_and_involution():
    s = f2core.rref(3, [bits("100")])
    assert f2core.orthogonal(s) == f2core.rref(3, [bits("010"), bits("001")])
    assert f2core.orthogonal(f2core.full_space(4)).dim == 0
    o = f2core.orthogonal(f2core.rref(3, [bits("111")]))
    # kernel by elimination: the two-dimensional even-weight space
    assert o.dim == 2 and all(f2core.weight(b) % 2 == 0 for b in o.basis)
    for seed in range(20):
        s = random_subspace(6, int(np.random.default_rng(seed).integers(0, 7)), seed)
        assert f2core.orthogonal(f2core.orthogonal(s)) == s
        assert f2core.orthogonal(s).dim == s.codim


@given(st.integers(1, 6), st.data())
@settings(max_examples=60, deadline=None)
def test_orthogonal_pairing_property(n, data):
    vecs = data.draw(st.lists(st.integers(0, (1 << n) - 1), max_size=4))
    s = f2core.rref(n, vecs)
    o = f2core.orthogonal(s)
    for u in o.points():
        for v in s.points():
            assert f2core.dot(u, v) == 0


def test_transform_subspace_fact():
    # M^T applied to (M A)-perp recovers A-perp, exhaustively at small n
    rng = np.random.default_rng(5)
    for n in (3, 4, 6):
        for seed in range(15):
            m = f2core.random_invertible(n, rng)
            a = random_subspace(n, int(rng.integers(0, n + 1)), seed * 31 + n)
            b = f2core.transform_subspace(m, a)
            lhs = f2core.transform_subspace(m.transpose(), f2core.orthogonal(b))
            assert lhs == f2core.orthogonal(a)


def test_transform_requires_invertible():
    singular = Mat2(3, (bits("100"), bits("100"), bits("001")))
    with pytest.raises(SingularMatrix):
        f2core.transform_subspace(singular, f2core.full_space(3))


def test_invert_identity_and_involution():
    assert f2core.invert(Mat2.identity(5)).rows == Mat2.identity(5).rows
    # the shrink iteration map e_p -> sum of e_j over S is an involution
    n, p, smask = 6, 2, 0b101110
    rows = []
    for r in range(n):
        row = 1 << r
        if r != p and (smask >> r) & 1:
            row |= 1 << p
        rows.append(row)
    mi = Mat2(n, tuple(rows))
    assert f2core.invert(mi).rows == mi.rows
    with pytest.raises(SingularMatrix):
        f2core.invert(Mat2(3, (3, 3, 4)))


def test_matrix_mul_apply_consistency():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        a = f2core.random_invertible(n, rng)
        b = f2core.random_invertible(n, rng)
        ab = a.mul(b)
        for x in range(1 << n):
            assert ab.apply(x) == a.apply(b.apply(x))
        inv = f2core.invert(a)
        for x in range(1 << n):
            assert inv.apply(a.apply(x)) == x


def test_direct_sum_check():
    assert f2core.direct_sum_check(f2core.rref(3, [bits("100")]),
                                   f2core.rref(3, [bits("010"), bits("001")]))
    e1 = f2core.rref(2, [bits("10")])
    assert not f2core.direct_sum_check(e1, e1)
    a = f2core.rref(2, [bits("11")])
    b = f2core.rref(2, [bits("01")])
    assert f2core.direct_sum_check(a, b)
    # the two cosets b + A really partition F2^2
    pts = set(AffineSubspace(a, 0).points()) | set(AffineSubspace(a, bits("01")).points())
    assert pts == {0, 1, 2, 3}


def test_cosets_partition_space():
    rng = np.random.default_rng(7)
    for seed in range(10):
        n = 6
        a = random_subspace(n, int(rng.integers(1, 5)), seed)
        b = complement_of(a)
        assert f2core.direct_sum_check(a, b)
        seen = set()
        for shift in b.points():
            coset = set(int(x) ^ shift for x in a.point_array())
            assert not (coset & seen)
            seen |= coset
        assert len(seen) == 1 << n


def test_complement_of_perp():
    # V = span(J), M = I gives W = span(J)
    v = f2core.span_of_coords(4, [0, 2])
    w = f2core.complement_of_perp(v, [0, 2], Mat2.identity(4))
    assert w == v
    # random V of dim 3 in F2^6: |W| = 8 and W independent of V-perp
    rng = np.random.default_rng(13)
    for seed in range(10):
        v = random_subspace(6, 3, seed)
        m = _map_onto_coords(v, (0, 1, 2))
        w = f2core.complement_of_perp(v, (0, 1, 2), m)
        assert w.dim == 3
        assert f2core.direct_sum_check(w, f2core.orthogonal(v))
    with pytest.raises(DimensionMismatch):
        f2core.complement_of_perp(v, (0,), m)
    with pytest.raises(MapDoesNotCarryBasis):
        f2core.complement_of_perp(v, (0, 1, 3), m)


def _map_onto_coords(v: Subspace, coords) -> Mat2:
    """Invertible M with M(basis of V) = {e_j : j in coords}."""
    n = v.n
    cols = {}
    chosen = list(v.basis)
    for c, bvec in zip(coords, v.basis):
        cols[c] = bvec
    for q in range(n):
        if q in cols:
            continue
        for r in range(n):
            if f2core._rank(chosen + [1 << r]) > len(chosen):
                cols[q] = 1 << r
                chosen.append(1 << r)
                break
    rows = []
    for r in range(n):
        row = 0
        for q in range(n):
            if (cols[q] >> r) & 1:
                row |= 1 << q
        rows.append(row)
    inv = Mat2(n, tuple(rows))  # maps e_j -> basis vector
    return f2core.invert(inv)


def test_enumerate_subspaces_counts():
    assert sum(1 for _ in f2core.enumerate_subspaces(4, 0)) == 1
    assert sum(1 for _ in f2core.enumerate_subspaces(4, 2)) == 35
    assert sum(1 for _ in f2core.enumerate_subspaces(3, 1)) == 7
    for n in range(1, 6):
        for k in range(n + 1):
            count = sum(1 for _ in f2core.enumerate_subspaces(n, k))
            assert count == f2core.gaussian_binomial(n, k)
    # no duplicates, all canonical
    seen = set()
    for s in f2core.enumerate_subspaces(4, 2):
        assert s == f2core.rref(4, list(s.basis))
        assert s.basis not in seen
        seen.add(s.basis)
    with pytest.raises(CapExceeded):
        next(f2core.enumerate_subspaces(11, 2))


def test_count_weight_t():
    full = AffineSubspace(f2core.full_space(5), 0)
    for t in range(6):
        assert f2core.count_weight_t(full, t) == math.comb(5, t)
    point = AffineSubspace(f2core.rref(5, []), bits("10110"))
    assert f2core.count_weight_t(point, 3) == 1
    assert f2core.count_weight_t(point, 2) == 0
    rng = np.random.default_rng(17)
    for seed in range(10):
        v = random_subspace(10, 4, seed)
        u = AffineSubspace(v, int(rng.integers(0, 1 << 10)))
        for t in range(11):
            assert f2core.count_weight_t(u, t) <= f2core.weight_count_bound(u.dim, 10, t)


def test_affine_equality_is_pointset_equality():
    rng = np.random.default_rng(19)
    for seed in range(30):
        n = 6
        v = random_subspace(n, int(rng.integers(0, 5)), seed)
        a1 = int(rng.integers(0, 1 << n))
        delta = int(rng.integers(0, 1 << n))
        u1 = AffineSubspace(v, a1)
        u2 = AffineSubspace(v, a1 ^ delta)
        same_points = sorted(u1.points()) == sorted(u2.points())
        assert (u1 == u2) == same_points


def test_subspace_text_roundtrip():
    s = f2core.rref(4, [bits("1010"), bits("0110")])
    assert Subspace.from_text(s.to_text()) == s
    u = AffineSubspace(s, bits("0001"))
    assert AffineSubspace.from_text(u.to_text()) == u
    zero = AffineSubspace(f2core.rref(3, []), bits("101"))
    assert AffineSubspace.from_text(zero.to_text(), n=3) == zero


def test_solve_constraints():
    rng = np.random.default_rng(23)
    for seed in range(25):
        n = 6
        cons = [(int(rng.integers(1, 1 << n)), int(rng.integers(0, 2)))
                for _ in range(int(rng.integers(1, 4)))]
        try:
            u = f2core.solve_constraints(n, cons)
        except f2core.InconsistentConstraints:
            continue
        for x in u.points():
            assert all(f2core.dot(m, x) == b for m, b in cons)
        expect = [x for x in range(1 << n)
                  if all(f2core.dot(m, x) == b for m, b in cons)]
        assert sorted(u.points()) == expect
