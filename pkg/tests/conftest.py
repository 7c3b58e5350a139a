"""Shared helpers: independent oracles and seeded generators."""

from fractions import Fraction

import numpy as np
import pytest

from f2reg import f2core
from f2reg.spectrum import FunctionTable, SparseSpectrum


def wht_oracle(table: FunctionTable, gamma: int) -> Fraction:
    """Direct E_x[f(x) (-1)^<gamma,x>], independent of the butterfly."""
    acc = Fraction(0)
    for x in range(table.size):
        v = table.value(x)
        acc += -v if f2core.dot(gamma, x) else v
    return acc / table.size


def random_bounded_table(n: int, seed: int, den: int = 32) -> FunctionTable:
    rng = np.random.default_rng(seed)
    nums = rng.integers(-den, den + 1, size=1 << n)
    return FunctionTable.from_ints(n, nums.tolist(), den, "bounded")


def random_pm1_table(n: int, seed: int) -> FunctionTable:
    rng = np.random.default_rng(seed)
    vals = np.where(rng.integers(0, 2, size=1 << n), 1, -1)
    return FunctionTable.from_ints(n, vals.tolist(), 1, "pm1")


def random_degree_table(n: int, d: int, seed: int, den: int = 128,
                        terms: int = 12) -> FunctionTable:
    """Bounded dyadic table of degree <= d via a sparse random spectrum with
    total coefficient mass at most one."""
    import itertools

    from f2reg.spectrum import inverse_wht

    rng = np.random.default_rng(seed)
    gammas = [0]
    for w in range(1, d + 1):
        gammas += [f2core.coords_to_mask(c) for c in itertools.combinations(range(n), w)]
    idx = rng.choice(len(gammas), size=min(terms, len(gammas)), replace=False)
    coeffs = {}
    budget = den  # sum of |numerators| stays below den, so |f| <= 1
    for i in idx:
        c = int(rng.integers(-budget // 4 - 1, budget // 4 + 2))
        if c and budget - abs(c) >= 0:
            coeffs[gammas[i]] = Fraction(c, den)
            budget -= abs(c)
    if not coeffs:
        coeffs = {0: Fraction(1, den)}
    return inverse_wht(SparseSpectrum.of(n, coeffs).to_spectrum(), "bounded")


def random_subspace(n: int, dim: int, seed: int) -> f2core.Subspace:
    rng = np.random.default_rng(seed)
    while True:
        vecs = [int(rng.integers(1, 1 << n)) for _ in range(dim)]
        s = f2core.rref(n, vecs)
        if s.dim == dim:
            return s


def complement_of(sub: f2core.Subspace) -> f2core.Subspace:
    """Greedy direct-sum complement (independent of complement_of_perp)."""
    basis = list(sub.basis)
    comp = []
    for q in range(sub.n):
        if f2core._rank(basis + [1 << q]) > len(basis):
            basis.append(1 << q)
            comp.append(1 << q)
    return f2core.rref(sub.n, comp)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
