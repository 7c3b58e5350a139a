"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen once at import time: set ``F2REG_BACKEND=numpy`` to
force the fallback, ``F2REG_BACKEND=numba`` to require the JIT (raises if
numba is unavailable).  Default is numba when importable.  Exact integer
work runs on int64 arrays only when the caller has certified that no
intermediate can overflow; otherwise callers fall back to object arrays,
which always take the numpy path (Python ints, still exact).
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("F2REG_BACKEND", "").strip().lower()
if _env not in ("", "numba", "numpy"):
    raise ValueError(f"F2REG_BACKEND must be 'numba' or 'numpy', got {_env!r}")

_HAVE_NUMBA = False
if _env != "numpy":
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _env == "numba":
            raise

BACKEND = "numba" if _HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# pure-numpy implementations (also serve object-dtype exact arithmetic)
# ---------------------------------------------------------------------------

def _wht_np(a: np.ndarray) -> None:
    """In-place unnormalized Walsh-Hadamard butterfly along the last axis."""
    m = a.shape[-1]
    h = 1
    while h < m:
        v = a.reshape(-1, m // (2 * h), 2, h)
        x = v[:, :, 0, :].copy()
        y = v[:, :, 1, :]
        v[:, :, 0, :] = x + y
        v[:, :, 1, :] = x - y
        h *= 2


def _subset_xor_np(images: np.ndarray, k: int) -> np.ndarray:
    """Table T of length 2^k with T[y] = XOR of images[i] over the set bits of y."""
    out = np.zeros(1 << k, dtype=np.int64)
    for i in range(k):
        half = 1 << i
        out[half : 2 * half] = out[:half] ^ images[i]
    return out


def _scan_first_regular_np(nums, chart, shifts, thr):
    vals = nums[np.bitwise_xor(shifts[:, None], chart[None, :])]
    _wht_np(vals)
    bad = np.abs(vals[:, 1:]).max(axis=1) if vals.shape[1] > 1 else np.zeros(len(shifts), dtype=vals.dtype)
    hits = np.nonzero(bad <= thr)[0]
    return int(hits[0]) if hits.size else -1


def _scan_first_constant_np(nums, chart, shifts):
    vals = nums[np.bitwise_xor(shifts[:, None], chart[None, :])]
    const = np.all(vals == vals[:, :1], axis=1)
    hits = np.nonzero(const)[0]
    return int(hits[0]) if hits.size else -1


# ---------------------------------------------------------------------------
# numba fast path
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _wht_nb(a):
        m = a.shape[0]
        h = 1
        while h < m:
            for i in range(0, m, 2 * h):
                for j in range(i, i + h):
                    x = a[j]
                    y = a[j + h]
                    a[j] = x + y
                    a[j + h] = x - y
            h *= 2

    @njit(cache=True)
    def _scan_first_regular_nb(nums, chart, shifts, thr):
        m = chart.shape[0]
        buf = np.empty(m, dtype=np.int64)
        for s in range(shifts.shape[0]):
            sh = shifts[s]
            for y in range(m):
                buf[y] = nums[sh ^ chart[y]]
            _wht_nb(buf)
            ok = True
            for y in range(1, m):
                v = buf[y]
                if v < 0:
                    v = -v
                if v > thr:
                    ok = False
                    break
            if ok:
                return s
        return -1

    @njit(cache=True)
    def _scan_first_constant_nb(nums, chart, shifts):
        m = chart.shape[0]
        for s in range(shifts.shape[0]):
            sh = shifts[s]
            v0 = nums[sh ^ chart[0]]
            ok = True
            for y in range(1, m):
                if nums[sh ^ chart[y]] != v0:
                    ok = False
                    break
            if ok:
                return s
        return -1

# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def wht_inplace(a: np.ndarray) -> None:
    """Unnormalized WHT butterfly, in place.  1-D int64/float64/object arrays."""
    if BACKEND == "numba" and a.ndim == 1 and a.dtype in (np.int64, np.float64):
        _wht_nb(a)
    else:
        _wht_np(a)


def subset_xor(images, k: int) -> np.ndarray:
    """XOR-fold table over all 2^k subsets of the given k images (int64)."""
    return _subset_xor_np(np.asarray(images, dtype=np.int64), k)


def scan_first_regular(nums: np.ndarray, chart: np.ndarray, shifts: np.ndarray, thr: int) -> int:
    """First shift index whose chart restriction has all nontrivial unnormalized
    coefficients of magnitude <= thr, or -1."""
    if BACKEND == "numba" and nums.dtype == np.int64:
        return int(_scan_first_regular_nb(nums, chart, shifts, np.int64(thr)))
    return _scan_first_regular_np(nums, chart, shifts, thr)


def scan_first_constant(nums: np.ndarray, chart: np.ndarray, shifts: np.ndarray) -> int:
    """First shift index whose chart restriction is a constant table, or -1."""
    if BACKEND == "numba" and nums.dtype == np.int64:
        return int(_scan_first_constant_nb(nums, chart, shifts))
    return _scan_first_constant_np(nums, chart, shifts)


def weights_table(n: int) -> np.ndarray:
    """Hamming weight of every index in [0, 2^n)."""
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
