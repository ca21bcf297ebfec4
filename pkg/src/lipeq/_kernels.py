"""Numeric inner loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports and ``LIPEQ_DISABLE_NUMBA`` is unset
(or ``0``).  Both paths must return identical results; integer kernels work on
int64 lattice coordinates and are only called when the caller has ruled out
overflow.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_disabled = os.environ.get("LIPEQ_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")
HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _disabled
BACKEND = "numba" if USE_NUMBA else "numpy"


# -- expand_corners: children of every cylinder, new = alpha_i * q^k + p * old

def expand_corners_numpy(corners, alphas, p, qk):
    out = alphas[None, :, :] * qk + p * corners[:, None, :]
    return out.reshape(-1, corners.shape[1])


def min_gap_numpy(a, b, side, chunk=4096):
    """Smallest l-infinity gap between boxes of two sets (0 if any pair meets)."""
    best = -1
    ia = ib = -1
    for start in range(0, a.shape[0], chunk):
        blk = a[start:start + chunk]
        diff = np.abs(blk[:, None, :] - b[None, :, :]) - side
        gap = np.maximum(diff, 0).max(axis=2)
        flat = int(np.argmin(gap))
        i, j = divmod(flat, gap.shape[1])
        g = gap[i, j]
        if best < 0 or g < best:
            best, ia, ib = g, start + i, j
        if best == 0:
            break
    return best, ia, ib


def power_iterate_numpy(M, tol, max_iter):
    """Collatz-Wielandt bracket for the Perron root of nonnegative ``M``.

    Iterates with ``M + I`` (aperiodic, same Perron vector) from a positive
    start; returns ``(lo, hi, iterations)`` with ``lo <= rho(M) <= hi``.
    """
    n = M.shape[0]
    A = M + np.eye(n)
    x = np.ones(n)
    lo, hi = 0.0, np.inf
    for it in range(1, max_iter + 1):
        y = A @ x
        ratios = y / x
        lo, hi = ratios.min() - 1.0, ratios.max() - 1.0
        if hi - lo < tol:
            return lo, hi, it
        x = y / y.max()
    return lo, hi, max_iter


if HAVE_NUMBA:

    @njit(cache=True)
    def expand_corners_numba(corners, alphas, p, qk):
        n, d = corners.shape
        m = alphas.shape[0]
        out = np.empty((n * m, d), dtype=np.int64)
        for r in range(n):
            for i in range(m):
                row = r * m + i
                for c in range(d):
                    out[row, c] = alphas[i, c] * qk + p * corners[r, c]
        return out

    @njit(cache=True)
    def min_gap_numba(a, b, side):
        best = -1
        ia = -1
        ib = -1
        d = a.shape[1]
        for i in range(a.shape[0]):
            for j in range(b.shape[0]):
                g = 0
                for c in range(d):
                    t = abs(a[i, c] - b[j, c]) - side
                    if t > g:
                        g = t
                if best < 0 or g < best:
                    best = g
                    ia = i
                    ib = j
                    if best == 0:
                        return best, ia, ib
        return best, ia, ib

    @njit(cache=True)
    def power_iterate_numba(M, tol, max_iter):
        n = M.shape[0]
        x = np.ones(n)
        y = np.empty(n)
        lo = 0.0
        hi = np.inf
        for it in range(1, max_iter + 1):
            top = 0.0
            lo = np.inf
            hi = -np.inf
            for i in range(n):
                s = x[i]
                for j in range(n):
                    s += M[i, j] * x[j]
                y[i] = s
                r = s / x[i]
                if r < lo:
                    lo = r
                if r > hi:
                    hi = r
                if s > top:
                    top = s
            lo -= 1.0
            hi -= 1.0
            if hi - lo < tol:
                return lo, hi, it
            for i in range(n):
                x[i] = y[i] / top
        return lo, hi, max_iter


def expand_corners(corners, alphas, p, qk):
    if USE_NUMBA and corners.dtype == np.int64:
        return expand_corners_numba(corners, alphas, np.int64(p), np.int64(qk))
    return expand_corners_numpy(corners, alphas, p, qk)


def min_gap(a, b, side):
    if USE_NUMBA and a.dtype == np.int64 and b.dtype == np.int64:
        g, i, j = min_gap_numba(a, b, np.int64(side))
        return int(g), int(i), int(j)
    g, i, j = min_gap_numpy(a, b, side)
    return int(g), int(i), int(j)


def power_iterate(M, tol, max_iter):
    M = np.ascontiguousarray(M, dtype=np.float64)
    if USE_NUMBA:
        lo, hi, it = power_iterate_numba(M, float(tol), int(max_iter))
    else:
        lo, hi, it = power_iterate_numpy(M, tol, max_iter)
    return float(lo), float(hi), int(it)
