"""Exact integer coordinates for cylinder boxes.

With ``lam = p/q`` and translations over a common denominator ``A``, the lower
corner of any cylinder of length ``r`` is an integer multiple of
``1 / (A q^r)`` and its side is ``A p^r`` in those units.  Sets of
equal-length cylinders therefore become integer arrays, deduplicated and
compared exactly.  Arrays are int64 while the coordinates provably fit and
fall back to object arrays of Python ints otherwise.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from . import _kernels
from .ifs_model import Box, HomogeneousIFS

INT64_SAFE = 2**61


def unique_rows(rows: np.ndarray) -> np.ndarray:
    """Sorted distinct rows."""
    if rows.shape[0] == 0:
        return rows
    if rows.dtype == np.int64:
        return np.unique(rows, axis=0)
    uniq = sorted(set(map(tuple, rows.tolist())))
    out = np.empty((len(uniq), rows.shape[1]), dtype=object)
    for i, row in enumerate(uniq):
        out[i, :] = row
    return out


def row_set(rows: np.ndarray) -> set:
    return set(map(tuple, rows.tolist()))


class Lattice:
    """Integer view of one IFS; ``level(k)`` holds distinct cylinder corners of length ``k``."""

    def __init__(self, ifs: HomogeneousIFS):
        self.ifs = ifs
        self.p = ifs.lam.numerator
        self.q = ifs.lam.denominator
        self.denom = lcm(*(x.denominator for s in ifs.shifts for x in s))
        self.alphas = [tuple(int(x * self.denom) for x in s) for s in ifs.shifts]
        self._levels: dict[int, np.ndarray] = {}

    @property
    def dim(self) -> int:
        return self.ifs.dim

    def scale(self, r: int) -> int:
        return self.denom * self.q**r

    def side(self, r: int) -> int:
        return self.denom * self.p**r

    def fits_int64(self, r: int) -> bool:
        return 4 * self.scale(r) < INT64_SAFE

    def dtype(self, r: int):
        return np.int64 if self.fits_int64(r) else object

    def alpha_array(self, r: int) -> np.ndarray:
        return np.array(self.alphas, dtype=self.dtype(r)).reshape(len(self.alphas), self.dim)

    def word_corner(self, word: Sequence[int], r: int) -> tuple[int, ...]:
        """Lower corner of ``f_word([0,1]^d)`` in units of ``1/scale(r)``."""
        L = len(word)
        if L > r:
            raise ValueError(f"word of length {L} is finer than resolution {r}")
        corner = [0] * self.dim
        for j, i in enumerate(word, start=1):
            self.ifs.check_index(i)
            a = self.alphas[i - 1]
            for c in range(self.dim):
                corner[c] += a[c] * self.p ** (j - 1) * self.q ** (L - j + 1)
        factor = self.q ** (r - L)
        return tuple(x * factor for x in corner)

    def level(self, k: int) -> np.ndarray:
        """Distinct lower corners of all length-``k`` cylinders (sorted rows)."""
        if k in self._levels:
            return self._levels[k]
        if k == 0:
            rows = np.zeros((1, self.dim), dtype=self.dtype(0))
        else:
            prev = self.level(k - 1)
            dtype = self.dtype(k)
            if dtype is object:
                prev = prev.astype(object)
            rows = unique_rows(_kernels.expand_corners(prev, self.alpha_array(k), self.p, self.q**k))
        self._levels[k] = rows
        return rows

    def to_box(self, row, r: int) -> Box:
        S = self.scale(r)
        lo = tuple(Fraction(int(x), S) for x in row)
        s = Fraction(self.side(r), S)
        return Box(lo, tuple(x + s for x in lo))

    def push(self, rows: np.ndarray, word: Sequence[int], r: int) -> np.ndarray:
        """Map corners at resolution ``r - len(word)`` through ``f_word``."""
        corner = self.word_corner(word, r)
        dtype = self.dtype(r)
        rows = rows.astype(dtype) if rows.dtype != dtype else rows
        return np.array(corner, dtype=dtype)[None, :] + (self.p ** len(word)) * rows

    def inside(self, rows: np.ndarray, word: Sequence[int], r: int) -> np.ndarray:
        """Mask of boxes (resolution ``r``) contained in the cylinder of ``word``."""
        lo = np.array(self.word_corner(word, r), dtype=rows.dtype)
        hi = lo + self.side(len(word)) * self.q ** (r - len(word))
        return np.all(rows >= lo, axis=1) & np.all(rows + self.side(r) <= hi, axis=1)

    def min_gap(self, a: np.ndarray, b: np.ndarray, r: int) -> tuple[int, int, int]:
        if a.shape[0] == 0 or b.shape[0] == 0:
            raise ValueError("gap of an empty cover")
        if a.dtype == np.int64 and b.dtype == np.int64:
            return _kernels.min_gap(a, b, self.side(r))
        return _kernels.min_gap(a.astype(object), b.astype(object), self.side(r))
