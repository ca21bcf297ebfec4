"""Hausdorff dimension from the edge-count matrix, and a box-counting cross-check."""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .gds import DEFAULT_DEPTH, GraphDirectedSystem, SeparationReport, verify_equations
from .ifs_model import HomogeneousIFS
from .lattice import Lattice

__all__ = [
    "NotConverged",
    "BudgetExceeded",
    "NotCertified",
    "count_matrix",
    "perron_bracket",
    "spectral_radius",
    "hausdorff_dim",
    "box_count_dim",
    "BoxCount",
    "default_cap",
]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10**6
DEFAULT_CAP = 10**7


class NotConverged(RuntimeError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class NotCertified(ValueError):
    pass


def default_cap() -> int:
    return int(os.environ.get("LIPEQ_ENUM_CAP", DEFAULT_CAP))


def count_matrix(gds: GraphDirectedSystem) -> np.ndarray:
    """``M[u-1, v-1]`` = number of edges ``u -> v``."""
    n = gds.vertex_count
    M = np.zeros((n, n), dtype=np.int64)
    for e in gds.edges:
        M[e.source - 1, e.target - 1] += 1
    return M


def _reach(M) -> np.ndarray:
    reach = (np.asarray(M) > 0) | np.eye(len(M), dtype=bool)
    for _ in range(max(1, int(math.ceil(math.log2(max(len(M), 2)))))):
        reach = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
    return reach


def _irreducible(M: np.ndarray) -> bool:
    return bool(_reach(M).all())


def _components(M) -> list[list[int]]:
    reach = _reach(M)
    mutual = reach & reach.T
    seen, out = set(), []
    for u in range(len(M)):
        if u not in seen:
            comp = [int(v) for v in np.flatnonzero(mutual[u])]
            seen.update(comp)
            out.append(comp)
    return out


def perron_bracket(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """``(lo, hi, iterations)`` with ``lo <= rho(M) <= hi`` and ``hi - lo < tol``."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or (M < 0).any():
        raise ValueError("expected a square nonnegative matrix")
    lo, hi, it = _kernels.power_iterate(M, tol, max_iter)
    if not hi - lo < tol:
        raise NotConverged(f"no convergence in {max_iter} iterations (bracket {lo}, {hi})")
    return lo, hi, it


def spectral_radius(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Perron root by power iteration; error below ``tol``."""
    M = np.asarray(M, dtype=np.float64)
    if _irreducible(M):
        lo, hi, _ = perron_bracket(M, tol, max_iter)
        return (lo + hi) / 2
    # The Perron vector may vanish somewhere; take the largest root over the components.
    warnings.warn("matrix is reducible; using its strongly connected components", RuntimeWarning)
    best = 0.0
    for comp in _components(M):
        block = M[np.ix_(comp, comp)]
        if block.any():
            lo, hi, _ = perron_bracket(block, tol, max_iter)
            best = max(best, (lo + hi) / 2)
    return best


def _weighted_matrix(gds: GraphDirectedSystem, s: float) -> np.ndarray:
    lam = float(gds.lam)
    n = gds.vertex_count
    M = np.zeros((n, n))
    for e in gds.edges:
        M[e.source - 1, e.target - 1] += lam ** (s * e.exponent)
    return M


def hausdorff_dim(gds: GraphDirectedSystem, tol: float = DEFAULT_TOL,
                  separation: SeparationReport | None = None, depth: int = DEFAULT_DEPTH) -> float:
    """Dimension of the attractors of a separation-certified system.

    Homogeneous graphs give ``log rho / log(1/lam)``; graphs with edges of
    ratio ``lam^k`` (k > 1) solve ``rho(M(s)) = 1`` for
    ``M(s)[u,v] = sum lam^(s k_e)`` by bisection.
    """
    if separation is None:
        separation = verify_equations(gds, depth=depth).separation
    if not separation.certified:
        raise NotCertified("strong separation is not certified; dimension formula does not apply")
    if gds.homogeneous():
        return math.log(spectral_radius(count_matrix(gds), tol)) / math.log(1 / float(gds.lam))

    def excess(s):
        return spectral_radius(_weighted_matrix(gds, s), tol) - 1.0

    lo, hi = 0.0, 1.0
    while excess(hi) > 0:
        lo, hi = hi, 2 * hi
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


@dataclass
class BoxCount:
    counts: list[int]
    slope: float
    lam: float

    def to_dict(self) -> dict:
        return {"counts": {str(k): n for k, n in enumerate(self.counts, start=1)},
                "slope": float(f"{self.slope:.12g}")}


def box_count_dim(ifs: HomogeneousIFS, depth: int, cap: int | None = None) -> BoxCount:
    """Distinct cylinder counts ``N_1..N_depth`` and the slope of ``log N_k`` against ``k log(1/lam)``.

    Cylinders are deduplicated by exact lower-corner equality; coincidences
    are exactly the complete overlaps.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    cap = default_cap() if cap is None else cap
    if ifs.m**depth > cap:
        raise BudgetExceeded(f"{ifs.m}^{depth} words exceed the enumeration cap {cap}")
    lat = Lattice(ifs)
    counts = [int(lat.level(k).shape[0]) for k in range(1, depth + 1)]
    ks = np.arange(1, depth + 1) * math.log(1 / float(ifs.lam))
    slope = float(np.polyfit(ks, np.log(counts), 1)[0])
    return BoxCount(counts, slope, float(ifs.lam))
