"""Symbolic coding of graph-directed attractors and the induced bi-Lipschitz map.

A point of ``F_u`` is coded by an infinite admissible edge sequence starting at
``u``; finite prefixes are represented exactly by the cylinder box they
determine.  Two systems with the same ratio-labelled graph share the coding
space, so ``Pi_G o Pi_F^{-1}`` is evaluated by transporting edge words through
an edge bijection.

Distances are taken in the max norm, which keeps every certified constant
rational (in 1D this is the usual distance).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import Affine, poly_compose_affine
from .gds import (
    DEFAULT_DEPTH,
    CoverCache,
    GraphDirectedSystem,
    edge_bijection,
    is_isomorphism,
    signature,
    verify_equations,
)
from .ifs_model import Box
from .lattice import Lattice

__all__ = [
    "EdgeWord",
    "BilipCertificate",
    "BilipReport",
    "NotAdmissible",
    "NotSeparated",
    "SignatureMismatch",
    "DistortionViolation",
    "AmbiguousAtDepth",
    "PointNotInSet",
    "word_affine",
    "pi_eval",
    "bilip_constants",
    "map_word",
    "bilip_map",
    "sample_bilip_check",
    "random_word",
    "repeat_loop",
    "locate",
]


class NotAdmissible(ValueError):
    pass


class NotSeparated(ValueError):
    pass


class SignatureMismatch(ValueError):
    pass


class DistortionViolation(AssertionError):
    def __init__(self, pair, ratio):
        super().__init__(f"distortion bound violated by {pair} (ratio {ratio})")
        self.pair = pair
        self.ratio = ratio


class AmbiguousAtDepth(ValueError):
    pass


class PointNotInSet(ValueError):
    pass


@dataclass(frozen=True)
class EdgeWord:
    """Finite admissible edge sequence; edges are indices into ``gds.edges``."""

    start: int
    edges: tuple[int, ...] = ()

    def __len__(self):
        return len(self.edges)

    def extend(self, edge_id: int) -> "EdgeWord":
        return EdgeWord(self.start, self.edges + (edge_id,))


def check_admissible(gds: GraphDirectedSystem, word: EdgeWord):
    if not 1 <= word.start <= gds.vertex_count:
        raise NotAdmissible(f"start vertex {word.start} out of range")
    at = word.start
    for pos, eid in enumerate(word.edges):
        if not 0 <= eid < len(gds.edges):
            raise NotAdmissible(f"unknown edge id {eid}")
        e = gds.edges[eid]
        if e.source != at:
            raise NotAdmissible(f"edge {eid} at position {pos} leaves {e.source}, expected {at}")
        at = e.target


def word_affine(gds: GraphDirectedSystem, word: EdgeWord) -> Affine:
    check_admissible(gds, word)
    acc = Affine.identity(gds.dim)
    for eid in word.edges:
        acc = poly_compose_affine(acc, gds.edges[eid].map)
    return acc


def pi_eval(gds: GraphDirectedSystem, word: EdgeWord) -> Box:
    """Box ``f_{e1} o ... o f_{ek}([0,1]^d)`` containing every point coded by an extension of ``word``."""
    f = word_affine(gds, word)
    return Box(f.shift, tuple(s + f.scale for s in f.shift))


def repeat_loop(gds: GraphDirectedSystem, vertex: int, word: Sequence[int], times: int) -> EdgeWord:
    """Repeat the self-loop at ``vertex`` whose IFS word is ``word``."""
    word = tuple(word)
    for i in gds.out_edges(vertex):
        e = gds.edges[i]
        if e.target == vertex and e.word == word:
            return EdgeWord(vertex, (i,) * times)
    raise NotAdmissible(f"no self-loop at {vertex} via {word}")


def _linf(p, q) -> Fraction:
    return max(abs(a - b) for a, b in zip(p, q))


@dataclass(frozen=True)
class BilipCertificate:
    c_star: Fraction
    c_upper: Fraction
    depth_used: int
    c: Fraction = field(init=False)

    def __post_init__(self):
        if not 0 < self.c_star <= self.c_upper:
            raise ValueError("need 0 < c_star <= c_upper")
        object.__setattr__(self, "c", self.c_upper / self.c_star)

    def to_dict(self) -> dict:
        return {k: {"exact": str(v), "decimal": f"{float(v):.12g}"}
                for k, v in (("c_star", self.c_star), ("c_upper", self.c_upper), ("c", self.c))} | {
            "depth_used": self.depth_used}


def _hull_linf_diameter(gds: GraphDirectedSystem, r: int) -> Fraction:
    lat = Lattice(gds.ifs)
    rows = lat.level(r)
    S = lat.scale(r)
    span = max(int(rows[:, c].max()) - int(rows[:, c].min()) for c in range(gds.dim))
    return Fraction(span + lat.side(r), S)


def bilip_constants(gds_f: GraphDirectedSystem, gds_g: GraphDirectedSystem,
                    depth: int = DEFAULT_DEPTH) -> BilipCertificate:
    """Rational ``c_star`` (sibling gap lower bound) and ``c_upper`` (diameter upper bound).

    Both bounds hold simultaneously for the two systems, so
    ``c_upper / c_star`` bounds the distortion of the coding map both ways.
    """
    if signature(gds_f) != signature(gds_g):
        raise SignatureMismatch("systems have different ratio-labelled graphs")
    gaps, diams = [], []
    for g in (gds_f, gds_g):
        rep = verify_equations(g, depth=depth)
        if not (rep.equations_hold and rep.separation.certified):
            raise NotSeparated(f"separation not certified at depth {depth}")
        gaps.append(rep.separation.min_gap)
        diams.append(_hull_linf_diameter(g, rep.resolution))
    return BilipCertificate(min(gaps), max(diams), depth)


def _checked_edge_map(gds_f, gds_g, matching) -> dict[int, int]:
    if not is_isomorphism(gds_f, gds_g, matching):
        raise SignatureMismatch("vertex matching is not a ratio-preserving isomorphism")
    return edge_bijection(gds_f, gds_g, matching)


def map_word(gds_f: GraphDirectedSystem, gds_g: GraphDirectedSystem, matching: dict[int, int],
             word: EdgeWord, edge_map: dict[int, int] | None = None) -> EdgeWord:
    """Transport an admissible F-word to the corresponding G-word."""
    check_admissible(gds_f, word)
    if edge_map is None:
        edge_map = _checked_edge_map(gds_f, gds_g, matching)
    return EdgeWord(matching[word.start], tuple(edge_map[e] for e in word.edges))


def bilip_map(gds_f, gds_g, matching, word: EdgeWord, edge_map=None) -> Box:
    """Box in G enclosing the image of the points coded by ``word`` in F."""
    return pi_eval(gds_g, map_word(gds_f, gds_g, matching, word, edge_map))


def random_word(gds: GraphDirectedSystem, start: int, length: int, rng: random.Random) -> EdgeWord:
    edges = []
    at = start
    for _ in range(length):
        eid = rng.choice(gds.out_edges(at))
        edges.append(eid)
        at = gds.edges[eid].target
    return EdgeWord(start, tuple(edges))


@dataclass
class BilipReport:
    pairs: int
    depth: int
    seed: int
    violations: list
    max_ratio: Fraction
    round_trip_ok: bool

    def to_dict(self) -> dict:
        return {
            "pairs": self.pairs,
            "depth": self.depth,
            "seed": self.seed,
            "violations": len(self.violations),
            "max_distortion": {"exact": str(self.max_ratio), "decimal": f"{float(self.max_ratio):.12g}"},
            "round_trip_ok": self.round_trip_ok,
        }


def sample_bilip_check(gds_f, gds_g, matching, cert: BilipCertificate, pair_count: int = 500,
                       depth: int = 5, seed: int = 0, raise_on_violation: bool = True) -> BilipReport:
    """Check the distortion bound on deterministic pairs of depth-``depth`` words.

    Box midpoints stand in for points; the half-widths of both boxes are added
    as slack, so a violation can only come from a wrong certificate.
    """
    edge_map = _checked_edge_map(gds_f, gds_g, matching)
    inverse = {v: k for k, v in matching.items()}
    back_map = edge_bijection(gds_g, gds_f, inverse)
    rng = random.Random(seed)
    c = cert.c
    worst = Fraction(1)
    violations = []
    round_trip = True
    for _ in range(pair_count):
        u = rng.randint(1, gds_f.vertex_count)
        x = random_word(gds_f, u, depth, rng)
        y = random_word(gds_f, u, depth, rng)
        while y == x:
            y = random_word(gds_f, u, depth, rng)
        xg = map_word(gds_f, gds_g, matching, x, edge_map)
        yg = map_word(gds_f, gds_g, matching, y, edge_map)
        if map_word(gds_g, gds_f, inverse, xg, back_map) != x or \
                map_word(gds_g, gds_f, inverse, yg, back_map) != y:
            round_trip = False
        bxf, byf = pi_eval(gds_f, x), pi_eval(gds_f, y)
        bxg, byg = pi_eval(gds_g, xg), pi_eval(gds_g, yg)
        d1 = _linf(bxf.midpoint(), byf.midpoint())
        d2 = _linf(bxg.midpoint(), byg.midpoint())
        s1 = (bxf.side + byf.side) / 2
        s2 = (bxg.side + byg.side) / 2
        if d2 > c * (d1 + s1) + s2 or d1 > c * (d2 + s2) + s1:
            violations.append((x, y))
        if d1 > 0 and d2 > 0:
            worst = max(worst, d2 / d1, d1 / d2)
    if violations and raise_on_violation:
        raise DistortionViolation(violations[0], worst)
    return BilipReport(pair_count, depth, seed, violations, worst, round_trip)


def locate(gds: GraphDirectedSystem, vertex: int, point: Sequence, depth: int,
           resolution_depth: int = DEFAULT_DEPTH) -> EdgeWord:
    """Coding prefix of length ``depth`` for an exact rational point of ``P_vertex``.

    At each step the point is pulled back and tested against the sibling
    covers; more than one hit raises :class:`AmbiguousAtDepth`, none raises
    :class:`PointNotInSet`.
    """
    point = tuple(Fraction(x) for x in point)
    cache = CoverCache(gds)
    lat = cache.lattice
    r = cache.resolution(resolution_depth)
    S = lat.scale(r)
    side = lat.side(r)
    word = EdgeWord(vertex)
    y = point
    at = vertex
    for step in range(depth):
        hits = []
        for eid in gds.out_edges(at):
            rows = cache.image(eid, r)
            Y = [c * S for c in y]
            fl = [c.numerator // c.denominator for c in Y]
            ce = [-((-c.numerator) // c.denominator) for c in Y]
            ok = False
            for row in rows.tolist():
                if all(lo <= f and c <= lo + side for lo, f, c in zip(row, fl, ce)):
                    ok = True
                    break
            if ok:
                hits.append(eid)
        if not hits:
            raise PointNotInSet(f"point not in the depth-{r} cover at step {step}")
        if len(hits) > 1:
            raise AmbiguousAtDepth(f"point lies in {len(hits)} sibling covers at step {step}")
        e = gds.edges[hits[0]]
        y = tuple((c - s) / e.map.scale for c, s in zip(y, e.map.shift))
        word = word.extend(hits[0])
        at = e.target
    return word
