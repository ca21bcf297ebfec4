"""Graph-directed systems built on a homogeneous IFS.

Vertices are numbered ``1..n``.  Each vertex carries a :class:`PieceSpec`
(``f_base(K)`` minus some sub-cylinders ``f_u(K)``) and each edge a word in the
IFS maps, so the attractor equation of vertex ``u`` reads
``P_u = union over edges u->v of f_word(P_v)``.  Equations and separation are
verified on exact cylinder covers (see :mod:`lipeq.lattice`).
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .algebra import Affine
from .ifs_model import (
    Box,
    ClassCertificate,
    HomogeneousIFS,
    gamma_signature,
    normalize_right_free,
    validate_class,
    word_map,
)
from .lattice import Lattice, row_set, unique_rows

log = logging.getLogger(__name__)

DEFAULT_DEPTH = 4

__all__ = [
    "PieceSpec",
    "Edge",
    "GraphDirectedSystem",
    "SeparationReport",
    "VerificationReport",
    "Signature",
    "Equivalent",
    "Inconclusive",
    "NotNormalized",
    "EquationMismatch",
    "DisjointnessFailure",
    "relabeling",
    "build_partition_graph",
    "build_custom_graph",
    "verify_equations",
    "signature",
    "decide_equivalence",
    "decide_graph_equivalence",
    "edge_bijection",
    "is_isomorphism",
]


class NotNormalized(ValueError):
    pass


class EquationMismatch(ValueError):
    def __init__(self, vertex: int, depth: int, side: str, witness: Box):
        super().__init__(f"equation of vertex {vertex} fails at depth {depth}: "
                         f"cylinder {witness.lower} present on the {side} only")
        self.vertex = vertex
        self.depth = depth
        self.side = side
        self.witness = witness


class DisjointnessFailure(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class PieceSpec:
    """``f_base(K)`` minus ``f_u(K)`` for each ``u`` in ``minus``."""

    base: tuple[int, ...]
    minus: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "minus", tuple(tuple(u) for u in self.minus))

    def __str__(self):
        def w(word):
            return "f_" + ".".join(map(str, word)) + "(K)" if word else "K"
        return w(self.base) + "".join(" \\ " + w(u) for u in self.minus)


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    word: tuple[int, ...]
    map: Affine

    @property
    def exponent(self) -> int:
        """The edge ratio is ``lam ** exponent``."""
        return len(self.word)


@dataclass(frozen=True)
class GraphDirectedSystem:
    ifs: HomogeneousIFS
    vertex_count: int
    edges: tuple[Edge, ...]
    pieces: tuple[PieceSpec, ...]

    def __post_init__(self):
        if len(self.pieces) != self.vertex_count:
            raise ValueError("one piece per vertex required")
        out = [0] * (self.vertex_count + 1)
        for e in self.edges:
            if not (1 <= e.source <= self.vertex_count and 1 <= e.target <= self.vertex_count):
                raise ValueError(f"edge {e.source}->{e.target} outside 1..{self.vertex_count}")
            if not e.word:
                raise ValueError("edge words must be nonempty")
            out[e.source] += 1
        empty = [u for u in range(1, self.vertex_count + 1) if out[u] == 0]
        if empty:
            raise ValueError(f"vertices without outgoing edges: {empty}")

    @property
    def lam(self) -> Fraction:
        return self.ifs.lam

    @property
    def dim(self) -> int:
        return self.ifs.dim

    def out_edges(self, u: int) -> list[int]:
        return [i for i, e in enumerate(self.edges) if e.source == u]

    def out_degrees(self) -> tuple[int, ...]:
        return tuple(len(self.out_edges(u)) for u in range(1, self.vertex_count + 1))

    def homogeneous(self) -> bool:
        return all(e.exponent == 1 for e in self.edges)

    def to_dict(self) -> dict:
        return {
            "lambda": str(self.lam),
            "dim": self.dim,
            "vertex_count": self.vertex_count,
            "edge_count": len(self.edges),
            "out_degrees": list(self.out_degrees()),
            "pieces": [{"vertex": u, "base": list(p.base), "minus": [list(w) for w in p.minus],
                        "text": str(p)} for u, p in enumerate(self.pieces, start=1)],
            "edges": [{"id": i, "from": e.source, "to": e.target, "word": list(e.word),
                       "ratio": str(e.map.scale), "shift": [str(x) for x in e.map.shift]}
                      for i, e in enumerate(self.edges)],
        }


def _make_edge(ifs: HomogeneousIFS, source: int, target: int, word: Sequence[int]) -> Edge:
    word = tuple(word)
    return Edge(source, target, word, word_map(ifs, word))


def relabeling(cert: ClassCertificate) -> dict[int, int]:
    """Map ``j -> h(j)``: gamma_1 in increasing order first, then gamma_2, ..., gamma_rest."""
    h = {}
    nxt = 1
    groups = [cert.gamma[ell] for ell in range(1, cert.n + 1)] + [cert.gamma_rest]
    for group in groups:
        for j in sorted(group):
            h[j] = nxt
            nxt += 1
    return h


def build_partition_graph(ifs: HomogeneousIFS, cert: ClassCertificate | None = None):
    """The ``m + k1 - 2`` vertex partition of ``K`` used to prove the main theorem.

    ``ifs`` must already have ``f_m`` free (see :func:`normalize_right_free`).
    Returns ``(gds, pieces)``.
    """
    cert = cert or validate_class(ifs)
    m = ifs.m
    if any(i == m - 1 for i, _ in cert.overlaps):
        raise NotNormalized("f_{m-1} overlaps f_m; apply normalize_right_free first")
    k1 = cert.k1
    n_vertices = m + k1 - 2
    h = relabeling(cert)
    pieces: list[PieceSpec | None] = [None] * n_vertices
    edges: list[tuple[int, int, tuple[int, ...]]] = []

    k_of = {i: k for i, k in cert.overlaps}
    for j in range(1, m):
        u = h[j]
        if j in k_of:
            k = k_of[j]
            pieces[u - 1] = PieceSpec((j,), ((j,) + (m,) * (k - 1),))
            targets = range(1, m + k - 2)
        else:
            pieces[u - 1] = PieceSpec((j,))
            targets = range(1, n_vertices + 1)
        edges += [(u, v, (j,)) for v in targets]

    for t in range(k1 - 2):
        u = m + t
        pieces[u - 1] = PieceSpec((m,) * (t + 1), ((m,) * (t + 2),))
        edges += [(u, v, (m,) * (t + 1)) for v in range(1, m)]

    last = n_vertices
    pieces[last - 1] = PieceSpec((m,) * (k1 - 1))
    if k1 >= 3:
        edges += [(last, last - 1, (m,)), (last, last, (m,))]
    else:
        edges += [(last, v, (m,)) for v in range(1, m + 1)]

    edges.sort(key=lambda e: (e[0], e[1]))
    gds = GraphDirectedSystem(
        ifs, n_vertices, tuple(_make_edge(ifs, *e) for e in edges), tuple(pieces)
    )
    return gds, list(pieces)


def build_custom_graph(ifs: HomogeneousIFS, pieces: Sequence[PieceSpec],
                       edges: Iterable[tuple[int, int, Sequence[int]]],
                       depth: int = DEFAULT_DEPTH) -> GraphDirectedSystem:
    """Assemble a user-described partition and verify it.

    Raises :class:`EquationMismatch` if some vertex equation fails on the
    depth-``depth`` covers, :class:`DisjointnessFailure` if the pieces overlap.
    """
    pieces = tuple(p if isinstance(p, PieceSpec) else PieceSpec(*p) for p in pieces)
    edge_objs = tuple(_make_edge(ifs, s, t, w) for s, t, w in edges)
    gds = GraphDirectedSystem(ifs, len(pieces), edge_objs, pieces)
    report = verify_equations(gds, depth=depth)
    if report.mismatch is not None:
        raise report.mismatch
    if not report.partition_disjoint:
        raise DisjointnessFailure("pieces overlap at cover level", report.partition_witness)
    return gds


@dataclass
class SeparationReport:
    status: str  # "Certified" | "UnknownAtDepth"
    depth: int
    resolution: int
    min_gap: Fraction | None = None
    witness: tuple[Box, Box] | None = None
    vertex: int | None = None

    @property
    def certified(self) -> bool:
        return self.status == "Certified"

    def to_dict(self) -> dict:
        d = {"status": self.status, "depth": self.depth, "resolution": self.resolution}
        if self.min_gap is not None:
            d["min_gap"] = {"exact": str(self.min_gap), "decimal": f"{float(self.min_gap):.12g}"}
        if self.witness is not None:
            d["vertex"] = self.vertex
            d["witness"] = [b.as_strings() for b in self.witness]
        return d


@dataclass
class VerificationReport:
    depth: int
    resolution: int
    equations_hold: bool
    mismatch: EquationMismatch | None
    partition_covers: bool
    partition_disjoint: bool
    partition_witness: Box | None
    separation: SeparationReport

    @property
    def ok(self) -> bool:
        return (self.equations_hold and self.partition_covers and self.partition_disjoint
                and self.separation.certified)

    def to_dict(self) -> dict:
        d = {
            "depth": self.depth,
            "resolution": self.resolution,
            "equations_hold": self.equations_hold,
            "partition_covers": self.partition_covers,
            "partition_disjoint": self.partition_disjoint,
            "separation": self.separation.to_dict(),
        }
        if self.mismatch is not None:
            d["mismatch"] = {"vertex": self.mismatch.vertex, "side": self.mismatch.side,
                             "witness": self.mismatch.witness.as_strings()}
        return d


class CoverCache:
    """Exact cylinder covers of the pieces of one system, memoized per resolution."""

    def __init__(self, gds: GraphDirectedSystem, lattice: Lattice | None = None):
        self.gds = gds
        self.lattice = lattice or Lattice(gds.ifs)
        self._covers: dict[tuple[int, int], np.ndarray] = {}
        self._images: dict[tuple[int, int], np.ndarray] = {}

    def cover(self, vertex: int, r: int) -> np.ndarray:
        key = (vertex, r)
        if key not in self._covers:
            piece = self.gds.pieces[vertex - 1]
            L = len(piece.base)
            if L > r:
                raise ValueError(f"resolution {r} coarser than piece base {piece.base}")
            rows = self.lattice.push(self.lattice.level(r - L), piece.base, r)
            for u in piece.minus:
                if len(u) > r:
                    raise ValueError(f"resolution {r} coarser than subtracted word {u}")
                rows = rows[~self.lattice.inside(rows, u, r)]
            self._covers[key] = unique_rows(rows)
        return self._covers[key]

    def image(self, edge_id: int, r: int) -> np.ndarray:
        """Cover of ``f_e(P_target)`` at resolution ``r``."""
        key = (edge_id, r)
        if key not in self._images:
            e = self.gds.edges[edge_id]
            self._images[key] = self.lattice.push(self.cover(e.target, r - e.exponent), e.word, r)
        return self._images[key]

    def resolution(self, depth: int) -> int:
        g = self.gds
        r = depth - 1 + max(e.exponent + len(g.pieces[e.target - 1].base) for e in g.edges)
        # Target covers are built at r - |edge word|; they must still resolve every piece word.
        longest = max((len(w) for p in g.pieces for w in (p.base, *p.minus)), default=0)
        return max(r, longest + max(e.exponent for e in g.edges))


def verify_equations(gds: GraphDirectedSystem, pieces: Sequence[PieceSpec] | None = None,
                     depth: int = DEFAULT_DEPTH, cache: CoverCache | None = None) -> VerificationReport:
    """Check every vertex equation, the partition of ``K`` and sibling separation.

    Covers are compared as exact sets of cylinders at a common resolution
    ``depth - 1 + max(|edge word| + |target base|)``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if pieces is not None and tuple(pieces) != gds.pieces:
        gds = GraphDirectedSystem(gds.ifs, gds.vertex_count, gds.edges, tuple(pieces))
    cache = cache or CoverCache(gds)
    lat = cache.lattice
    r = cache.resolution(depth)

    mismatch = None
    for u in range(1, gds.vertex_count + 1):
        lhs = row_set(cache.cover(u, r))
        rhs: set = set()
        for eid in gds.out_edges(u):
            rhs |= row_set(cache.image(eid, r))
        if lhs != rhs:
            left_only = sorted(lhs - rhs)
            side, row = ("left", left_only[0]) if left_only else ("right", sorted(rhs - lhs)[0])
            mismatch = EquationMismatch(u, depth, side, lat.to_box(row, r))
            break

    all_rows = row_set(lat.level(r))
    union: set = set()
    total = 0
    witness = None
    for u in range(1, gds.vertex_count + 1):
        rows = row_set(cache.cover(u, r))
        if witness is None and union & rows:
            witness = lat.to_box(sorted(union & rows)[0], r)
        union |= rows
        total += len(rows)
    covers = union == all_rows
    disjoint = total == len(union)

    separation = _separation(gds, cache, depth, r)
    report = VerificationReport(depth, r, mismatch is None, mismatch, covers, disjoint,
                                witness, separation)
    log.debug("verify depth=%d resolution=%d ok=%s", depth, r, report.ok)
    return report


def _separation(gds, cache: CoverCache, depth: int, r: int) -> SeparationReport:
    lat = cache.lattice
    best = None
    for u in range(1, gds.vertex_count + 1):
        out = gds.out_edges(u)
        for a_i, ea in enumerate(out):
            for eb in out[a_i + 1:]:
                A, B = cache.image(ea, r), cache.image(eb, r)
                g, ia, ib = lat.min_gap(A, B, r)
                if g == 0:
                    return SeparationReport("UnknownAtDepth", depth, r, Fraction(0),
                                            (lat.to_box(A[ia], r), lat.to_box(B[ib], r)), u)
                if best is None or g < best:
                    best = g
    gap = Fraction(best, lat.scale(r)) if best is not None else None
    return SeparationReport("Certified", depth, r, gap)


# -- isomorphism of ratio-labelled multigraphs ------------------------------------

def _label_matrix(gds: GraphDirectedSystem):
    n = gds.vertex_count
    L = [[() for _ in range(n)] for _ in range(n)]
    buckets = defaultdict(list)
    for e in gds.edges:
        buckets[(e.source - 1, e.target - 1)].append(e.exponent)
    for (u, v), exps in buckets.items():
        L[u][v] = tuple(sorted(exps))
    return L


def _refine(L, colors: list[int]) -> list[int]:
    n = len(L)
    while True:
        keys = [
            (colors[u],
             tuple(sorted((colors[v], L[u][v]) for v in range(n) if L[u][v])),
             tuple(sorted((colors[w], L[w][u]) for w in range(n) if L[w][u])))
            for u in range(n)
        ]
        ranks = {k: i for i, k in enumerate(sorted(set(keys)))}
        new = [ranks[k] for k in keys]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _twin_classes(L) -> list[int]:
    """Union-find roots: ``x ~ y`` when the transposition (x y) is an automorphism."""
    n = len(L)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in range(n):
        for y in range(x + 1, n):
            if L[x][x] != L[y][y] or L[x][y] != L[y][x]:
                continue
            if all(L[x][z] == L[y][z] and L[z][x] == L[z][y]
                   for z in range(n) if z not in (x, y)):
                parent[find(y)] = find(x)
    return [find(x) for x in range(n)]


def _canonical(L):
    n = len(L)
    twins = _twin_classes(L)
    best: list = [None, None]

    def encode(order):
        return tuple(L[order[i]][order[j]] for i in range(n) for j in range(n))

    def search(colors):
        colors = _refine(L, colors)
        if len(set(colors)) == n:
            order = sorted(range(n), key=lambda v: colors[v])
            code = encode(order)
            if best[0] is None or code < best[0]:
                best[0], best[1] = code, order
            return
        counts = defaultdict(int)
        for c in colors:
            counts[c] += 1
        target = min(c for c, k in counts.items() if k > 1)
        seen_twins = set()
        for x in range(n):
            if colors[x] != target or twins[x] in seen_twins:
                continue
            seen_twins.add(twins[x])
            # Individualize x: it sorts before the rest of its cell.
            search([2 * c + (0 if v == x else (1 if c == target else 0)) for v, c in enumerate(colors)])

    search([0] * n)
    return best[0], best[1]


@dataclass(frozen=True)
class Signature:
    """Canonical form of the ratio-labelled multigraph; ``order[i]`` is the vertex at position i."""

    lam: Fraction
    n: int
    code: tuple = field(repr=False)
    order: tuple[int, ...] = field(compare=False)

    def __str__(self):
        rows = []
        for i in range(self.n):
            rows.append(" ".join(",".join(map(str, c)) or "." for c in self.code[i * self.n:(i + 1) * self.n]))
        return f"lambda={self.lam} n={self.n} | " + " / ".join(rows)


def signature(gds: GraphDirectedSystem) -> Signature:
    code, order = _canonical(_label_matrix(gds))
    return Signature(gds.lam, gds.vertex_count, code, tuple(v + 1 for v in order))


def matching_from_signatures(sa: Signature, sb: Signature) -> dict[int, int]:
    if sa != sb:
        raise ValueError("signatures differ")
    return {a: b for a, b in zip(sa.order, sb.order)}


def is_isomorphism(ga: GraphDirectedSystem, gb: GraphDirectedSystem, matching: dict[int, int]) -> bool:
    if ga.lam != gb.lam or ga.vertex_count != gb.vertex_count:
        return False
    if sorted(matching) != list(range(1, ga.vertex_count + 1)) or \
            sorted(matching.values()) != list(range(1, gb.vertex_count + 1)):
        return False
    La, Lb = _label_matrix(ga), _label_matrix(gb)
    return all(La[u - 1][v - 1] == Lb[matching[u] - 1][matching[v] - 1]
               for u in matching for v in matching)


def edge_bijection(ga: GraphDirectedSystem, gb: GraphDirectedSystem, matching: dict[int, int]) -> dict[int, int]:
    """Edge ids of ``ga`` to edge ids of ``gb``, parallel edges paired in id order."""
    groups = defaultdict(list)
    for i, e in enumerate(gb.edges):
        groups[(e.source, e.target, e.exponent)].append(i)
    used = defaultdict(int)
    out = {}
    for i, e in enumerate(ga.edges):
        key = (matching[e.source], matching[e.target], e.exponent)
        out[i] = groups[key][used[key]]
        used[key] += 1
    return out


# -- equivalence decision --------------------------------------------------------

@dataclass
class Equivalent:
    gds_a: GraphDirectedSystem
    gds_b: GraphDirectedSystem
    matching: dict[int, int]
    report_a: VerificationReport
    report_b: VerificationReport
    route: str

    verdict = "Equivalent"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "route": self.route,
            "vertex_count": self.gds_a.vertex_count,
            "matching": {str(k): v for k, v in sorted(self.matching.items())},
            "separation_a": self.report_a.separation.to_dict(),
            "separation_b": self.report_b.separation.to_dict(),
        }


@dataclass
class Inconclusive:
    reason: str

    verdict = "Inconclusive"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason}


def theorem_graph(ifs: HomogeneousIFS):
    """Validate, normalize and build; returns ``(normalized ifs, cert, gds)``."""
    cert = validate_class(ifs)
    norm = normalize_right_free(ifs, cert)
    if norm is not ifs:
        cert = validate_class(norm)
    gds, _ = build_partition_graph(norm, cert)
    return norm, cert, gds


def decide_equivalence(ifs_a: HomogeneousIFS, ifs_b: HomogeneousIFS, depth: int = DEFAULT_DEPTH):
    """Sufficient test for Lipschitz equivalence of two class members.

    Returns :class:`Equivalent` or :class:`Inconclusive`; never a negative answer.
    Class violations propagate as :class:`~lipeq.ifs_model.Violation`.
    """
    norm_a, cert_a, gds_a = theorem_graph(ifs_a)
    norm_b, cert_b, gds_b = theorem_graph(ifs_b)
    if ifs_a.lam != ifs_b.lam:
        return Inconclusive("contraction ratios differ")
    if ifs_a.m != ifs_b.m:
        return Inconclusive("map counts differ")
    if cert_a.k_vector != cert_b.k_vector:
        return Inconclusive("k-vectors differ")
    if gamma_signature(cert_a) != gamma_signature(cert_b):
        return Inconclusive("gamma counts differ")
    return decide_graph_equivalence(gds_a, gds_b, depth, route="theorem")


def decide_graph_equivalence(gds_a: GraphDirectedSystem, gds_b: GraphDirectedSystem,
                             depth: int = DEFAULT_DEPTH, route: str = "graph"):
    report_a = verify_equations(gds_a, depth=depth)
    report_b = verify_equations(gds_b, depth=depth)
    for name, rep in (("first", report_a), ("second", report_b)):
        if not rep.ok:
            return Inconclusive(f"{name} system not verified at depth {depth}")
    sa, sb = signature(gds_a), signature(gds_b)
    if sa != sb:
        return Inconclusive("graph signatures differ")
    return Equivalent(gds_a, gds_b, matching_from_signatures(sa, sb), report_a, report_b, route)
