from fractions import Fraction as F
from itertools import product
import random

import pytest
from hypothesis import given, settings, strategies as st

from lipeq.gds import (
    EquationMismatch,
    Equivalent,
    GraphDirectedSystem,
    Inconclusive,
    NotNormalized,
    PieceSpec,
    _canonical,
    _label_matrix,
    build_partition_graph,
    decide_equivalence,
    decide_graph_equivalence,
    edge_bijection,
    is_isomorphism,
    relabeling,
    signature,
    theorem_graph,
    verify_equations,
)
from lipeq.ifs_model import HomogeneousIFS, cylinder, reflect, validate_class
from lipeq.lattice import Lattice
from lipeq.specfile import load_spec

from conftest import EX2_A, EX2_B, IN_CLASS_FIXTURES, custom_system, ex2, spec_path
from oracles import brute_isomorphic


def test_example_a_graph_shape(ex2_a):
    gds, pieces = build_partition_graph(ex2_a)
    assert gds.vertex_count == 5
    assert len(gds.edges) == 23
    assert gds.out_degrees() == (4, 4, 5, 5, 5)
    assert gds.homogeneous()
    assert pieces[0] == PieceSpec((1,), ((1, 5),))
    assert pieces[4] == PieceSpec((5,))


def test_example_b_relabeling(ex2_b):
    h = relabeling(validate_class(ex2_b))
    assert h == {1: 1, 3: 2, 2: 3, 4: 4}


def test_left_free_input_must_be_normalized(ex2_a):
    with pytest.raises(NotNormalized):
        build_partition_graph(reflect(ex2_a))


@pytest.mark.parametrize("lam,maps", IN_CLASS_FIXTURES)
def test_theorem_graph_verifies(lam, maps):
    norm, cert, gds = theorem_graph(HomogeneousIFS.from_exprs(lam, maps))
    assert gds.vertex_count == norm.m + cert.k1 - 2
    rep = verify_equations(gds, depth=3)
    assert rep.ok, rep.to_dict()
    m = norm.m
    k_of = dict(cert.overlaps)
    h = relabeling(cert)
    degs = gds.out_degrees()
    for j in range(1, m):
        expected = m + k_of[j] - 3 if j in k_of else gds.vertex_count
        assert degs[h[j] - 1] == expected


def test_k1_three_structure():
    ifs = HomogeneousIFS.from_exprs("1/10", ["0", "l-l^3", "1/2", "1-l"])
    gds, pieces = build_partition_graph(ifs)
    assert gds.vertex_count == 5
    assert pieces[3] == PieceSpec((4,), ((4, 4),))
    assert pieces[4] == PieceSpec((4, 4))
    last = sorted((e.target, e.word) for e in gds.edges if e.source == 5)
    assert last == [(4, (4,)), (5, (4,))]


def test_k1_four_has_longer_edges():
    ifs = HomogeneousIFS.from_exprs("1/10", ["0", "l-l^4", "1/2", "1-l"])
    gds, _ = build_partition_graph(ifs)
    assert not gds.homogeneous()
    assert max(e.exponent for e in gds.edges) == 2


def test_example_a_separation(ex2_a):
    _, _, gds = theorem_graph(ex2_a)
    rep = verify_equations(gds, depth=4)
    assert rep.ok
    assert rep.resolution == 5
    assert rep.separation.min_gap == F(1, 216)


def test_dropped_edge_is_reported(ex2_a):
    gds, pieces = build_partition_graph(ex2_a)
    broken = GraphDirectedSystem(gds.ifs, gds.vertex_count, gds.edges[1:], gds.pieces)
    rep = verify_equations(broken, depth=3)
    assert not rep.equations_hold
    assert rep.mismatch.vertex == gds.edges[0].source
    assert rep.mismatch.side == "left"


def test_corrupted_custom_spec():
    with pytest.raises(EquationMismatch) as info:
        custom_system("ex3_F_corrupted.yaml")
    assert info.value.vertex == 6
    assert info.value.side == "left"


def test_overlapping_pieces_detected(ex2_a):
    gds, pieces = build_partition_graph(ex2_a)
    loose = list(pieces)
    loose[0] = PieceSpec((1,))
    rep = verify_equations(gds, pieces=loose, depth=3)
    assert not rep.partition_disjoint
    assert rep.partition_witness is not None


def _brute_cover(ifs, piece, r):
    boxes = set()
    base = piece.base
    for tail in product(range(1, ifs.m + 1), repeat=r - len(base)):
        b = cylinder(ifs, base + tail)
        if any(cylinder(ifs, u).contains(b) for u in piece.minus):
            continue
        boxes.add(b)
    return boxes


@pytest.mark.parametrize("which", ["a", "b"])
def test_cover_matches_fraction_bruteforce(which):
    ifs = ex2(which)
    gds, pieces = build_partition_graph(ifs)
    from lipeq.gds import CoverCache
    cache = CoverCache(gds)
    lat = cache.lattice
    for v, piece in enumerate(pieces, start=1):
        rows = cache.cover(v, 4)
        got = {lat.to_box(row, 4) for row in rows.tolist()}
        assert got == _brute_cover(ifs, piece, 4)


def test_custom_systems_verify_and_match():
    F_ = custom_system("ex3_F.yaml")
    G_ = custom_system("ex3_G.yaml")
    assert F_.out_degrees() == (6, 6, 6, 5, 6, 5)
    assert signature(F_) == signature(G_)
    res = decide_graph_equivalence(F_, G_, depth=3, route="custom")
    assert isinstance(res, Equivalent)
    assert is_isomorphism(F_, G_, res.matching)
    assert res.report_a.separation.min_gap == F(5, 256)


def test_star_system_gap():
    star = custom_system("ex4_Fstar.yaml", depth=3)
    G8 = custom_system("ex3_G_lambda_1_8.yaml", depth=3)
    assert signature(star) == signature(G8)
    assert verify_equations(star, depth=3).separation.min_gap == F(1, 512)


label = st.lists(st.integers(1, 2), max_size=2).map(lambda x: tuple(sorted(x)))


@settings(max_examples=80, deadline=None)
@given(data=st.data(), n=st.integers(1, 5))
def test_canonical_form_decides_isomorphism(data, n):
    L1 = [[data.draw(label) for _ in range(n)] for _ in range(n)]
    if data.draw(st.booleans()):
        perm = data.draw(st.permutations(range(n)))
        L2 = [[L1[perm[u]][perm[v]] for v in range(n)] for u in range(n)]
    else:
        L2 = [[data.draw(label) for _ in range(n)] for _ in range(n)]
    same = _canonical(L1)[0] == _canonical(L2)[0]
    assert same == brute_isomorphic(L1, L2)


def test_permuted_copy_is_isomorphic(ex2_a):
    gds, _ = build_partition_graph(ex2_a)
    perm = list(range(1, 6))
    random.Random(3).shuffle(perm)
    p = dict(zip(range(1, 6), perm))
    from lipeq.gds import _make_edge
    edges = tuple(_make_edge(gds.ifs, p[e.source], p[e.target], e.word) for e in gds.edges)
    pieces = [None] * 5
    for u, piece in enumerate(gds.pieces, start=1):
        pieces[p[u] - 1] = piece
    copy = GraphDirectedSystem(gds.ifs, 5, edges, tuple(pieces))
    assert signature(copy) == signature(gds)
    assert is_isomorphism(gds, copy, p)
    bij = edge_bijection(gds, copy, p)
    assert sorted(bij.values()) == list(range(len(edges)))


@pytest.mark.parametrize("lam", ["1/6", "1/7", "1/10"])
def test_example_pair_equivalent(lam):
    res = decide_equivalence(ex2("a", lam), ex2("b", lam))
    assert isinstance(res, Equivalent)
    assert res.route == "theorem"


@pytest.mark.parametrize("a,b,reason", [
    (("1/6", EX2_A), ("1/7", EX2_B), "contraction ratios differ"),
    (("1/5", ["0", "2/5", "1-l"]), ("1/5", ["0", "l-l^2", "1/2", "1-l"]), "map counts differ"),
    (("1/10", ["0", "l-l^3", "1/2", "1-l"]), ("1/10", ["0", "l-l^2", "1/2", "1-l"]), "k-vectors differ"),
    (("1/6", EX2_A), ("1/6", ["0", "l*(1-l)", "2*l", "7/2*l", "1-l"]), "gamma counts differ"),
])
def test_inconclusive_reasons(a, b, reason):
    res = decide_equivalence(HomogeneousIFS.from_exprs(*a), HomogeneousIFS.from_exprs(*b))
    assert isinstance(res, Inconclusive)
    assert res.reason == reason


def test_reflected_system_decided(ex2_a):
    res = decide_equivalence(reflect(ex2_a), ex2_a)
    assert isinstance(res, Equivalent)
    assert res.matching == {v: v for v in range(1, 6)}


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_shallow_depths(ex2_a, depth):
    _, _, gds = theorem_graph(ex2_a)
    rep = verify_equations(gds, depth=depth)
    assert rep.equations_hold and rep.partition_covers and rep.partition_disjoint
