from fractions import Fraction as F
import random

import pytest

from lipeq.coding import (
    EdgeWord,
    NotAdmissible,
    PointNotInSet,
    SignatureMismatch,
    bilip_constants,
    check_admissible,
    locate,
    map_word,
    pi_eval,
    random_word,
    repeat_loop,
    sample_bilip_check,
    word_affine,
)
from lipeq.gds import decide_equivalence, theorem_graph
from lipeq.ifs_model import Box

from conftest import ex2


@pytest.fixture(scope="module")
def pair():
    res = decide_equivalence(ex2("a"), ex2("b"))
    return res.gds_a, res.gds_b, res.matching


@pytest.fixture(scope="module")
def cert(pair):
    return bilip_constants(pair[0], pair[1], depth=4)


def test_self_loop_boxes():
    _, _, gds = theorem_graph(ex2("a"))
    low = pi_eval(gds, repeat_loop(gds, 1, (1,), 5))
    high = pi_eval(gds, repeat_loop(gds, 5, (5,), 5))
    assert low == Box((F(0),), (F(1, 6**5),))
    assert high == Box((1 - F(1, 6**5),), (F(1),))


def test_no_loop_raises():
    _, _, gds = theorem_graph(ex2("a"))
    with pytest.raises(NotAdmissible):
        repeat_loop(gds, 1, (2,), 3)


def test_inadmissible_word():
    _, _, gds = theorem_graph(ex2("a"))
    bad = next(i for i, e in enumerate(gds.edges) if e.source != 1)
    with pytest.raises(NotAdmissible):
        check_admissible(gds, EdgeWord(1, (bad,)))
    with pytest.raises(NotAdmissible):
        check_admissible(gds, EdgeWord(9))


def test_nested_boxes(pair):
    gds = pair[0]
    rng = random.Random(11)
    for _ in range(50):
        w = random_word(gds, rng.randint(1, 5), 7, rng)
        for k in range(len(w)):
            outer = pi_eval(gds, EdgeWord(w.start, w.edges[:k]))
            inner = pi_eval(gds, EdgeWord(w.start, w.edges[:k + 1]))
            assert outer.contains(inner)


def test_sibling_separation(pair, cert):
    gds = pair[0]
    rng = random.Random(5)
    checked = 0
    while checked < 200:
        u = rng.randint(1, 5)
        x, y = random_word(gds, u, 6, rng), random_word(gds, u, 6, rng)
        if x.edges[0] == y.edges[0]:
            continue
        bx, by = pi_eval(gds, x), pi_eval(gds, y)
        gap = max(by.lower[0] - bx.upper[0], bx.lower[0] - by.upper[0])
        assert gap >= cert.c_star
        checked += 1


def test_certificate_values(cert):
    assert cert.c_star == F(1, 216)
    assert cert.c_upper == 1
    assert cert.c == 216


def test_sample_check_and_round_trip(pair, cert):
    report = sample_bilip_check(*pair, cert, pair_count=200, depth=5, seed=1)
    assert report.violations == []
    assert report.round_trip_ok
    assert report.max_ratio <= cert.c


def test_sample_check_is_deterministic(pair, cert):
    a = sample_bilip_check(*pair, cert, pair_count=50, seed=7).to_dict()
    b = sample_bilip_check(*pair, cert, pair_count=50, seed=7).to_dict()
    assert a == b


def test_corrupted_matching(pair, cert):
    ga, gb, matching = pair
    bad = dict(matching)
    bad[1], bad[4] = matching[4], matching[1]
    with pytest.raises(SignatureMismatch):
        sample_bilip_check(ga, gb, bad, cert, pair_count=5)
    with pytest.raises(SignatureMismatch):
        map_word(ga, gb, bad, EdgeWord(1))


def test_locate_recovers_word(pair):
    gds = pair[0]
    rng = random.Random(2)
    hits = 0
    for _ in range(40):
        w = random_word(gds, rng.randint(1, 5), 4, rng)
        end = gds.edges[w.edges[-1]].target
        if end != 5:
            continue
        point = word_affine(gds, w)((F(1),))
        assert locate(gds, w.start, point, 4) == w
        hits += 1
    assert hits >= 5


def test_locate_rejects_gap_point(pair):
    gds = pair[0]
    with pytest.raises(PointNotInSet):
        locate(gds, 5, (F(1, 2),), 1)
