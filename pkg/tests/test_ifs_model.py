from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from lipeq.algebra import LambdaPoly
from lipeq.ifs_model import (
    Box,
    HomogeneousIFS,
    Violation,
    cylinder,
    gamma_signature,
    normalize_right_free,
    reflect,
    validate_class,
    word_map,
)

from conftest import EX2_A, EX2_B, IN_CLASS_FIXTURES, SINGLE_OVERLAP, ex2
from oracles import brute_corner


def test_example_a_certificate(ex2_a):
    cert = validate_class(ex2_a)
    assert cert.k_vector == (2,)
    assert cert.gamma == {1: (1, 2)}
    assert cert.gamma_rest == (3, 4)
    assert cert.side == "right-free"


def test_example_b_certificate(ex2_b):
    cert = validate_class(ex2_b)
    assert cert.k_vector == (2,)
    assert cert.gamma == {1: (1, 3)}
    assert gamma_signature(cert) == (2,)


def test_single_overlap_counts():
    cert = validate_class(HomogeneousIFS.from_exprs("1/6", SINGLE_OVERLAP))
    assert gamma_signature(cert) == (1,)


@pytest.mark.parametrize("lam,maps,condition,indices", [
    ("1/2", EX2_A, "I", None),
    ("1/6", ["1/100", "1/2", "1-l"], "I", (1,)),
    ("1/6", ["0", "1/2", "1/2"], "I", (3,)),
    ("1/6", ["0", "1/2*l", "1-l"], "II", (1, 2)),
    ("1/6", ["0", "1/3*l", "2/3*l", "1-l"], "II", (1, 2, 3)),
    ("1/10", ["0", "l-l^2", "1-2*l+l^2", "1-l"], "III", (1, 4)),
    ("1/6", ["0", "1-l"], "m<3", None),
])
def test_violations(lam, maps, condition, indices):
    with pytest.raises(Violation) as info:
        validate_class(HomogeneousIFS.from_exprs(lam, maps))
    assert info.value.condition == condition
    if indices is not None:
        assert info.value.indices == indices
    assert info.value.to_dict()["condition"] == condition


def test_overlap_of_length_lambda_is_rejected():
    # k must be at least 2
    with pytest.raises(Violation) as info:
        validate_class(HomogeneousIFS.from_exprs("1/6", ["0", "l-l", "1-l"]))
    assert info.value.condition == "I"
    with pytest.raises(Violation) as info:
        validate_class(HomogeneousIFS.from_exprs("1/6", ["0", "1/2*l^2", "1-l"]))
    assert info.value.condition == "II"


def test_floats_rejected():
    with pytest.raises(TypeError):
        HomogeneousIFS.from_exprs(0.25, ["0", "1-l"])


@pytest.mark.parametrize("lam,maps", IN_CLASS_FIXTURES)
def test_overlap_identity_boxes(lam, maps):
    ifs = HomogeneousIFS.from_exprs(lam, maps)
    cert = validate_class(ifs)
    m = ifs.m
    for i, k in cert.overlaps:
        left = cylinder(ifs, (i,) + (m,) * (k - 1))
        right = cylinder(ifs, (i + 1,) + (1,) * (k - 1))
        assert left == right
        assert left.side == ifs.lam**k


@pytest.mark.parametrize("lam,maps", IN_CLASS_FIXTURES)
def test_reflection_invariants(lam, maps):
    ifs = HomogeneousIFS.from_exprs(lam, maps)
    cert = validate_class(ifs)
    r = reflect(ifs)
    rc = validate_class(r)
    assert rc.k_vector == cert.k_vector
    assert gamma_signature(rc) == gamma_signature(cert)
    assert reflect(r).translations == ifs.translations


@pytest.mark.parametrize("lam,maps", IN_CLASS_FIXTURES)
def test_normalize_idempotent(lam, maps):
    ifs = HomogeneousIFS.from_exprs(lam, maps)
    norm = normalize_right_free(ifs)
    assert validate_class(norm).side in ("both", "right-free")
    assert normalize_right_free(norm) is norm


def test_reflect_formula(ex2_a):
    r = reflect(ex2_a)
    lam = ex2_a.lam
    a = [s[0] for s in ex2_a.shifts]
    assert [s[0] for s in r.shifts] == [1 - lam - a[4 - i] for i in range(5)]
    assert validate_class(r).side == "left-free"


@settings(max_examples=60, deadline=None)
@given(word=st.lists(st.integers(1, 5), min_size=0, max_size=6),
       lam=st.sampled_from([F(1, 6), F(1, 7), F(1, 10)]))
def test_word_map_against_oracle(word, lam):
    ifs = HomogeneousIFS.from_exprs(lam, EX2_B)
    f = word_map(ifs, word)
    assert f.scale == lam ** len(word)
    assert f.shift == brute_corner(ifs.shifts, lam, word)


def test_box_helpers():
    a = Box((F(0),), (F(1, 2),))
    b = Box((F(1, 2),), (F(1),))
    assert a.intersect(b) == Box((F(1, 2),), (F(1, 2),))
    assert a.intersect(Box((F(3, 4),), (F(1),))) is None
    assert Box((F(0),), (F(1),)).contains(a)
    assert a.midpoint() == (F(1, 4),)


def test_translations_keep_polynomials():
    ifs = ex2("a")
    assert ifs.translations[1][0] == LambdaPoly([0, 1, -1])
    assert ex2("a", "1/7").shifts[1][0] == F(6, 49)
    with pytest.raises(IndexError):
        ifs.check_index(6)


def test_example_b_shifts_at_one_sixth():
    assert [s[0] for s in ex2("b").shifts] == [0, F(5, 36), F(1, 3), F(17, 36), F(5, 6)]
    assert validate_class(HomogeneousIFS.from_exprs("1/6", EX2_B)).overlaps == ((1, 2), (3, 2))
