from pathlib import Path

import pytest

from lipeq.gds import PieceSpec, build_custom_graph
from lipeq.ifs_model import HomogeneousIFS
from lipeq.specfile import load_spec

ROOT = Path(__file__).resolve().parent.parent
SPECS = ROOT / "specs"
GOLDEN = Path(__file__).resolve().parent / "golden"

EX2_A = ["0", "l*(1-l)", "2*l*(1-l)", "3*l", "1-l"]
EX2_B = ["0", "l*(1-l)", "2*l", "3*l-l^2", "1-l"]
EX4_1D = ["0", "2*l", "3*l-l^2", "4*l-2*l^2", "5*l", "1-l"]
SINGLE_OVERLAP = ["0", "l*(1-l)", "2*l", "7/2*l", "1-l"]


def ex2(which="a", lam="1/6"):
    return HomogeneousIFS.from_exprs(lam, EX2_A if which == "a" else EX2_B)


def spec_path(name):
    return SPECS / name


def custom_system(name, lam=None, depth=3):
    spec = load_spec(SPECS / name)
    if lam is not None:
        spec.lam = lam
    return build_custom_graph(spec.ifs(), spec.pieces, spec.edges, depth=depth)


@pytest.fixture
def ex2_a():
    return ex2("a")


@pytest.fixture
def ex2_b():
    return ex2("b")


@pytest.fixture
def ex4_1d():
    return HomogeneousIFS.from_exprs("1/8", EX4_1D)


IN_CLASS_FIXTURES = [
    ("1/6", EX2_A),
    ("1/6", EX2_B),
    ("1/7", EX2_A),
    ("1/10", EX2_B),
    ("1/8", EX4_1D),
    ("1/6", SINGLE_OVERLAP),
    ("1/5", ["0", "2/5", "1-l"]),
    ("1/4", ["0", "l-l^2", "1-l"]),
    ("1/10", ["0", "l-l^3", "1/2", "1-l"]),
    ("1/10", ["0", "l-l^4", "1/2", "1-l"]),
]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
