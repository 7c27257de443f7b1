from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from conftest import fractions, heights, points
from sigmarot.space import (
    Branch, BranchSegment, Line, branch_point, format_point, format_rational, geodesic_eval, legs,
    parse_point, parse_rational, path_length, reduce, retract, retract_to_segment, translate,
)


def test_height_zero_is_a_line_point():
    assert branch_point(3, 0, Fr(1, 4)) == Line(Fr(13, 4))
    with pytest.raises(ValueError):
        Branch(0, 0)
    with pytest.raises(ValueError):
        Branch(0, Fr(3, 2))


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        Line(0.5)


@pytest.mark.parametrize("p, c, expected", [
    (Line(Fr(3, 2)), 0, Fr(3, 2)),
    (Branch(2, Fr(1, 3)), 0, 2),
    (Branch(0, Fr(5, 7)), Fr(1, 4), Fr(1, 4)),
])
def test_retract(p, c, expected):
    assert retract(p, c) == expected


def test_translate_examples():
    assert translate(Line(Fr(1, 2)), 3) == Line(Fr(7, 2))
    assert translate(Branch(0, Fr(1, 4)), -2) == Branch(-2, Fr(1, 4))


@given(points(), st.integers(-20, 20))
def test_translate_inverse_and_retract_equivariance(p, k):
    assert translate(translate(p, k), -k) == p
    assert retract(translate(p, k)) == retract(p) + k


@given(points())
def test_reduce_lands_in_fundamental_domain(p):
    c = Fr(1, 3)
    q, k = reduce(p, c)
    assert translate(q, k) == p
    assert c <= retract(q, c) < c + 1


def test_path_length_examples():
    assert path_length(Line(0), Line(1)) == 1
    assert path_length(Branch(0, Fr(1, 2)), Line(Fr(1, 2))) == 1
    assert path_length(Branch(2, Fr(1, 3)), Branch(2, Fr(1, 3))) == 0
    assert path_length(Branch(0, 1), Branch(1, 1)) == 3


def test_geodesic_eval_examples():
    assert geodesic_eval(Line(0), Line(2), Fr(1, 2)) == Line(1)
    assert geodesic_eval(Branch(0, Fr(1, 2)), Line(Fr(1, 2)), Fr(1, 2)) == Line(0)
    p, q = Branch(1, Fr(1, 5)), Line(-3)
    assert geodesic_eval(p, q, 0) == p
    assert geodesic_eval(p, q, 1) == q


@given(points(), points(), st.fractions(0, 1))
def test_geodesic_splits_length(p, q, t):
    x = geodesic_eval(p, q, t)
    total = path_length(p, q)
    assert path_length(p, x) == t * total
    assert path_length(x, q) == (1 - t) * total


@given(points(), points())
def test_legs_sum_to_path_length(p, q):
    pieces = legs(p, q)
    assert sum(path_length(a, b) for a, b in pieces) == path_length(p, q)
    if pieces:
        assert pieces[0][0] == p and pieces[-1][1] == q


def test_retract_to_segment():
    X = BranchSegment(0, Fr(1, 2), 1)
    assert retract_to_segment(Branch(0, Fr(3, 4)), X) == Branch(0, Fr(3, 4))
    assert retract_to_segment(Line(Fr(17, 5)), X) == Branch(0, Fr(1, 2))
    assert retract_to_segment(Branch(0, Fr(1, 2)), X) == Branch(0, Fr(1, 2))
    assert retract_to_segment(Branch(0, Fr(1, 4)), X) == Branch(0, Fr(1, 2))
    with pytest.raises(ValueError):
        retract_to_segment(Branch(0, Fr(1, 2)), BranchSegment(0, 0, Fr(1, 4)))


@given(points())
def test_retract_idempotent_on_line(p):
    x = retract(p)
    assert retract(Line(x)) == x


@given(points())
def test_point_text_round_trip(p):
    assert parse_point(format_point(p)) == p


def test_text_forms():
    assert parse_point("B 2 0") == Line(2)
    assert parse_point("L -3/6") == Line(Fr(-1, 2))
    assert format_rational(Fr(1, 2), signed=True) == "+1/2"
    assert format_rational(Fr(-2), signed=True) == "-2"
    assert format_rational(0, signed=True) == "+0"
    assert parse_rational(" 4/6 ") == Fr(2, 3)
    for bad in ["x 1", "B 1", "B a 1/2", "B 0 3/2", "L 0.5"]:
        with pytest.raises(ValueError):
            parse_point(bad)
