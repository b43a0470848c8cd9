from hypothesis import given, strategies as st

import pytest

from prefixalg.cylinders import (
    Compat,
    SequenceDesc,
    compatibility,
    extends,
    format_seqdesc,
    format_tuple,
    member,
    parse_seqdesc_text,
    parse_tuple_text,
    properly_extends,
)

labels = st.integers(min_value=0, max_value=6)
tuples = st.lists(labels, max_size=5).map(tuple)
points = st.builds(SequenceDesc, prefix=tuples, tail=labels)


def test_extends_examples():
    assert extends((1, 5), (1,))
    assert extends((1,), (1,))
    assert not extends((2,), (1,))


def test_properly_extends_is_strict():
    assert properly_extends((1, 5), (1,))
    assert not properly_extends((1,), (1,))


def test_compatibility_examples():
    assert compatibility((1, 5), (1,)) is Compat.A_EXTENDS_B
    assert compatibility((1,), (1, 5)) is Compat.B_PROPERLY_EXTENDS_A
    assert compatibility((1,), (2,)) is Compat.DISJOINT


def test_member_examples():
    x = SequenceDesc((1, 2), 0)
    assert member(x, (1,))
    assert member(x, (1, 2, 0, 0))
    assert not member(x, (1, 3))


@given(tuples, tuples)
def test_trichotomy(a, b):
    cases = [
        extends(a, b),
        properly_extends(b, a),
        compatibility(a, b) is Compat.DISJOINT,
    ]
    assert sum(cases) == 1
    assert compatibility(a, b) is not Compat.DISJOINT or any(
        a[i] != b[i] for i in range(min(len(a), len(b)))
    )


@given(points, tuples, tuples)
def test_cylinder_monotonicity(x, a, b):
    if extends(a, b) and member(x, a):
        assert member(x, b)


@given(points, tuples)
def test_membership_is_coordinatewise(x, a):
    ok = all(x.coord(i + 1) == a[i] for i in range(len(a)))
    assert member(x, a) == ok


def test_seqdesc_canonical_form():
    assert SequenceDesc((1, 2, 0, 0), 0) == SequenceDesc((1, 2), 0)
    assert SequenceDesc((0, 0), 0) == SequenceDesc((), 0)
    assert SequenceDesc((1, 2, 0, 0), 0).prefix == (1, 2)


def test_seqdesc_coordinates():
    x = SequenceDesc((4, 5), 9)
    assert [x.coord(i) for i in (1, 2, 3, 7)] == [4, 5, 9, 9]
    assert x.head(4) == (4, 5, 9, 9)
    with pytest.raises(IndexError):
        x.coord(0)


def test_tuple_text_round_trip():
    for t in [(), (1,), (1, 5, 2), (10, 0)]:
        assert parse_tuple_text(format_tuple(t)) == t
    assert format_tuple(()) == "()"
    assert format_tuple((1, 5, 2)) == "(1,5,2)"


def test_tuple_text_rejects_garbage():
    for bad in ["", "(", "(1,", "(1,-2)", "1,2", "(a)"]:
        with pytest.raises(ValueError):
            parse_tuple_text(bad)


def test_seqdesc_text_round_trip():
    for x in [SequenceDesc((1, 2), 0), SequenceDesc((), 7)]:
        assert parse_seqdesc_text(format_seqdesc(x)) == x
    with pytest.raises(ValueError):
        parse_seqdesc_text("(1,2)")
