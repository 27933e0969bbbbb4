from __future__ import annotations

from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subsum import setlang
from subsum.setlang import (
    AP,
    Complement,
    DyadicBlocks,
    EnumerationCapError,
    Finite,
    Intersection,
    Nu2Ge,
    Powers2,
    SetSyntaxError,
    Shift,
    Squares,
    Tri,
    Union,
    banach_exact,
    count_prefix,
    density_csv,
    density_report,
    exact_density,
    is_cofinite,
    is_finite,
    max_window_density,
    member,
    nu2,
    parse_set,
    render,
)

ROUND_TRIP_SPECS = [
    "finite:{}",
    "finite:{1,5,9}",
    "ap:3,4",
    "ap:1,1",
    "builtin:squares",
    "builtin:powers2",
    "builtin:nu2_ge(3)",
    "builtin:dyadic_blocks(ap:1,2)",
    "complement:builtin:squares",
    "union:ap:3,4|builtin:powers2",
    "intersect:ap:2,2|builtin:squares",
    "shift:builtin:squares,5",
    "shift:finite:{3,4},-2",
    "complement:union:builtin:squares|builtin:powers2",
]


@pytest.mark.parametrize("spec", ROUND_TRIP_SPECS)
def test_parse_render_round_trip(spec):
    parsed = parse_set(spec)
    assert render(parsed) == spec
    assert parse_set(render(parsed)) == parsed


@pytest.mark.parametrize(
    "bad",
    [
        "",
        "ap:3",
        "ap:0,4",
        "ap:3,0",
        "finite:{1,,2}",
        "finite:{0}",
        "builtin:nope",
        "builtin:nu2_ge(-1)",
        "union:ap:1,1",
        "ap:3,4trailing",
        "complement:",
        "shift:ap:1,1",
    ],
)
def test_parse_errors_carry_positions(bad):
    with pytest.raises(SetSyntaxError) as err:
        parse_set(bad)
    assert isinstance(err.value.position, int)
    assert err.value.position >= 0


def test_nu2_values():
    assert [nu2(n) for n in range(1, 13)] == [0, 1, 0, 2, 0, 1, 0, 3, 0, 1, 0, 2]
    with pytest.raises(ValueError):
        nu2(0)


def _oracle_member(s, n: int) -> bool:
    """Membership straight from the definitions, no shared code paths."""
    if isinstance(s, Finite):
        return n in s.members
    if isinstance(s, AP):
        return n >= s.first and (n - s.first) % s.step == 0
    if isinstance(s, Squares):
        return isqrt(n) ** 2 == n
    if isinstance(s, Powers2):
        k = 1
        while k < n:
            k *= 2
        return k == n
    if isinstance(s, Nu2Ge):
        return n % (2**s.threshold) == 0
    if isinstance(s, DyadicBlocks):
        if n < 2:
            return False
        q = 0
        while 2 ** (q + 1) <= n:
            q += 1
        return _oracle_member(s.selector, q)
    if isinstance(s, Complement):
        return not _oracle_member(s.inner, n)
    if isinstance(s, Union):
        return _oracle_member(s.left, n) or _oracle_member(s.right, n)
    if isinstance(s, Intersection):
        return _oracle_member(s.left, n) and _oracle_member(s.right, n)
    if isinstance(s, Shift):
        return n - s.offset >= 1 and _oracle_member(s.inner, n - s.offset)
    raise AssertionError(f"unhandled shape {s!r}")


MEMBER_CORPUS = [
    Finite((2, 7, 30)),
    AP(3, 4),
    AP(1, 1),
    Squares(),
    Powers2(),
    Nu2Ge(0),
    Nu2Ge(3),
    DyadicBlocks(AP(1, 2)),
    DyadicBlocks(Finite((2, 4))),
    Complement(Squares()),
    Union(Squares(), Powers2()),
    Intersection(AP(2, 2), Squares()),
    Shift(Squares(), 5),
    Shift(Squares(), -3),
    Shift(Powers2(), 1),
    Complement(Union(AP(3, 3), Finite((1, 2)))),
]


@pytest.mark.parametrize("s", MEMBER_CORPUS, ids=render)
def test_member_matches_definition(s):
    for n in range(1, 300):
        assert member(s, n) == _oracle_member(s, n), (render(s), n)


@pytest.mark.parametrize("s", MEMBER_CORPUS, ids=render)
def test_count_matches_membership(s):
    running = 0
    for n in range(1, 300):
        running += member(s, n)
        assert count_prefix(s, n) == running, (render(s), n)


def test_count_examples():
    assert count_prefix(Squares(), 10**4) == 100
    assert count_prefix(Powers2(), 1024) == 11  # 1, 2, 4, ..., 1024
    assert count_prefix(AP(3, 4), 1000) == 250
    assert count_prefix(Nu2Ge(3), 100) == 12
    assert count_prefix(DyadicBlocks(AP(1, 1)), 2**13 - 1) == 2**13 - 2


def test_count_large_closed_forms_stay_fast():
    # These shapes count in closed form well past the enumeration cap.
    assert count_prefix(Squares(), 10**14) == 10**7
    assert count_prefix(Complement(Squares()), 10**14) == 10**14 - 10**7
    assert count_prefix(Nu2Ge(10), 10**12) == 10**12 // 1024


def test_enumeration_cap_raises():
    awkward = Union(Squares(), Shift(Squares(), 1))
    with pytest.raises(EnumerationCapError):
        count_prefix(awkward, 2 * 10**7)


def test_first_and_next_member():
    assert setlang.first_member(Complement(Finite((1, 2, 3)))) == 4
    assert setlang.first_member(DyadicBlocks(AP(2, 1))) == 4
    assert setlang.next_member(Squares(), 10) == 16
    assert setlang.next_member(AP(3, 4), 3) == 7


def test_is_finite_and_cofinite():
    assert is_finite(Finite((1, 2))) is Tri.YES
    assert is_finite(AP(5, 7)) is Tri.NO
    assert is_finite(DyadicBlocks(Finite((2, 4)))) is Tri.YES
    assert is_finite(DyadicBlocks(AP(1, 2))) is Tri.NO
    assert is_cofinite(AP(1, 1)) is Tri.YES
    assert is_cofinite(AP(2, 2)) is Tri.NO
    assert is_cofinite(Complement(Squares())) is not Tri.YES  # not claimed
    assert is_finite(Complement(AP(1, 1))) is Tri.YES  # empty complement


def test_exact_density_values():
    assert exact_density(AP(3, 4)) == Fraction(1, 4)
    assert exact_density(Squares()) == 0
    assert exact_density(Powers2()) == 0
    assert exact_density(Nu2Ge(5)) == Fraction(1, 32)
    assert exact_density(Complement(Squares())) == 1
    assert exact_density(Union(AP(2, 2), Squares())) == Fraction(1, 2)
    assert exact_density(Shift(AP(3, 4), 7)) == Fraction(1, 4)
    assert exact_density(DyadicBlocks(AP(1, 2))) is None


def test_exact_density_union_inclusion_exclusion():
    evens_or_threes = Union(AP(2, 2), AP(3, 3))
    assert exact_density(evens_or_threes) == Fraction(1, 2) + Fraction(1, 3) - Fraction(1, 6)


def test_exact_density_tracks_prefix_ratio():
    for s in (AP(3, 4), Union(AP(2, 2), AP(3, 3)), Nu2Ge(2)):
        d = exact_density(s)
        ratio = Fraction(count_prefix(s, 10**4), 10**4)
        assert abs(ratio - d) < Fraction(1, 100)


def test_banach_density():
    assert banach_exact(AP(2, 2)) == Fraction(1, 2)
    assert banach_exact(Finite((5, 6))) == 0
    assert banach_exact(DyadicBlocks(AP(1, 2))) == 1
    assert max_window_density(AP(2, 2), 1000, 10) == Fraction(1, 2)
    assert max_window_density(DyadicBlocks(AP(1, 2)), 2**12, 64) == 1


def test_density_report_and_csv():
    report = density_report(AP(3, 4), 1000, window=100)
    assert report.exact == Fraction(1, 4)
    assert report.prefix_counts[-1] == (1000, 250)
    assert report.banach_upper == (Fraction(1, 4), 100)
    text = density_csv(report)
    lines = text.strip().splitlines()
    assert lines[0] == "n,count,ratio"
    assert lines[-1].startswith("1000,250,")


def test_density_report_checkpoint_validation():
    with pytest.raises(ValueError):
        density_report(AP(1, 1), 100, checkpoints=())
    with pytest.raises(ValueError):
        density_report(AP(1, 1), 100, checkpoints=(10, 10))
    with pytest.raises(ValueError):
        density_report(AP(1, 1), 100, checkpoints=(50, 200))


def test_squares_report_collapses_to_exact_zero():
    report = density_report(Squares(), 10**4)
    # With a certified exact density both estimates collapse to it.
    assert report.exact == 0
    assert report.lower_estimate == report.upper_estimate == 0
    assert report.prefix_counts[-1] == (10**4, 100)
    assert max(r for _, r in report.ratios()) <= Fraction(1, 35)


def test_dyadic_blocks_never_contain_one():
    assert not member(DyadicBlocks(AP(1, 1)), 1)
    assert member(DyadicBlocks(AP(1, 1)), 2)


def test_fraction_decimal():
    assert setlang.fraction_decimal(Fraction(1, 4)) == "0.250000000000"
    assert setlang.fraction_decimal(Fraction(1, 3), places=3) == "0.333"
    assert setlang.fraction_decimal(Fraction(-1, 2), places=2) == "-0.50"


# ---------------------------------------------------------------- properties


def _base_sets():
    return st.one_of(
        st.builds(
            Finite,
            st.lists(st.integers(1, 60), max_size=5).map(tuple),
        ),
        st.builds(AP, st.integers(1, 12), st.integers(1, 12)),
        st.just(Squares()),
        st.just(Powers2()),
        st.builds(Nu2Ge, st.integers(0, 5)),
    )


def _set_descriptions():
    return st.recursive(
        _base_sets(),
        lambda inner: st.one_of(
            st.builds(Complement, inner),
            st.builds(Union, inner, inner),
            st.builds(Intersection, inner, inner),
            st.builds(Shift, inner, st.integers(-5, 8)),
            st.builds(DyadicBlocks, inner),
        ),
        max_leaves=4,
    )


@settings(max_examples=120, deadline=None)
@given(s=_set_descriptions(), limit=st.integers(1, 400))
def test_complement_count_identity(s, limit):
    assert count_prefix(Complement(s), limit) == limit - count_prefix(s, limit)


@settings(max_examples=120, deadline=None)
@given(s=_set_descriptions(), limit=st.integers(1, 250))
def test_count_is_membership_sum(s, limit):
    assert count_prefix(s, limit) == sum(
        1 for n in range(1, limit + 1) if member(s, n)
    )


@settings(max_examples=100, deadline=None)
@given(first=st.integers(1, 50), step=st.integers(1, 50), limit=st.integers(1, 5000))
def test_ap_count_closed_form(first, step, limit):
    expected = 0 if limit < first else (limit - first) // step + 1
    assert count_prefix(AP(first, step), limit) == expected


@settings(max_examples=80, deadline=None)
@given(s=_set_descriptions(), limit=st.integers(2, 300))
def test_render_parse_identity(s, limit):
    again = parse_set(render(s))
    for n in range(1, limit + 1):
        assert member(again, n) == member(s, n)
