"""Core geometry and valuation tests with hand-computed expected values."""

from fractions import Fraction

import pytest

from onlinecake import (
    InsufficientValueError,
    Interval,
    MalformedValuationError,
    Piece,
    ZeroValuationError,
    make_valuation,
    piece,
    rat,
)

TRIO_P1 = make_valuation([(0, "1/2", 0), ("1/2", 1, 1)])
TRIO_P2 = make_valuation([(0, "1/3", 0), ("1/3", 1, 1)])
TRIO_P3 = make_valuation([(0, "3/4", 1), ("3/4", 1, 0)])
QUARTET_P1 = make_valuation([(0, "1/4", 3), ("1/4", "3/4", 1), ("3/4", 1, 8)])
QUARTET_P2 = make_valuation(
    [(0, "1/4", 0), ("1/4", "1/2", 4), ("1/2", "5/8", 8), ("5/8", 1, 0)]
)
QUARTET_P4 = make_valuation(
    [(0, "1/4", 0), ("1/4", "1/2", 9), ("1/2", "3/4", 1), ("3/4", 1, 2)]
)


def test_rat_parses_integers_fractions_and_strings():
    assert rat(3) == Fraction(3)
    assert rat("47/72") == Fraction(47, 72)
    assert rat(Fraction(5, 6)) == Fraction(5, 6)


def test_rat_rejects_floats():
    with pytest.raises(TypeError):
        rat(0.5)


class TestInterval:
    def test_bounds_checked(self):
        with pytest.raises(ValueError):
            Interval(rat("2/3"), rat("1/3"))
        with pytest.raises(ValueError):
            Interval(rat(0), rat(2))

    def test_length_and_emptiness(self):
        assert Interval(rat("1/4"), rat("3/4")).length == Fraction(1, 2)
        assert Interval(rat("1/2"), rat("1/2")).is_empty


class TestPieceCanonicalisation:
    def test_adjacent_intervals_merge(self):
        p = piece((0, "1/2"), ("1/2", 1))
        assert p == Piece.whole()

    def test_overlapping_intervals_merge(self):
        assert piece((0, "2/3"), ("1/3", 1)) == Piece.whole()

    def test_empty_intervals_dropped(self):
        assert piece(("1/2", "1/2")) == Piece.empty()

    def test_order_insensitive(self):
        assert piece(("5/6", 1), (0, "2/3")) == piece((0, "2/3"), ("5/6", 1))

    def test_idempotent(self):
        p = piece((0, "7/12"), ("2/3", "5/6"))
        assert Piece(p.intervals) == p

    def test_length_sums_intervals(self):
        assert piece((0, "7/12"), ("2/3", "5/6")).length == rat("7/12") + rat("1/6")


class TestPieceAlgebra:
    def test_union_and_intersection(self):
        a = piece((0, "1/2"))
        b = piece(("1/4", "3/4"))
        assert a.union(b) == piece((0, "3/4"))
        assert a.intersect(b) == piece(("1/4", "1/2"))

    def test_difference_and_complement(self):
        assert Piece.whole().difference(piece(("1/4", "1/2"))) == piece(
            (0, "1/4"), ("1/2", 1)
        )
        assert piece(("1/4", "1/2")).complement() == piece((0, "1/4"), ("1/2", 1))

    def test_str_rendering(self):
        assert str(piece(("5/6", 1))) == "[5/6,1]"
        assert str(piece(("7/12", "2/3"), ("5/6", 1))) == "[7/12,2/3]∪[5/6,1]"
        assert str(Piece.empty()) == "∅"


class TestSplitAt:
    def test_single_interval(self):
        left, right = Piece.whole().split_at("2/3")
        assert left == piece((0, "2/3"))
        assert right == piece(("2/3", 1))

    def test_multi_interval_region(self):
        region = piece((0, "2/3"), ("5/6", 1))
        left, right = region.split_at("7/12")
        assert left == piece((0, "7/12"))
        assert right == piece(("7/12", "2/3"), ("5/6", 1))

    def test_split_at_right_end_leaves_nothing(self):
        region = piece(("1/4", "3/4"))
        left, right = region.split_at("3/4")
        assert left == region
        assert right == Piece.empty()

    def test_parts_reunite(self):
        region = piece((0, "1/3"), ("1/2", "5/6"))
        left, right = region.split_at("3/5")
        assert left.union(right) == region


class TestMakeValuation:
    def test_segment_totals_become_densities(self):
        v = make_valuation([(0, "1/4", 3), ("1/4", "3/4", 1), ("3/4", 1, 8)])
        assert v.total == 12
        assert v.value(piece((0, "1/4"))) == 3
        assert v.value(piece(("1/4", "3/4"))) == 1

    def test_uniform_single_segment(self):
        v = make_valuation([(0, 1, 1)])
        assert v.total == 1
        assert v.value(piece((0, "1/2"))) == Fraction(1, 2)

    def test_trio_first_player(self):
        assert TRIO_P1.total == 1
        assert TRIO_P1.value(piece(("1/2", 1))) == 1

    def test_gap_rejected(self):
        with pytest.raises(MalformedValuationError):
            make_valuation([(0, "1/3", 1), ("1/2", 1, 1)])

    def test_overlap_rejected(self):
        with pytest.raises(MalformedValuationError):
            make_valuation([(0, "2/3", 1), ("1/2", 1, 1)])

    def test_short_cover_rejected(self):
        with pytest.raises(MalformedValuationError):
            make_valuation([(0, "1/2", 1)])

    def test_all_zero_rejected(self):
        with pytest.raises(ZeroValuationError):
            make_valuation([(0, "1/2", 0), ("1/2", 1, 0)])

    def test_zero_length_zero_value_segment_dropped(self):
        v = make_valuation([(0, 0, 0), (0, 1, 1)])
        assert v.total == 1

    def test_zero_length_positive_value_rejected(self):
        with pytest.raises(MalformedValuationError):
            make_valuation([(0, 0, 1), (0, 1, 1)])


class TestValue:
    def test_trio_p1_prefix(self):
        assert TRIO_P1.value(piece((0, "2/3"))) == Fraction(1, 3)

    def test_empty_piece_is_worth_nothing(self):
        assert TRIO_P1.value(Piece.empty()) == 0

    def test_trio_p2_prefix(self):
        assert TRIO_P2.value(piece((0, "2/3"))) == Fraction(1, 2)

    def test_totals(self):
        assert QUARTET_P1.total == 12
        assert QUARTET_P4.total == 12

    def test_additive_over_disjoint_pieces(self):
        a = piece((0, "1/4"))
        b = piece(("1/2", "5/6"))
        assert TRIO_P3.value(a.union(b)) == TRIO_P3.value(a) + TRIO_P3.value(b)


class TestLeftmostPrefixPoint:
    def test_trio_p1_one_third(self):
        assert TRIO_P1.leftmost_prefix_point(Piece.whole(), "1/3") == Fraction(2, 3)

    def test_trio_p3_inside_suffix_region(self):
        region = piece(("5/9", 1))
        assert TRIO_P3.leftmost_prefix_point(region, "7/54") == Fraction(47, 72)

    def test_target_zero_returns_region_start(self):
        region = piece(("1/8", "3/4"))
        assert TRIO_P1.leftmost_prefix_point(region, 0) == Fraction(1, 8)

    def test_target_beyond_region_value_rejected(self):
        with pytest.raises(InsufficientValueError):
            TRIO_P1.leftmost_prefix_point(Piece.whole(), 2)

    def test_point_is_leftmost_when_zero_density_follows(self):
        # All value sits in [0,1/2); asking for everything must stop at 1/2,
        # not drift into the worthless tail.
        v = make_valuation([(0, "1/2", 1), ("1/2", 1, 0)])
        assert v.leftmost_prefix_point(Piece.whole(), 1) == Fraction(1, 2)

    def test_skips_worthless_prefix(self):
        v = make_valuation([(0, "1/2", 0), ("1/2", 1, 1)])
        assert v.leftmost_prefix_point(Piece.whole(), "1/2") == Fraction(3, 4)


class TestMarkEqual:
    def test_trio_p1_thirds(self):
        assert TRIO_P1.mark_equal(Piece.whole(), 3) == (
            piece((0, "2/3")),
            piece(("2/3", "5/6")),
            piece(("5/6", 1)),
        )

    def test_trio_p2_split_of_broken_region(self):
        region = piece((0, "2/3"), ("5/6", 1))
        assert TRIO_P2.mark_equal(region, 2) == (
            piece((0, "7/12")),
            piece(("7/12", "2/3"), ("5/6", 1)),
        )

    def test_single_mark_returns_region(self):
        region = piece(("1/4", "3/4"))
        assert TRIO_P3.mark_equal(region, 1) == (region,)

    def test_pieces_have_exactly_equal_values(self):
        pieces = QUARTET_P1.mark_equal(Piece.whole(), 4)
        values = [QUARTET_P1.value(p) for p in pieces]
        assert values == [3, 3, 3, 3]

    def test_pieces_union_to_region(self):
        region = piece((0, "1/3"), ("1/2", 1))
        pieces = QUARTET_P2.mark_equal(region, 3)
        union = Piece.empty()
        for p in pieces:
            union = union.union(p)
        assert union == region

    def test_worthless_region_divided_by_length(self):
        region = piece((0, "1/2"))
        pieces = TRIO_P1.mark_equal(region, 2)  # P1 values nothing below 1/2
        assert pieces == (piece((0, "1/4")), piece(("1/4", "1/2")))


class TestScale:
    def test_total_scales(self):
        assert make_valuation([(0, 1, 1)]).scale(7).total == 7

    def test_identity(self):
        assert TRIO_P2.scale(1) == TRIO_P2

    def test_value_scales_linearly(self):
        p = piece(("1/4", "1/2"))
        assert QUARTET_P2.scale(3).value(p) == 3 * QUARTET_P2.value(p) == 12

    def test_non_positive_factor_rejected(self):
        with pytest.raises(ValueError):
            TRIO_P1.scale(0)
        with pytest.raises(ValueError):
            TRIO_P1.scale(-2)
