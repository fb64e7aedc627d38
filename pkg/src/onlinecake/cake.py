"""Exact geometry of the unit-interval cake.

Positions, lengths and values are arbitrary-precision rationals; nothing in
this module (or anywhere downstream of it) rounds. Intervals follow a
half-open ``[lo, hi)`` convention so that partitions are unambiguous and a
boundary point belongs to exactly one side of a cut.

All types here are immutable and all operations are pure functions, so values
can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    InsufficientValueError,
    MalformedValuationError,
    ZeroValuationError,
)

Rational = Fraction
RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value: RationalLike) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Accepts ints, `Fraction` instances and strings such as ``"47/72"``.
    Floats are rejected outright: every quantity in this library must be
    exact, and a float argument is almost always an upstream mistake.
    """
    if isinstance(value, (float, bool)):
        raise TypeError(
            f"expected an exact rational, got {value!r}; pass an int, a Fraction "
            f"or a 'p/q' string"
        )
    return Fraction(value)


@dataclass(frozen=True)
class Interval:
    """Half-open interval ``[lo, hi)`` with ``0 <= lo <= hi <= 1``.

    An interval with ``lo == hi`` is empty; canonical pieces never store one.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = rat(self.lo), rat(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not (ZERO <= lo <= hi <= ONE):
            raise ValueError(f"interval [{lo},{hi}) must satisfy 0 <= lo <= hi <= 1")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_empty(self) -> bool:
        return self.lo == self.hi

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


@dataclass(frozen=True)
class Piece:
    """Canonical finite union of disjoint intervals.

    Construction sorts the intervals, drops empty ones and merges any pair that
    overlaps or touches, so two pieces covering the same set of points always
    compare equal. Canonicalisation is idempotent and order-insensitive.
    """

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self):
        spans = sorted(
            (iv for iv in self.intervals if not iv.is_empty), key=lambda iv: iv.lo
        )
        merged: list[Interval] = []
        for iv in spans:
            if merged and iv.lo <= merged[-1].hi:
                if iv.hi > merged[-1].hi:
                    merged[-1] = Interval(merged[-1].lo, iv.hi)
            else:
                merged.append(iv)
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def whole(cls) -> "Piece":
        """The full cake ``[0,1)``."""
        return cls((Interval(ZERO, ONE),))

    @classmethod
    def empty(cls) -> "Piece":
        return cls()

    @classmethod
    def from_spans(cls, spans: Iterable[tuple[RationalLike, RationalLike]]) -> "Piece":
        return cls(tuple(Interval(rat(a), rat(b)) for a, b in spans))

    @property
    def length(self) -> Fraction:
        return sum((iv.length for iv in self.intervals), ZERO)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def start(self) -> Fraction:
        """Leftmost point of the piece."""
        if self.is_empty:
            raise ValueError("empty piece has no start")
        return self.intervals[0].lo

    @property
    def end(self) -> Fraction:
        """Rightmost point of the piece."""
        if self.is_empty:
            raise ValueError("empty piece has no end")
        return self.intervals[-1].hi

    def union(self, other: "Piece") -> "Piece":
        return Piece(self.intervals + other.intervals)

    def intersect(self, other: "Piece") -> "Piece":
        out = []
        for a in self.intervals:
            for b in other.intervals:
                lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
                if lo < hi:
                    out.append(Interval(lo, hi))
        return Piece(tuple(out))

    def complement(self) -> "Piece":
        """Everything in the unit interval that is not in this piece."""
        gaps = []
        cursor = ZERO
        for iv in self.intervals:
            if cursor < iv.lo:
                gaps.append(Interval(cursor, iv.lo))
            cursor = iv.hi
        if cursor < ONE:
            gaps.append(Interval(cursor, ONE))
        return Piece(tuple(gaps))

    def difference(self, other: "Piece") -> "Piece":
        return self.intersect(other.complement())

    def split_at(self, x: RationalLike) -> tuple["Piece", "Piece"]:
        """Split into (part strictly left of ``x``, rest), both canonical.

        The two parts always reunite to the original piece; ``x`` itself
        belongs to the right part under the half-open convention.
        """
        x = rat(x)
        left = self.intersect(Piece((Interval(ZERO, x),)))
        right = self.intersect(Piece((Interval(x, ONE),)))
        return left, right

    def __str__(self) -> str:
        if self.is_empty:
            return "∅"
        return "∪".join(str(iv) for iv in self.intervals)


def piece(*spans: tuple[RationalLike, RationalLike]) -> Piece:
    """Shorthand constructor: ``piece((0, "2/3"), ("5/6", 1))``."""
    return Piece.from_spans(spans)


def _point_at_prefix_length(region: Piece, target: Fraction) -> Fraction:
    """Leftmost point whose prefix of ``region`` has length exactly ``target``."""
    acc = ZERO
    for iv in region.intervals:
        if acc + iv.length >= target:
            return iv.lo + (target - acc)
        acc += iv.length
    raise InsufficientValueError(f"length {target} exceeds region length {acc}")


@dataclass(frozen=True)
class Valuation:
    """Piecewise-constant value density over the unit interval.

    Segments tile ``[0,1)`` exactly; each carries a non-negative density
    (value per unit length) and the total value is strictly positive. Totals
    are deliberately not normalised: two players may value the whole cake
    differently, and every procedure downstream is insensitive to the scale.
    """

    segments: tuple[tuple[Interval, Fraction], ...]

    def __post_init__(self):
        merged: list[tuple[Interval, Fraction]] = []
        cursor = ZERO
        for iv, density in self.segments:
            density = rat(density)
            if density < 0:
                raise MalformedValuationError(f"negative density {density}")
            if iv.is_empty:
                continue
            if iv.lo != cursor:
                raise MalformedValuationError(
                    f"segments must tile [0,1] exactly; gap or overlap at {iv.lo}"
                )
            cursor = iv.hi
            if merged and merged[-1][1] == density:
                merged[-1] = (Interval(merged[-1][0].lo, iv.hi), density)
            else:
                merged.append((iv, density))
        if cursor != ONE:
            raise MalformedValuationError(f"segments stop at {cursor}, must reach 1")
        if not merged or all(d == 0 for _, d in merged):
            raise ZeroValuationError("valuation must assign positive value somewhere")
        object.__setattr__(self, "segments", tuple(merged))

    @classmethod
    def uniform(cls, total: RationalLike = 1) -> "Valuation":
        return make_valuation([(ZERO, ONE, rat(total))])

    @property
    def total(self) -> Fraction:
        """Value of the whole cake."""
        return sum((d * iv.length for iv, d in self.segments), ZERO)

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        """All segment endpoints, including 0 and 1."""
        return tuple(iv.lo for iv, _ in self.segments) + (ONE,)

    def value(self, p: Piece) -> Fraction:
        """Exact measure of a canonical piece under this valuation."""
        acc = ZERO
        for a in p.intervals:
            for seg, density in self.segments:
                lo, hi = max(a.lo, seg.lo), min(a.hi, seg.hi)
                if lo < hi and density:
                    acc += density * (hi - lo)
        return acc

    def scale(self, factor: RationalLike) -> "Valuation":
        """Multiply every density by a positive constant."""
        factor = rat(factor)
        if factor <= 0:
            raise ValueError(f"scale factor must be positive, got {factor}")
        return Valuation(tuple((iv, d * factor) for iv, d in self.segments))

    def leftmost_prefix_point(self, region: Piece, target: RationalLike) -> Fraction:
        """Smallest position whose prefix of ``region`` is worth exactly ``target``.

        The prefix is taken in the left-to-right linearisation of the region.
        ``target`` 0 returns the region's leftmost endpoint. When the exact
        value is first reached at the end of a positive-density stretch, that
        endpoint is returned, so the result is always the leftmost satisfying
        point even when a zero-density stretch follows.
        """
        target = rat(target)
        if region.is_empty:
            raise ValueError("cannot take a prefix of an empty region")
        if target < 0:
            raise InsufficientValueError(f"target {target} is negative")
        if target == 0:
            return region.start
        acc = ZERO
        for a in region.intervals:
            for seg, density in self.segments:
                lo, hi = max(a.lo, seg.lo), min(a.hi, seg.hi)
                if lo >= hi or density == 0:
                    continue
                gain = density * (hi - lo)
                if acc + gain >= target:
                    return lo + (target - acc) / density
                acc += gain
        raise InsufficientValueError(f"target {target} exceeds region value {acc}")

    def mark_equal(self, region: Piece, count: int) -> tuple[Piece, ...]:
        """Split ``region`` into ``count`` contiguous pieces of equal value.

        Cut positions are the leftmost satisfying points, so the result is
        deterministic. A region worth nothing to this valuation is divided
        into pieces of equal length instead, which keeps every piece
        non-empty.
        """
        if count < 1:
            raise ValueError("count must be at least 1")
        if region.is_empty:
            raise ValueError("cannot mark an empty region")
        total = self.value(region)
        if total == 0:
            cuts = [
                _point_at_prefix_length(region, region.length * k / count)
                for k in range(1, count)
            ]
        else:
            cuts = [
                self.leftmost_prefix_point(region, total * k / count)
                for k in range(1, count)
            ]
        pieces = []
        rest = region
        for x in cuts:
            left, rest = rest.split_at(x)
            pieces.append(left)
        pieces.append(rest)
        return tuple(pieces)

    def __str__(self) -> str:
        return ", ".join(f"{d} on {iv}" for iv, d in self.segments)


def make_valuation(
    raw_segments: Sequence[tuple[RationalLike, RationalLike, RationalLike]],
) -> Valuation:
    """Build a valuation from ``(lo, hi, total value of that segment)`` triples.

    The triples must run contiguously from 0 to 1. Segment values are totals,
    not densities; they are converted internally. Zero-length segments with
    zero value are tolerated and dropped, which keeps programmatic recipes
    free of special cases at the cake's ends.
    """
    segs: list[tuple[Interval, Fraction]] = []
    cursor = ZERO
    for lo, hi, total_value in raw_segments:
        lo, hi, total_value = rat(lo), rat(hi), rat(total_value)
        if lo != cursor:
            raise MalformedValuationError(
                f"segment starts at {lo}, expected {cursor} (gap or overlap)"
            )
        if hi < lo:
            raise MalformedValuationError(f"segment [{lo},{hi}] runs backwards")
        if total_value < 0:
            raise MalformedValuationError(f"negative segment value {total_value}")
        if hi == lo:
            if total_value != 0:
                raise MalformedValuationError(
                    f"zero-length segment at {lo} cannot carry value {total_value}"
                )
            continue
        segs.append((Interval(lo, hi), total_value / (hi - lo)))
        cursor = hi
    if cursor != ONE:
        raise MalformedValuationError(f"segments stop at {cursor}, must reach 1")
    if not segs or all(d == 0 for _, d in segs):
        raise ZeroValuationError("valuation must assign positive value somewhere")
    return Valuation(tuple(segs))
