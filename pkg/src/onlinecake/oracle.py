"""Independent reference allocations for small instances.

Everything here recomputes the procedures for two and three players as
straight-line transcriptions over plain ``(lo, hi)`` span lists, deliberately
sharing no stepping logic with the engines in :mod:`onlinecake.procedures`.
Tests compare the two modules' allocations on every small fixture; a mismatch
means one of them drifted.

Scope: at most three players, each valuation carrying at most two maximal
stretches of positive density, and a window of exactly 2 for the moving
knife. Anything else raises :class:`OracleScopeError`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .cake import Piece, Interval, Valuation
from .errors import OracleScopeError
from .procedures import Knowledge, Procedure, Scenario

Span = tuple[Fraction, Fraction]
Segs = Sequence[tuple[Fraction, Fraction, Fraction]]  # (lo, hi, density)

_ZERO = Fraction(0)
_ONE = Fraction(1)
_WHOLE: list[Span] = [(_ZERO, _ONE)]


def _segments(v: Valuation) -> list[tuple[Fraction, Fraction, Fraction]]:
    return [(iv.lo, iv.hi, d) for iv, d in v.segments]


def _positive_runs(v: Valuation) -> int:
    runs, inside = 0, False
    for _, _, d in _segments(v):
        if d > 0 and not inside:
            runs += 1
        inside = d > 0
    return runs


def _measure(segs: Segs, spans: Sequence[Span]) -> Fraction:
    acc = _ZERO
    for a, b in spans:
        for lo, hi, d in segs:
            left, right = max(a, lo), min(b, hi)
            if left < right:
                acc += d * (right - left)
    return acc


def _prefix_cut(segs: Segs, spans: Sequence[Span], amount: Fraction) -> Fraction:
    """Leftmost point where the prefix of ``spans`` measures ``amount``."""
    if amount == 0:
        return spans[0][0]
    acc = _ZERO
    for a, b in spans:
        for lo, hi, d in segs:
            left, right = max(a, lo), min(b, hi)
            if left >= right or d == 0:
                continue
            here = d * (right - left)
            if acc + here >= amount:
                return left + (amount - acc) / d
            acc += here
    raise OracleScopeError(f"amount {amount} not reachable inside the region")


def _before(spans: Sequence[Span], x: Fraction) -> list[Span]:
    return [(a, min(b, x)) for a, b in spans if a < x]


def _after(spans: Sequence[Span], x: Fraction) -> list[Span]:
    return [(max(a, x), b) for a, b in spans if b > x]


def _minus(spans: Sequence[Span], taken: Sequence[Span]) -> list[Span]:
    out = list(spans)
    for ta, tb in taken:
        nxt = []
        for a, b in out:
            if tb <= a or b <= ta:
                nxt.append((a, b))
                continue
            if a < ta:
                nxt.append((a, ta))
            if tb < b:
                nxt.append((tb, b))
        out = nxt
    return out


def _equal_marks(segs: Segs, spans: Sequence[Span], count: int) -> list[list[Span]]:
    """Left-to-right pieces of equal measure (equal length if worthless)."""
    total = _measure(segs, spans)
    if total == 0:
        length = sum(b - a for a, b in spans)
        segs = [(_ZERO, _ONE, Fraction(1))]
        total = length
    rest = list(spans)
    marks = []
    for k in range(count - 1, 0, -1):
        x = _prefix_cut(segs, rest, _measure(segs, rest) / (k + 1))
        marks.append(_before(rest, x))
        rest = _after(rest, x)
    marks.append(rest)
    return marks


def _cheapest(segs: Segs, pieces: Sequence[Sequence[Span]]) -> int:
    """Index of the least valuable piece, leftmost on ties."""
    best, best_value = 0, _measure(segs, pieces[0])
    for i in range(1, len(pieces)):
        value = _measure(segs, pieces[i])
        if value < best_value:
            best, best_value = i, value
    return best


def _as_piece(spans: Sequence[Span]) -> Piece:
    return Piece(tuple(Interval(a, b) for a, b in spans if a < b))


def oracle_enumerate(s: Scenario) -> dict[int, Piece]:
    """Recompute the allocation for a small scenario, independently.

    Returns the allocation only; traces are the engine's business. Raises
    :class:`OracleScopeError` outside the supported instance class.
    """
    if s.n > 3:
        raise OracleScopeError(f"oracle covers at most 3 players, got {s.n}")
    reported = {}
    misreports = dict(s.misreports)
    for pid, v in s.players:
        eff = misreports.get(pid, v)
        if _positive_runs(eff) > 2:
            raise OracleScopeError(
                f"player {pid}'s valuation has more than two positive stretches"
            )
        reported[pid] = _segments(eff)

    order = list(s.arrival_order)
    if s.procedure is Procedure.DICTATOR:
        spans = {pid: [] for pid in order}
        spans[order[0]] = _WHOLE
    elif s.procedure is Procedure.CUT_AND_CHOOSE:
        spans = _cut_and_choose(reported, order)
    elif s.procedure is Procedure.MOVING_KNIFE:
        if s.window != 2:
            raise OracleScopeError("oracle covers the moving knife with window 2 only")
        spans = _moving_knife(reported, order)
    elif s.procedure is Procedure.MARK_AND_CHOOSE:
        spans = _mark_and_choose(reported, order)
    elif s.procedure is Procedure.BOUNDED_CUT_AND_CHOOSE:
        if s.n_max is None or s.knowledge is None:
            raise OracleScopeError("bounded scenario is missing n_max or knowledge")
        spans = _bounded_cut_and_choose(reported, order, s.n_max, s.knowledge)
    else:  # pragma: no cover - exhaustive over Procedure
        raise OracleScopeError(f"unsupported procedure {s.procedure}")
    return {pid: _as_piece(sp) for pid, sp in spans.items()}


def _cut_and_choose(reported, order):
    if len(order) == 2:
        a, b = order
        x = _prefix_cut(reported[a], _WHOLE, _measure(reported[a], _WHOLE) / 2)
        first, rest = _before(_WHOLE, x), _after(_WHOLE, x)
        if 2 * _measure(reported[b], first) >= _measure(reported[b], _WHOLE):
            return {b: first, a: rest}
        return {a: first, b: rest}

    a, b, c = order
    x = _prefix_cut(reported[a], _WHOLE, _measure(reported[a], _WHOLE) / 3)
    first, rest = _before(_WHOLE, x), _after(_WHOLE, x)
    if 3 * _measure(reported[b], first) >= _measure(reported[b], _WHOLE):
        # b leaves with the first slice; a cuts half of what is left for c.
        y = _prefix_cut(reported[a], rest, _measure(reported[a], rest) / 2)
        second, last = _before(rest, y), _after(rest, y)
        if 2 * _measure(reported[c], second) >= _measure(reported[c], rest):
            return {b: first, c: second, a: last}
        return {b: first, a: second, c: last}
    # a leaves with the slice it cut; b cuts half of what is left for c.
    y = _prefix_cut(reported[b], rest, _measure(reported[b], rest) / 2)
    second, last = _before(rest, y), _after(rest, y)
    if 2 * _measure(reported[c], second) >= _measure(reported[c], rest):
        return {a: first, c: second, b: last}
    return {a: first, b: second, c: last}


def _knife_winner(reported, present, spans, still, order):
    calls = {p: _prefix_cut(reported[p], spans, _measure(reported[p], spans) / still) for p in present}
    winner = min(present, key=lambda p: (calls[p], order.index(p)))
    return winner, calls[winner]


def _moving_knife(reported, order):
    if len(order) == 2:
        a, b = order
        winner, x = _knife_winner(reported, [a, b], _WHOLE, 2, order)
        loser = b if winner == a else a
        return {winner: _before(_WHOLE, x), loser: _after(_WHOLE, x)}

    a, b, c = order
    winner, x = _knife_winner(reported, [a, b], _WHOLE, 3, order)
    loser = b if winner == a else a
    rest = _after(_WHOLE, x)
    winner2, y = _knife_winner(reported, [loser, c], rest, 2, order)
    last = c if winner2 == loser else loser
    return {winner: _before(_WHOLE, x), winner2: _before(rest, y), last: _after(rest, y)}


def _mark_and_choose(reported, order):
    if len(order) == 2:
        a, b = order
        halves = _equal_marks(reported[a], _WHOLE, 2)
        give = _cheapest(reported[b], halves)
        return {a: halves[give], b: halves[1 - give]}

    a, b, c = order
    thirds = _equal_marks(reported[a], _WHOLE, 3)
    give = _cheapest(reported[b], thirds)
    rest = _minus(_WHOLE, thirds[give])
    halves = _equal_marks(reported[b], rest, 2)
    give2 = _cheapest(reported[c], halves)
    return {a: thirds[give], b: halves[give2], c: halves[1 - give2]}


def _bounded_cut_and_choose(reported, order, n_max, knowledge):
    knows_last = knowledge is not Knowledge.UNKNOWN_LAST

    def accepts(pid, offered, spans, share):
        return share * _measure(reported[pid], offered) >= _measure(reported[pid], spans)

    def cut(pid, spans, share):
        x = _prefix_cut(reported[pid], spans, _measure(reported[pid], spans) / share)
        return _before(spans, x), _after(spans, x)

    if len(order) == 2:
        a, b = order
        first, rest = cut(a, _WHOLE, n_max)
        if accepts(b, first, _WHOLE, 2 if knows_last else n_max):
            # b departs with the offer; a ends up with everything left
            # (under unknown_last only after an unanswered offer times out).
            return {b: first, a: rest}
        return {a: first, b: rest}

    a, b, c = order
    first, rest = cut(a, _WHOLE, n_max)
    if accepts(b, first, _WHOLE, n_max):
        second, last = cut(a, rest, n_max - 1)
        if accepts(c, second, rest, 2 if knows_last else n_max - 1):
            return {b: first, c: second, a: last}
        return {b: first, a: second, c: last}
    second, last = cut(b, rest, n_max - 1)
    if accepts(c, second, rest, 2 if knows_last else n_max - 1):
        return {a: first, c: second, b: last}
    return {a: first, b: second, c: last}
