"""Deterministic event-trace engines for the online division procedures.

Players arrive in a fixed order, act on their reported valuations with
risk-averse strategies, and depart with their share. Each engine returns an
:class:`Outcome` carrying the final allocation, the full event trace and a
snapshot of the remaining cake at every arrival, so audits can re-derive any
decision after the fact.

Scenarios and outcomes are immutable; independent runs can execute in
parallel without coordination.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .cake import Piece, RationalLike, Valuation, make_valuation, rat
from .errors import ConfigurationError, TraceReplayError


class Procedure(str, Enum):
    DICTATOR = "dictator"
    CUT_AND_CHOOSE = "cut_and_choose"
    MOVING_KNIFE = "moving_knife"
    MARK_AND_CHOOSE = "mark_and_choose"
    BOUNDED_CUT_AND_CHOOSE = "bounded_cut_and_choose"


class Knowledge(str, Enum):
    """What the bounded variant's players know about arrivals."""

    KNOWN_POSITION_KNOWN_LAST = "known_position_known_last"
    UNKNOWN_POSITION_KNOWN_LAST = "unknown_position_known_last"
    UNKNOWN_LAST = "unknown_last"


ValuationLike = Union[Valuation, Sequence[tuple[RationalLike, RationalLike, RationalLike]]]


def _as_valuation(v: ValuationLike) -> Valuation:
    if isinstance(v, Valuation):
        return v
    return make_valuation(v)


@dataclass(frozen=True)
class Scenario:
    """A complete description of one run: players, order, procedure, options.

    ``players`` maps small positive integer ids to true valuations (stored as
    a sorted tuple of pairs so scenarios hash and compare by value).
    ``misreports`` optionally overrides the valuation a player *acts on*;
    audits always score with the true one.
    """

    players: tuple[tuple[int, Valuation], ...]
    arrival_order: tuple[int, ...]
    procedure: Procedure
    window: int | None = None
    n_max: int | None = None
    knowledge: Knowledge | None = None
    misreports: tuple[tuple[int, Valuation], ...] = ()

    def __post_init__(self):
        players = tuple(sorted(self.players))
        object.__setattr__(self, "players", players)
        object.__setattr__(self, "arrival_order", tuple(self.arrival_order))
        object.__setattr__(self, "procedure", Procedure(self.procedure))
        if self.knowledge is not None:
            object.__setattr__(self, "knowledge", Knowledge(self.knowledge))
        object.__setattr__(self, "misreports", tuple(sorted(self.misreports)))

        ids = [pid for pid, _ in players]
        if len(ids) < 2:
            raise ValueError("a scenario needs at least two players")
        if len(set(ids)) != len(ids):
            raise ValueError("player ids must be unique")
        if any(not isinstance(pid, int) or pid < 1 for pid in ids):
            raise ValueError("player ids must be positive integers")
        if sorted(self.arrival_order) != ids:
            raise ValueError("arrival_order must be a permutation of the player ids")
        if self.window is not None and not 2 <= self.window <= len(ids):
            raise ValueError(f"window must lie in [2, {len(ids)}], got {self.window}")
        if self.n_max is not None and self.n_max < len(ids):
            raise ValueError(f"n_max {self.n_max} is below the player count {len(ids)}")
        known = set(ids)
        if any(pid not in known for pid, _ in self.misreports):
            raise ValueError("misreports refer to unknown player ids")

    @property
    def n(self) -> int:
        return len(self.players)

    @property
    def player_ids(self) -> tuple[int, ...]:
        return tuple(pid for pid, _ in self.players)

    @property
    def valuations(self) -> dict[int, Valuation]:
        """True valuations, by player id."""
        return dict(self.players)

    @property
    def misreport_map(self) -> dict[int, Valuation]:
        return dict(self.misreports)

    def valuation(self, pid: int) -> Valuation:
        return self.valuations[pid]


def make_scenario(
    valuations: Mapping[int, ValuationLike],
    procedure: Procedure | str,
    order: Sequence[int] | None = None,
    *,
    window: int | None = None,
    n_max: int | None = None,
    knowledge: Knowledge | str | None = None,
    misreports: Mapping[int, ValuationLike] | None = None,
) -> Scenario:
    """Convenience builder accepting plain dicts and segment-triple lists."""
    players = tuple((pid, _as_valuation(v)) for pid, v in valuations.items())
    if order is None:
        order = sorted(valuations)
    reports = tuple((pid, _as_valuation(v)) for pid, v in (misreports or {}).items())
    return Scenario(
        players=players,
        arrival_order=tuple(order),
        procedure=Procedure(procedure),
        window=window,
        n_max=n_max,
        knowledge=Knowledge(knowledge) if knowledge is not None else None,
        misreports=reports,
    )


# --- trace events ---------------------------------------------------------


@dataclass(frozen=True)
class Arrive:
    player: int


@dataclass(frozen=True)
class CutOffer:
    cutter: int
    piece: Piece


@dataclass(frozen=True)
class Accept:
    player: int
    piece: Piece


@dataclass(frozen=True)
class Decline:
    player: int
    piece: Piece


@dataclass(frozen=True)
class Mark:
    marker: int
    pieces: tuple[Piece, ...]


@dataclass(frozen=True)
class SelectFor:
    chooser: int
    piece: Piece
    recipient: int


@dataclass(frozen=True)
class KnifeCall:
    player: int
    position: Fraction
    round: int


@dataclass(frozen=True)
class Depart:
    player: int
    piece: Piece


@dataclass(frozen=True)
class Timeout:
    player: int


Event = Union[Arrive, CutOffer, Accept, Decline, Mark, SelectFor, KnifeCall, Depart, Timeout]


@dataclass(frozen=True)
class ArrivalSnapshot:
    """What a player sees on arrival: the unallocated cake and how many left."""

    remaining: Piece
    departed: int


@dataclass(frozen=True)
class Outcome:
    """Final allocation plus the trace that produced it.

    ``allocation`` lists (player, piece) pairs in departure order; allocated
    pieces are pairwise disjoint.
    """

    allocation: tuple[tuple[int, Piece], ...]
    trace: tuple[Event, ...]
    snapshots: tuple[tuple[int, ArrivalSnapshot], ...]

    @property
    def allocation_map(self) -> dict[int, Piece]:
        return dict(self.allocation)

    @property
    def departure_order(self) -> tuple[int, ...]:
        return tuple(pid for pid, _ in self.allocation)

    def piece(self, pid: int) -> Piece:
        return self.allocation_map[pid]

    def snapshot(self, pid: int) -> ArrivalSnapshot:
        return dict(self.snapshots)[pid]


# --- strategy primitives ---------------------------------------------------


def effective_valuation(s: Scenario, pid: int) -> Valuation:
    """Valuation the player acts on: the configured misreport, else the truth."""
    return s.misreport_map.get(pid, s.valuation(pid))


def accept_decision(
    v: Valuation, offered: Piece, remaining: Piece, players_left: int
) -> bool:
    """Risk-averse acceptance rule.

    Take the offer iff it is worth at least a ``1/players_left`` share of the
    remaining cake under ``v``; ties accept.
    """
    return v.value(offered) * players_left >= v.value(remaining)


def knife_call_point(v: Valuation, remaining: Piece, still_to_allocate: int) -> Fraction:
    """Where a risk-averse watcher calls: at a 1/j share of the cake left."""
    return v.leftmost_prefix_point(remaining, v.value(remaining) / still_to_allocate)


def _cut_slice(v: Valuation, remaining: Piece, share_of: int) -> Piece:
    """Leftmost slice worth exactly a 1/share_of fraction of ``remaining`` to ``v``."""
    x = v.leftmost_prefix_point(remaining, v.value(remaining) / share_of)
    return remaining.split_at(x)[0]


def _acceptance_share(s: Scenario, departed: int, is_last_arrival: bool) -> int:
    """Denominator of the acceptance threshold for the player deciding now."""
    if s.procedure is Procedure.BOUNDED_CUT_AND_CHOOSE:
        if s.knowledge is not Knowledge.UNKNOWN_LAST and is_last_arrival:
            return 2
        return s.n_max - departed
    return s.n - departed


# --- engine ---------------------------------------------------------------


@dataclass
class _Run:
    """Mutable per-run bookkeeping; never escapes the engine."""

    scenario: Scenario
    trace: list = field(default_factory=list)
    allocation: dict = field(default_factory=dict)
    snapshots: dict = field(default_factory=dict)
    remaining: Piece = field(default_factory=Piece.whole)
    departed: int = 0
    present: list = field(default_factory=list)

    def __post_init__(self):
        self.queue = list(self.scenario.arrival_order)

    @property
    def more_arrivals(self) -> bool:
        return bool(self.queue)

    def arrive(self) -> int:
        pid = self.queue.pop(0)
        self.snapshots[pid] = ArrivalSnapshot(self.remaining, self.departed)
        self.trace.append(Arrive(pid))
        self.present.append(pid)
        return pid

    def record(self, event: Event):
        self.trace.append(event)

    def depart(self, pid: int, piece: Piece):
        self.trace.append(Depart(pid, piece))
        self.allocation[pid] = piece
        self.remaining = self.remaining.difference(piece)
        self.departed += 1
        self.present.remove(pid)

    def outcome(self) -> Outcome:
        return Outcome(
            allocation=tuple(self.allocation.items()),
            trace=tuple(self.trace),
            snapshots=tuple(self.snapshots.items()),
        )


def run_dictator(s: Scenario) -> Outcome:
    """Hand the whole cake to the first player to arrive."""
    run = _Run(s)
    first = run.arrive()
    run.depart(first, Piece.whole())
    while run.more_arrivals:
        run.depart(run.arrive(), Piece.empty())
    return run.outcome()


def run_cut_and_choose(s: Scenario) -> Outcome:
    """One waiting cutter offers a slice; each arrival takes it or swaps in.

    The cutter cuts the leftmost slice worth exactly a 1/j share of the
    remaining cake (j players still unallocated). The next arrival accepts it
    and departs, or declines, in which case the cutter departs with it and the
    arrival becomes the new cutter. The last player left takes the remainder.
    """
    run = _Run(s)
    cutter = run.arrive()
    while True:
        to_allocate = s.n - run.departed
        if to_allocate == 1:
            run.depart(cutter, run.remaining)
            return run.outcome()
        offer = _cut_slice(effective_valuation(s, cutter), run.remaining, to_allocate)
        run.record(CutOffer(cutter, offer))
        arrival = run.arrive()
        if accept_decision(
            effective_valuation(s, arrival), offer, run.remaining, to_allocate
        ):
            run.record(Accept(arrival, offer))
            run.depart(arrival, offer)
        else:
            run.record(Decline(arrival, offer))
            run.depart(cutter, offer)
            cutter = arrival


def run_moving_knife(s: Scenario) -> Outcome:
    """Windowed knife sweeps: the lowest call wins the prefix and departs.

    The first ``window`` arrivals watch a knife sweep the remaining cake left
    to right; each would call at a 1/j share of what is left (j players still
    unallocated, not the window size). The lowest call point wins, ties going
    to the earlier arrival. The winner departs with the prefix, the next
    player (if any) arrives, and the final player takes the remainder.
    """
    if s.window is None:
        raise ConfigurationError("moving_knife needs a window size")
    run = _Run(s)
    for _ in range(s.window):
        run.arrive()
    round_no = 0
    while True:
        if len(run.present) == 1:
            run.depart(run.present[0], run.remaining)
            return run.outcome()
        to_allocate = s.n - run.departed
        round_no += 1
        calls = {}
        for pid in run.present:
            pos = knife_call_point(effective_valuation(s, pid), run.remaining, to_allocate)
            run.record(KnifeCall(pid, pos, round_no))
            calls[pid] = pos
        winner = min(run.present, key=lambda pid: calls[pid])
        run.depart(winner, run.remaining.split_at(calls[winner])[0])
        if run.more_arrivals:
            run.arrive()


def run_mark_and_choose(s: Scenario) -> Outcome:
    """Marker splits the rest into equal shares; the arrival picks one for them.

    Each waiting marker divides the remaining cake into j equally valued
    contiguous pieces (j players still unallocated). The next arrival hands
    the marker the piece worth least to the arrival (ties leftmost) and takes
    over as marker; the last arrival keeps whatever is left.
    """
    run = _Run(s)
    marker = run.arrive()
    while True:
        pieces = effective_valuation(s, marker).mark_equal(
            run.remaining, s.n - run.departed
        )
        run.record(Mark(marker, pieces))
        chooser = run.arrive()
        vc = effective_valuation(s, chooser)
        _, give = min(enumerate(pieces), key=lambda item: (vc.value(item[1]), item[0]))
        run.record(SelectFor(chooser, give, marker))
        run.depart(marker, give)
        if not run.more_arrivals:
            run.depart(chooser, run.remaining)
            return run.outcome()
        marker = chooser


def run_bounded_cut_and_choose(s: Scenario) -> Outcome:
    """Cut-and-choose when only an upper bound on the player count is known.

    Cut fractions use ``1/(n_max - k)`` of the cutter's remaining value, with
    k the number of players already allocated. Arrivals accept at the same
    ``1/(n_max - k)`` share, except that an arrival known to be last holds out
    for half. When nobody knows the last arrival, a waiting cutter whose offer
    draws no arrival times out and takes everything still on the table.
    """
    if s.procedure is not Procedure.BOUNDED_CUT_AND_CHOOSE:
        raise ConfigurationError("scenario is not configured for the bounded variant")
    if s.n_max is None:
        raise ConfigurationError("bounded cut-and-choose needs n_max")
    if s.knowledge is None:
        raise ConfigurationError("bounded cut-and-choose needs a knowledge case")
    knows_last = s.knowledge is not Knowledge.UNKNOWN_LAST
    run = _Run(s)
    cutter = run.arrive()
    while True:
        if knows_last and not run.more_arrivals:
            run.depart(cutter, run.remaining)
            return run.outcome()
        share = s.n_max - run.departed
        offer = _cut_slice(effective_valuation(s, cutter), run.remaining, share)
        run.record(CutOffer(cutter, offer))
        if not run.more_arrivals:
            run.record(Timeout(cutter))
            run.depart(cutter, run.remaining)
            return run.outcome()
        arrival = run.arrive()
        threshold = _acceptance_share(s, run.departed, is_last_arrival=not run.more_arrivals)
        if accept_decision(
            effective_valuation(s, arrival), offer, run.remaining, threshold
        ):
            run.record(Accept(arrival, offer))
            run.depart(arrival, offer)
        else:
            run.record(Decline(arrival, offer))
            run.depart(cutter, offer)
            cutter = arrival


_RUNNERS = {
    Procedure.DICTATOR: run_dictator,
    Procedure.CUT_AND_CHOOSE: run_cut_and_choose,
    Procedure.MOVING_KNIFE: run_moving_knife,
    Procedure.MARK_AND_CHOOSE: run_mark_and_choose,
    Procedure.BOUNDED_CUT_AND_CHOOSE: run_bounded_cut_and_choose,
}


def run(s: Scenario) -> Outcome:
    """Execute the scenario's procedure."""
    return _RUNNERS[s.procedure](s)


# --- replay ----------------------------------------------------------------


def verify_trace(s: Scenario, o: Outcome) -> bool:
    """Re-derive every decision in the trace from its visible state.

    Walks the trace maintaining only what the players could see (remaining
    cake, departure count, who is present) and recomputes each cut, call,
    mark, selection and accept/decline. Raises :class:`TraceReplayError` on
    the first divergence; returns True when the whole trace replays cleanly.
    """
    remaining = Piece.whole()
    departed = 0
    present: list[int] = []
    queue = list(s.arrival_order)
    snapshots = dict(o.snapshots)
    alloc = o.allocation_map
    offer: CutOffer | None = None
    marks: Mark | None = None
    calls: dict[int, Fraction] = {}
    pending: tuple[int, Piece] | None = None

    def fail(msg: str):
        raise TraceReplayError(msg)

    bounded = s.procedure is Procedure.BOUNDED_CUT_AND_CHOOSE
    for idx, ev in enumerate(o.trace):
        if isinstance(ev, Arrive):
            if not queue or queue[0] != ev.player:
                fail(f"event {idx}: arrival of {ev.player} out of order")
            queue.pop(0)
            present.append(ev.player)
            snap = snapshots.get(ev.player)
            if snap is None or snap.remaining != remaining or snap.departed != departed:
                fail(f"event {idx}: snapshot for player {ev.player} does not match")
        elif isinstance(ev, CutOffer):
            if ev.cutter not in present:
                fail(f"event {idx}: cutter {ev.cutter} is not present")
            share = (s.n_max if bounded else s.n) - departed
            expected = _cut_slice(effective_valuation(s, ev.cutter), remaining, share)
            if expected != ev.piece:
                fail(f"event {idx}: cut {ev.piece} differs from recomputed {expected}")
            offer = ev
        elif isinstance(ev, (Accept, Decline)):
            if offer is None:
                fail(f"event {idx}: decision without a pending offer")
            if ev.piece != offer.piece:
                fail(f"event {idx}: decision on a piece that was not offered")
            share = _acceptance_share(s, departed, is_last_arrival=not queue)
            verdict = accept_decision(
                effective_valuation(s, ev.player), offer.piece, remaining, share
            )
            if verdict != isinstance(ev, Accept):
                fail(f"event {idx}: player {ev.player} decision does not replay")
            pending = (ev.player, offer.piece) if verdict else (offer.cutter, offer.piece)
            offer = None
        elif isinstance(ev, Mark):
            expected_pieces = effective_valuation(s, ev.marker).mark_equal(
                remaining, s.n - departed
            )
            if expected_pieces != ev.pieces:
                fail(f"event {idx}: marks do not replay")
            marks = ev
        elif isinstance(ev, SelectFor):
            if marks is None:
                fail(f"event {idx}: selection without pending marks")
            vc = effective_valuation(s, ev.chooser)
            _, give = min(
                enumerate(marks.pieces), key=lambda item: (vc.value(item[1]), item[0])
            )
            if give != ev.piece or ev.recipient != marks.marker:
                fail(f"event {idx}: selection does not replay")
            pending = (ev.recipient, ev.piece)
            marks = None
        elif isinstance(ev, KnifeCall):
            expected_pos = knife_call_point(
                effective_valuation(s, ev.player), remaining, s.n - departed
            )
            if expected_pos != ev.position:
                fail(f"event {idx}: call at {ev.position}, recomputed {expected_pos}")
            calls[ev.player] = ev.position
        elif isinstance(ev, Timeout):
            if not bounded or s.knowledge is not Knowledge.UNKNOWN_LAST:
                fail(f"event {idx}: timeout outside the unknown-last bounded variant")
            if queue or offer is None:
                fail(f"event {idx}: timeout while arrivals or no offer were pending")
            pending = (ev.player, remaining)
            offer = None
        elif isinstance(ev, Depart):
            if pending is not None:
                who, what = pending
                if ev.player != who or ev.piece != what:
                    fail(f"event {idx}: departure does not match the decision")
                pending = None
            elif calls:
                if len(calls) != len(present):
                    fail(f"event {idx}: departure before every present player called")
                winner = min(present, key=lambda pid: calls[pid])
                expected_piece = remaining.split_at(calls[winner])[0]
                if ev.player != winner or ev.piece != expected_piece:
                    fail(f"event {idx}: knife departure does not replay")
                calls.clear()
            else:
                if len(present) != 1 or ev.player != present[0]:
                    fail(f"event {idx}: unexpected departure of {ev.player}")
                if ev.piece != remaining:
                    fail(f"event {idx}: remainder departure with wrong piece")
            if alloc.get(ev.player) != ev.piece:
                fail(f"event {idx}: allocation differs from departure piece")
            remaining = remaining.difference(ev.piece)
            departed += 1
            present.remove(ev.player)
        else:  # pragma: no cover - exhaustive over Event
            fail(f"event {idx}: unknown event {ev!r}")
    if queue or present or departed != s.n:
        fail("trace ended with players still in flight")
    return True
