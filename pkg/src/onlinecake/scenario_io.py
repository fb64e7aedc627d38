"""Line-oriented scenario files.

Grammar (one directive per line, ``#`` starts a comment, blank lines ignored):

    procedure NAME            cut_and_choose | moving_knife | mark_and_choose |
                              dictator | bounded_cut_and_choose
    window K                  moving knife only
    n_max N                   bounded variant only
    knowledge CASE            known_position_known_last |
                              unknown_position_known_last | unknown_last
    arrival ID ID ...         arrival order, a permutation of the player ids
    player ID LO HI VALUE ... true valuation as (lo, hi, segment value) triples
    misreport ID LO HI VALUE ... reported valuation, same triple format

Every number is an exact rational written as an integer or ``p/q``; decimals
are rejected so exactness survives the round trip.
"""

from __future__ import annotations

from fractions import Fraction

from .cake import Valuation, make_valuation
from .errors import CakeError, ScenarioParseError
from .procedures import Knowledge, Procedure, Scenario


def _parse_rational(token: str, line: int) -> Fraction:
    if "." in token:
        raise ScenarioParseError(
            f"decimal {token!r} is not exact; write it as p/q", line=line, code="decimal"
        )
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ScenarioParseError(f"bad rational {token!r}", line=line, code="bad-rational")


def _parse_int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ScenarioParseError(f"bad {what} {token!r}", line=line, code="bad-int")


def _parse_triples(tokens: list[str], line: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    if not tokens or len(tokens) % 3:
        raise ScenarioParseError(
            "valuation needs (lo, hi, value) triples", line=line, code="bad-segments"
        )
    nums = [_parse_rational(t, line) for t in tokens]
    return [tuple(nums[i : i + 3]) for i in range(0, len(nums), 3)]


def _build_valuation(triples, line: int, who: str) -> Valuation:
    try:
        return make_valuation(triples)
    except CakeError as exc:
        raise ScenarioParseError(f"{who}: {exc}", line=line, code="malformed-valuation")


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario file, reporting the offending line on failure."""
    procedure: Procedure | None = None
    window = n_max = None
    knowledge: Knowledge | None = None
    arrival: tuple[int, ...] | None = None
    players: dict[int, Valuation] = {}
    misreports: dict[int, Valuation] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        directive, *args = line.split()
        if directive == "procedure":
            if len(args) != 1:
                raise ScenarioParseError("procedure takes one name", line=lineno, code="arity")
            try:
                procedure = Procedure(args[0])
            except ValueError:
                raise ScenarioParseError(
                    f"unknown procedure {args[0]!r}", line=lineno, code="bad-procedure"
                )
        elif directive == "window":
            if len(args) != 1:
                raise ScenarioParseError("window takes one count", line=lineno, code="arity")
            window = _parse_int(args[0], lineno, "window")
        elif directive == "n_max":
            if len(args) != 1:
                raise ScenarioParseError("n_max takes one count", line=lineno, code="arity")
            n_max = _parse_int(args[0], lineno, "n_max")
        elif directive == "knowledge":
            if len(args) != 1:
                raise ScenarioParseError("knowledge takes one case", line=lineno, code="arity")
            try:
                knowledge = Knowledge(args[0])
            except ValueError:
                raise ScenarioParseError(
                    f"unknown knowledge case {args[0]!r}", line=lineno, code="bad-knowledge"
                )
        elif directive == "arrival":
            arrival = tuple(_parse_int(a, lineno, "player id") for a in args)
            if not arrival:
                raise ScenarioParseError("arrival needs player ids", line=lineno, code="arity")
        elif directive == "player":
            if not args:
                raise ScenarioParseError("player needs an id", line=lineno, code="arity")
            pid = _parse_int(args[0], lineno, "player id")
            if pid in players:
                raise ScenarioParseError(
                    f"player {pid} defined twice", line=lineno, code="duplicate-player"
                )
            players[pid] = _build_valuation(
                _parse_triples(args[1:], lineno), lineno, f"player {pid}"
            )
        elif directive == "misreport":
            if not args:
                raise ScenarioParseError("misreport needs an id", line=lineno, code="arity")
            pid = _parse_int(args[0], lineno, "player id")
            if pid in misreports:
                raise ScenarioParseError(
                    f"misreport for {pid} defined twice", line=lineno, code="duplicate-misreport"
                )
            misreports[pid] = _build_valuation(
                _parse_triples(args[1:], lineno), lineno, f"misreport {pid}"
            )
        else:
            raise ScenarioParseError(
                f"unknown directive {directive!r}", line=lineno, code="bad-directive"
            )

    if procedure is None:
        raise ScenarioParseError("missing procedure line", code="missing-procedure")
    if not players:
        raise ScenarioParseError("no players defined", code="empty-players")
    if arrival is None:
        arrival = tuple(sorted(players))
    try:
        return Scenario(
            players=tuple(players.items()),
            arrival_order=arrival,
            procedure=procedure,
            window=window,
            n_max=n_max,
            knowledge=knowledge,
            misreports=tuple(misreports.items()),
        )
    except ValueError as exc:
        raise ScenarioParseError(str(exc), code="invalid-scenario")


def _triples(v: Valuation) -> str:
    parts = []
    for iv, density in v.segments:
        parts += [str(iv.lo), str(iv.hi), str(density * iv.length)]
    return " ".join(parts)


def serialize_scenario(s: Scenario) -> str:
    """Render a scenario back into the file format; parse round-trips exactly."""
    lines = [f"procedure {s.procedure.value}"]
    if s.window is not None:
        lines.append(f"window {s.window}")
    if s.n_max is not None:
        lines.append(f"n_max {s.n_max}")
    if s.knowledge is not None:
        lines.append(f"knowledge {s.knowledge.value}")
    lines.append("arrival " + " ".join(str(p) for p in s.arrival_order))
    for pid, v in s.players:
        lines.append(f"player {pid} {_triples(v)}")
    for pid, v in s.misreports:
        lines.append(f"misreport {pid} {_triples(v)}")
    return "\n".join(lines) + "\n"
