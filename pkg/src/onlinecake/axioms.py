"""Fairness, efficiency and strategy property checkers.

Every checker consumes an :class:`Outcome` (or a :class:`Scenario` for the
meta-properties that need reruns) together with the players' *true*
valuations, and returns a :class:`PropertyReport` whose verdict carries a
structured witness whenever the property fails.

The Pareto checkers are certificates only within their search class: whole
pieces permuted among players, or whole atoms (the common refinement of every
valuation breakpoint and allocation boundary) reassigned. A ``True`` verdict
means "nothing in this class dominates", not full continuous optimality; the
report says so in its note.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace as dc_replace
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .cake import Interval, Piece, RationalLike, Valuation, make_valuation, rat, ONE, ZERO
from .errors import AuditInvariantError, SizeLimitError
from .procedures import (
    Arrive,
    Depart,
    Outcome,
    Procedure,
    Scenario,
    run,
)

MAX_PERMUTATION_PLAYERS = 8
MAX_ATOMS = 10
MAX_ATOM_PLAYERS = 4
MAX_ORDER_SCAN_PLAYERS = 6

PERMUTATION_NOTE = "certificate within the piece-permutation class only"
ATOM_NOTE = "certificate within the whole-atom reassignment class only"


@dataclass
class PropertyReport:
    """Verdict for one property on one outcome or scenario.

    ``holds`` is the conjunction of ``per_player`` where per-player verdicts
    make sense. A witness is attached exactly when the property fails.
    """

    name: str
    holds: bool
    per_player: dict[int, bool] = field(default_factory=dict)
    witness: dict | None = None
    note: str = ""

    def __post_init__(self):
        if self.holds and self.witness is not None:
            raise ValueError("a holding property must not carry a witness")
        if not self.holds and self.witness is None:
            raise ValueError("a failing property needs a witness")


def _own_values(o: Outcome, vals: Mapping[int, Valuation]) -> dict[int, Fraction]:
    return {pid: vals[pid].value(piece) for pid, piece in o.allocation}


def _event_positions(o: Outcome) -> tuple[dict[int, int], dict[int, int]]:
    arrive, depart = {}, {}
    for i, ev in enumerate(o.trace):
        if isinstance(ev, Arrive):
            arrive[ev.player] = i
        elif isinstance(ev, Depart):
            depart[ev.player] = i
    return arrive, depart


def check_proportional(o: Outcome, vals: Mapping[int, Valuation]) -> PropertyReport:
    """Each player gets at least a 1/n share of their own total."""
    n = len(o.allocation)
    own = _own_values(o, vals)
    per = {pid: own[pid] * n >= vals[pid].total for pid in own}
    witness = None
    if not all(per.values()):
        pid = min(p for p, ok in per.items() if not ok)
        witness = {
            "player": pid,
            "own_value": own[pid],
            "required": vals[pid].total / n,
        }
    return PropertyReport("proportional", all(per.values()), per, witness)


def check_forward_proportional(
    o: Outcome, vals: Mapping[int, Valuation]
) -> PropertyReport:
    """Each player gets 1/(n-k) of what remained when they arrived.

    k is the number of players already departed at that player's arrival; the
    requirement is measured with the player's own valuation of the
    remaining-cake snapshot.
    """
    n = len(o.allocation)
    own = _own_values(o, vals)
    per, shortfalls = {}, {}
    for pid, snap in o.snapshots:
        required_times = n - snap.departed
        ok = own[pid] * required_times >= vals[pid].value(snap.remaining)
        per[pid] = ok
        if not ok:
            shortfalls[pid] = {
                "player": pid,
                "own_value": own[pid],
                "required": vals[pid].value(snap.remaining) / required_times,
            }
    witness = None if all(per.values()) else shortfalls[min(shortfalls)]
    return PropertyReport("forward_proportional", all(per.values()), per, witness)


def check_envy(
    o: Outcome, vals: Mapping[int, Valuation], mode: str = "full"
) -> PropertyReport:
    """No player strictly prefers another player's allocation.

    ``mode`` restricts which allocations can be envied: "full" considers all
    of them, "forward" only those fixed after the envier's arrival, and
    "immediate" only those fixed between the envier's arrival and departure.
    """
    if mode not in ("full", "forward", "immediate"):
        raise ValueError(f"unknown envy mode {mode!r}")
    arrive, depart = _event_positions(o)
    own = _own_values(o, vals)
    alloc = o.allocation_map

    def in_window(p: int, q: int) -> bool:
        if mode == "full":
            return True
        if mode == "forward":
            return depart[q] > arrive[p]
        return arrive[p] < depart[q] < depart[p]

    per = {pid: True for pid in alloc}
    witness = None
    for p in sorted(alloc):
        for q in sorted(alloc):
            if p == q or not in_window(p, q):
                continue
            other = vals[p].value(alloc[q])
            if other > own[p]:
                per[p] = False
                if witness is None:
                    witness = {
                        "envier": p,
                        "envied": q,
                        "own_value": own[p],
                        "other_value": other,
                    }
    name = {"full": "envy_free", "forward": "forward_envy_free", "immediate": "immediate_envy_free"}[mode]
    return PropertyReport(name, all(per.values()), per, witness)


def check_equitable(o: Outcome, vals: Mapping[int, Valuation]) -> PropertyReport:
    """All players assign the same value to their own pieces."""
    own = _own_values(o, vals)
    values = sorted(set(own.values()))
    holds = len(values) <= 1
    per = {pid: holds for pid in own}
    witness = None if holds else {"own_values": dict(sorted(own.items()))}
    return PropertyReport("equitable", holds, per, witness)


def check_pareto_permutation(
    o: Outcome, vals: Mapping[int, Valuation], weak: bool = False
) -> PropertyReport:
    """Search every permutation of the allocated pieces for a dominating one.

    weak=True looks for a permutation strictly better for all players;
    weak=False for one at least as good for all and strictly better for some.
    """
    players = sorted(o.allocation_map)
    if len(players) > MAX_PERMUTATION_PLAYERS:
        raise SizeLimitError(
            f"{len(players)} players exceed the {MAX_PERMUTATION_PLAYERS}-player "
            f"permutation search limit"
        )
    pieces = [o.allocation_map[p] for p in players]
    value_of = {
        p: [vals[p].value(piece) for piece in pieces] for p in players
    }
    own = {p: value_of[p][i] for i, p in enumerate(players)}
    witness = None
    for perm in itertools.permutations(range(len(players))):
        gains = [value_of[p][perm[i]] - own[p] for i, p in enumerate(players)]
        if weak:
            dominating = all(g > 0 for g in gains)
        else:
            dominating = all(g >= 0 for g in gains) and any(g > 0 for g in gains)
        if dominating:
            witness = {
                "assignment": {p: pieces[perm[i]] for i, p in enumerate(players)},
                "values": {p: value_of[p][perm[i]] for i, p in enumerate(players)},
                "current_values": own,
            }
            break
    name = "weak_pareto_permutation" if weak else "pareto_permutation"
    holds = witness is None
    per = {p: holds for p in players}
    return PropertyReport(name, holds, per, witness, note=PERMUTATION_NOTE)


def outcome_atoms(o: Outcome, vals: Mapping[int, Valuation]) -> tuple[Interval, ...]:
    """Common refinement of all valuation breakpoints and allocation bounds."""
    points = {ZERO, ONE}
    for v in vals.values():
        points.update(v.breakpoints)
    for _, piece in o.allocation:
        for iv in piece.intervals:
            points.add(iv.lo)
            points.add(iv.hi)
    cuts = sorted(points)
    return tuple(Interval(a, b) for a, b in zip(cuts, cuts[1:]) if a < b)


def check_pareto_atoms(
    o: Outcome, vals: Mapping[int, Valuation], weak: bool = False
) -> PropertyReport:
    """Search every assignment of whole atoms to players for a dominating one.

    Stronger than the permutation search (that class is contained in this
    one), but still a certificate only within whole-atom reassignments.
    """
    players = sorted(o.allocation_map)
    atoms = outcome_atoms(o, vals)
    if len(atoms) > MAX_ATOMS or len(players) > MAX_ATOM_PLAYERS:
        raise SizeLimitError(
            f"{len(atoms)} atoms x {len(players)} players exceed the atom search "
            f"limits ({MAX_ATOMS} atoms, {MAX_ATOM_PLAYERS} players); use the "
            f"piece-permutation check instead"
        )
    atom_value = {
        p: [vals[p].value(Piece((a,))) for a in atoms] for p in players
    }
    own = {p: vals[p].value(o.allocation_map[p]) for p in players}
    # potential[p][j]: the most p could still gain from atoms j..end.
    potential = {p: [ZERO] * (len(atoms) + 1) for p in players}
    for p in players:
        for j in range(len(atoms) - 1, -1, -1):
            potential[p][j] = potential[p][j + 1] + atom_value[p][j]

    acc = {p: ZERO for p in players}
    assignment: list[int] = []
    witness = None

    def feasible(j: int) -> bool:
        for p in players:
            ceiling = acc[p] + potential[p][j]
            if weak:
                if ceiling <= own[p]:
                    return False
            else:
                if ceiling < own[p]:
                    return False
        return True

    def search(j: int) -> bool:
        nonlocal witness
        if not feasible(j):
            return False
        if j == len(atoms):
            if weak:
                found = all(acc[p] > own[p] for p in players)
            else:
                found = all(acc[p] >= own[p] for p in players) and any(
                    acc[p] > own[p] for p in players
                )
            if found:
                pieces = {
                    p: Piece(tuple(atoms[i] for i, owner in enumerate(assignment) if owner == p))
                    for p in players
                }
                witness = {
                    "assignment": pieces,
                    "values": dict(acc),
                    "current_values": dict(own),
                }
            return found
        for p in players:
            acc[p] += atom_value[p][j]
            assignment.append(p)
            if search(j + 1):
                return True
            assignment.pop()
            acc[p] -= atom_value[p][j]
        return False

    search(0)
    name = "weak_pareto_atoms" if weak else "pareto_atoms"
    holds = witness is None
    per = {p: holds for p in players}
    return PropertyReport(name, holds, per, witness, note=ATOM_NOTE)


def check_sequential(o: Outcome) -> PropertyReport:
    """Pieces are handed out left to right in departure order.

    Empty pieces are skipped; for the rest, everything a player takes must lie
    left of everything taken by any later-departing player.
    """
    _, depart = _event_positions(o)
    ordered = sorted(o.allocation_map, key=lambda pid: depart[pid])
    per = {pid: True for pid in ordered}
    witness = None
    for i, p in enumerate(ordered):
        piece_p = o.allocation_map[p]
        if piece_p.is_empty:
            continue
        for q in ordered[i + 1 :]:
            piece_q = o.allocation_map[q]
            if piece_q.is_empty:
                continue
            if piece_p.end > piece_q.start:
                per[p] = False
                if witness is None:
                    witness = {
                        "earlier": p,
                        "later": q,
                        "earlier_piece": piece_p,
                        "later_piece": piece_q,
                    }
    return PropertyReport("sequential", all(per.values()), per, witness)


def _scale_player(s: Scenario, pid: int, factor: Fraction) -> Scenario:
    players = tuple(
        (p, v.scale(factor) if p == pid else v) for p, v in s.players
    )
    reports = tuple(
        (p, v.scale(factor) if p == pid else v) for p, v in s.misreports
    )
    return dc_replace(s, players=players, misreports=reports)


def check_scale_invariance(
    s: Scenario, pid: int, factor: RationalLike
) -> PropertyReport:
    """Rerun with one player's valuation rescaled; the allocation must not move."""
    factor = rat(factor)
    if factor <= 0:
        raise ValueError(f"scale factor must be positive, got {factor}")
    base = run(s)
    scaled = run(_scale_player(s, pid, factor))
    per = {
        p: base.allocation_map[p] == scaled.allocation_map[p]
        for p in s.player_ids
    }
    holds = all(per.values())
    witness = None
    if not holds:
        moved = min(p for p, ok in per.items() if not ok)
        witness = {
            "scaled_player": pid,
            "factor": factor,
            "player": moved,
            "before": base.allocation_map[moved],
            "after": scaled.allocation_map[moved],
        }
    return PropertyReport("scale_invariant", holds, per, witness)


def _moves_earlier(order: tuple[int, ...]):
    """All (player, new_order) pairs where one player moves strictly earlier."""
    for i, pid in enumerate(order):
        for j in range(i):
            moved = list(order)
            moved.pop(i)
            moved.insert(j, pid)
            yield pid, tuple(moved)


def check_order_monotonicity(
    s: Scenario, procedure: Procedure | str | None = None
) -> PropertyReport:
    """Moving any player earlier must never lower that player's own value.

    Exhausts every arrival order and every single-player earlier move (the
    relative order of everyone else is unchanged), so it is limited to small
    instances.
    """
    if s.n > MAX_ORDER_SCAN_PLAYERS:
        raise SizeLimitError(
            f"{s.n} players exceed the {MAX_ORDER_SCAN_PLAYERS}-player order scan limit"
        )
    base = s if procedure is None else dc_replace(s, procedure=Procedure(procedure))
    vals = base.valuations
    outcomes: dict[tuple[int, ...], Outcome] = {}

    def outcome_for(order: tuple[int, ...]) -> Outcome:
        if order not in outcomes:
            outcomes[order] = run(dc_replace(base, arrival_order=order))
        return outcomes[order]

    violations = []
    per = {pid: True for pid in base.player_ids}
    for order in itertools.permutations(base.player_ids):
        for pid, earlier in _moves_earlier(order):
            before = vals[pid].value(outcome_for(order).piece(pid))
            after = vals[pid].value(outcome_for(earlier).piece(pid))
            if after < before:
                per[pid] = False
                violations.append(
                    {
                        "player": pid,
                        "from_order": order,
                        "to_order": earlier,
                        "value_before": before,
                        "value_after": after,
                    }
                )
    holds = not violations
    witness = None if holds else {**violations[0], "violations": violations}
    return PropertyReport("order_monotonic", holds, per, witness)


def check_manipulation(
    s: Scenario, pid: int, misreport: Valuation
) -> PropertyReport:
    """Does reporting ``misreport`` instead of the truth strictly pay off?

    Both runs are scored with the player's true valuation. A strict gain is a
    truthfulness violation, reported with both payoffs.
    """
    truthful_reports = tuple((p, v) for p, v in s.misreports if p != pid)
    truthful = run(dc_replace(s, misreports=truthful_reports))
    lying = run(dc_replace(s, misreports=truthful_reports + ((pid, misreport),)))
    truth_value = s.valuation(pid).value(truthful.piece(pid))
    lie_value = s.valuation(pid).value(lying.piece(pid))
    holds = lie_value <= truth_value
    witness = None
    if not holds:
        witness = {
            "player": pid,
            "truthful_value": truth_value,
            "misreport_value": lie_value,
            "truthful_piece": truthful.piece(pid),
            "misreport_piece": lying.piece(pid),
        }
    per = {pid: holds}
    return PropertyReport("truthfulness", holds, per, witness)


def surjectivity_valuations(
    procedure: Procedure | str, target_cuts: Sequence[RationalLike]
) -> list[Valuation]:
    """Valuations steering a procedure onto a chosen partition.

    Given strictly increasing cut positions ``0 = a_1 < ... < a_{n+1} = 1``,
    returns one valuation per player (in arrival order 1..n) such that running
    the named procedure hands player i exactly ``[a_i, a_{i+1})``.
    """
    procedure = Procedure(procedure)
    cuts = [rat(c) for c in target_cuts]
    if cuts[0] != ZERO or cuts[-1] != ONE or any(a >= b for a, b in zip(cuts, cuts[1:])):
        raise ValueError("cuts must increase strictly from 0 to 1")
    n = len(cuts) - 1
    if n < 2:
        raise ValueError("need at least two pieces")
    out = []
    if procedure is Procedure.CUT_AND_CHOOSE:
        for i in range(1, n + 1):
            if i <= n - 2:
                raw = [
                    (ZERO, cuts[i - 1], 0),
                    (cuts[i - 1], cuts[i], 1),
                    (cuts[i], cuts[i + 1], 0),
                    (cuts[i + 1], ONE, n - i),
                ]
            elif i == n - 1:
                raw = [
                    (ZERO, cuts[n - 2], 0),
                    (cuts[n - 2], cuts[n - 1], 1),
                    (cuts[n - 1], ONE, 1),
                ]
            else:
                raw = [(ZERO, cuts[n - 1], 0), (cuts[n - 1], ONE, 1)]
            out.append(make_valuation(raw))
    elif procedure in (Procedure.MOVING_KNIFE, Procedure.MARK_AND_CHOOSE):
        for i in range(1, n + 1):
            if i < n:
                raw = [
                    (ZERO, cuts[i - 1], 0),
                    (cuts[i - 1], cuts[i], 1),
                    (cuts[i], ONE, n - i),
                ]
            else:
                raw = [(ZERO, cuts[n - 1], 0), (cuts[n - 1], ONE, 1)]
            out.append(make_valuation(raw))
    else:
        raise ValueError(f"no steering recipe for procedure {procedure.value}")
    return out


# --- audits ----------------------------------------------------------------

_OUTCOME_CHECKS: dict[str, Callable[[Outcome, Mapping[int, Valuation]], PropertyReport]] = {
    "proportional": check_proportional,
    "forward_proportional": check_forward_proportional,
    "envy_free": lambda o, v: check_envy(o, v, "full"),
    "forward_envy_free": lambda o, v: check_envy(o, v, "forward"),
    "immediate_envy_free": lambda o, v: check_envy(o, v, "immediate"),
    "equitable": check_equitable,
    "pareto_permutation": lambda o, v: check_pareto_permutation(o, v, weak=False),
    "weak_pareto_permutation": lambda o, v: check_pareto_permutation(o, v, weak=True),
    "pareto_atoms": lambda o, v: check_pareto_atoms(o, v, weak=False),
    "weak_pareto_atoms": lambda o, v: check_pareto_atoms(o, v, weak=True),
    "sequential": lambda o, v: check_sequential(o),
}

SCALE_FACTORS = (Fraction(1, 3), Fraction(1), Fraction(7))


def _audit_scale(s: Scenario) -> PropertyReport:
    per = {}
    witness = None
    for pid in s.player_ids:
        ok = True
        for factor in SCALE_FACTORS:
            report = check_scale_invariance(s, pid, factor)
            if not report.holds:
                ok = False
                if witness is None:
                    witness = report.witness
        per[pid] = ok
    return PropertyReport("scale_invariant", all(per.values()), per, witness)


AUDIT_PROPERTIES = tuple(_OUTCOME_CHECKS) + ("scale_invariant", "order_monotonic")

IMPLICATIONS = (
    ("envy_free", "forward_envy_free"),
    ("forward_envy_free", "immediate_envy_free"),
    ("envy_free", "proportional"),
    ("forward_envy_free", "forward_proportional"),
    ("pareto_permutation", "weak_pareto_permutation"),
    ("pareto_atoms", "weak_pareto_atoms"),
    ("pareto_atoms", "pareto_permutation"),
    ("weak_pareto_atoms", "weak_pareto_permutation"),
)


def assert_implications(verdicts: Mapping[str, bool]):
    """Check the known implications between property verdicts.

    Raises :class:`AuditInvariantError` if, say, an outcome is reported envy
    free but not forward envy free; that always indicates a checker bug.
    """
    for stronger, weaker in IMPLICATIONS:
        if stronger in verdicts and weaker in verdicts:
            if verdicts[stronger] and not verdicts[weaker]:
                raise AuditInvariantError(
                    f"{stronger} holds but {weaker} does not; implication violated"
                )


def audit_scenario(
    s: Scenario,
    properties: Sequence[str] | None = None,
    outcome: Outcome | None = None,
) -> tuple[Outcome, dict[str, PropertyReport | None]]:
    """Run the scenario and evaluate the selected properties on its outcome.

    Size-guarded checks that refuse the instance are reported as ``None``
    rather than aborting the audit. The implication chain between computed
    verdicts is asserted on every call.
    """
    names = tuple(properties) if properties is not None else AUDIT_PROPERTIES
    unknown = [p for p in names if p not in AUDIT_PROPERTIES]
    if unknown:
        raise ValueError(f"unknown properties: {', '.join(unknown)}")
    if outcome is None:
        outcome = run(s)
    vals = s.valuations
    reports: dict[str, PropertyReport | None] = {}
    for name in names:
        try:
            if name == "scale_invariant":
                reports[name] = _audit_scale(s)
            elif name == "order_monotonic":
                reports[name] = check_order_monotonicity(s)
            else:
                reports[name] = _OUTCOME_CHECKS[name](outcome, vals)
        except SizeLimitError:
            reports[name] = None
    assert_implications({k: r.holds for k, r in reports.items() if r is not None})
    return outcome, reports
