"""Seeded random scenarios and the bulk property suite built on them."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .cake import Piece, Valuation, make_valuation
from .errors import CakeError
from .procedures import Procedure, Scenario, make_scenario, run, verify_trace
from .axioms import assert_implications, check_envy, check_forward_proportional, check_proportional, check_sequential

GRID = 24  # breakpoints land on i/24, keeping denominators small


def random_valuation(rng: random.Random, max_segments: int = 5) -> Valuation:
    """Piecewise-constant valuation with breakpoints on the 1/24 grid."""
    while True:
        count = rng.randint(1, max_segments)
        inner = sorted(rng.sample(range(1, GRID), count - 1)) if count > 1 else []
        bounds = [Fraction(0)] + [Fraction(i, GRID) for i in inner] + [Fraction(1)]
        values = [rng.randint(0, 8) for _ in range(count)]
        if any(values):
            triples = [
                (bounds[i], bounds[i + 1], values[i]) for i in range(count)
            ]
            return make_valuation(triples)


def random_scenario(
    rng: random.Random,
    procedure: Procedure | str,
    min_players: int = 2,
    max_players: int = 5,
    max_segments: int = 5,
) -> Scenario:
    """Random truthful scenario for one of the three main procedures."""
    procedure = Procedure(procedure)
    n = rng.randint(min_players, max_players)
    valuations = {pid: random_valuation(rng, max_segments) for pid in range(1, n + 1)}
    order = list(valuations)
    rng.shuffle(order)
    window = rng.randint(2, n) if procedure is Procedure.MOVING_KNIFE else None
    return make_scenario(valuations, procedure, order, window=window)


MAIN_PROCEDURES = (
    Procedure.CUT_AND_CHOOSE,
    Procedure.MOVING_KNIFE,
    Procedure.MARK_AND_CHOOSE,
)


@dataclass
class SuiteReport:
    """Tally of one randomized sweep; ``failures`` is empty on a clean run."""

    runs_per_procedure: int
    seed: int
    elapsed_seconds: float = 0.0
    counts: dict[str, dict[str, int]] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def rate(self, procedure: str, key: str) -> Fraction:
        c = self.counts[procedure]
        return Fraction(c[key], c["runs"]) if c["runs"] else Fraction(0)


def property_suite(seed: int, runs_per_procedure: int = 500) -> SuiteReport:
    """Run random scenarios through every main procedure and audit each one.

    For every run the outcome must partition the whole cake, replay cleanly,
    be forward proportional and immediately envy free, respect the
    envy-freeness implication chain, and (for cut-and-choose and the moving
    knife) be sequential. Violations are recorded, never raised, so a single
    bad case does not hide the rest.
    """
    report = SuiteReport(runs_per_procedure=runs_per_procedure, seed=seed)
    started = time.monotonic()
    for procedure in MAIN_PROCEDURES:
        rng = random.Random(f"{seed}:{procedure.value}")
        counts = {
            "runs": 0,
            "forward_proportional": 0,
            "immediate_envy_free": 0,
            "sequential": 0,
            "partition": 0,
            "replay": 0,
        }
        report.counts[procedure.value] = counts
        for i in range(runs_per_procedure):
            s = random_scenario(rng, procedure)
            label = f"{procedure.value}#{i}(n={s.n}, order={s.arrival_order})"
            try:
                outcome = run(s)
            except CakeError as exc:
                report.failures.append(f"{label}: engine error {exc}")
                continue
            counts["runs"] += 1
            vals = s.valuations
            pieces = [p for _, p in outcome.allocation]
            union = Piece.empty()
            for p in pieces:
                union = union.union(p)
            if union == Piece.whole() and union.length == sum(
                (p.length for p in pieces), Fraction(0)
            ):
                counts["partition"] += 1
            else:
                report.failures.append(f"{label}: allocation does not partition the cake")
            try:
                verify_trace(s, outcome)
                counts["replay"] += 1
            except CakeError as exc:
                report.failures.append(f"{label}: replay failed: {exc}")
            verdicts = {
                "proportional": check_proportional(outcome, vals).holds,
                "forward_proportional": check_forward_proportional(outcome, vals).holds,
                "envy_free": check_envy(outcome, vals, "full").holds,
                "forward_envy_free": check_envy(outcome, vals, "forward").holds,
                "immediate_envy_free": check_envy(outcome, vals, "immediate").holds,
            }
            try:
                assert_implications(verdicts)
            except CakeError as exc:
                report.failures.append(f"{label}: {exc}")
            if verdicts["forward_proportional"]:
                counts["forward_proportional"] += 1
            else:
                report.failures.append(f"{label}: not forward proportional")
            if verdicts["immediate_envy_free"]:
                counts["immediate_envy_free"] += 1
            else:
                report.failures.append(f"{label}: not immediately envy free")
            sequential = check_sequential(outcome).holds
            if sequential:
                counts["sequential"] += 1
            elif procedure is not Procedure.MARK_AND_CHOOSE:
                report.failures.append(f"{label}: not sequential")
    report.elapsed_seconds = time.monotonic() - started
    return report
