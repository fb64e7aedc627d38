"""Command line interface: run, audit, scan-orders, fixtures.

Exit codes: 0 success (and all expectations matched), 1 usage or parse error,
2 engine error, 3 audit mismatch against stored expectations.

``--machine`` switches every command to one JSON record per line with all
numbers as exact ``p/q`` strings; the human tables print the same numbers.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import sys
from enum import Enum
from fractions import Fraction
from pathlib import Path

import click

from .axioms import AUDIT_PROPERTIES, PropertyReport, audit_scenario, check_order_monotonicity
from .cake import Piece
from .errors import CakeError, ScenarioParseError, SizeLimitError
from .fixtures import FIXTURES, verify_fixture
from .generate import property_suite
from .procedures import (
    Accept,
    Arrive,
    CutOffer,
    Decline,
    Depart,
    KnifeCall,
    Knowledge,
    Mark,
    Outcome,
    Procedure,
    Scenario,
    SelectFor,
    Timeout,
    run,
)
from .scenario_io import parse_scenario, serialize_scenario

# The documented contract is 1 for every usage problem, click's default is 2.
click.exceptions.UsageError.exit_code = 1

USAGE_EXIT = 1
ENGINE_EXIT = 2
MISMATCH_EXIT = 3


def _usage_fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(USAGE_EXIT)


def _jsonable(value):
    if isinstance(value, Piece):
        return [[str(iv.lo), str(iv.hi)] for iv in value.intervals]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit(record: dict):
    click.echo(json.dumps(_jsonable(record), sort_keys=True))


def _load_scenario(source: str) -> Scenario:
    path = Path(source)
    if path.is_file():
        try:
            return parse_scenario(path.read_text(encoding="utf-8"))
        except ScenarioParseError as exc:
            click.echo(f"error: {source}: {exc}", err=True)
            sys.exit(USAGE_EXIT)
    name = source.removeprefix("fixtures/")
    if name in FIXTURES:
        return FIXTURES[name].scenario
    _usage_fail(f"{source!r} is neither a scenario file nor a fixture name")


def _fixture_name(source: str) -> str | None:
    name = source.removeprefix("fixtures/")
    return name if name in FIXTURES and not Path(source).is_file() else None


def _apply_overrides(s: Scenario, procedure, window, n_max, knowledge) -> Scenario:
    changes = {}
    if procedure is not None:
        try:
            changes["procedure"] = Procedure(procedure)
        except ValueError:
            _usage_fail(f"unknown procedure {procedure!r}")
    if window is not None:
        changes["window"] = window
    if n_max is not None:
        changes["n_max"] = n_max
    if knowledge is not None:
        try:
            changes["knowledge"] = Knowledge(knowledge)
        except ValueError:
            _usage_fail(f"unknown knowledge case {knowledge!r}")
    if not changes:
        return s
    try:
        return dataclasses.replace(s, **changes)
    except ValueError as exc:
        _usage_fail(str(exc))


def _run_engine(s: Scenario) -> Outcome:
    try:
        return run(s)
    except CakeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ENGINE_EXIT)


def _event_text(ev) -> str:
    if isinstance(ev, Arrive):
        return f"arrive P{ev.player}"
    if isinstance(ev, CutOffer):
        return f"offer P{ev.cutter} {ev.piece}"
    if isinstance(ev, Accept):
        return f"accept P{ev.player} {ev.piece}"
    if isinstance(ev, Decline):
        return f"decline P{ev.player} {ev.piece}"
    if isinstance(ev, Mark):
        inner = " | ".join(str(p) for p in ev.pieces)
        return f"mark P{ev.marker} {{{inner}}}"
    if isinstance(ev, SelectFor):
        return f"select P{ev.chooser} gives {ev.piece} to P{ev.recipient}"
    if isinstance(ev, KnifeCall):
        return f"call P{ev.player} at {ev.position} round {ev.round}"
    if isinstance(ev, Depart):
        return f"depart P{ev.player} with {ev.piece}"
    if isinstance(ev, Timeout):
        return f"timeout P{ev.player}"
    raise TypeError(f"unknown event {ev!r}")


def _event_record(ev) -> dict:
    record = {"record": "event", "type": type(ev).__name__.lower()}
    record.update({f.name: getattr(ev, f.name) for f in dataclasses.fields(ev)})
    return record


def _print_allocation(s: Scenario, outcome: Outcome, machine: bool):
    vals = s.valuations
    for pid, pc in outcome.allocation:
        value = vals[pid].value(pc)
        share = value / vals[pid].total
        if machine:
            _emit(
                {
                    "record": "allocation",
                    "player": pid,
                    "piece": pc,
                    "value": value,
                    "share": share,
                }
            )
        else:
            click.echo(f"P{pid} {pc} {value} {share}")


def _print_trace(outcome: Outcome, machine: bool):
    if machine:
        for ev in outcome.trace:
            _emit(_event_record(ev))
    else:
        click.echo("trace:")
        for ev in outcome.trace:
            click.echo(f"  {_event_text(ev)}")


@click.group()
def cli():
    """Exact online cake division: run procedures, audit fairness, replay."""


_procedure_option = click.option("--procedure", default=None, help="override the scenario's procedure")
_window_option = click.option("--window", type=int, default=None, help="moving-knife window size")
_n_max_option = click.option("--n-max", "n_max", type=int, default=None, help="player-count bound")
_knowledge_option = click.option("--knowledge", default=None, help="bounded-variant knowledge case")
_machine_option = click.option("--machine", is_flag=True, help="one JSON record per line")


@cli.command("run")
@click.argument("source")
@_procedure_option
@_window_option
@_n_max_option
@_knowledge_option
@click.option("--trace", "show_trace", is_flag=True, help="print the full event trace")
@_machine_option
def cmd_run(source, procedure, window, n_max, knowledge, show_trace, machine):
    """Execute SOURCE (a scenario file or fixture name) and print the allocation."""
    s = _apply_overrides(_load_scenario(source), procedure, window, n_max, knowledge)
    outcome = _run_engine(s)
    _print_allocation(s, outcome, machine)
    if show_trace:
        _print_trace(outcome, machine)


def _verdict_mark(report: PropertyReport | None) -> str:
    if report is None:
        return "size-guard"
    return "✓" if report.holds else "✗"


def _witness_summary(report: PropertyReport) -> str:
    if report.holds or not report.witness:
        return ""
    shown = {
        k: v
        for k, v in report.witness.items()
        if not isinstance(v, (dict, list, tuple, Piece))
    }
    if not shown:
        return ""
    inner = ", ".join(f"{k}={v}" for k, v in shown.items())
    return f"  ({inner})"


@cli.command("audit")
@click.argument("source", required=False)
@click.option("--properties", default=None, help="comma-separated property subset")
@_procedure_option
@_window_option
@_n_max_option
@_knowledge_option
@click.option("--random", "random_runs", type=int, default=None, help="audit N random scenarios per procedure instead of a file")
@click.option("--seed", type=int, default=0, help="seed for --random scenario generation")
@_machine_option
def cmd_audit(source, properties, procedure, window, n_max, knowledge, random_runs, seed, machine):
    """Audit SOURCE against the property catalogue.

    With --random N, generates N seeded scenarios per main procedure and
    checks the bulk invariants on all of them instead.
    """
    if random_runs is not None:
        report = property_suite(seed, random_runs)
        if machine:
            for proc, counts in report.counts.items():
                _emit({"record": "suite", "procedure": proc, **counts})
            for failure in report.failures:
                _emit({"record": "suite-failure", "detail": failure})
        else:
            for proc, counts in report.counts.items():
                click.echo(
                    f"{proc}: runs={counts['runs']} forward_proportional="
                    f"{counts['forward_proportional']} immediate_envy_free="
                    f"{counts['immediate_envy_free']} sequential={counts['sequential']} "
                    f"partition={counts['partition']} replay={counts['replay']}"
                )
            for failure in report.failures:
                click.echo(f"FAIL {failure}")
            click.echo(f"elapsed {report.elapsed_seconds:.1f}s")
        sys.exit(0 if report.ok else MISMATCH_EXIT)

    if source is None:
        _usage_fail("audit needs a scenario file, a fixture name, or --random N")
    names = tuple(AUDIT_PROPERTIES)
    if properties is not None:
        names = tuple(p.strip() for p in properties.split(",") if p.strip())
        unknown = [p for p in names if p not in AUDIT_PROPERTIES]
        if unknown:
            _usage_fail(
                f"unknown properties: {', '.join(unknown)} "
                f"(choose from {', '.join(AUDIT_PROPERTIES)})"
            )
    base = _load_scenario(source)
    fixture = _fixture_name(source)
    expected = FIXTURES[fixture].expected_verdicts if fixture and procedure is None else {}
    s = _apply_overrides(base, procedure, window, n_max, knowledge)
    try:
        _, reports = audit_scenario(s, names)
    except CakeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ENGINE_EXIT)

    mismatches = []
    for name in names:
        report = reports[name]
        if machine:
            _emit(
                {
                    "record": "verdict",
                    "procedure": s.procedure,
                    "property": name,
                    "holds": None if report is None else report.holds,
                    "witness": None if report is None else report.witness,
                    "note": "" if report is None else report.note,
                }
            )
        else:
            suffix = _witness_summary(report) if report else ""
            click.echo(f"{s.procedure.value}: {name} {_verdict_mark(report)}{suffix}")
        if name in expected and report is not None and report.holds != expected[name]:
            mismatches.append(f"{name}: got {report.holds}, expected {expected[name]}")
    for m in mismatches:
        click.echo(f"MISMATCH {m}", err=True)
    sys.exit(MISMATCH_EXIT if mismatches else 0)


@cli.command("scan-orders")
@click.argument("source")
@_procedure_option
@_window_option
@_n_max_option
@_knowledge_option
@_machine_option
def cmd_scan_orders(source, procedure, window, n_max, knowledge, machine):
    """Run every arrival order and report order-monotonicity violations."""
    s = _apply_overrides(_load_scenario(source), procedure, window, n_max, knowledge)
    try:
        report = check_order_monotonicity(s)
    except SizeLimitError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ENGINE_EXIT)
    except CakeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ENGINE_EXIT)

    vals = s.valuations
    for order in itertools.permutations(s.player_ids):
        outcome = run(dataclasses.replace(s, arrival_order=order))
        if machine:
            _emit(
                {
                    "record": "order",
                    "order": list(order),
                    "allocation": {p: pc for p, pc in outcome.allocation},
                    "values": {p: vals[p].value(pc) for p, pc in outcome.allocation},
                }
            )
        else:
            cells = " ".join(f"P{p}={pc}" for p, pc in outcome.allocation)
            click.echo(f"order {','.join(map(str, order))}: {cells}")
    violations = report.witness["violations"] if report.witness else []
    for v in violations:
        if machine:
            _emit({"record": "violation", **v})
        else:
            click.echo(
                f"violation (P{v['player']}: {v['value_before']} → {v['value_after']}) "
                f"order {','.join(map(str, v['from_order']))} → "
                f"{','.join(map(str, v['to_order']))}"
            )
    if not violations and not machine:
        click.echo("no violations")


@cli.command("fixtures")
@click.argument("action", type=click.Choice(["list", "show", "run", "verify-all"]))
@click.argument("name", required=False)
@click.option("--trace", "show_trace", is_flag=True, help="print the event trace with run")
@_machine_option
def cmd_fixtures(action, name, show_trace, machine):
    """Inspect, run or re-verify the embedded fixture library."""
    if action in ("show", "run"):
        if name is None:
            _usage_fail(f"fixtures {action} needs a fixture name")
        if name not in FIXTURES:
            _usage_fail(f"unknown fixture {name!r}")
    if action == "list":
        for fixture_name in sorted(FIXTURES):
            f = FIXTURES[fixture_name]
            if machine:
                _emit(
                    {
                        "record": "fixture",
                        "name": f.name,
                        "description": f.description,
                        "source": f.source,
                        "procedure": f.scenario.procedure,
                    }
                )
            else:
                click.echo(f"{f.name}: {f.description} [{f.source}]")
    elif action == "show":
        click.echo(serialize_scenario(FIXTURES[name].scenario), nl=False)
    elif action == "run":
        f = FIXTURES[name]
        outcome = _run_engine(f.scenario)
        _print_allocation(f.scenario, outcome, machine)
        if show_trace:
            _print_trace(outcome, machine)
    elif action == "verify-all":
        drifted = False
        for fixture_name in sorted(FIXTURES):
            problems = verify_fixture(FIXTURES[fixture_name])
            status = "ok" if not problems else "drift"
            drifted = drifted or bool(problems)
            if machine:
                _emit(
                    {
                        "record": "fixture-check",
                        "name": fixture_name,
                        "status": status,
                        "problems": problems,
                    }
                )
            else:
                click.echo(f"{status} {fixture_name}")
                for p in problems:
                    click.echo(f"  {p}")
        sys.exit(MISMATCH_EXIT if drifted else 0)


def main(argv=None):
    """Console entry point."""
    try:
        cli.main(args=argv, standalone_mode=True)
    except CakeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ENGINE_EXIT)


if __name__ == "__main__":
    main()
