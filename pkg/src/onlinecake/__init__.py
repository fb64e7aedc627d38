"""Exact online cake division: procedures, fairness audits, trace replay."""

from .cake import (
    Interval,
    Piece,
    Rational,
    Valuation,
    make_valuation,
    piece,
    rat,
)
from .errors import (
    AuditInvariantError,
    CakeError,
    ConfigurationError,
    InsufficientValueError,
    MalformedValuationError,
    OracleScopeError,
    ScenarioParseError,
    SizeLimitError,
    TraceReplayError,
    ZeroValuationError,
)
from .procedures import (
    Accept,
    Arrive,
    ArrivalSnapshot,
    CutOffer,
    Decline,
    Depart,
    Event,
    KnifeCall,
    Knowledge,
    Mark,
    Outcome,
    Procedure,
    Scenario,
    SelectFor,
    Timeout,
    accept_decision,
    effective_valuation,
    knife_call_point,
    make_scenario,
    run,
    run_bounded_cut_and_choose,
    run_cut_and_choose,
    run_dictator,
    run_mark_and_choose,
    run_moving_knife,
    verify_trace,
)
from .axioms import (
    AUDIT_PROPERTIES,
    PropertyReport,
    assert_implications,
    audit_scenario,
    check_envy,
    check_equitable,
    check_forward_proportional,
    check_manipulation,
    check_order_monotonicity,
    check_pareto_atoms,
    check_pareto_permutation,
    check_proportional,
    check_scale_invariance,
    check_sequential,
    outcome_atoms,
    surjectivity_valuations,
)
from .oracle import oracle_enumerate
from .generate import property_suite, random_scenario, random_valuation
from .fixtures import FIXTURES, Fixture, verify_fixture
from .scenario_io import parse_scenario, serialize_scenario

__version__ = "0.1.0"
