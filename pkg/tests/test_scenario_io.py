"""Scenario file parsing, serialisation, and diagnostics."""

import pytest

from onlinecake import ScenarioParseError, parse_scenario, serialize_scenario
from onlinecake.fixtures import FIXTURES
from onlinecake.procedures import Knowledge, Procedure

SAMPLE = """\
# three players, one waiting cutter
procedure cut_and_choose
arrival 1 2 3

player 1  0 1/2 0   1/2 1 1
player 2  0 1/3 0   1/3 1 1
player 3  0 3/4 1   3/4 1 0
"""


def test_parse_sample():
    s = parse_scenario(SAMPLE)
    assert s.procedure is Procedure.CUT_AND_CHOOSE
    assert s.arrival_order == (1, 2, 3)
    assert s.valuation(2).total == 1
    assert s.misreports == ()


def test_parse_full_header_and_misreport():
    text = """\
procedure bounded_cut_and_choose
n_max 4
knowledge unknown_last
arrival 2 1
player 1 0 1 1
player 2 0 1 1
misreport 2 0 1/2 1 1/2 1 0
"""
    s = parse_scenario(text)
    assert s.n_max == 4
    assert s.knowledge is Knowledge.UNKNOWN_LAST
    assert s.arrival_order == (2, 1)
    assert s.misreport_map[2].total == 1
    from onlinecake import piece

    assert s.misreport_map[2].value(piece((0, "1/2"))) == 1


def test_arrival_defaults_to_sorted_ids():
    text = "procedure dictator\nplayer 1 0 1 1\nplayer 2 0 1 2\n"
    assert parse_scenario(text).arrival_order == (1, 2)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_serialise_parse_round_trip(name):
    s = FIXTURES[name].scenario
    text = serialize_scenario(s)
    again = parse_scenario(text)
    assert again == s
    assert serialize_scenario(again) == text


class TestDiagnostics:
    def assert_error(self, text, code, line=None):
        with pytest.raises(ScenarioParseError) as err:
            parse_scenario(text)
        assert err.value.code == code
        if line is not None:
            assert err.value.line == line

    def test_empty_player_list(self):
        self.assert_error("procedure dictator\n", "empty-players")

    def test_missing_procedure(self):
        self.assert_error("player 1 0 1 1\nplayer 2 0 1 1\n", "missing-procedure")

    def test_unknown_procedure_name(self):
        self.assert_error("procedure guillotine\n", "bad-procedure", line=1)

    def test_unknown_directive_with_line_number(self):
        self.assert_error("procedure dictator\nflavor chocolate\n", "bad-directive", line=2)

    def test_gap_in_segments(self):
        text = "procedure dictator\nplayer 1 0 1/2 1 3/4 1 1\nplayer 2 0 1 1\n"
        self.assert_error(text, "malformed-valuation", line=2)

    def test_decimal_rejected(self):
        self.assert_error("procedure dictator\nplayer 1 0 0.5 1 0.5 1 1\n", "decimal", line=2)

    def test_duplicate_player(self):
        text = "procedure dictator\nplayer 1 0 1 1\nplayer 1 0 1 1\n"
        self.assert_error(text, "duplicate-player", line=3)

    def test_bad_permutation(self):
        text = "procedure dictator\narrival 1 1\nplayer 1 0 1 1\nplayer 2 0 1 1\n"
        self.assert_error(text, "invalid-scenario")

    def test_bad_rational(self):
        self.assert_error("procedure dictator\nplayer 1 0 x 1 x 1 1\n", "bad-rational", line=2)

    def test_triple_arity(self):
        self.assert_error("procedure dictator\nplayer 1 0 1\n", "bad-segments", line=2)
