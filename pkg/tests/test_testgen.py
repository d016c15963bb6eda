import io
import json

import pytest

from reqmon import testgen
from reqmon.ltlf import eval_oracle, parse_formula
from reqmon.testgen import (
    SATISFY, STATE_COVERAGE, TRANSITION_COVERAGE, VIOLATE,
    export_suite, generate_suite,
)


def F(text, props=("p", "q")):
    return parse_formula(text, props)


class TestGenerate:
    def test_f_p_transition_coverage(self):
        suite = generate_suite(F("F p", ("p",)), TRANSITION_COVERAGE, "REQ")
        assert suite.coverage_ratio == 1.0
        assert suite.unreachable_items == ()
        frames = [[sorted(v.true_props()) for v in c.trace] for c in suite.cases]
        assert [[], ["p"]] in frames      # loop then exit
        # every case traverses its items; the direct edge and the accepting
        # sink's self-loop are both covered
        covered = {item for c in suite.cases for item in c.covered}
        assert covered == {"s0/g0", "s0/g1", "s1/g0"}
        assert all(c.expected == SATISFY for c in suite.cases)

    def test_g_p_cases(self):
        suite = generate_suite(F("G p", ("p",)), TRANSITION_COVERAGE, "REQ")
        assert suite.coverage_ratio == 1.0
        by_frames = {
            tuple(tuple(sorted(v.true_props())) for v in c.trace): c.expected
            for c in suite.cases
        }
        assert by_frames[(("p",),)] == SATISFY
        assert VIOLATE in by_frames.values()

    def test_true_state_coverage(self):
        suite = generate_suite(F("true", ()), STATE_COVERAGE, "REQ")
        assert suite.coverage_ratio == 1.0
        assert len(suite.cases) == 1
        assert len(suite.cases[0].trace) == 1

    def test_expected_matches_oracle(self):
        for text in ["F p", "G p", "p U q", "G (p -> F q)", "X p", "~(p R q)"]:
            f = F(text)
            suite = generate_suite(f, TRANSITION_COVERAGE, "REQ")
            for case in suite.cases:
                assert eval_oracle(f, case.trace, 0) == (case.expected == SATISFY)

    def test_coverage_replay(self):
        # every non-unreachable item is touched by at least one case
        for text in ["G (p -> F q)", "p U q", "F G p"]:
            suite = generate_suite(F(text), TRANSITION_COVERAGE, "REQ")
            assert suite.coverage_ratio == 1.0
            touched = set()
            for case in suite.cases:
                touched.update(case.covered)
            assert len(touched) == suite.total_items - len(suite.unreachable_items)

    def test_unreachable_reported_not_dropped(self):
        # a contradiction's minimized DFA is a single rejecting state
        suite = generate_suite(F("p & ~p", ("p",)), STATE_COVERAGE, "REQ")
        assert suite.coverage_ratio == 1.0
        assert all(c.expected == VIOLATE for c in suite.cases)

    def test_case_ids_sequential(self):
        suite = generate_suite(F("G (p -> F q)"), TRANSITION_COVERAGE, "REQ-7")
        assert [c.id for c in suite.cases] == [
            f"REQ-7-T{i + 1:03d}" for i in range(len(suite.cases))]

    def test_unknown_criterion(self):
        with pytest.raises(testgen.TestgenError):
            generate_suite(F("F p", ("p",)), "path", "REQ")

    def test_determinism(self):
        a = io.StringIO()
        b = io.StringIO()
        export_suite(generate_suite(F("G (p -> F q)"), TRANSITION_COVERAGE, "R"), a)
        export_suite(generate_suite(F("G (p -> F q)"), TRANSITION_COVERAGE, "R"), b)
        assert a.getvalue() == b.getvalue()


class TestExport:
    def test_field_order_and_captions(self):
        suite = generate_suite(
            F("G (on_path -> F cone_encounter)", ("cone_encounter", "on_path")),
            TRANSITION_COVERAGE, "REQ-LIV-002")
        out = io.StringIO()
        captions = {"on_path": "the rover is on the designated path",
                    "cone_encounter": "the rover encounters a traffic cone"}
        export_suite(suite, out, captions=captions)
        lines = out.getvalue().splitlines()
        header = json.loads(lines[0])
        assert header["suite"] == "REQ-LIV-002"
        assert header["coverage_ratio"] == 1.0
        for line in lines[1:]:
            record = json.loads(line)
            assert list(record) == ["case_id", "req_id", "expected", "frames",
                                    "captions", "covered"]
            for frame, caps in zip(record["frames"], record["captions"]):
                assert caps == [captions[p] for p in frame]

    def test_f_p_serialization(self):
        suite = generate_suite(F("F p", ("p",)), TRANSITION_COVERAGE, "R")
        out = io.StringIO()
        export_suite(suite, out)
        records = [json.loads(line) for line in out.getvalue().splitlines()[1:]]
        frames = [r["frames"] for r in records]
        assert [[], ["p"]] in frames
        assert all(r["expected"] == "satisfy" for r in records)
