import itertools

import pytest

from reqmon import re_lang
from reqmon.ltlf import Trace, atom, eval_oracle, not_, or_, parse_formula
from reqmon.re_lang import (
    Globally, ReParseError, ReSpec, TimingAlways, TimingEventually,
    TimingImmediately, TimingUntil, TimingWithin, While,
    lower_to_ltlf, parse_re, render_re,
)

PROPS = ("cone_encounter", "off_road", "on_path", "p", "q", "w")


class TestParse:
    def test_rover_liveness(self):
        spec = parse_re(
            "globally, when on_path, the rover shall eventually satisfy cone_encounter",
            PROPS,
        )
        assert spec.scope == Globally()
        assert spec.condition == atom("on_path")
        assert spec.component == "rover"
        assert spec.timing == TimingEventually()
        assert spec.response == atom("cone_encounter")

    def test_minimal_template(self):
        spec = parse_re("globally, the rover shall always satisfy ~off_road", PROPS)
        assert spec.scope == Globally()
        assert spec.condition is None
        assert spec.timing == TimingAlways()
        assert spec.response == not_(atom("off_road"))

    def test_within_frames(self):
        spec = parse_re(
            "globally, when p, the unit shall within 2 frames satisfy q", PROPS)
        assert spec.condition == atom("p")
        assert spec.timing == TimingWithin(2)
        assert spec.response == atom("q")

    def test_while_scope(self):
        spec = parse_re("while w, the unit shall always satisfy p", PROPS)
        assert spec.scope == While(atom("w"))

    def test_until_timing(self):
        spec = parse_re(
            "globally, when p, the unit shall until w satisfy q", PROPS)
        assert spec.timing == TimingUntil(atom("w"))

    def test_error_reports_position(self):
        with pytest.raises(ReParseError) as err:
            parse_re("globally, the rover shall sometimes satisfy p", PROPS)
        assert "position" in str(err.value) or "expected" in str(err.value)

    def test_unknown_prop(self):
        with pytest.raises(Exception) as err:
            parse_re("globally, the rover shall always satisfy xyz", PROPS)
        assert "xyz" in str(err.value)

    def test_temporal_operator_rejected_in_bexpr(self):
        with pytest.raises(Exception):
            parse_re("globally, the rover shall always satisfy F p", PROPS)

    def test_within_zero_rejected(self):
        with pytest.raises(ReParseError):
            parse_re("globally, when p, the unit shall within 0 frames satisfy q",
                     PROPS)


class TestLowering:
    def test_liveness_template(self):
        spec = parse_re(
            "globally, when on_path, the rover shall eventually satisfy cone_encounter",
            PROPS,
        )
        assert lower_to_ltlf(spec) == parse_formula(
            "G (on_path -> F cone_encounter)", PROPS)

    def test_bare_always(self):
        spec = ReSpec(Globally(), None, "rover", TimingAlways(), atom("p"))
        assert lower_to_ltlf(spec) == parse_formula("G p", PROPS)

    def test_within_one_degenerates(self):
        spec = parse_re(
            "globally, when p, the unit shall within 1 frames satisfy q", PROPS)
        assert lower_to_ltlf(spec) == parse_formula("G (p -> q)", PROPS)

    def test_within_two_uses_strong_next(self):
        spec = parse_re(
            "globally, when p, the unit shall within 2 frames satisfy q", PROPS)
        assert lower_to_ltlf(spec) == parse_formula("G (p -> q | X q)", PROPS)
        # strong next: a deadline is not met by trace truncation
        f = lower_to_ltlf(spec)
        t = Trace.from_true_sets(("p", "q"), [["p"]])
        assert eval_oracle(f, t, 0) is False

    def test_while_wraps_core(self):
        spec = parse_re("while w, the unit shall always satisfy p", PROPS)
        assert lower_to_ltlf(spec) == parse_formula("G (w -> p)", PROPS)

    def test_until_template(self):
        spec = parse_re("globally, when p, the unit shall until w satisfy q", PROPS)
        f = lower_to_ltlf(spec)
        assert f == parse_formula("G (p -> (q U w))", PROPS)

    def test_immediately(self):
        spec = parse_re(
            "globally, when p, the unit shall immediately satisfy q", PROPS)
        assert lower_to_ltlf(spec) == parse_formula("G (p -> q)", PROPS)

    def test_globally_eventually_not_wrapped(self):
        # a bare eventual response is a plain liveness obligation
        spec = parse_re("globally, the unit shall eventually satisfy p", PROPS)
        f = lower_to_ltlf(spec)
        t = Trace.from_true_sets(("p",), [[], ["p"], []])
        assert eval_oracle(f, t, 0) is True


class TestRender:
    def test_canonical_rendering(self):
        spec = ReSpec(Globally(), atom("on_path"), "rover",
                      TimingEventually(), atom("cone_encounter"))
        assert render_re(spec) == (
            "globally, when on_path, the rover shall eventually satisfy cone_encounter"
        )

    def test_while_rendering(self):
        spec = ReSpec(While(atom("w")), None, "unit", TimingAlways(), atom("p"))
        assert render_re(spec).startswith("while w, ")

    def test_round_trip_all_templates(self):
        scopes = [Globally(), While(atom("w"))]
        conditions = [None, atom("p"), or_(atom("p"), atom("q"))]
        timings = [TimingAlways(), TimingEventually(), TimingImmediately(),
                   TimingWithin(1), TimingWithin(3), TimingUntil(atom("w"))]
        responses = [atom("q"), not_(atom("q"))]
        for scope, cond, timing, resp in itertools.product(
                scopes, conditions, timings, responses):
            spec = ReSpec(scope, cond, "unit", timing, resp)
            assert parse_re(render_re(spec), PROPS) == spec


class TestLoweringSoundness:
    """Spot-check each template's intent on hand-built traces."""

    def T(self, *rows):
        return Trace.from_true_sets(("p", "q", "w"), rows)

    def check(self, text, positive, negative):
        f = lower_to_ltlf(parse_re(text, PROPS))
        f = parse_formula(str(f), ("p", "q", "w"))
        assert eval_oracle(f, positive, 0) is True
        assert eval_oracle(f, negative, 0) is False

    def test_eventually(self):
        self.check(
            "globally, when p, the unit shall eventually satisfy q",
            self.T(["p"], [], ["q"]),
            self.T(["p"], [], []),
        )

    def test_always(self):
        self.check(
            "globally, when p, the unit shall always satisfy q",
            self.T(["p", "q"], []),
            self.T(["p", "q"], ["p"]),
        )

    def test_until(self):
        self.check(
            "globally, when p, the unit shall until w satisfy q",
            self.T(["p", "q"], ["q"], ["w"]),
            self.T(["p", "q"], [], ["w"]),
        )

    def test_while(self):
        self.check(
            "while w, the unit shall immediately satisfy q",
            self.T(["w", "q"], []),
            self.T(["w", "q"], ["w"]),
        )
