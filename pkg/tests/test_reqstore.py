import pytest

from reqmon import reqstore
from reqmon.ltlf import eval_oracle, parse_formula
from reqmon.reqstore import (
    Candidate, Requirement, StoreError, UnformalizedRequirementError,
    analyze, check_consistency, check_redundancy, render_report,
)

PROPS = ("cone_encounter", "on_path", "p", "q")


def F(text):
    return parse_formula(text, PROPS)


class TestRequirement:
    def make(self):
        req = Requirement(id="R1", source_text="something")
        req.candidates = [
            Candidate.from_re_text(
                "globally, the unit shall eventually satisfy p", PROPS),
            Candidate.from_re_text(
                "globally, the unit shall always satisfy p", PROPS),
        ]
        return req

    def test_select(self):
        req = self.make()
        req.select(0)
        assert req.status == reqstore.FORMALIZED
        assert req.selected_formula() == F("F p")
        assert req.candidates[0].state == reqstore.SELECTED
        req.check_invariants(PROPS)

    def test_reselect_demotes_previous(self):
        req = self.make()
        req.select(0)
        req.select(1)
        assert req.candidates[0].state == reqstore.ACTIVE
        assert sum(1 for c in req.candidates
                   if c.state == reqstore.SELECTED) == 1

    def test_unformalized(self):
        with pytest.raises(UnformalizedRequirementError):
            self.make().selected_formula()

    def test_select_out_of_range(self):
        with pytest.raises(StoreError):
            self.make().select(5)

    def test_invariant_selected_requires_formalized(self):
        req = self.make()
        req.selected = 0
        with pytest.raises(StoreError):
            req.check_invariants(PROPS)

    def test_candidate_invariants(self):
        cand = Candidate.from_re_text(
            "globally, the unit shall always satisfy p", PROPS)
        cand.check_invariants(PROPS)
        cand.formula = F("F p")  # no longer the lowering of its spec
        with pytest.raises(StoreError):
            cand.check_invariants(PROPS)


class TestConsistency:
    def test_contradiction(self):
        report = check_consistency([("A", F("G p")), ("B", F("F ~p"))])
        assert report.satisfiable is False
        assert report.witness is None
        assert ("A", "B") == report.conflict_pairs[0][:2]

    def test_single_rover_requirement_vacuous_witness(self):
        report = check_consistency(
            [("R", F("G (on_path -> F cone_encounter)"))])
        assert report.satisfiable is True
        assert len(report.witness) == 1
        assert sorted(report.witness[0].true_props()) == []

    def test_joint_witness(self):
        report = check_consistency([("A", F("F p")), ("B", F("F q"))])
        assert report.satisfiable
        w = report.witness
        assert len(w) == 1 and sorted(w[0].true_props()) == ["p", "q"]
        for f in (F("F p"), F("F q")):
            assert eval_oracle(f, w, 0)

    def test_deterministic_ordering(self):
        a = check_consistency([("B", F("G p")), ("A", F("F ~p"))])
        b = check_consistency([("A", F("F ~p")), ("B", F("G p"))])
        assert a.conflict_pairs == b.conflict_pairs


class TestRedundancy:
    def test_singleton_implication(self):
        out = check_redundancy([("A", F("G p")), ("B", F("G (p | q)"))])
        assert ("B", ("A",)) in out

    def test_g_implies_f(self):
        out = check_redundancy([("A", F("F p")), ("B", F("G p"))])
        assert ("A", ("B",)) in out

    def test_no_redundancy(self):
        assert check_redundancy([("A", F("F p")), ("B", F("F q"))]) == []

    def test_pair_subset(self):
        out = check_redundancy(
            [("A", F("G p")), ("B", F("G q")), ("C", F("G (p & q)"))])
        assert ("C", ("A", "B")) in out
        # minimality: no singleton reported for C
        assert not any(r == "C" and len(s) == 1 for r, s in out)


class TestAnalyze:
    def make_req(self, rid, re_text):
        req = Requirement(id=rid, source_text=rid)
        req.candidates = [Candidate.from_re_text(re_text, PROPS)]
        req.select(0)
        return req

    def test_requires_formalized(self):
        req = Requirement(id="R1", source_text="x")
        with pytest.raises(UnformalizedRequirementError):
            analyze([req])

    def test_vacuity_advisory(self):
        req = self.make_req(
            "R1", "globally, when on_path, the unit shall eventually satisfy cone_encounter")
        report = analyze([req])
        assert report.satisfiable
        assert report.vacuous == ["R1"]
        assert not report.has_findings()  # advisory only

    def test_findings_flag(self):
        reqs = [
            self.make_req("A", "globally, the unit shall always satisfy p"),
            self.make_req("B", "globally, the unit shall eventually satisfy ~p"),
        ]
        report = analyze(reqs)
        assert report.has_findings()
        text = render_report(report)
        assert "satisfiable: no" in text
        assert "A conflicts with B" in text

    def test_render_clean(self):
        report = analyze([self.make_req(
            "A", "globally, the unit shall eventually satisfy p")])
        assert "no conflicts or redundancies found" in render_report(report)
