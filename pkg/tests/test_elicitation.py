import pytest

from reqmon import elicitation
from reqmon.elicitation import (
    LabelConflictError, SessionNotOpenError, ValidationSession, apply_label,
    next_question, questions_asked, trace_id,
)
from reqmon.ltlf import Trace
from reqmon.reqstore import ACTIVE, PRUNED, Candidate

PROPS = ("p", "q")


def cands(*texts):
    return [Candidate.from_re_text(t, PROPS) for t in texts]


def session(*texts):
    return ValidationSession(requirement_id="R", candidates=cands(*texts),
                             props=PROPS)


F_P = "globally, the unit shall eventually satisfy p"
G_P = "globally, the unit shall always satisfy p"
RESP_EVENTUAL = "globally, when p, the unit shall eventually satisfy q"
RESP_IMMEDIATE = "globally, when p, the unit shall immediately satisfy q"


def T(*rows):
    return Trace.from_true_sets(PROPS, rows)


class TestNextQuestion:
    def test_fp_gp_shortest_witness(self):
        s = session(F_P, G_P)
        trace, pair = next_question(s)
        assert pair == (0, 1)
        assert [sorted(v.true_props()) for v in trace] == [[], ["p"]]

    def test_equivalent_candidates_converge(self):
        s = session(G_P, "globally, the unit shall always satisfy p")
        assert next_question(s) is None
        assert s.status == elicitation.CONVERGED
        assert s.selected_index == 0

    def test_delayed_vs_immediate_response(self):
        s = session(RESP_EVENTUAL, RESP_IMMEDIATE)
        trace, pair = next_question(s)
        # the witness splits the pair: eventual accepts, immediate rejects
        da = s.candidates[0].dfa(PROPS)
        db = s.candidates[1].dfa(PROPS)
        assert da.accepts(trace) != db.accepts(trace)
        assert len(trace) == 2

    def test_not_open(self):
        s = session(G_P, G_P)
        next_question(s)
        with pytest.raises(SessionNotOpenError):
            next_question(s)


class TestApplyLabel:
    def test_accept_prunes_gp(self):
        s = session(F_P, G_P)
        trace, _ = next_question(s)
        apply_label(s, trace, elicitation.ACCEPT)
        assert s.candidates[1].state == PRUNED
        assert s.candidates[0].state == ACTIVE
        assert s.status == elicitation.CONVERGED
        assert s.candidates[1].prune_reason == {
            "trace_id": trace_id(trace), "label": elicitation.ACCEPT}

    def test_reject_prunes_fp(self):
        s = session(F_P, G_P)
        trace, _ = next_question(s)
        apply_label(s, trace, elicitation.REJECT)
        assert s.candidates[0].state == PRUNED
        assert s.candidates[1].state == ACTIVE  # G p also rejects the trace
        assert s.status == elicitation.CONVERGED
        assert s.selected_index == 1

    def test_exhausted_when_all_pruned(self):
        s = session(G_P)
        apply_label(s, T([], []), elicitation.ACCEPT)  # G p rejects this
        assert s.status == elicitation.EXHAUSTED

    def test_external_trace_allowed(self):
        s = session(F_P, G_P)
        apply_label(s, T(["p"], []), elicitation.ACCEPT)
        assert s.candidates[1].state == PRUNED

    def test_label_conflict(self):
        s = session(F_P, G_P)
        trace = T([], ["p"])
        apply_label(s, trace, elicitation.ACCEPT)
        s.status = elicitation.OPEN  # force re-open to probe the conflict path
        with pytest.raises(LabelConflictError):
            apply_label(s, trace, elicitation.REJECT)

    def test_wrong_domain(self):
        s = session(F_P)
        with pytest.raises(elicitation.ElicitationError):
            apply_label(s, Trace.from_true_sets(("p",), [["p"]]),
                        elicitation.ACCEPT)

    def test_revision_increments(self):
        s = session(F_P, G_P)
        assert s.revision == 0
        apply_label(s, T(["p"]), elicitation.ACCEPT)
        assert s.revision == 1


class TestConvergence:
    def test_full_loop(self):
        s = session(F_P, G_P, RESP_EVENTUAL)
        rounds = 0
        while s.status == elicitation.OPEN and rounds < 10:
            q = next_question(s)
            if q is None:
                break
            trace, _ = q
            # truthful labeler for ground truth F p
            truth = s.candidates[0].dfa(PROPS)
            label = elicitation.ACCEPT if truth.accepts(trace) else elicitation.REJECT
            apply_label(s, trace, label)
            rounds += 1
        assert s.status == elicitation.CONVERGED
        assert s.candidates[0].state == ACTIVE
        assert questions_asked(s) == rounds
        assert rounds <= 2  # progress bound: n - 1 prunings
