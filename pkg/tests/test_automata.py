import itertools
import random

import pytest

from reqmon import automata
from reqmon.automata import (
    PropositionLimitError, compile_formula, equivalent, is_empty, minimize,
    product, shortest_accepted, states_always_accepting,
    states_reaching_accepting, valuation_count, valuation_from_index,
    valuation_index,
)
from reqmon.ltlf import (
    Trace, atom, eval_oracle, is_propositional, not_, or_, parse_formula,
)


def F(text, props=("p", "q")):
    return parse_formula(text, props)


def all_traces(props, max_len):
    nv = valuation_count(props)
    for length in range(1, max_len + 1):
        for vidxs in itertools.product(range(nv), repeat=length):
            yield Trace(props, [valuation_from_index(props, v) for v in vidxs])


class TestCompile:
    def test_eventually_two_states(self):
        d = compile_formula(F("F p", ("p",)))
        assert d.n_states == 2
        assert d.initial not in d.accepting
        sink = next(iter(d.accepting))
        assert all(t == sink for t in d.table[sink])

    def test_always_two_states(self):
        d = compile_formula(F("G p", ("p",)))
        assert d.n_states == 2
        assert d.initial in d.accepting
        reject = next(s for s in range(2) if s not in d.accepting)
        assert all(t == reject for t in d.table[reject])

    def test_true_one_state(self):
        d = compile_formula(F("true", ()))
        assert d.n_states == 1
        assert d.accepting == frozenset({0})

    def test_prop_limit(self):
        props = tuple(f"p{i}" for i in range(11))
        with pytest.raises(PropositionLimitError):
            compile_formula(atom("p0"), props)

    def test_guards_exclusive_exhaustive(self):
        d = compile_formula(F("G (p -> F q)"))
        nv = valuation_count(d.props)
        for s in range(d.n_states):
            for vidx in range(nv):
                v = valuation_from_index(d.props, vidx)
                holds = [
                    gi for gi, (guard, _) in enumerate(d.transitions(s))
                    if eval_oracle(guard, Trace(d.props, [v]), 0)
                ]
                assert len(holds) == 1

    def test_guards_propositional(self):
        d = compile_formula(F("p U (q & X p)"))
        for s in range(d.n_states):
            for guard, _ in d.transitions(s):
                assert is_propositional(guard)

    def test_oracle_equivalence_random(self):
        rng = random.Random(11)
        ops_u = ["~", "X", "N", "F", "G"]
        ops_b = ["&", "|", "->", "U", "R"]

        def rand(size):
            if size <= 1:
                return rng.choice(["p", "q", "true", "false"])
            if size == 2 or rng.random() < 0.5:
                return f"{rng.choice(ops_u)} ({rand(size - 1)})"
            k = rng.randint(1, size - 2)
            return f"({rand(k)}) {rng.choice(ops_b)} ({rand(size - 1 - k)})"

        traces = list(all_traces(("p", "q"), 3))
        for _ in range(120):
            f = F(rand(rng.randint(1, 7)))
            d = compile_formula(f, ("p", "q"))
            for t in traces:
                assert d.accepts(t) == eval_oracle(f, t, 0), str(f)


class TestMinimize:
    def test_tautology_one_state(self):
        d = minimize(compile_formula(or_(atom("p"), not_(atom("p"))), ("p",)))
        assert d.n_states == 1

    def test_language_preserved(self):
        for text in ["F p", "G p", "p U q", "G (p -> F q)", "X p | N q",
                     "~(p R q)", "F G p"]:
            f = F(text)
            d = compile_formula(f, ("p", "q"))
            m = minimize(d)
            assert m.n_states <= d.n_states
            for t in all_traces(("p", "q"), 3):
                assert m.accepts(t) == d.accepts(t), text

    def test_bisimilar_sinks_merged(self):
        # F p | F q: both "seen" sinks collapse into one accepting sink
        m = minimize(compile_formula(F("F p | F q"), ("p", "q")))
        sinks = [s for s in range(m.n_states)
                 if all(t == s for t in m.table[s]) and s in m.accepting]
        assert len(sinks) == 1


class TestProduct:
    def test_contradiction_empty(self):
        inter = product(compile_formula(F("G p", ("p",))),
                        compile_formula(F("F ~p", ("p",))), "intersection")
        assert is_empty(inter)

    def test_union_total(self):
        u = product(compile_formula(F("p", ("p",))),
                    compile_formula(F("~p", ("p",))), "union")
        assert all(u.accepts(t) for t in all_traces(("p",), 3))

    def test_difference_witness(self):
        d = product(compile_formula(F("F p", ("p",))),
                    compile_formula(F("G p", ("p",))), "difference")
        w = shortest_accepted(d)
        assert [sorted(v.true_props()) for v in w] == [[], ["p"]]

    def test_prop_set_unification(self):
        d = product(compile_formula(F("G p", ("p",))),
                    compile_formula(F("F q", ("q",))), "intersection")
        assert d.props == ("p", "q")
        w = shortest_accepted(d)
        assert w is not None
        assert eval_oracle(F("G p & F q"), w, 0) is True

    def test_complement_soundness(self):
        a = compile_formula(F("p U q"), ("p", "q"))
        b = compile_formula(F("F q"), ("p", "q"))
        diff = product(a, b, "difference")
        for t in all_traces(("p", "q"), 3):
            assert diff.accepts(t) == (a.accepts(t) and not b.accepts(t))


class TestWitness:
    def test_f_p_shortest(self):
        w = shortest_accepted(compile_formula(F("F p", ("p",))))
        assert len(w) == 1 and w[0]["p"] is True

    def test_empty_language_none(self):
        inter = product(compile_formula(F("G p", ("p",))),
                        compile_formula(F("F ~p", ("p",))), "intersection")
        assert shortest_accepted(inter) is None

    def test_strong_next_forces_length_two(self):
        w = shortest_accepted(compile_formula(F("X p", ("p",))))
        assert len(w) == 2 and w[1]["p"] is True

    def test_tie_break_false_first(self):
        # among length-1 witnesses the all-false valuation wins
        w = shortest_accepted(compile_formula(F("true"), ("p", "q")))
        assert sorted(w[0].true_props()) == []

    def test_minimality(self):
        for text in ["F p", "X p", "p U q", "G (p -> F q) & F p"]:
            d = compile_formula(F(text), ("p", "q"))
            w = shortest_accepted(d)
            shorter = [t for t in all_traces(("p", "q"), len(w) - 1)
                       if d.accepts(t)]
            assert shorter == [], text


class TestEquivalence:
    def test_equivalent_formulas(self):
        assert equivalent(compile_formula(F("~F p", ("p",))),
                          compile_formula(F("G ~p", ("p",))))
        assert not equivalent(compile_formula(F("F p", ("p",))),
                              compile_formula(F("G p", ("p",))))


class TestVerdictRegions:
    def test_regions(self):
        d = compile_formula(F("G p", ("p",)))
        reach = states_reaching_accepting(d)
        always_acc = states_always_accepting(d)
        assert d.initial in reach
        assert d.initial not in always_acc
        reject = next(s for s in range(d.n_states) if s not in d.accepting)
        assert reject not in reach

    def test_satisfied_region(self):
        d = compile_formula(F("F p", ("p",)))
        sink = next(iter(d.accepting))
        assert sink in states_always_accepting(d)


class TestHelpers:
    def test_valuation_index_round_trip(self):
        props = ("a", "b", "c")
        for vidx in range(valuation_count(props)):
            v = valuation_from_index(props, vidx)
            assert valuation_index(v, props) == vidx

    def test_export_text(self):
        d = compile_formula(F("F p", ("p",)))
        out = d.export_text()
        assert any(line.startswith("accepting") for line in out.splitlines()[:3])
        assert any("\t" in line for line in out.splitlines()[1:])
