"""Requirement-based test generation with structural DFA coverage.

Suites operate on the minimized DFA of the requirement formula. Each
coverage item (state, or guard-grouped transition) gets a shortest trace
that traverses it and then continues to a state with a definitive verdict:
an accepting state if one is reachable from the item, otherwise the trace
already sits in the rejecting region and is expected to Violate.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, IO, List, Optional, Sequence, Tuple

from .automata import (
    Dfa, compile_formula, minimize, states_reaching_accepting,
    valuation_count, valuation_from_index,
)
from .ltlf import Formula, Trace, eval_oracle

STATE_COVERAGE = "state"
TRANSITION_COVERAGE = "transition"

SATISFY = "satisfy"
VIOLATE = "violate"


class TestgenError(Exception):
    pass


@dataclass
class TestCase:
    id: str
    requirement_id: str
    trace: Trace
    expected: str  # SATISFY | VIOLATE
    covered: Tuple[str, ...]  # item names touched by replaying the trace


@dataclass
class TestSuite:
    requirement_id: str
    criterion: str
    cases: List[TestCase]
    total_items: int
    covered_items: Tuple[str, ...]
    unreachable_items: Tuple[str, ...] = ()

    @property
    def coverage_ratio(self) -> float:
        denom = self.total_items - len(self.unreachable_items)
        if denom == 0:
            return 1.0
        return len(self.covered_items) / denom


def _item_name(criterion: str, state: int, guard_index: Optional[int] = None) -> str:
    if criterion == STATE_COVERAGE:
        return f"s{state}"
    return f"s{state}/g{guard_index}"


def _shortest_paths_from_initial(d: Dfa) -> Dict[int, List[int]]:
    """Shortest valuation sequence reaching each state, valuation-order
    tie-broken."""
    paths = {0: []}
    queue = deque([0])
    nv = valuation_count(d.props)
    while queue:
        s = queue.popleft()
        for vidx in range(nv):
            t = d.table[s][vidx]
            if t not in paths:
                paths[t] = paths[s] + [vidx]
                queue.append(t)
    return paths


def _shortest_path_to_accepting(d: Dfa, start: int, min_len: int = 0) -> Optional[List[int]]:
    """Shortest valuation sequence of length >= min_len from start to an
    accepting state (length 0 allowed when start itself is accepting)."""
    if min_len == 0 and start in d.accepting:
        return []
    nv = valuation_count(d.props)
    frontier = [(start, [])]
    seen = {start}
    while frontier:
        nxt = []
        for s, path in frontier:
            for vidx in range(nv):
                t = d.table[s][vidx]
                if t in d.accepting:
                    return path + [vidx]
                if t not in seen:
                    seen.add(t)
                    nxt.append((t, path + [vidx]))
        frontier = nxt
    return None


def _replay(d: Dfa, vidxs: Sequence[int], criterion: str) -> Tuple[str, ...]:
    covered = []
    s = 0
    if criterion == STATE_COVERAGE:
        covered.append(_item_name(criterion, 0))
    guard_index_of: List[Dict[int, int]] = []
    for state in range(d.n_states):
        mapping = {}
        for gi, (_, target) in enumerate(d.transitions(state)):
            mapping[target] = gi
        guard_index_of.append(mapping)
    for vidx in vidxs:
        t = d.table[s][vidx]
        if criterion == TRANSITION_COVERAGE:
            covered.append(_item_name(criterion, s, guard_index_of[s][t]))
        else:
            covered.append(_item_name(criterion, t))
        s = t
    seen = set()
    unique = []
    for item in covered:
        if item not in seen:
            seen.add(item)
            unique.append(item)
    return tuple(unique)


def generate_suite(f: Formula, criterion: str = TRANSITION_COVERAGE,
                   requirement_id: str = "req",
                   props: Optional[Sequence[str]] = None) -> TestSuite:
    """Deterministic suite achieving full reachable coverage of the
    minimized DFA, with oracle-consistent expected verdicts."""
    if criterion not in (STATE_COVERAGE, TRANSITION_COVERAGE):
        raise TestgenError(f"unknown coverage criterion {criterion!r}")
    d = minimize(compile_formula(f, props))
    nv = valuation_count(d.props)
    paths = _shortest_paths_from_initial(d)
    can_accept = states_reaching_accepting(d)

    items: List[Tuple[str, int, Optional[int]]] = []
    if criterion == STATE_COVERAGE:
        for s in range(d.n_states):
            items.append((_item_name(criterion, s), s, None))
    else:
        for s in range(d.n_states):
            for gi in range(len(d.transitions(s))):
                items.append((_item_name(criterion, s, gi), s, gi))

    unreachable = tuple(name for name, s, _ in items if s not in paths)

    cases: List[TestCase] = []
    seen_traces = {}
    covered_all: List[str] = []
    covered_set = set()
    for name, s, gi in items:
        if s not in paths:
            continue
        if name in covered_set:
            continue
        prefix = list(paths[s])
        end = s
        if gi is not None:
            guard, target = d.transitions(s)[gi]
            # first valuation satisfying the guard, per the tie-break rule
            vidx = next(v for v in range(nv) if d.table[s][v] == target)
            prefix = prefix + [vidx]
            end = target
        if end in can_accept:
            completion = _shortest_path_to_accepting(d, end, min_len=0)
            vidxs = prefix + completion
            if not vidxs:  # initial accepting state: need a nonempty trace
                completion = _shortest_path_to_accepting(d, end, min_len=1)
                if completion is None:
                    vidxs = [0]
                else:
                    vidxs = completion
        else:
            vidxs = prefix if prefix else [0]
        trace = Trace(d.props, [valuation_from_index(d.props, v) for v in vidxs])
        expected = SATISFY if d.accepts(trace) else VIOLATE
        if eval_oracle(f, trace, 0) != (expected == SATISFY):
            raise TestgenError(f"internal error: verdict disagrees with oracle for {name}")
        key = trace.key()
        touched = _replay(d, vidxs, criterion)
        if key in seen_traces:
            case = seen_traces[key]
            merged = tuple(dict.fromkeys(case.covered + touched))
            case.covered = merged
        else:
            case = TestCase(
                id=f"{requirement_id}-T{len(cases) + 1:03d}",
                requirement_id=requirement_id,
                trace=trace,
                expected=expected,
                covered=touched,
            )
            seen_traces[key] = case
            cases.append(case)
        for item in touched:
            if item not in covered_set:
                covered_set.add(item)
                covered_all.append(item)

    return TestSuite(
        requirement_id=requirement_id,
        criterion=criterion,
        cases=cases,
        total_items=len(items),
        covered_items=tuple(covered_all),
        unreachable_items=unreachable,
    )


def export_suite(suite: TestSuite, out: IO[str],
                 captions: Optional[Dict[str, str]] = None) -> None:
    """Line-delimited export: a header record, then one record per case.

    Field order is fixed (case_id, req_id, expected, frames, captions,
    covered) for traceability audits; frames carry the true propositions
    per frame and captions their display strings.
    """
    captions = captions or {}
    header = {
        "suite": suite.requirement_id,
        "criterion": suite.criterion,
        "coverage_ratio": suite.coverage_ratio,
        "unreachable": list(suite.unreachable_items),
    }
    out.write(json.dumps(header) + "\n")
    for case in suite.cases:
        frames = [sorted(v.true_props()) for v in case.trace]
        record = {
            "case_id": case.id,
            "req_id": case.requirement_id,
            "expected": case.expected,
            "frames": frames,
            "captions": [[captions.get(p, p) for p in frame] for frame in frames],
            "covered": list(case.covered),
        }
        out.write(json.dumps(record) + "\n")
