"""Requirement artifacts and set-level formal analysis.

A Requirement carries its free-English source text plus competing
Restricted-English candidates; analysis works over the selected (formalized)
candidates: joint satisfiability, pairwise conflicts, redundancy by language
inclusion, and a vacuity advisory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import automata, ltlf, re_lang
from .automata import Dfa, compile_formula, is_empty, product, shortest_accepted
from .ltlf import Formula, Trace, eval_oracle
from .re_lang import ReSpec, While

# Requirement lifecycle.
DRAFTED = "drafted"
AUTHORING = "authoring"
VALIDATING = "validating"
FORMALIZED = "formalized"
REQ_STATUSES = (DRAFTED, AUTHORING, VALIDATING, FORMALIZED)

# Candidate states.
ACTIVE = "active"
PRUNED = "pruned"
SELECTED = "selected"
CANDIDATE_STATES = (ACTIVE, PRUNED, SELECTED)


class StoreError(Exception):
    pass


class UnformalizedRequirementError(StoreError):
    def __init__(self, req_id: str):
        super().__init__(f"requirement {req_id!r} has no selected formalization")
        self.req_id = req_id


@dataclass
class Candidate:
    """One competing interpretation of a requirement."""

    re_text: str
    spec: ReSpec
    formula: Formula
    state: str = ACTIVE
    prune_reason: Optional[dict] = None  # {"trace_id":..., "label":...}

    _dfa: Optional[Dfa] = field(default=None, repr=False, compare=False)

    @classmethod
    def from_re_text(cls, text: str, props: Sequence[str]) -> "Candidate":
        spec = re_lang.parse_re(text, props)
        return cls(re_text=text, spec=spec, formula=re_lang.lower_to_ltlf(spec))

    def dfa(self, props: Sequence[str]) -> Dfa:
        props = tuple(sorted(props))
        if self._dfa is None or self._dfa.props != props:
            self._dfa = compile_formula(self.formula, props)
        return self._dfa

    def check_invariants(self, props: Sequence[str]) -> None:
        reparsed = re_lang.parse_re(self.re_text, props)
        if reparsed != self.spec:
            raise StoreError(f"candidate text does not parse back to its spec: {self.re_text!r}")
        if re_lang.lower_to_ltlf(self.spec) != self.formula:
            raise StoreError(f"candidate formula is not the lowering of its spec: {self.re_text!r}")
        if self.state not in CANDIDATE_STATES:
            raise StoreError(f"bad candidate state {self.state!r}")


@dataclass
class Requirement:
    id: str
    source_text: str
    status: str = DRAFTED
    candidates: List[Candidate] = field(default_factory=list)
    selected: Optional[int] = None

    def check_invariants(self, props: Sequence[str]) -> None:
        if self.status not in REQ_STATUSES:
            raise StoreError(f"requirement {self.id}: bad status {self.status!r}")
        selected_count = sum(1 for c in self.candidates if c.state == SELECTED)
        if selected_count > 1:
            raise StoreError(f"requirement {self.id}: multiple selected candidates")
        if self.selected is not None:
            if self.status != FORMALIZED:
                raise StoreError(f"requirement {self.id}: selected candidate but not formalized")
            if not (0 <= self.selected < len(self.candidates)):
                raise StoreError(f"requirement {self.id}: selected index out of range")
            if self.candidates[self.selected].state != SELECTED:
                raise StoreError(f"requirement {self.id}: selected index not in selected state")
        for c in self.candidates:
            c.check_invariants(props)

    def selected_formula(self) -> Formula:
        if self.selected is None:
            raise UnformalizedRequirementError(self.id)
        return self.candidates[self.selected].formula

    def select(self, index: int) -> None:
        if not (0 <= index < len(self.candidates)):
            raise StoreError(f"candidate index {index} out of range")
        for i, c in enumerate(self.candidates):
            if c.state == SELECTED:
                c.state = ACTIVE
        self.candidates[index].state = SELECTED
        self.selected = index
        self.status = FORMALIZED


# ---------------------------------------------------------------------------
# Analysis

@dataclass
class AnalysisReport:
    satisfiable: bool
    witness: Optional[Trace]
    conflict_pairs: List[Tuple[str, str, int]]  # (id, id, product state count)
    redundancies: List[Tuple[str, Tuple[str, ...]]]  # (implied id, implying ids)
    vacuous: List[str]  # advisory: ids whose trigger never fires on the witness

    def has_findings(self) -> bool:
        return (not self.satisfiable) or bool(self.conflict_pairs) or bool(self.redundancies)


def check_consistency(formulas: Sequence[Tuple[str, Formula]]) -> AnalysisReport:
    """Shared-trace consistency: the set is satisfiable iff one nonempty
    trace satisfies every formula jointly. Reports every unordered pair
    whose pairwise intersection is empty."""
    items = sorted(formulas, key=lambda kv: kv[0])
    props = sorted(set().union(*[ltlf.atoms_of(f) for _, f in items]) if items else set())
    dfas = {rid: compile_formula(f, props) for rid, f in items}

    conflicts: List[Tuple[str, str, int]] = []
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            a, b = items[i][0], items[j][0]
            inter = product(dfas[a], dfas[b], "intersection")
            if is_empty(inter):
                conflicts.append((a, b, inter.n_states))

    witness = None
    satisfiable = False
    if items:
        combined = dfas[items[0][0]]
        for rid, _ in items[1:]:
            combined = product(combined, dfas[rid], "intersection")
        witness = shortest_accepted(combined)
        satisfiable = witness is not None
        if witness is not None:
            for rid, f in items:
                if not eval_oracle(f, witness, 0):
                    raise StoreError(f"internal error: witness fails requirement {rid}")

    return AnalysisReport(
        satisfiable=satisfiable,
        witness=witness,
        conflict_pairs=conflicts,
        redundancies=[],
        vacuous=[],
    )


def check_redundancy(formulas: Sequence[Tuple[str, Formula]],
                     max_subset: int = 2) -> List[Tuple[str, Tuple[str, ...]]]:
    """Report r implied by a subset S (|S| <= max_subset) of the others:
    language(intersection of S) is included in language(r), decided by
    emptiness of the difference. Only minimal subsets are reported."""
    items = sorted(formulas, key=lambda kv: kv[0])
    props = sorted(set().union(*[ltlf.atoms_of(f) for _, f in items]) if items else set())
    dfas = {rid: compile_formula(f, props) for rid, f in items}
    out: List[Tuple[str, Tuple[str, ...]]] = []
    for rid, _ in items:
        others = [o for o, _ in items if o != rid]
        found_single = False
        for o in others:
            if is_empty(product(dfas[o], dfas[rid], "difference")):
                out.append((rid, (o,)))
                found_single = True
        if found_single or max_subset < 2:
            continue
        for i in range(len(others)):
            for j in range(i + 1, len(others)):
                inter = product(dfas[others[i]], dfas[others[j]], "intersection")
                if is_empty(product(inter, dfas[rid], "difference")):
                    out.append((rid, (others[i], others[j])))
    return out


def analyze(requirements: Sequence[Requirement],
            specs: Optional[Dict[str, ReSpec]] = None) -> AnalysisReport:
    """Full design-time analysis over formalized requirements.

    Raises UnformalizedRequirementError if any requirement lacks a selected
    candidate. The vacuity advisory flags requirements whose RE trigger
    condition never fires on the satisfiability witness.
    """
    formulas = []
    re_specs: Dict[str, ReSpec] = {}
    for r in requirements:
        formulas.append((r.id, r.selected_formula()))
        if r.selected is not None:
            re_specs[r.id] = r.candidates[r.selected].spec
    if specs:
        re_specs.update(specs)

    report = check_consistency(formulas)
    report.redundancies = check_redundancy(formulas)

    if report.witness is not None:
        for rid, _ in sorted(formulas, key=lambda kv: kv[0]):
            spec = re_specs.get(rid)
            if spec is None:
                continue
            trigger = spec.condition
            if isinstance(spec.scope, While) and trigger is None:
                trigger = spec.scope.condition
            if trigger is None:
                continue
            fired = any(
                eval_oracle(trigger, report.witness, i)
                for i in range(len(report.witness))
            )
            if not fired:
                report.vacuous.append(rid)
    return report


def render_report(report: AnalysisReport) -> str:
    lines = []
    lines.append(f"satisfiable: {'yes' if report.satisfiable else 'no'}")
    if report.witness is not None:
        lines.append("witness:")
        for row in ltlf.render_trace_table(report.witness).splitlines():
            lines.append("  " + row)
    if report.conflict_pairs:
        lines.append("conflicts:")
        for a, b, size in report.conflict_pairs:
            lines.append(f"  {a} conflicts with {b} (empty product of {size} states)")
    if report.redundancies:
        lines.append("redundancies:")
        for implied, implying in report.redundancies:
            lines.append(f"  {implied} is implied by {{{', '.join(implying)}}}")
    if report.vacuous:
        lines.append("advisory: witness never triggers " + ", ".join(report.vacuous))
    if not report.has_findings():
        lines.append("no conflicts or redundancies found")
    return "\n".join(lines)
