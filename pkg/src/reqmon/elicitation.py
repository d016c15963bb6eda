"""Interactive candidate disambiguation via distinguishing traces.

A validation session repeatedly proposes the shortest trace on which two
still-active candidates disagree; accepting or rejecting the trace prunes
every candidate inconsistent with the answer. The session converges once
all active candidates are language-equivalent (or one remains), and is
exhausted when every candidate has been pruned.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .automata import equivalent, is_empty, product, shortest_accepted
from .ltlf import Trace
from .reqstore import ACTIVE, PRUNED, Candidate

OPEN = "open"
CONVERGED = "converged"
EXHAUSTED = "exhausted"

ACCEPT = "accept"
REJECT = "reject"


class ElicitationError(Exception):
    pass


class SessionNotOpenError(ElicitationError):
    pass


class LabelConflictError(ElicitationError):
    pass


def trace_id(trace: Trace) -> str:
    return "t-" + hashlib.sha256(trace.key().encode()).hexdigest()[:12]


@dataclass
class LabeledTrace:
    trace: Trace
    label: str  # ACCEPT | REJECT
    pair: Optional[Tuple[int, int]]  # candidate indices the trace was issued for

    @property
    def id(self) -> str:
        return trace_id(self.trace)


@dataclass
class ValidationSession:
    requirement_id: str
    candidates: List[Candidate]
    props: Tuple[str, ...]
    labels: List[LabeledTrace] = field(default_factory=list)
    status: str = OPEN
    revision: int = 0
    pending: Optional[dict] = None  # last issued, unanswered question
    selected_index: Optional[int] = None  # representative survivor at convergence

    def __post_init__(self):
        self.props = tuple(sorted(self.props))

    def active_indices(self) -> List[int]:
        return [i for i, c in enumerate(self.candidates) if c.state == ACTIVE]


def _symdiff_witness(session: ValidationSession, i: int, j: int) -> Optional[Trace]:
    da = session.candidates[i].dfa(session.props)
    db = session.candidates[j].dfa(session.props)
    return shortest_accepted(product(da, db, "symdiff"))


def next_question(session: ValidationSession) -> Optional[Tuple[Trace, Tuple[int, int]]]:
    """Shortest unlabeled trace distinguishing some active pair, scanning
    pairs in index order. Returns None (and marks the session Converged)
    when all active pairs are language-equivalent."""
    if session.status != OPEN:
        raise SessionNotOpenError(f"session is {session.status}")
    active = session.active_indices()
    labeled_ids = {lt.id for lt in session.labels}
    for a in range(len(active)):
        for b in range(a + 1, len(active)):
            i, j = active[a], active[b]
            witness = _symdiff_witness(session, i, j)
            if witness is None:
                continue
            if trace_id(witness) in labeled_ids:
                # defensive: a labeled trace cannot still split two actives,
                # but skip rather than re-ask
                continue
            session.pending = {"trace": witness, "pair": (i, j)}
            return witness, (i, j)
    session.status = CONVERGED
    session.pending = None
    _select_surviving(session)
    return None


def apply_label(session: ValidationSession, trace: Trace, label: str) -> ValidationSession:
    """Record the engineer's verdict on a trace (issued or external) and
    prune every active candidate inconsistent with it."""
    if session.status != OPEN:
        raise SessionNotOpenError(f"session is {session.status}")
    if label not in (ACCEPT, REJECT):
        raise ElicitationError(f"label must be {ACCEPT!r} or {REJECT!r}")
    if tuple(sorted(trace.props)) != session.props:
        raise ElicitationError(
            f"trace propositions {trace.props} do not match the session's {session.props}"
        )
    tid = trace_id(trace)
    for lt in session.labels:
        if lt.id == tid and lt.label != label:
            raise LabelConflictError(f"trace {tid} already labeled {lt.label}")

    pair = None
    if session.pending is not None and trace_id(session.pending["trace"]) == tid:
        pair = session.pending["pair"]
        session.pending = None
    session.labels.append(LabeledTrace(trace=trace, label=label, pair=pair))

    want_member = label == ACCEPT
    for i in session.active_indices():
        cand = session.candidates[i]
        if cand.dfa(session.props).accepts(trace) != want_member:
            cand.state = PRUNED
            cand.prune_reason = {"trace_id": tid, "label": label}

    _reevaluate(session)
    session.revision += 1
    return session


def _reevaluate(session: ValidationSession) -> None:
    active = session.active_indices()
    if not active:
        session.status = EXHAUSTED
        return
    if len(active) == 1:
        session.status = CONVERGED
        _select_surviving(session)
        return
    for a in range(len(active)):
        for b in range(a + 1, len(active)):
            da = session.candidates[active[a]].dfa(session.props)
            db = session.candidates[active[b]].dfa(session.props)
            if not equivalent(da, db):
                session.status = OPEN
                return
    session.status = CONVERGED
    _select_surviving(session)


def _select_surviving(session: ValidationSession) -> None:
    # all survivors are equivalent; keep the first as the representative
    active = session.active_indices()
    if active:
        session.pending = None
        session.selected_index = active[0]


def questions_asked(session: ValidationSession) -> int:
    return sum(1 for lt in session.labels if lt.pair is not None)
