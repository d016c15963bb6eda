"""Runtime monitoring of perception-score streams against LTLf requirements.

Per-frame predicate similarity scores are thresholded into Boolean
valuations (score strictly greater than the threshold); each requirement's
DFA then advances one state per frame and reports a four-valued verdict:

  satisfied         definitive: every extension of the prefix is accepted
  violated          definitive: no extension of the prefix is accepted
  presumably_true   the prefix, read as a complete trace, is accepted
  presumably_false  the prefix, read as a complete trace, is rejected

Definitive verdicts latch: once emitted they never change.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, IO, Iterable, List, Optional, Sequence, Tuple

from .automata import (
    Dfa, compile_formula, states_always_accepting, states_reaching_accepting,
    valuation_index,
)
from .ltlf import Formula, Trace, Valuation

SATISFIED = "satisfied"
VIOLATED = "violated"
PRESUMABLY_TRUE = "presumably_true"
PRESUMABLY_FALSE = "presumably_false"

VERDICTS = (SATISFIED, VIOLATED, PRESUMABLY_TRUE, PRESUMABLY_FALSE)
DEFINITIVE = frozenset({SATISFIED, VIOLATED})

DEFAULT_THRESHOLD = 0.4

STRICT = "strict"
CARRY_FORWARD = "carry_forward"


class MonitorError(Exception):
    pass


class MissingScoreError(MonitorError):
    def __init__(self, frame: int, predicates: Sequence[str]):
        super().__init__(
            f"frame {frame}: missing scores for {', '.join(sorted(predicates))}"
        )
        self.frame = frame
        self.predicates = tuple(sorted(predicates))


@dataclass(frozen=True)
class ScoreRecord:
    frame: int
    predicate: str
    score: float

    def __post_init__(self):
        if self.frame < 0:
            raise MonitorError(f"negative frame id {self.frame}")
        if not -1.0 <= self.score <= 1.0:
            raise MonitorError(
                f"score {self.score} for {self.predicate!r} outside [-1, 1]"
            )


@dataclass(frozen=True)
class ThresholdConfig:
    default: float = DEFAULT_THRESHOLD
    overrides: Tuple[Tuple[str, float], ...] = ()
    missing_policy: str = STRICT

    def __post_init__(self):
        for tau in (self.default, *(t for _, t in self.overrides)):
            if not -1.0 <= tau <= 1.0:
                raise MonitorError(f"threshold {tau} outside [-1, 1]")
        if self.missing_policy not in (STRICT, CARRY_FORWARD):
            raise MonitorError(f"unknown missing-score policy {self.missing_policy!r}")

    def tau(self, predicate: str) -> float:
        for name, value in self.overrides:
            if name == predicate:
                return value
        return self.default


def threshold(frame: int, scores: Dict[str, float], predicates: Sequence[str],
              config: ThresholdConfig,
              previous: Optional[Valuation] = None) -> Valuation:
    """Threshold one frame's scores into a total valuation.

    A predicate is true iff its score is strictly greater than its
    threshold. Under the carry-forward policy, missing predicates reuse the
    previous frame's value (the first frame must be complete)."""
    predicates = tuple(sorted(predicates))
    for name, score in scores.items():
        ScoreRecord(frame, name, score)  # validates range
    missing = [p for p in predicates if p not in scores]
    if missing:
        if config.missing_policy == STRICT or previous is None:
            raise MissingScoreError(frame, missing)
    values = []
    for p in predicates:
        if p in scores:
            values.append(scores[p] > config.tau(p))
        else:
            values.append(previous[p])
    return Valuation(predicates, values)


@dataclass
class _ReqState:
    requirement_id: str
    dfa: Dfa
    state: int
    latched: Optional[str] = None
    can_accept: frozenset = frozenset()
    all_accepting: frozenset = frozenset()


@dataclass
class MonitorSession:
    """One logical stream consumer over a fixed proposition set."""

    predicates: Tuple[str, ...]
    config: ThresholdConfig = field(default_factory=ThresholdConfig)
    frames_consumed: int = 0
    last_valuation: Optional[Valuation] = None
    _reqs: List[_ReqState] = field(default_factory=list)

    def __post_init__(self):
        self.predicates = tuple(sorted(self.predicates))

    def add_requirement(self, requirement_id: str, formula: Formula) -> None:
        dfa = compile_formula(formula, self.predicates)
        self._reqs.append(_ReqState(
            requirement_id=requirement_id,
            dfa=dfa,
            state=dfa.initial,
            can_accept=states_reaching_accepting(dfa),
            all_accepting=states_always_accepting(dfa),
        ))

    def requirement_ids(self) -> List[str]:
        return [r.requirement_id for r in self._reqs]

    def step(self, valuation: Valuation) -> List[Tuple[str, str]]:
        """Advance every requirement DFA by one frame and return
        (requirement id, verdict) pairs."""
        if tuple(sorted(valuation.props)) != self.predicates:
            raise MonitorError(
                f"valuation domain {valuation.props} does not match session "
                f"predicates {self.predicates}"
            )
        out = []
        for r in self._reqs:
            if r.latched is not None:
                out.append((r.requirement_id, r.latched))
                continue
            vidx = valuation_index(valuation, r.dfa.props)
            r.state = r.dfa.table[r.state][vidx]
            verdict = _classify(r)
            if verdict in DEFINITIVE:
                r.latched = verdict
            out.append((r.requirement_id, verdict))
        self.frames_consumed += 1
        self.last_valuation = valuation
        return out

    def step_scores(self, frame: int, scores: Dict[str, float]) -> List[Tuple[str, str]]:
        valuation = threshold(frame, scores, self.predicates, self.config,
                              previous=self.last_valuation)
        return self.step(valuation)


def _classify(r: _ReqState) -> str:
    if r.state not in r.can_accept:
        return VIOLATED
    if r.state in r.all_accepting:
        return SATISFIED
    if r.state in r.dfa.accepting:
        return PRESUMABLY_TRUE
    return PRESUMABLY_FALSE


def state_verdicts(dfa: Dfa) -> List[str]:
    """Verdict each DFA state would report if current; exposed for the
    soundness test suite."""
    can_accept = states_reaching_accepting(dfa)
    all_accepting = states_always_accepting(dfa)
    out = []
    for s in range(dfa.n_states):
        if s not in can_accept:
            out.append(VIOLATED)
        elif s in all_accepting:
            out.append(SATISFIED)
        elif s in dfa.accepting:
            out.append(PRESUMABLY_TRUE)
        else:
            out.append(PRESUMABLY_FALSE)
    return out


# ---------------------------------------------------------------------------
# Score streams (JSON-lines wire format)

def parse_score_lines(lines: Iterable[str]) -> List[ScoreRecord]:
    """Parse the scores wire format: one JSON object per line with keys
    frame, pred, score. Rejects unsorted frames and malformed lines with
    their line number."""
    records: List[ScoreRecord] = []
    last_frame = -1
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            rec = ScoreRecord(int(obj["frame"]), str(obj["pred"]), float(obj["score"]))
        except MonitorError as exc:
            raise MonitorError(f"line {lineno}: {exc}") from exc
        except Exception as exc:
            raise MonitorError(f"line {lineno}: malformed score record: {exc}") from exc
        if rec.frame < last_frame:
            raise MonitorError(
                f"line {lineno}: frame {rec.frame} out of order (after {last_frame})"
            )
        last_frame = rec.frame
        records.append(rec)
    return records


def group_by_frame(records: Sequence[ScoreRecord]) -> List[Tuple[int, Dict[str, float]]]:
    frames: List[Tuple[int, Dict[str, float]]] = []
    for rec in records:
        if frames and frames[-1][0] == rec.frame:
            if rec.predicate in frames[-1][1]:
                raise MonitorError(
                    f"duplicate score for {rec.predicate!r} in frame {rec.frame}"
                )
            frames[-1][1][rec.predicate] = rec.score
        else:
            frames.append((rec.frame, {rec.predicate: rec.score}))
    return frames


@dataclass
class FlaggedSegment:
    requirement_id: str
    start_frame: int
    end_frame: int  # inclusive
    verdicts: Tuple[str, ...]


@dataclass
class OfflineScan:
    verdicts: List[Tuple[int, str, str]]  # (frame, requirement id, verdict)
    segments: List[FlaggedSegment]
    first_definitive: Dict[str, Optional[int]]


def scan_offline(records: Sequence[ScoreRecord],
                 formulas: Sequence[Tuple[str, Formula]],
                 predicates: Sequence[str],
                 config: Optional[ThresholdConfig] = None) -> OfflineScan:
    """Batch scan: per-frame verdicts for every requirement plus maximal
    flagged (violated / presumably_false) frame intervals."""
    config = config or ThresholdConfig()
    frames = group_by_frame(records)
    if not frames:
        raise MonitorError("empty score stream: traces must be nonempty")
    session = MonitorSession(predicates=tuple(predicates), config=config)
    for rid, f in formulas:
        session.add_requirement(rid, f)

    verdicts: List[Tuple[int, str, str]] = []
    per_req: Dict[str, List[Tuple[int, str]]] = {rid: [] for rid, _ in formulas}
    first_definitive: Dict[str, Optional[int]] = {rid: None for rid, _ in formulas}
    for frame_id, scores in frames:
        for rid, verdict in session.step_scores(frame_id, scores):
            verdicts.append((frame_id, rid, verdict))
            per_req[rid].append((frame_id, verdict))
            if verdict in DEFINITIVE and first_definitive[rid] is None:
                first_definitive[rid] = frame_id

    segments: List[FlaggedSegment] = []
    for rid, seq in per_req.items():
        start = None
        acc: List[str] = []
        for frame_id, verdict in seq:
            flagged = verdict in (VIOLATED, PRESUMABLY_FALSE)
            if flagged and start is None:
                start, acc = frame_id, [verdict]
            elif flagged:
                acc.append(verdict)
            elif start is not None:
                segments.append(FlaggedSegment(rid, start, prev_frame, tuple(acc)))
                start, acc = None, []
            prev_frame = frame_id
        if start is not None:
            segments.append(FlaggedSegment(rid, start, prev_frame, tuple(acc)))
    segments.sort(key=lambda s: (s.requirement_id, s.start_frame))
    return OfflineScan(verdicts=verdicts, segments=segments,
                       first_definitive=first_definitive)


def write_verdict_lines(verdicts: Sequence[Tuple[int, str, str]], out: IO[str]) -> None:
    for frame, rid, verdict in verdicts:
        out.write(json.dumps({"frame": frame, "req": rid, "verdict": verdict}) + "\n")
