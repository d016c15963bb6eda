"""HTTP/JSON service over project files.

One JSON file per project under the data directory (REQMON_DATA_DIR or cwd).
Mutating endpoints take a per-project lock so concurrent writers serialize;
GET endpoints never mutate. Validation labels use optimistic concurrency:
a label carrying a stale session revision is rejected with 409.
"""

from __future__ import annotations

import itertools
import os
import threading
from typing import Dict, List, Optional

from fastapi import Body, FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import authoring, elicitation, monitor, project as project_mod
from . import reqstore, semcov, testgen
from .elicitation import apply_label, next_question, trace_id
from .ltlf import LtlfError, Trace, render_trace_table
from .monitor import MonitorSession, ThresholdConfig
from .project import Project, ProjectError, load_project, save_project
from .reqstore import StoreError, UnformalizedRequirementError, analyze

DATA_DIR_ENV = "REQMON_DATA_DIR"
DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8472


def _data_dir() -> str:
    return os.environ.get(DATA_DIR_ENV, os.getcwd())


class _Store:
    """Per-project locking facade over the data directory."""

    def __init__(self, data_dir: Optional[str] = None):
        self.data_dir = data_dir or _data_dir()
        self._locks: Dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def path(self, name: str) -> str:
        if not name or "/" in name or name.startswith("."):
            raise HTTPException(422, f"bad project name {name!r}")
        return os.path.join(self.data_dir, name + ".json")

    def lock(self, name: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(name, threading.Lock())

    def load(self, name: str) -> Project:
        path = self.path(name)
        try:
            return load_project(path)
        except FileNotFoundError:
            raise HTTPException(404, f"unknown project {name!r}")
        except ProjectError as exc:
            raise HTTPException(422, str(exc))

    def save(self, proj: Project) -> None:
        save_project(proj, self.path(proj.name))


# ---------------------------------------------------------------------------
# Payload models

class ProjectCreate(BaseModel):
    name: str
    vocabulary: Dict[str, str]
    threshold_default: float = monitor.DEFAULT_THRESHOLD
    threshold_overrides: Dict[str, float] = Field(default_factory=dict)
    missing_policy: str = monitor.STRICT


class RequirementCreate(BaseModel):
    id: str
    text: str


class AuthorRequest(BaseModel):
    max_candidates: int = 5
    provider: str = "stub"
    endpoint: str = ""
    model: str = ""


class LabelRequest(BaseModel):
    revision: int
    trace_frames: List[List[str]]
    label: str


class TestsRequest(BaseModel):
    criterion: str = testgen.TRANSITION_COVERAGE


class MonitorSessionCreate(BaseModel):
    requirements: Optional[List[str]] = None  # default: all formalized


class FramePost(BaseModel):
    frame: int
    scores: Dict[str, float]


class CoverageRequest(BaseModel):
    scores: List[str]  # scores wire format lines
    thresholds: Dict[str, float] = Field(default_factory=dict)
    target_ratio: float = 1.0
    grouping: Dict[str, str] = Field(default_factory=dict)


# ---------------------------------------------------------------------------
# JSON views

def _trace_view(trace: Trace) -> dict:
    return {
        "props": list(trace.props),
        "frames": [sorted(v.true_props()) for v in trace],
        "table": render_trace_table(trace),
        "trace_id": trace_id(trace),
    }


def _candidate_view(index: int, cand: reqstore.Candidate) -> dict:
    return {
        "index": index,
        "re_text": cand.re_text,
        "formula": str(cand.formula),
        "state": cand.state,
        "prune_reason": cand.prune_reason,
    }


def _requirement_view(req: reqstore.Requirement) -> dict:
    return {
        "id": req.id,
        "source_text": req.source_text,
        "status": req.status,
        "selected": req.selected,
        "candidates": [_candidate_view(i, c) for i, c in enumerate(req.candidates)],
    }


def _project_view(proj: Project) -> dict:
    return {
        "name": proj.name,
        "vocabulary": dict(sorted(proj.vocabulary.items())),
        "requirements": [_requirement_view(r) for r in proj.requirements],
        "sessions": {
            rid: {"status": s.status, "revision": s.revision,
                  "selected_index": s.selected_index}
            for rid, s in sorted(proj.sessions.items())
        },
    }


def _analysis_view(report: reqstore.AnalysisReport) -> dict:
    return {
        "satisfiable": report.satisfiable,
        "witness": _trace_view(report.witness) if report.witness else None,
        "conflicts": [
            {"a": a, "b": b, "product_states": n}
            for a, b, n in report.conflict_pairs
        ],
        "redundancies": [
            {"implied": implied, "implying": list(implying)}
            for implied, implying in report.redundancies
        ],
        "vacuous": report.vacuous,
        "has_findings": report.has_findings(),
    }


# ---------------------------------------------------------------------------
# App

class _LiveMonitor:
    def __init__(self, session_id: str, project_name: str, session: MonitorSession):
        self.id = session_id
        self.project_name = project_name
        self.session = session
        self.verdicts: List[dict] = []
        self.lock = threading.Lock()


def create_app(data_dir: Optional[str] = None) -> FastAPI:
    store = _Store(data_dir)
    app = FastAPI(title="reqmon", version="1.0")
    monitors: Dict[str, _LiveMonitor] = {}
    monitor_seq = itertools.count(1)
    monitors_guard = threading.Lock()

    def _requirement(proj: Project, req_id: str) -> reqstore.Requirement:
        try:
            return proj.requirement(req_id)
        except ProjectError:
            raise HTTPException(404, f"unknown requirement {req_id!r}")

    @app.post("/projects", status_code=201)
    def create_project(body: ProjectCreate):
        path = store.path(body.name)
        with store.lock(body.name):
            if os.path.exists(path):
                raise HTTPException(409, f"project {body.name!r} already exists")
            try:
                proj = Project(
                    name=body.name,
                    vocabulary=dict(body.vocabulary),
                    threshold=ThresholdConfig(
                        default=body.threshold_default,
                        overrides=tuple(sorted(body.threshold_overrides.items())),
                        missing_policy=body.missing_policy,
                    ),
                )
            except (LtlfError, monitor.MonitorError) as exc:
                raise HTTPException(422, str(exc))
            store.save(proj)
        return _project_view(proj)

    @app.get("/projects/{p}")
    def get_project(p: str):
        return _project_view(store.load(p))

    @app.post("/projects/{p}/requirements", status_code=201)
    def add_requirement(p: str, body: RequirementCreate):
        with store.lock(p):
            proj = store.load(p)
            try:
                req = proj.add_requirement(body.id, body.text)
            except ProjectError as exc:
                raise HTTPException(409, str(exc))
            store.save(proj)
        return _requirement_view(req)

    @app.post("/projects/{p}/requirements/{r}/author")
    def author(p: str, r: str, body: AuthorRequest = Body(default=AuthorRequest())):
        with store.lock(p):
            proj = store.load(p)
            req = _requirement(proj, r)
            config = authoring.ProviderConfig(
                kind=body.provider, endpoint=body.endpoint, model=body.model)
            try:
                result = authoring.author_candidates(
                    authoring.AuthoringRequest(
                        source_text=req.source_text,
                        vocabulary=proj.vocabulary,
                        max_candidates=body.max_candidates,
                    ),
                    config=config,
                )
            except authoring.AuthoringError as exc:
                raise HTTPException(422, str(exc))
            req.candidates = result.candidates
            req.status = reqstore.AUTHORING
            req.selected = None
            proj.sessions.pop(r, None)  # candidates changed: old labels void
            store.save(proj)
        return {
            "requirement": _requirement_view(req),
            "diagnostics": result.diagnostics,
        }

    @app.get("/projects/{p}/requirements/{r}/candidates")
    def candidates(p: str, r: str):
        proj = store.load(p)
        req = _requirement(proj, r)
        return [_candidate_view(i, c) for i, c in enumerate(req.candidates)]

    @app.post("/projects/{p}/requirements/{r}/validation/next")
    def validation_next(p: str, r: str):
        with store.lock(p):
            proj = store.load(p)
            req = _requirement(proj, r)
            if not req.candidates:
                raise HTTPException(422, f"requirement {r!r} has no candidates")
            session = proj.session_for(r)
            if session.status == elicitation.OPEN:
                req.status = reqstore.VALIDATING
                question = next_question(session)
            else:
                question = None
            if session.status == elicitation.CONVERGED and session.selected_index is not None:
                req.select(session.selected_index)
            store.save(proj)
        body = {
            "requirement_id": r,
            "status": session.status,
            "revision": session.revision,
            "question": None,
        }
        if question is not None:
            trace, pair = question
            # a distinguishing trace is accepted by exactly one of the pair;
            # exposing which lets clients render badges without semantics
            accepting = next(
                i for i in pair if req.candidates[i].dfa(proj.props).accepts(trace)
            )
            body["question"] = {
                "trace": _trace_view(trace),
                "pair": list(pair),
                "accepting_index": accepting,
                "candidates": [_candidate_view(i, req.candidates[i]) for i in pair],
            }
        return body

    @app.post("/projects/{p}/requirements/{r}/validation/label")
    def validation_label(p: str, r: str, body: LabelRequest):
        with store.lock(p):
            proj = store.load(p)
            req = _requirement(proj, r)
            session = proj.sessions.get(r)
            if session is None:
                raise HTTPException(404, f"no validation session for {r!r}")
            if body.revision != session.revision:
                raise HTTPException(
                    409,
                    f"stale revision {body.revision} (current {session.revision})",
                )
            try:
                trace = Trace.from_true_sets(proj.props, body.trace_frames)
                apply_label(session, trace, body.label)
            except (elicitation.ElicitationError, LtlfError) as exc:
                raise HTTPException(422, str(exc))
            if session.status == elicitation.CONVERGED and session.selected_index is not None:
                req.select(session.selected_index)
            store.save(proj)
        return {
            "requirement": _requirement_view(req),
            "status": session.status,
            "revision": session.revision,
        }

    @app.get("/projects/{p}/analysis")
    def analysis(p: str):
        proj = store.load(p)
        try:
            report = analyze(proj.requirements)
        except UnformalizedRequirementError as exc:
            raise HTTPException(422, str(exc))
        return _analysis_view(report)

    @app.post("/projects/{p}/requirements/{r}/tests")
    def tests(p: str, r: str, body: TestsRequest = Body(default=TestsRequest())):
        proj = store.load(p)
        req = _requirement(proj, r)
        try:
            formula = req.selected_formula()
            suite = testgen.generate_suite(
                formula, criterion=body.criterion,
                requirement_id=r, props=proj.props,
            )
        except (StoreError, testgen.TestgenError) as exc:
            raise HTTPException(422, str(exc))
        return {
            "suite": r,
            "criterion": suite.criterion,
            "coverage_ratio": suite.coverage_ratio,
            "unreachable": list(suite.unreachable_items),
            "cases": [
                {
                    "case_id": c.id,
                    "expected": c.expected,
                    "frames": [sorted(v.true_props()) for v in c.trace],
                    "covered": list(c.covered),
                }
                for c in suite.cases
            ],
        }

    @app.post("/projects/{p}/monitor/sessions", status_code=201)
    def monitor_create(p: str, body: MonitorSessionCreate = Body(default=MonitorSessionCreate())):
        proj = store.load(p)
        req_ids = body.requirements
        if req_ids is None:
            req_ids = [r.id for r in proj.requirements if r.selected is not None]
        session = MonitorSession(predicates=proj.props, config=proj.threshold)
        for rid in req_ids:
            req = _requirement(proj, rid)
            try:
                session.add_requirement(rid, req.selected_formula())
            except UnformalizedRequirementError as exc:
                raise HTTPException(422, str(exc))
        if not session.requirement_ids():
            raise HTTPException(422, "no formalized requirements to monitor")
        with monitors_guard:
            sid = f"ms-{next(monitor_seq)}"
            monitors[sid] = _LiveMonitor(sid, p, session)
        return {"session_id": sid, "project": p,
                "requirements": session.requirement_ids(),
                "predicates": list(session.predicates)}

    def _live(s: str) -> _LiveMonitor:
        live = monitors.get(s)
        if live is None:
            raise HTTPException(404, f"unknown monitor session {s!r}")
        return live

    @app.post("/monitor/sessions/{s}/frames")
    def monitor_frame(s: str, body: FramePost):
        live = _live(s)
        with live.lock:
            expected = live.session.frames_consumed
            if body.frame != expected:
                raise HTTPException(
                    409, f"out-of-order frame {body.frame} (expected {expected})")
            try:
                results = live.session.step_scores(body.frame, body.scores)
            except monitor.MonitorError as exc:
                raise HTTPException(422, str(exc))
            out = [{"frame": body.frame, "req": rid, "verdict": v}
                   for rid, v in results]
            live.verdicts.extend(out)
        return {"session_id": s, "verdicts": out}

    @app.get("/monitor/sessions/{s}/verdicts")
    def monitor_verdicts(s: str):
        live = _live(s)
        with live.lock:
            return {"session_id": s, "verdicts": list(live.verdicts)}

    @app.post("/projects/{p}/coverage")
    def coverage_report(p: str, body: CoverageRequest):
        proj = store.load(p)
        try:
            matrix = semcov.matrix_from_score_lines(body.scores)
            thresholds: Dict[str, float] = {
                f: proj.threshold.tau(f) for f in matrix.features}
            thresholds.update(body.thresholds)
            report = semcov.coverage(matrix, thresholds, body.target_ratio)
            profiles = semcov.build_profile(matrix, body.grouping)
        except (semcov.SemcovError, monitor.MonitorError) as exc:
            raise HTTPException(422, str(exc))
        return {
            "coverage": report.as_dict(),
            "profiles": [prof.as_dict() for prof in profiles],
            "heatmap": semcov.render_heatmap_text(profiles),
        }

    return app


def serve(host: str = DEFAULT_HOST, port: int = DEFAULT_PORT,
          data_dir: Optional[str] = None) -> None:
    import uvicorn

    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="info")
