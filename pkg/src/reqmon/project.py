"""Single-file JSON project persistence.

A project bundles the proposition vocabulary (names and display captions),
requirements with their candidates, validation sessions, and the monitor
threshold configuration. Saves are atomic (temp file + rename); loads
validate every invariant and fail closed.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Dict, List

from . import elicitation
from .elicitation import LabeledTrace, ValidationSession
from .ltlf import Trace, check_prop_name
from .monitor import ThresholdConfig
from .reqstore import (
    ACTIVE, REQ_STATUSES, CANDIDATE_STATES, Candidate, Requirement, StoreError,
)

FORMAT_VERSION = 1


class ProjectError(Exception):
    pass


class VersionError(ProjectError):
    def __init__(self, found):
        super().__init__(
            f"project file format version {found!r} not supported (current: {FORMAT_VERSION})"
        )
        self.found = found


@dataclass
class Project:
    name: str
    vocabulary: Dict[str, str]  # proposition -> caption
    requirements: List[Requirement] = field(default_factory=list)
    sessions: Dict[str, ValidationSession] = field(default_factory=dict)
    threshold: ThresholdConfig = field(default_factory=ThresholdConfig)

    def __post_init__(self):
        for name in self.vocabulary:
            check_prop_name(name)

    @property
    def props(self) -> tuple:
        return tuple(sorted(self.vocabulary))

    def requirement(self, req_id: str) -> Requirement:
        for r in self.requirements:
            if r.id == req_id:
                return r
        raise ProjectError(f"unknown requirement {req_id!r}")

    def has_requirement(self, req_id: str) -> bool:
        return any(r.id == req_id for r in self.requirements)

    def add_requirement(self, req_id: str, text: str) -> Requirement:
        if self.has_requirement(req_id):
            raise ProjectError(f"requirement {req_id!r} already exists")
        req = Requirement(id=req_id, source_text=text)
        self.requirements.append(req)
        return req

    def session_for(self, req_id: str) -> ValidationSession:
        req = self.requirement(req_id)
        session = self.sessions.get(req_id)
        if session is None or session.candidates is not req.candidates:
            session = ValidationSession(
                requirement_id=req_id,
                candidates=req.candidates,
                props=self.props,
            )
            self.sessions[req_id] = session
        return session

    def check_invariants(self) -> None:
        seen = set()
        for r in self.requirements:
            if r.id in seen:
                raise ProjectError(f"duplicate requirement id {r.id!r}")
            seen.add(r.id)
            r.check_invariants(self.props)
        for req_id in self.sessions:
            if not self.has_requirement(req_id):
                raise ProjectError(f"session references unknown requirement {req_id!r}")


# ---------------------------------------------------------------------------
# Serialization

def _trace_to_json(trace: Trace) -> dict:
    return {"props": list(trace.props),
            "frames": [sorted(v.true_props()) for v in trace]}


def _trace_from_json(obj: dict, where: str) -> Trace:
    try:
        return Trace.from_true_sets(obj["props"], obj["frames"])
    except Exception as exc:
        raise ProjectError(f"{where}: bad trace: {exc}") from exc


def project_to_json(project: Project) -> dict:
    return {
        "version": FORMAT_VERSION,
        "name": project.name,
        "vocabulary": dict(sorted(project.vocabulary.items())),
        "threshold": {
            "default": project.threshold.default,
            "overrides": {k: v for k, v in project.threshold.overrides},
            "missing_policy": project.threshold.missing_policy,
        },
        "requirements": [
            {
                "id": r.id,
                "source_text": r.source_text,
                "status": r.status,
                "selected": r.selected,
                "candidates": [
                    {
                        "re_text": c.re_text,
                        "state": c.state,
                        "prune_reason": c.prune_reason,
                    }
                    for c in r.candidates
                ],
            }
            for r in project.requirements
        ],
        "sessions": {
            req_id: {
                "status": s.status,
                "revision": s.revision,
                "selected_index": s.selected_index,
                "labels": [
                    {
                        "trace": _trace_to_json(lt.trace),
                        "label": lt.label,
                        "pair": list(lt.pair) if lt.pair else None,
                    }
                    for lt in s.labels
                ],
            }
            for req_id, s in sorted(project.sessions.items())
        },
    }


def project_from_json(doc: dict) -> Project:
    if not isinstance(doc, dict):
        raise ProjectError("project document must be a JSON object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise VersionError(version)
    try:
        vocabulary = dict(doc["vocabulary"])
        name = str(doc["name"])
    except KeyError as exc:
        raise ProjectError(f"missing field {exc}") from exc

    thr = doc.get("threshold", {})
    try:
        threshold = ThresholdConfig(
            default=float(thr.get("default", 0.4)),
            overrides=tuple(sorted((k, float(v)) for k, v in thr.get("overrides", {}).items())),
            missing_policy=thr.get("missing_policy", "strict"),
        )
    except Exception as exc:
        raise ProjectError(f"threshold: {exc}") from exc

    project = Project(name=name, vocabulary=vocabulary, threshold=threshold)
    props = project.props

    for robj in doc.get("requirements", []):
        where = f"requirements[{robj.get('id')!r}]"
        try:
            req = Requirement(
                id=str(robj["id"]),
                source_text=str(robj["source_text"]),
                status=str(robj["status"]),
                selected=robj.get("selected"),
            )
        except KeyError as exc:
            raise ProjectError(f"{where}: missing field {exc}") from exc
        if req.status not in REQ_STATUSES:
            raise ProjectError(f"{where}: bad status {req.status!r}")
        for cobj in robj.get("candidates", []):
            state = cobj.get("state", ACTIVE)
            if state not in CANDIDATE_STATES:
                raise ProjectError(f"{where}: bad candidate state {state!r}")
            try:
                cand = Candidate.from_re_text(str(cobj["re_text"]), props)
            except Exception as exc:
                raise ProjectError(f"{where}: candidate does not parse: {exc}") from exc
            cand.state = state
            cand.prune_reason = cobj.get("prune_reason")
            req.candidates.append(cand)
        project.requirements.append(req)

    for req_id, sobj in doc.get("sessions", {}).items():
        if not project.has_requirement(req_id):
            raise ProjectError(f"sessions[{req_id!r}]: unknown requirement")
        req = project.requirement(req_id)
        session = ValidationSession(
            requirement_id=req_id,
            candidates=req.candidates,
            props=props,
            status=str(sobj.get("status", "open")),
            revision=int(sobj.get("revision", 0)),
            selected_index=sobj.get("selected_index"),
        )
        if session.status not in (elicitation.OPEN, elicitation.CONVERGED,
                                  elicitation.EXHAUSTED):
            raise ProjectError(f"sessions[{req_id!r}]: bad status {session.status!r}")
        for lobj in sobj.get("labels", []):
            label = lobj.get("label")
            if label not in (elicitation.ACCEPT, elicitation.REJECT):
                raise ProjectError(f"sessions[{req_id!r}]: bad label {label!r}")
            pair = lobj.get("pair")
            session.labels.append(LabeledTrace(
                trace=_trace_from_json(lobj["trace"], f"sessions[{req_id!r}]"),
                label=label,
                pair=tuple(pair) if pair else None,
            ))
        project.sessions[req_id] = session

    try:
        project.check_invariants()
    except StoreError as exc:
        raise ProjectError(str(exc)) from exc
    return project


def save_project(project: Project, path: str) -> None:
    """Atomic save: the file at path is either the previous content or the
    complete new document, never a partial write."""
    project.check_invariants()
    doc = project_to_json(project)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(prefix=".reqmon-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w") as handle:
            json.dump(doc, handle, indent=2)
            handle.write("\n")
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def load_project(path: str) -> Project:
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise ProjectError(f"corrupt project file {path}: {exc}") from exc
    return project_from_json(doc)
