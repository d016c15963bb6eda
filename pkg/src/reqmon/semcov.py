"""Semantic feature coverage and concept profiles over score matrices.

An item covers a feature when its similarity score is strictly greater
than the feature's threshold. Concept profiles hold per-group population
statistics of feature scores; deviation flagging marks items whose scores
sit more than z standard deviations from their group's profile.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Dict, IO, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

DEFAULT_Z = 3.0
DEFAULT_TAU = 0.4


class SemcovError(Exception):
    pass


class InsufficientDataError(SemcovError):
    pass


@dataclass
class ScoreMatrix:
    items: Tuple[str, ...]
    features: Tuple[str, ...]
    scores: np.ndarray  # rows = items, columns = features

    def __post_init__(self):
        self.items = tuple(self.items)
        self.features = tuple(self.features)
        self.scores = np.asarray(self.scores, dtype=float)
        if self.scores.shape != (len(self.items), len(self.features)):
            raise SemcovError(
                f"matrix shape {self.scores.shape} does not match "
                f"{len(self.items)} items x {len(self.features)} features"
            )
        if self.scores.size == 0:
            raise SemcovError("empty score matrix")
        if np.isnan(self.scores).any():
            raise SemcovError("score matrix has missing cells")
        if (self.scores < -1.0).any() or (self.scores > 1.0).any():
            raise SemcovError("scores must lie within [-1, 1]")


def matrix_from_csv(lines: Iterable[str]) -> ScoreMatrix:
    """Long-format CSV with header item,feature,score."""
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["item", "feature", "score"]:
        raise SemcovError("CSV header must be exactly: item,feature,score")
    cells: Dict[Tuple[str, str], float] = {}
    items: List[str] = []
    features: List[str] = []
    for row in reader:
        item, feature = row["item"], row["feature"]
        try:
            score = float(row["score"])
        except (TypeError, ValueError):
            raise SemcovError(f"bad score {row['score']!r} for ({item}, {feature})")
        if item not in items:
            items.append(item)
        if feature not in features:
            features.append(feature)
        cells[(item, feature)] = score
    if not cells:
        raise SemcovError("empty score matrix")
    missing = [(i, f) for i in items for f in features if (i, f) not in cells]
    if missing:
        raise SemcovError(f"missing cells: {missing[:5]}{'...' if len(missing) > 5 else ''}")
    scores = np.array([[cells[(i, f)] for f in features] for i in items])
    return ScoreMatrix(tuple(items), tuple(features), scores)


def matrix_from_score_lines(lines: Iterable[str]) -> ScoreMatrix:
    """Pivot the monitor's scores JSON-lines into a matrix: frames become
    items ("frame-<n>"), predicates become features."""
    from .monitor import parse_score_lines

    records = parse_score_lines(lines)
    if not records:
        raise SemcovError("empty score stream")
    items: List[str] = []
    features: List[str] = []
    cells: Dict[Tuple[str, str], float] = {}
    for rec in records:
        item = f"frame-{rec.frame}"
        if item not in items:
            items.append(item)
        if rec.predicate not in features:
            features.append(rec.predicate)
        cells[(item, rec.predicate)] = rec.score
    missing = [(i, f) for i in items for f in features if (i, f) not in cells]
    if missing:
        raise SemcovError(f"incomplete frames: {missing[:5]}")
    scores = np.array([[cells[(i, f)] for f in features] for i in items])
    return ScoreMatrix(tuple(items), tuple(features), scores)


# ---------------------------------------------------------------------------
# Coverage

@dataclass
class FeatureCoverage:
    feature: str
    threshold: float
    covered: int
    ratio: float
    mean: float
    std: float
    quartiles: Tuple[float, float, float]  # q1, median, q3


@dataclass
class CoverageReport:
    items: int
    target_ratio: float
    features: List[FeatureCoverage]
    gaps: List[str]  # features whose ratio is below target

    def as_dict(self) -> dict:
        return {
            "items": self.items,
            "target_ratio": self.target_ratio,
            "features": [
                {
                    "feature": fc.feature,
                    "threshold": fc.threshold,
                    "covered": fc.covered,
                    "ratio": fc.ratio,
                    "mean": fc.mean,
                    "std": fc.std,
                    "quartiles": list(fc.quartiles),
                }
                for fc in self.features
            ],
            "gaps": self.gaps,
        }


def coverage(matrix: ScoreMatrix,
             thresholds: Union[float, Mapping[str, float]] = 0.4,
             target_ratio: float = 1.0) -> CoverageReport:
    """Per-feature coverage: cover(item, feature) iff score strictly
    exceeds the feature's threshold."""
    if not 0.0 <= target_ratio <= 1.0:
        raise SemcovError(f"target ratio {target_ratio} outside [0, 1]")

    def tau(feature: str) -> float:
        if isinstance(thresholds, Mapping):
            value = float(thresholds.get(feature, DEFAULT_TAU))
        else:
            value = float(thresholds)
        if not -1.0 <= value <= 1.0:
            raise SemcovError(f"threshold {value} for {feature!r} outside [-1, 1]")
        return value

    n_items = len(matrix.items)
    features: List[FeatureCoverage] = []
    gaps: List[str] = []
    for j, feature in enumerate(matrix.features):
        col = matrix.scores[:, j]
        t = tau(feature)
        covered = int((col > t).sum())
        ratio = covered / n_items
        q1, med, q3 = np.percentile(col, [25, 50, 75])
        features.append(FeatureCoverage(
            feature=feature,
            threshold=t,
            covered=covered,
            ratio=ratio,
            mean=float(col.mean()),
            std=float(col.std()),
            quartiles=(float(q1), float(med), float(q3)),
        ))
        if ratio < target_ratio:
            gaps.append(feature)
    return CoverageReport(items=n_items, target_ratio=target_ratio,
                          features=features, gaps=gaps)


# ---------------------------------------------------------------------------
# Concept profiles (semantic heatmaps) and deviation flagging

@dataclass
class ConceptProfile:
    group: str
    features: Tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray  # population standard deviation
    count: int
    insufficient: bool  # fewer than 2 items

    def as_dict(self) -> dict:
        return {
            "group": self.group,
            "count": self.count,
            "insufficient": self.insufficient,
            "features": {
                f: {"mean": float(m), "std": float(s)}
                for f, m, s in zip(self.features, self.mean, self.std)
            },
        }


def build_profile(matrix: ScoreMatrix,
                  grouping: Mapping[str, str]) -> List[ConceptProfile]:
    """Population statistics per (group, feature). Groups are ordered by
    label; single-item groups carry the insufficient-data flag."""
    unknown = set(grouping) - set(matrix.items)
    if unknown:
        raise SemcovError(f"grouping references unknown items: {sorted(unknown)}")
    groups: Dict[str, List[int]] = {}
    for idx, item in enumerate(matrix.items):
        label = grouping.get(item)
        if label is None:
            continue
        groups.setdefault(label, []).append(idx)
    profiles = []
    for label in sorted(groups):
        rows = matrix.scores[groups[label], :]
        profiles.append(ConceptProfile(
            group=label,
            features=matrix.features,
            mean=rows.mean(axis=0),
            std=rows.std(axis=0),  # ddof=0: population
            count=len(groups[label]),
            insufficient=len(groups[label]) < 2,
        ))
    return profiles


@dataclass
class DeviationResult:
    deviant: bool
    features: Tuple[str, ...]  # offending features, matrix order
    z_scores: Dict[str, float]


def deviation_flag(profile: ConceptProfile,
                   item_scores: Mapping[str, float],
                   z: float = DEFAULT_Z) -> DeviationResult:
    """Flag an item whose score profile deviates from the group's: a
    feature offends when |s - mu| / sigma > z, or (sigma == 0) when the
    score differs from the mean at all."""
    if profile.insufficient:
        raise InsufficientDataError(
            f"group {profile.group!r} has {profile.count} item(s); need >= 2"
        )
    missing = set(profile.features) - set(item_scores)
    if missing:
        raise SemcovError(f"item scores missing features: {sorted(missing)}")
    offending: List[str] = []
    z_scores: Dict[str, float] = {}
    for f, mu, sigma in zip(profile.features, profile.mean, profile.std):
        s = float(item_scores[f])
        if sigma == 0.0:
            deviates = s != mu
            z_scores[f] = float("inf") if deviates else 0.0
        else:
            zs = abs(s - mu) / sigma
            z_scores[f] = float(zs)
            deviates = zs > z
        if deviates:
            offending.append(f)
    return DeviationResult(deviant=bool(offending), features=tuple(offending),
                           z_scores=z_scores)


def render_heatmap_text(profiles: Sequence[ConceptProfile]) -> str:
    """Plain-text heatmap: features x groups of mean scores."""
    if not profiles:
        return "(no groups)"
    features = profiles[0].features
    width = max([len(f) for f in features] + [7])
    gw = max([len(p.group) for p in profiles] + [6])
    header = " " * width + " | " + " ".join(f"{p.group:>{gw}}" for p in profiles)
    lines = [header, "-" * len(header)]
    for j, f in enumerate(features):
        cells = " ".join(f"{p.mean[j]:>{gw}.3f}" for p in profiles)
        lines.append(f"{f:<{width}} | {cells}")
    return "\n".join(lines)


def write_report_json(report: CoverageReport, profiles: Sequence[ConceptProfile],
                      out: IO[str]) -> None:
    json.dump(
        {"coverage": report.as_dict(), "profiles": [p.as_dict() for p in profiles]},
        out, indent=2,
    )
    out.write("\n")
