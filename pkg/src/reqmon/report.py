"""Figure rendering for monitor verdicts and coverage reports.

All figures are written to files (Agg backend); nothing is shown
interactively. Paths of the written files are returned so the CLI can list
them next to the delimited output.
"""

from __future__ import annotations

import os
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .monitor import PRESUMABLY_FALSE, PRESUMABLY_TRUE, SATISFIED, VIOLATED
from .semcov import ConceptProfile, CoverageReport

_VERDICT_LEVEL = {
    VIOLATED: 0,
    PRESUMABLY_FALSE: 1,
    PRESUMABLY_TRUE: 2,
    SATISFIED: 3,
}

_VERDICT_COLOR = {
    VIOLATED: "#c0392b",
    PRESUMABLY_FALSE: "#e67e22",
    PRESUMABLY_TRUE: "#7fb3d5",
    SATISFIED: "#27ae60",
}


def render_verdict_timeline(verdicts: Sequence[Tuple[int, str, str]],
                            path: str, title: str = "Monitor verdicts") -> str:
    """Step plot of the four-valued verdict per requirement over frames.

    verdicts: (frame, requirement id, verdict) triples, frame-ordered.
    """
    by_req: Dict[str, List[Tuple[int, str]]] = {}
    for frame, rid, verdict in verdicts:
        by_req.setdefault(rid, []).append((frame, verdict))

    n = max(len(by_req), 1)
    fig, axes = plt.subplots(n, 1, figsize=(8, 1.6 * n + 1.0),
                             sharex=True, squeeze=False)
    for ax, (rid, seq) in zip(axes[:, 0], sorted(by_req.items())):
        frames = [f for f, _ in seq]
        levels = [_VERDICT_LEVEL[v] for _, v in seq]
        colors = [_VERDICT_COLOR[v] for _, v in seq]
        ax.step(frames, levels, where="post", color="#555555", linewidth=1)
        ax.scatter(frames, levels, c=colors, zorder=3, s=24)
        ax.set_yticks([0, 1, 2, 3])
        ax.set_yticklabels(["viol", "p-false", "p-true", "sat"], fontsize=7)
        ax.set_ylim(-0.5, 3.5)
        ax.set_ylabel(rid, rotation=0, ha="right", va="center", fontsize=8)
        ax.grid(True, axis="x", alpha=0.3)
    if not by_req:
        axes[0, 0].text(0.5, 0.5, "(no verdicts)", ha="center", va="center")
        axes[0, 0].set_xticks([])
        axes[0, 0].set_yticks([])
    axes[-1, 0].set_xlabel("frame")
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return os.path.abspath(path)


def render_coverage_figure(report: CoverageReport, path: str,
                           title: str = "Feature coverage") -> str:
    """Horizontal bar chart of per-feature coverage ratios against the
    target; gap features are highlighted."""
    features = [fc.feature for fc in report.features]
    ratios = [fc.ratio for fc in report.features]
    colors = ["#c0392b" if fc.feature in report.gaps else "#27ae60"
              for fc in report.features]
    height = max(2.0, 0.4 * len(features) + 1.2)
    fig, ax = plt.subplots(figsize=(8, height))
    ypos = np.arange(len(features))
    ax.barh(ypos, ratios, color=colors)
    ax.axvline(report.target_ratio, color="#555555", linestyle="--",
               linewidth=1, label=f"target {report.target_ratio:.2f}")
    ax.set_yticks(ypos)
    ax.set_yticklabels(features, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlim(0, 1.05)
    ax.set_xlabel("covered ratio")
    ax.legend(loc="lower right", fontsize=8)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return os.path.abspath(path)


def render_profile_heatmap(profiles: Sequence[ConceptProfile], path: str,
                           title: str = "Concept profiles") -> str:
    """Heatmap of mean feature scores per concept group."""
    fig, ax = plt.subplots(figsize=(8, 4))
    if profiles:
        features = profiles[0].features
        data = np.stack([p.mean for p in profiles], axis=1)
        image = ax.imshow(data, aspect="auto", cmap="viridis",
                          vmin=-1.0, vmax=1.0)
        ax.set_xticks(range(len(profiles)))
        ax.set_xticklabels([p.group for p in profiles], fontsize=8)
        ax.set_yticks(range(len(features)))
        ax.set_yticklabels(features, fontsize=8)
        fig.colorbar(image, ax=ax, label="mean score")
    else:
        ax.text(0.5, 0.5, "(no groups)", ha="center", va="center")
        ax.set_xticks([])
        ax.set_yticks([])
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return os.path.abspath(path)
