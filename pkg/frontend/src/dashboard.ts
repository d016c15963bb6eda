import { renderTraceTable } from "./traceView.js";
import type { AnalysisView, ProjectView } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Requirement list with status chips; onboarding hint when empty. */
export function renderRequirementList(project: ProjectView): string {
  if (project.requirements.length === 0) {
    return (
      `<p class="onboarding">No requirements yet — add one with ` +
      `<code>POST /projects/${escapeHtml(project.name)}/requirements</code> ` +
      `or the CLI, then run authoring to get candidate formalizations.</p>`
    );
  }
  const items = project.requirements
    .map(
      (req) =>
        `<li><span class="chip ${req.status}">${req.status}</span> ` +
        `<strong>${escapeHtml(req.id)}</strong> ` +
        `${escapeHtml(req.source_text)}</li>`,
    )
    .join("");
  return `<ul class="requirements">${items}</ul>`;
}

/** Analysis view: conflicts with witness trace tables, redundancies. */
export function renderAnalysis(analysis: AnalysisView): string {
  const parts: string[] = [];
  parts.push(
    `<p class="satisfiable">satisfiable: ${analysis.satisfiable ? "yes" : "no"}</p>`,
  );
  if (analysis.conflicts.length > 0) {
    const rows = analysis.conflicts
      .map(
        (c) =>
          `<li class="conflict">${escapeHtml(c.a)} conflicts with ${escapeHtml(c.b)}</li>`,
      )
      .join("");
    parts.push(`<ul class="conflicts">${rows}</ul>`);
  }
  if (analysis.redundancies.length > 0) {
    const rows = analysis.redundancies
      .map(
        (r) =>
          `<li class="redundancy">${escapeHtml(r.implied)} is implied by ` +
          `${r.implying.map(escapeHtml).join(" & ")}</li>`,
      )
      .join("");
    parts.push(`<ul class="redundancies">${rows}</ul>`);
  }
  if (analysis.conflicts.length === 0 && analysis.redundancies.length === 0) {
    parts.push(`<p class="clean">no conflicts or redundancies found</p>`);
  }
  if (analysis.witness) {
    parts.push(`<h3>witness</h3>${renderTraceTable(analysis.witness)}`);
  }
  if (analysis.vacuous.length > 0) {
    parts.push(
      `<p class="advisory">advisory: witness never triggers ` +
        `${analysis.vacuous.map(escapeHtml).join(", ")}</p>`,
    );
  }
  return `<section class="analysis">${parts.join("")}</section>`;
}
