import type { CandidateView, TraceView } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * Truth-table rendering of a trace: columns are frames, rows are
 * propositions, cells are the truth values carried by the API payload.
 * No truth values are computed client-side.
 */
export function renderTraceTable(trace: TraceView): string {
  const header = trace.frames
    .map((_, i) => `<th scope="col">t${i}</th>`)
    .join("");
  const rows = trace.props
    .map((prop) => {
      const cells = trace.frames
        .map((frame) => {
          const truth = frame.includes(prop);
          return `<td class="${truth ? "tt" : "ff"}">${truth ? "T" : "F"}</td>`;
        })
        .join("");
      return `<tr><th scope="row">${escapeHtml(prop)}</th>${cells}</tr>`;
    })
    .join("");
  return (
    `<table class="trace" data-trace-id="${escapeHtml(trace.trace_id)}">` +
    `<thead><tr><th></th>${header}</tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

/**
 * Badges showing, for the pair of candidates a question separates, which
 * one accepts the rendered trace. The service guarantees the witness is
 * accepted by exactly one of the two.
 */
export function renderQuestionBadges(
  candidates: CandidateView[],
  accepting: number,
): string {
  return candidates
    .map((candidate) => {
      const accepts = candidate.index === accepting;
      return (
        `<span class="badge ${accepts ? "accepts" : "rejects"}">` +
        `[${candidate.index}] ${escapeHtml(candidate.re_text)} — ` +
        `${accepts ? "accepts" : "rejects"} this trace</span>`
      );
    })
    .join("");
}

/** Candidate list with pruned items struck through. */
export function renderCandidateList(candidates: CandidateView[]): string {
  const items = candidates
    .map((candidate) => {
      const text = `${escapeHtml(candidate.re_text)} <code>${escapeHtml(candidate.formula)}</code>`;
      const body = candidate.state === "pruned" ? `<s>${text}</s>` : text;
      const mark = candidate.state === "selected" ? " ✓" : "";
      return `<li class="cand ${candidate.state}">${body}${mark}</li>`;
    })
    .join("");
  return `<ol class="candidates">${items}</ol>`;
}
