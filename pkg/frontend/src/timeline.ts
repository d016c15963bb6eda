import type { Verdict, VerdictRecord } from "./types.js";

/** One color per verdict string, bijectively. */
export const VERDICT_COLORS: Record<Verdict, string> = {
  satisfied: "#1e8e3e",
  presumably_true: "#81c995",
  presumably_false: "#fbbc04",
  violated: "#d93025",
};

export const VERDICT_SYMBOLS: Record<Verdict, string> = {
  satisfied: "S",
  presumably_true: "t",
  presumably_false: "f",
  violated: "V",
};

export function colorFor(verdict: Verdict): string {
  const color = VERDICT_COLORS[verdict];
  if (!color) {
    throw new Error(`unknown verdict ${JSON.stringify(verdict)}`);
  }
  return color;
}

export interface TimelineRow {
  req: string;
  cells: { frame: number; verdict: Verdict; color: string }[];
}

/** Group a verdict stream into one row per requirement, frames ascending. */
export function buildTimeline(records: VerdictRecord[]): TimelineRow[] {
  const byReq = new Map<string, TimelineRow>();
  for (const record of records) {
    let row = byReq.get(record.req);
    if (!row) {
      row = { req: record.req, cells: [] };
      byReq.set(record.req, row);
    }
    row.cells.push({
      frame: record.frame,
      verdict: record.verdict,
      color: colorFor(record.verdict),
    });
  }
  const rows = [...byReq.values()];
  for (const row of rows) {
    row.cells.sort((a, b) => a.frame - b.frame);
  }
  rows.sort((a, b) => a.req.localeCompare(b.req));
  return rows;
}

/** Colored per-frame timeline, one row per requirement. */
export function renderTimeline(records: VerdictRecord[]): string {
  const rows = buildTimeline(records)
    .map((row) => {
      const cells = row.cells
        .map(
          (cell) =>
            `<td class="verdict ${cell.verdict}" data-frame="${cell.frame}" ` +
            `style="background:${cell.color}" title="${cell.verdict}">` +
            `${VERDICT_SYMBOLS[cell.verdict]}</td>`,
        )
        .join("");
      return `<tr><th scope="row">${row.req}</th>${cells}</tr>`;
    })
    .join("");
  return `<table class="timeline"><tbody>${rows}</tbody></table>`;
}
