/**
 * Browser entry point: wires the API client, validation flow, and
 * dashboards into the page. All decisions round-trip through the service;
 * reloading mid-session loses nothing.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderAnalysis, renderRequirementList } from "./dashboard.js";
import { renderTimeline } from "./timeline.js";
import {
  renderCandidateList,
  renderQuestionBadges,
  renderTraceTable,
} from "./traceView.js";
import type { Label, QuestionView } from "./types.js";
import { runValidationFlow } from "./validationFlow.js";

const client = new ApiClient(
  (window as unknown as { REQMON_BASE_URL?: string }).REQMON_BASE_URL ??
    "http://127.0.0.1:8472",
);

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function banner(kind: "info" | "error" | "success", text: string): void {
  el("banner").innerHTML = `<div class="banner ${kind}">${text}</div>`;
}

async function refreshProject(name: string): Promise<void> {
  const project = await client.getProject(name);
  el("requirements").innerHTML = renderRequirementList(project);
}

function askUser(question: QuestionView): Promise<Label> {
  return new Promise((resolve) => {
    el("question").innerHTML =
      renderTraceTable(question.trace) +
      renderQuestionBadges(question.candidates, question.accepting_index);
    el("accept").onclick = () => resolve("accept");
    el("reject").onclick = () => resolve("reject");
  });
}

async function startValidation(project: string, requirement: string) {
  try {
    const result = await runValidationFlow(client, project, requirement, {
      decide: (q) => askUser(q),
      onCandidates: (req) => {
        el("candidates").innerHTML = renderCandidateList(req.candidates);
      },
      onConflict: (detail) =>
        banner("info", `Someone else answered first (${detail}); retrying.`),
    });
    el("question").innerHTML = "";
    if (result.status === "converged") {
      banner(
        "success",
        `Converged after ${result.questionsAsked} question(s).`,
      );
    } else if (result.status === "exhausted") {
      banner(
        "error",
        "All candidates pruned — re-run authoring to get fresh candidates.",
      );
    }
    await refreshProject(project);
  } catch (error) {
    if (error instanceof ApiError) {
      banner("error", error.message);
    } else {
      banner("error", "Network failure — check the service and retry.");
      throw error;
    }
  }
}

async function showAnalysis(project: string) {
  el("analysis").innerHTML = renderAnalysis(await client.analysis(project));
}

async function showVerdicts(sessionId: string) {
  const { verdicts } = await client.verdicts(sessionId);
  el("timeline").innerHTML = renderTimeline(verdicts);
}

declare global {
  interface Window {
    reqmonUi: {
      refreshProject: typeof refreshProject;
      startValidation: typeof startValidation;
      showAnalysis: typeof showAnalysis;
      showVerdicts: typeof showVerdicts;
    };
  }
}

window.reqmonUi = { refreshProject, startValidation, showAnalysis, showVerdicts };
