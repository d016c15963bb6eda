import { ApiClient, ApiError } from "./api.js";
import type {
  Label,
  QuestionView,
  RequirementView,
  SessionStatus,
} from "./types.js";

export interface FlowHooks {
  /** Called with each question; returns the user's decision. */
  decide(question: QuestionView, revision: number): Promise<Label>;
  /** Called after every applied label with the refreshed candidate list. */
  onCandidates?(requirement: RequirementView): void;
  /** Called when a stale revision forces a refetch-and-replay. */
  onConflict?(detail: string): void;
}

export interface FlowResult {
  status: SessionStatus;
  questionsAsked: number;
  requirement: RequirementView | null;
}

/**
 * Drive a validation session to completion: fetch the next question, ask
 * the user, post the label, repeat until converged or exhausted. All
 * semantics stay server-side; a 409 (someone else labeled concurrently)
 * refetches the question and replays the prompt.
 */
export async function runValidationFlow(
  client: ApiClient,
  project: string,
  requirementId: string,
  hooks: FlowHooks,
  maxQuestions = 100,
): Promise<FlowResult> {
  let questionsAsked = 0;
  let requirement: RequirementView | null = null;
  for (;;) {
    const next = await client.nextQuestion(project, requirementId);
    if (next.status !== "open" || next.question === null) {
      if (requirement === null) {
        const view = await client.getProject(project);
        requirement =
          view.requirements.find((r) => r.id === requirementId) ?? null;
      }
      return { status: next.status, questionsAsked, requirement };
    }
    if (questionsAsked >= maxQuestions) {
      throw new Error(`validation did not settle in ${maxQuestions} questions`);
    }
    const label = await hooks.decide(next.question, next.revision);
    questionsAsked += 1;
    try {
      const applied = await client.postLabel(
        project,
        requirementId,
        next.revision,
        next.question.trace.frames,
        label,
      );
      requirement = applied.requirement;
      hooks.onCandidates?.(applied.requirement);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // stale revision: refetch the question and replay the prompt
        hooks.onConflict?.(error.detail);
        continue;
      }
      throw error;
    }
  }
}
