/** Payload types mirroring the service API (see docs/http-api.md). */

export type Verdict =
  | "satisfied"
  | "violated"
  | "presumably_true"
  | "presumably_false";

export type CandidateState = "active" | "pruned" | "selected";

export type SessionStatus = "open" | "converged" | "exhausted";

export interface TraceView {
  props: string[];
  frames: string[][];
  table: string;
  trace_id: string;
}

export interface CandidateView {
  index: number;
  re_text: string;
  formula: string;
  state: CandidateState;
  prune_reason: { trace_id: string; label: string } | null;
}

export interface RequirementView {
  id: string;
  source_text: string;
  status: string;
  selected: number | null;
  candidates: CandidateView[];
}

export interface ProjectView {
  name: string;
  vocabulary: Record<string, string>;
  requirements: RequirementView[];
  sessions: Record<
    string,
    { status: SessionStatus; revision: number; selected_index: number | null }
  >;
}

export interface QuestionView {
  trace: TraceView;
  pair: [number, number];
  /** Which of the pair accepts the trace (the other rejects it). */
  accepting_index: number;
  candidates: CandidateView[];
}

export interface NextQuestionResponse {
  requirement_id: string;
  status: SessionStatus;
  revision: number;
  question: QuestionView | null;
}

export interface LabelResponse {
  requirement: RequirementView;
  status: SessionStatus;
  revision: number;
}

export interface ConflictView {
  a: string;
  b: string;
  product_states: number;
}

export interface AnalysisView {
  satisfiable: boolean;
  witness: TraceView | null;
  conflicts: ConflictView[];
  redundancies: { implied: string; implying: string[] }[];
  vacuous: string[];
  has_findings: boolean;
}

export interface VerdictRecord {
  frame: number;
  req: string;
  verdict: Verdict;
}

export interface MonitorSessionView {
  session_id: string;
  project: string;
  requirements: string[];
  predicates: string[];
}

export type Label = "accept" | "reject";
