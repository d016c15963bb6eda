import type {
  AnalysisView,
  Label,
  LabelResponse,
  MonitorSessionView,
  NextQuestionResponse,
  ProjectView,
  VerdictRecord,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

/** Thin typed client over the service endpoints; holds no semantic state. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as Record<string, unknown>;
    if (response.status >= 400) {
      const detail =
        typeof payload?.detail === "string"
          ? payload.detail
          : JSON.stringify(payload);
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  createProject(
    name: string,
    vocabulary: Record<string, string>,
  ): Promise<ProjectView> {
    return this.request("POST", "/projects", { name, vocabulary });
  }

  getProject(name: string): Promise<ProjectView> {
    return this.request("GET", `/projects/${encodeURIComponent(name)}`);
  }

  addRequirement(
    project: string,
    id: string,
    text: string,
  ): Promise<ProjectView> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(project)}/requirements`,
      { id, text },
    );
  }

  author(project: string, requirement: string): Promise<unknown> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(project)}/requirements/${encodeURIComponent(requirement)}/author`,
      {},
    );
  }

  nextQuestion(
    project: string,
    requirement: string,
  ): Promise<NextQuestionResponse> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(project)}/requirements/${encodeURIComponent(requirement)}/validation/next`,
    );
  }

  postLabel(
    project: string,
    requirement: string,
    revision: number,
    traceFrames: string[][],
    label: Label,
  ): Promise<LabelResponse> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(project)}/requirements/${encodeURIComponent(requirement)}/validation/label`,
      { revision, trace_frames: traceFrames, label },
    );
  }

  analysis(project: string): Promise<AnalysisView> {
    return this.request(
      "GET",
      `/projects/${encodeURIComponent(project)}/analysis`,
    );
  }

  createMonitorSession(
    project: string,
    requirements?: string[],
  ): Promise<MonitorSessionView> {
    return this.request(
      "POST",
      `/projects/${encodeURIComponent(project)}/monitor/sessions`,
      requirements === undefined ? {} : { requirements },
    );
  }

  postFrame(
    sessionId: string,
    frame: number,
    scores: Record<string, number>,
  ): Promise<{ session_id: string; verdicts: VerdictRecord[] }> {
    return this.request(
      "POST",
      `/monitor/sessions/${encodeURIComponent(sessionId)}/frames`,
      { frame, scores },
    );
  }

  verdicts(
    sessionId: string,
  ): Promise<{ session_id: string; verdicts: VerdictRecord[] }> {
    return this.request(
      "GET",
      `/monitor/sessions/${encodeURIComponent(sessionId)}/verdicts`,
    );
  }
}
