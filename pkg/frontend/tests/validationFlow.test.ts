import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, type FetchLike } from "../src/api.js";
import type {
  NextQuestionResponse,
  QuestionView,
  RequirementView,
} from "../src/types.js";
import { runValidationFlow } from "../src/validationFlow.js";

/** Scripted fetch stub: responds per (method, path) from a queue-free map. */
function makeFetch(
  handler: (method: string, path: string, body: unknown) => [number, unknown],
): FetchLike {
  return async (url, init) => {
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(init.body) : undefined;
    const [status, payload] = handler(init?.method ?? "GET", path, body);
    return { status, json: async () => payload };
  };
}

const QUESTION: QuestionView = {
  trace: {
    props: ["p"],
    frames: [[], ["p"]],
    table: "...",
    trace_id: "t1",
  },
  pair: [0, 1],
  accepting_index: 0,
  candidates: [],
};

function requirementView(states: ("active" | "pruned" | "selected")[]): RequirementView {
  return {
    id: "R",
    source_text: "r",
    status: states.includes("selected") ? "formalized" : "validating",
    selected: states.indexOf("selected") >= 0 ? states.indexOf("selected") : null,
    candidates: states.map((state, index) => ({
      index,
      re_text: `c${index}`,
      formula: `f${index}`,
      state,
      prune_reason: null,
    })),
  };
}

describe("validation flow", () => {
  it("asks, labels, and stops at convergence", async () => {
    let labeled = 0;
    const fetchStub = makeFetch((method, path) => {
      if (path.endsWith("/validation/next")) {
        const open: NextQuestionResponse = {
          requirement_id: "R",
          status: "open",
          revision: labeled,
          question: QUESTION,
        };
        const done: NextQuestionResponse = {
          requirement_id: "R",
          status: "converged",
          revision: labeled,
          question: null,
        };
        return [200, labeled === 0 ? open : done];
      }
      if (path.endsWith("/validation/label")) {
        labeled += 1;
        return [
          200,
          {
            requirement: requirementView(["selected", "pruned"]),
            status: "converged",
            revision: labeled,
          },
        ];
      }
      throw new Error(`unexpected ${method} ${path}`);
    });
    const client = new ApiClient("http://service", fetchStub);
    const seen: string[][] = [];
    const result = await runValidationFlow(client, "proj", "R", {
      decide: async (question) => {
        seen.push(question.trace.frames.map((f) => f.join(",")));
        return "accept";
      },
    });
    expect(result.status).toBe("converged");
    expect(result.questionsAsked).toBe(1);
    expect(seen).toEqual([["", "p"]]);
    expect(result.requirement?.candidates.map((c) => c.state)).toEqual([
      "selected",
      "pruned",
    ]);
  });

  it("refetches and replays on a stale revision", async () => {
    let attempts = 0;
    let conflicts = 0;
    const fetchStub = makeFetch((_method, path) => {
      if (path.endsWith("/validation/next")) {
        if (attempts >= 2) {
          return [
            200,
            { requirement_id: "R", status: "converged", revision: 7, question: null },
          ];
        }
        return [
          200,
          { requirement_id: "R", status: "open", revision: 5 + attempts, question: QUESTION },
        ];
      }
      if (path.endsWith("/validation/label")) {
        attempts += 1;
        if (attempts === 1) {
          return [409, { detail: "stale revision 5 (current 6)" }];
        }
        return [
          200,
          { requirement: requirementView(["selected"]), status: "converged", revision: 7 },
        ];
      }
      throw new Error(`unexpected ${path}`);
    });
    const client = new ApiClient("http://service", fetchStub);
    const result = await runValidationFlow(client, "proj", "R", {
      decide: async () => "reject",
      onConflict: () => {
        conflicts += 1;
      },
    });
    expect(conflicts).toBe(1);
    expect(result.questionsAsked).toBe(2); // prompt replayed once
    expect(result.status).toBe("converged");
  });

  it("surfaces non-conflict API errors", async () => {
    const fetchStub = makeFetch((_method, path) => {
      if (path.endsWith("/validation/next")) {
        return [422, { detail: "requirement 'R' has no candidates" }];
      }
      throw new Error(`unexpected ${path}`);
    });
    const client = new ApiClient("http://service", fetchStub);
    await expect(
      runValidationFlow(client, "proj", "R", { decide: async () => "accept" }),
    ).rejects.toThrowError(ApiError);
  });

  it("reports exhausted sessions", async () => {
    const fetchStub = makeFetch((method, path) => {
      if (path.endsWith("/validation/next")) {
        return [
          200,
          { requirement_id: "R", status: "exhausted", revision: 3, question: null },
        ];
      }
      if (method === "GET" && path.endsWith("/projects/proj")) {
        return [
          200,
          {
            name: "proj",
            vocabulary: {},
            requirements: [requirementView(["pruned", "pruned"])],
            sessions: {},
          },
        ];
      }
      throw new Error(`unexpected ${path}`);
    });
    const client = new ApiClient("http://service", fetchStub);
    const result = await runValidationFlow(client, "proj", "R", {
      decide: async () => "accept",
    });
    expect(result.status).toBe("exhausted");
    expect(result.questionsAsked).toBe(0);
    expect(result.requirement?.candidates.every((c) => c.state === "pruned")).toBe(true);
  });
});
