import type { GraphDoc, TurnResponse } from "../src/types";

/** Path graph a-b-c: b is the most salient node (mirrors the backend fixture). */
export const PATH_GRAPH: GraphDoc = {
  nodes: [
    { id: "a", rank: 0.2887, tier: "bottom" },
    { id: "b", rank: 0.4226, tier: "top" },
    { id: "c", rank: 0.2887, tier: "bottom" },
  ],
  edges: [
    { source: "a", target: "b", weight: 0.25 },
    { source: "b", target: "c", weight: 0.25 },
  ],
};

export function turnResponse(turn: number, answer: string): TurnResponse {
  return {
    turn,
    prompt: `q${turn} [CTX]`,
    rewritten_query: `q${turn}`,
    ranked: ["p1", "p2"],
    passages: [
      {
        id: "p1",
        text: "The satellite entered orbit.",
        score: 0.9,
        entities: [
          {
            surface: "satellite",
            entity_id: "b",
            confidence: 1,
            start: 4,
            end: 13,
            kind: "concept",
          },
          {
            surface: "orbit",
            entity_id: "a",
            confidence: 1,
            start: 22,
            end: 27,
            kind: "concept",
          },
        ],
      },
      { id: "p2", text: "No entities here.", score: 0.5, entities: [] },
    ],
    selected: ["p1", "p2"],
    graph: PATH_GRAPH,
    answer,
    answer_words: answer.split(/\s+/).length,
    timings: {},
  };
}

export interface RecordedCall {
  method: string;
  path: string;
  body?: unknown;
}

/** Stub server behind fetch: records every call and replays canned payloads. */
export function stubFetch(calls: RecordedCall[]): typeof fetch {
  let turnCounter = 0;
  return async (input: RequestInfo | URL, init?: RequestInit) => {
    const path = String(input);
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push({ method, path, body });

    let payload: unknown;
    if (method === "POST" && path === "/sessions") {
      payload = { session_id: "s1" };
    } else if (method === "POST" && /\/turns$/.test(path)) {
      turnCounter += 1;
      payload = turnResponse(turnCounter, `answer ${turnCounter}`);
    } else if (method === "POST" && /\/rescore$/.test(path)) {
      payload = {
        turn: turnCounter,
        method: body?.method ?? "EG",
        gamma: body?.gamma ?? 0.25,
        selected: ["p2", "p1"],
        graph: PATH_GRAPH,
        answer: `rescored gamma=${body?.gamma} include_query=${body?.include_query}`,
        answer_words: 3,
      };
    } else if (method === "GET" && /^\/sessions\//.test(path)) {
      payload = { session_id: "s1", created_at: 0, turns: [] };
    } else {
      return new Response("not found", { status: 404 });
    }
    return new Response(JSON.stringify(payload), {
      status: method === "POST" && path === "/sessions" ? 201 : 200,
      headers: { "Content-Type": "application/json" },
    });
  };
}
