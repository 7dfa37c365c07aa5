import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api";
import { type RecordedCall, stubFetch } from "./helpers";

describe("ApiClient", () => {
  it("hits the session endpoints with the right methods and bodies", async () => {
    const calls: RecordedCall[] = [];
    const api = new ApiClient("", stubFetch(calls));

    const { session_id } = await api.createSession();
    expect(session_id).toBe("s1");

    const turn = await api.postTurn(session_id, "hello");
    expect(turn.turn).toBe(1);

    await api.rescore(session_id, 1, { gamma: 0.5, method: "ER" });
    await api.getTranscript(session_id);

    expect(calls).toEqual([
      { method: "POST", path: "/sessions", body: undefined },
      { method: "POST", path: "/sessions/s1/turns", body: { query: "hello" } },
      {
        method: "POST",
        path: "/sessions/s1/turns/1/rescore",
        body: { gamma: 0.5, method: "ER" },
      },
      { method: "GET", path: "/sessions/s1", body: undefined },
    ]);
  });

  it("prefixes the configured base URL", async () => {
    const calls: RecordedCall[] = [];
    const api = new ApiClient("http://localhost:8000", async (input, init) => {
      calls.push({ method: init?.method ?? "GET", path: String(input) });
      return new Response(JSON.stringify({ session_id: "s1" }), { status: 201 });
    });
    await api.createSession();
    expect(calls[0].path).toBe("http://localhost:8000/sessions");
  });

  it("throws on non-2xx responses", async () => {
    const api = new ApiClient("", async () => new Response("gone", { status: 404 }));
    await expect(api.getTranscript("missing")).rejects.toThrow(
      "GET /sessions/missing failed: 404",
    );
  });
});
