import type { RescoreResponse, Transcript, TurnResponse } from "./types";

/** Thin client over the session HTTP API; every view is fed from these calls. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      throw new Error(`${init?.method ?? "GET"} ${path} failed: ${resp.status}`);
    }
    return resp.json() as Promise<T>;
  }

  createSession(): Promise<{ session_id: string }> {
    return this.request("/sessions", { method: "POST" });
  }

  postTurn(sessionId: string, query: string): Promise<TurnResponse> {
    return this.request(`/sessions/${sessionId}/turns`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ query }),
    });
  }

  getTranscript(sessionId: string): Promise<Transcript> {
    return this.request(`/sessions/${sessionId}`);
  }

  rescore(
    sessionId: string,
    turn: number,
    overrides: Partial<{
      gamma: number;
      method: string;
      min_length: number;
      include_query: boolean;
    }>,
  ): Promise<RescoreResponse> {
    return this.request(`/sessions/${sessionId}/turns/${turn}/rescore`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(overrides),
    });
  }
}
