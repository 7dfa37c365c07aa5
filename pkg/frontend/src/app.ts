import { ApiClient } from "./api";
import { DEFAULT_CONTROLS, buildControls } from "./controls";
import { renderGraph } from "./graphView";
import {
  TurnViewData,
  renderTranscript,
  turnViewFromResponse,
} from "./transcript";
import type { ControlValues, GraphDoc } from "./types";

export interface AppElements {
  transcript: HTMLElement;
  graph: HTMLElement;
  controls: HTMLElement;
  input: HTMLInputElement;
  form: HTMLFormElement;
}

/**
 * Single-session explorer. All displayed numbers come from server payloads;
 * the app only projects responses into the DOM.
 */
export class ExplorerApp {
  private sessionId: string | null = null;
  private turns: TurnViewData[] = [];
  private latestGraph: GraphDoc = { nodes: [], edges: [] };
  private inFlight = false;
  private controls: ControlValues = { ...DEFAULT_CONTROLS };

  constructor(
    private readonly api: ApiClient,
    private readonly el: AppElements,
    private readonly debounceMs?: number,
  ) {}

  async start(existingSessionId?: string): Promise<void> {
    if (existingSessionId) {
      this.sessionId = existingSessionId;
      await this.reloadFromServer();
    } else {
      const { session_id } = await this.api.createSession();
      this.sessionId = session_id;
    }
    this.el.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitQuery();
    });
    buildControls(
      this.el.controls,
      this.controls,
      (values) => void this.applyWhatIf(values),
      this.debounceMs,
    );
    this.render();
  }

  get session(): string | null {
    return this.sessionId;
  }

  /** Reload builds identical views from the transcript endpoint alone. */
  private async reloadFromServer(): Promise<void> {
    if (!this.sessionId) return;
    const transcript = await this.api.getTranscript(this.sessionId);
    this.turns = transcript.turns.map((t) => ({
      turn: t.turn,
      query: t.query,
      rewrittenQuery: t.rewritten_query,
      answer: t.answer,
      passages: [],
      graphNodes: [],
    }));
  }

  async submitQuery(): Promise<void> {
    const query = this.el.input.value.trim();
    if (!query || this.inFlight || !this.sessionId) return;
    this.inFlight = true;
    this.el.input.disabled = true;
    try {
      const resp = await this.api.postTurn(this.sessionId, query);
      this.turns.push(turnViewFromResponse(query, resp));
      this.latestGraph = resp.graph;
      this.el.input.value = "";
    } finally {
      this.inFlight = false;
      this.el.input.disabled = false;
    }
    this.render();
  }

  /** Rescore the latest turn without advancing the conversation. */
  async applyWhatIf(values: ControlValues): Promise<void> {
    this.controls = values;
    if (!this.sessionId || this.turns.length === 0) return;
    const current = this.turns[this.turns.length - 1];
    const resp = await this.api.rescore(this.sessionId, current.turn, values);
    current.answer = resp.answer;
    this.latestGraph = resp.graph;
    current.graphNodes = resp.graph.nodes;
    this.render();
  }

  private render(): void {
    renderTranscript(this.el.transcript, this.turns);
    renderGraph(this.el.graph, this.latestGraph);
  }
}
