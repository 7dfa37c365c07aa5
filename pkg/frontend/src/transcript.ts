import type { GraphNode, PassageView, TurnResponse } from "./types";

/** Wrap entity spans in <mark> tags; top-tier entities get a stronger class. */
export function highlightEntities(
  passage: PassageView,
  topTier: Set<string>,
): DocumentFragment {
  const fragment = document.createDocumentFragment();
  const text = passage.text;
  // server guarantees sorted, non-overlapping spans; render them verbatim
  let cursor = 0;
  for (const ent of passage.entities) {
    if (ent.start < cursor || ent.end > text.length) continue;
    if (ent.start > cursor) {
      fragment.appendChild(document.createTextNode(text.slice(cursor, ent.start)));
    }
    const mark = document.createElement("mark");
    mark.textContent = text.slice(ent.start, ent.end);
    mark.dataset.entityId = ent.entity_id;
    mark.className = topTier.has(ent.entity_id)
      ? "entity entity-top"
      : "entity entity-bottom";
    mark.title = ent.entity_id;
    fragment.appendChild(mark);
    cursor = ent.end;
  }
  if (cursor < text.length) {
    fragment.appendChild(document.createTextNode(text.slice(cursor)));
  }
  return fragment;
}

export function topTierIds(nodes: GraphNode[]): Set<string> {
  return new Set(nodes.filter((n) => n.tier === "top").map((n) => n.id));
}

export interface TurnViewData {
  turn: number;
  query: string;
  rewrittenQuery: string;
  answer: string;
  passages: PassageView[];
  graphNodes: GraphNode[];
}

/** One chat bubble pair (query + answer) with an expandable passage panel. */
export function renderTurn(data: TurnViewData): HTMLElement {
  const wrapper = document.createElement("section");
  wrapper.className = "turn";
  wrapper.dataset.turn = String(data.turn);

  const queryBubble = document.createElement("div");
  queryBubble.className = "bubble bubble-query";
  queryBubble.textContent = data.query;
  wrapper.appendChild(queryBubble);

  const answerBubble = document.createElement("div");
  answerBubble.className = "bubble bubble-answer";
  answerBubble.textContent = data.answer;
  wrapper.appendChild(answerBubble);

  const details = document.createElement("details");
  details.className = "passage-panel";
  const summary = document.createElement("summary");
  summary.textContent = `passages (rewritten: ${data.rewrittenQuery})`;
  details.appendChild(summary);

  const top = topTierIds(data.graphNodes);
  for (const passage of data.passages) {
    const block = document.createElement("blockquote");
    block.className = "passage";
    block.dataset.passageId = passage.id;
    block.appendChild(highlightEntities(passage, top));
    details.appendChild(block);
  }
  wrapper.appendChild(details);
  return wrapper;
}

/** Rebuild the whole chat column from turn data (pure projection of state). */
export function renderTranscript(
  container: HTMLElement,
  turns: TurnViewData[],
): void {
  container.innerHTML = "";
  if (turns.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "Ask a question to start the conversation.";
    container.appendChild(empty);
    return;
  }
  for (const turn of turns) {
    container.appendChild(renderTurn(turn));
  }
}

export function turnViewFromResponse(
  query: string,
  resp: TurnResponse,
): TurnViewData {
  return {
    turn: resp.turn,
    query,
    rewrittenQuery: resp.rewritten_query,
    answer: resp.answer,
    passages: resp.passages,
    graphNodes: resp.graph.nodes,
  };
}
