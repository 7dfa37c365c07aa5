"""Multi-turn session state, rewrite prompt and re-ranker adapter contract."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

import requests

from .textindex import analyze

RankedList = list[tuple[str, float]]

PROMPT_TOKEN_CAP = 512


@dataclass
class Turn:
    index: int
    raw_query: str
    rewritten_query: str = ""
    prompt: str = ""
    first_stage: RankedList = field(default_factory=list)
    reranked: RankedList = field(default_factory=list)
    selected_passages: list[str] = field(default_factory=list)
    answer: str = ""
    query_entities: set[str] = field(default_factory=set)
    # cached per-candidate state for interactive what-if rescoring
    candidate_entities: dict[str, set[str]] = field(default_factory=dict)

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("turn index is 1-based")


@dataclass
class Conversation:
    topic_id: str
    turns: list[Turn] = field(default_factory=list)
    query_entity_history: set[str] = field(default_factory=set)

    def next_index(self) -> int:
        return len(self.turns) + 1


class RewriterAdapter(Protocol):
    def __call__(self, prompt: str) -> str: ...


class RerankerAdapter(Protocol):
    def __call__(self, pairs: list[tuple[str, str]]) -> list[float]: ...


class AdapterError(RuntimeError):
    def __init__(self, message: str, turn_index: int | None = None):
        super().__init__(message)
        self.turn_index = turn_index


def build_rewrite_prompt(history: list[tuple[str, str]], current_query: str,
                         token_cap: int = PROMPT_TOKEN_CAP) -> str:
    """Rewriter input: current query, [CTX], then "q p" per past turn joined by [TURN].

    When the cap would be exceeded the oldest turns are dropped first; the
    current query is always kept.
    """
    chunks = [f"{q} {p}" for q, p in history]
    while chunks:
        prompt = f"{current_query} [CTX] " + " [TURN] ".join(chunks)
        if len(prompt.split()) <= token_cap:
            return prompt
        chunks = chunks[1:]
    return f"{current_query} [CTX]"


def build_rerank_input(query: str, passage_text: str) -> str:
    return f"[CLS] {query} [SEP] {passage_text}"


def stub_rewriter(prompt: str) -> str:
    """Deterministic rewriter stand-in: echo the current query verbatim."""
    return prompt.split(" [CTX]", 1)[0]


def stub_reranker(pairs: list[tuple[str, str]]) -> list[float]:
    """Stemmed-token overlap |q ∩ p| / |q|; deterministic and order-insensitive."""
    scores = []
    for query, passage in pairs:
        q_terms = set(analyze(query))
        p_terms = set(analyze(passage))
        scores.append(len(q_terms & p_terms) / len(q_terms) if q_terms else 0.0)
    return scores


class HTTPRewriter:
    """POST {"prompt": str} -> {"text": str}."""

    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def __call__(self, prompt: str) -> str:
        try:
            resp = requests.post(self.endpoint, json={"prompt": prompt},
                                 timeout=self.timeout)
            resp.raise_for_status()
            return resp.json()["text"]
        except (requests.RequestException, KeyError, ValueError) as exc:
            raise AdapterError(f"rewriter failed: {exc}") from exc


class HTTPReranker:
    """POST {"pairs": [[q, p], ...]} -> {"scores": [float, ...]}."""

    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def __call__(self, pairs: list[tuple[str, str]]) -> list[float]:
        try:
            resp = requests.post(self.endpoint,
                                 json={"pairs": [list(p) for p in pairs]},
                                 timeout=self.timeout)
            resp.raise_for_status()
            return [float(s) for s in resp.json()["scores"]]
        except (requests.RequestException, KeyError, ValueError) as exc:
            raise AdapterError(f"reranker failed: {exc}") from exc


def rerank(query: str, candidates: RankedList,
           text_of: Callable[[str], str], adapter: RerankerAdapter,
           depth: int, turn_index: int | None = None) -> RankedList:
    """Re-order the top `depth` candidates by adapter score; drop the rest.

    Ties keep the first-stage order.
    """
    if depth > len(candidates):
        raise ValueError(f"depth {depth} exceeds candidate count {len(candidates)}")
    head = candidates[:depth]
    pairs = [(query, text_of(pid)) for pid, _ in head]
    try:
        scores = adapter(pairs)
    except AdapterError as exc:
        raise AdapterError(str(exc), turn_index) from exc
    if len(scores) != len(head):
        raise AdapterError("reranker returned wrong score count", turn_index)
    order = sorted(range(len(head)), key=lambda i: (-scores[i], i))
    return [(head[i][0], scores[i]) for i in order]


def advance_turn(conversation: Conversation, turn: Turn) -> Conversation:
    """Commit a completed turn and merge its query entities into the history."""
    if turn.index != conversation.next_index():
        raise ValueError(
            f"expected turn {conversation.next_index()}, got {turn.index}")
    conversation.turns.append(turn)
    conversation.query_entity_history |= turn.query_entities
    return conversation
