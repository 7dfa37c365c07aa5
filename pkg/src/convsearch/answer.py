"""Passage selection, summarizer input construction and the summarizer contract."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Protocol

import requests

from .conversation import AdapterError, RankedList
from .graph import (
    NO_ENTITIES,
    GraphParams,
    build_entity_graph,
    build_entity_map,
    entity_rank,
    passage_score_eg,
    passage_score_er,
)
from .linking import KnowledgeBaseStore

SENTENCE_RE = re.compile(r"[^.!?]*[.!?]+|[^.!?]+$")


class ScoringMethod(str, enum.Enum):
    O = "O"    # original re-ranked order
    ER = "ER"  # entity-relatedness rescoring
    EG = "EG"  # entity-graph salience rescoring


@dataclass
class GenerationConfig:
    min_length: int = 50
    max_length: int | None = None  # None: word count of the summarizer input
    beams: int = 4
    no_repeat_ngram: int = 3
    early_stopping: bool = True
    include_query: bool = False
    n_passages: int = 3

    def __post_init__(self):
        if self.min_length <= 0:
            raise ValueError("min_length must be positive")
        if self.max_length is not None and self.max_length < self.min_length:
            raise ValueError("max_length must be >= min_length")
        if self.n_passages < 1:
            raise ValueError("n_passages must be >= 1")


class SummarizerAdapter(Protocol):
    def __call__(self, text: str, config: GenerationConfig) -> str: ...


def select_passages(candidates: list[tuple[str, str, float]],
                    method: ScoringMethod,
                    query_entities: set[str],
                    passage_entities: dict[str, set[str]],
                    kb: KnowledgeBaseStore,
                    params: GraphParams,
                    n_passages: int = 3) -> list[str]:
    """Pick the passages to summarize.

    `candidates` are (id, text, score) in re-ranked order. ER and EG re-score
    the pool; ties and empty-entity sentinels fall back to the re-ranked order.
    """
    if not candidates:
        raise ValueError("no candidates to select from")
    ids = [pid for pid, _, _ in candidates]
    if method == ScoringMethod.O:
        return ids[:n_passages]
    if method == ScoringMethod.ER:
        scored: list[tuple[float | None, int, str]] = []
        for pos, pid in enumerate(ids):
            score = passage_score_er(passage_entities.get(pid, set()),
                                     query_entities, kb,
                                     params.relatedness_polarity)
            scored.append((score, pos, pid))
        reverse = params.relatedness_polarity == "similarity"
        # sentinel-scored passages keep retrieval order after scored ones
        def key(item):
            score, pos, _ = item
            if score is NO_ENTITIES:
                return (1, 0.0, pos)
            return (0, -score if reverse else score, pos)
        return [pid for _, _, pid in sorted(scored, key=key)][:n_passages]
    # EG: graph over the candidate pool plus the query-entity history
    pools = [passage_entities.get(pid, set()) for pid in ids]
    entity_map = build_entity_map(query_entities, pools, params.gamma)
    if not entity_map.entities:
        return ids[:n_passages]
    graph = build_entity_graph(entity_map, params.tau)
    ranks = entity_rank(graph, params)
    scores = [passage_score_eg(pools[i], ranks, graph, params.eg_normalization)
              for i in range(len(ids))]
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], i))
    return [ids[i] for i in order][:n_passages]


def build_summarizer_input(passages: list[str], config: GenerationConfig,
                           query: str = "") -> str:
    """Join passage texts with single spaces; prepend the query for the wQ variant."""
    if not passages:
        raise ValueError("need at least one passage")
    body = " ".join(passages)
    if config.include_query:
        return f"{query} {body}"
    return body


def split_sentences(text: str) -> list[str]:
    """Split at terminal punctuation; keeps the punctuation with the sentence."""
    return [s.strip() for s in SENTENCE_RE.findall(text) if s.strip()]


def stub_summarize(text: str, config: GenerationConfig) -> str:
    """Deterministic summarizer stand-in.

    Emits whole sentences in order until min_length words are accumulated,
    then hard-truncates at max_length words.
    """
    max_words = config.max_length if config.max_length is not None else len(text.split())
    picked: list[str] = []
    words = 0
    for sentence in split_sentences(text):
        if words >= config.min_length:
            break
        picked.append(sentence)
        words += len(sentence.split())
    summary_words = " ".join(picked).split()[:max_words]
    return " ".join(summary_words)


class HTTPSummarizer:
    """POST generation request -> {"summary": str}."""

    def __init__(self, endpoint: str, timeout: float = 120.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def __call__(self, text: str, config: GenerationConfig) -> str:
        max_length = (config.max_length if config.max_length is not None
                      else len(text.split()))
        payload = {
            "text": text,
            "min_length": config.min_length,
            "max_length": max_length,
            "beams": config.beams,
            "no_repeat_ngram": config.no_repeat_ngram,
            "early_stopping": config.early_stopping,
        }
        try:
            resp = requests.post(self.endpoint, json=payload, timeout=self.timeout)
            resp.raise_for_status()
            return resp.json()["summary"]
        except (requests.RequestException, KeyError, ValueError) as exc:
            raise AdapterError(f"summarizer failed: {exc}") from exc


def generate_answer(text: str, config: GenerationConfig,
                    adapter: SummarizerAdapter,
                    fallback_to_stub: bool = False) -> str:
    if not text:
        raise ValueError("summarizer input is empty")
    try:
        return adapter(text, config)
    except AdapterError:
        if fallback_to_stub:
            return stub_summarize(text, config)
        raise
