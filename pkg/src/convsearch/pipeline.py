"""The per-turn pipeline shared by the CLI batch runner and the HTTP service."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .answer import (
    GenerationConfig,
    ScoringMethod,
    build_summarizer_input,
    generate_answer,
    select_passages,
)
from .config import PipelineConfig
from .conversation import (
    Conversation,
    Turn,
    advance_turn,
    build_rewrite_prompt,
    rerank,
)
from .graph import (
    GraphParams,
    build_entity_graph,
    build_entity_map,
    entity_rank,
    export_graph,
)
from .linking import KnowledgeBaseStore, LinkerError, entity_set, link, load_kb
from .textindex import InvertedIndex, load_index, retrieve


@dataclass
class TurnResult:
    turn: Turn
    graph_doc: dict
    passages: list[dict]  # id, text, score, entities (mention dicts)
    timings: dict[str, float] = field(default_factory=dict)

    def run_record(self, topic_id: str) -> dict:
        return {
            "topic": topic_id,
            "turn": self.turn.index,
            "prompt": self.turn.prompt,
            "rewritten_query": self.turn.rewritten_query,
            "ranked": [pid for pid, _ in self.turn.reranked],
            "selected": list(self.turn.selected_passages),
            "answer": self.turn.answer,
            "answer_words": len(self.turn.answer.split()),
        }


class Pipeline:
    """Loads the index/KB once and runs conversations turn by turn."""

    def __init__(self, config: PipelineConfig,
                 index: InvertedIndex | None = None,
                 kb: KnowledgeBaseStore | None = None):
        self.config = config
        self.index = index if index is not None else load_index(config.index_path)
        self.kb = kb if kb is not None else load_kb(config.kb_path)
        self.linker = config.make_linker()
        self.rewriter = config.make_rewriter()
        self.reranker = config.make_reranker()
        self.summarizer = config.make_summarizer()

    def _link_entities(self, text: str):
        try:
            return link(text, self.linker, self.config.linker.confidence)
        except LinkerError:
            if self.config.linker.ignore_failures:
                return []
            raise

    def run_turn(self, conversation: Conversation, raw_query: str,
                 overrides: dict | None = None) -> TurnResult:
        cfg = self.config
        graph_params = _apply_graph_overrides(cfg.graph, overrides)
        generation = _apply_generation_overrides(cfg.generation, overrides)
        method = ScoringMethod(overrides["method"]) if overrides \
            and "method" in overrides else cfg.method
        timings: dict[str, float] = {}
        index_turn = conversation.next_index()

        t0 = time.perf_counter()
        # p_j in the prompt is the top re-ranked passage of turn j
        history = [(t.raw_query,
                    self.index.text_of(t.reranked[0][0]) if t.reranked else "")
                   for t in conversation.turns]
        prompt = build_rewrite_prompt(history, raw_query)
        if index_turn == 1:
            rewritten = raw_query
        else:
            rewritten = self.rewriter(prompt)
        timings["rewrite"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        first_stage = retrieve(rewritten, self.index, cfg.retrieval)
        timings["retrieve"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        depth = min(cfg.retrieval.rerank_depth, len(first_stage))
        reranked = rerank(rewritten, first_stage, self.index.text_of,
                          self.reranker, depth, index_turn) if first_stage else []
        timings["rerank"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        query_mentions = self._link_entities(rewritten)
        query_entities = entity_set(query_mentions)
        pool = reranked[:graph_params.candidate_pool]
        passage_mentions = {pid: self._link_entities(self.index.text_of(pid))
                            for pid, _ in pool}
        candidate_entities = {pid: entity_set(ms)
                              for pid, ms in passage_mentions.items()}
        timings["link"] = time.perf_counter() - t0

        history_entities = conversation.query_entity_history | query_entities
        turn = Turn(index=index_turn, raw_query=raw_query,
                    rewritten_query=rewritten, prompt=prompt,
                    first_stage=first_stage, reranked=reranked,
                    query_entities=query_entities,
                    candidate_entities=candidate_entities)

        t0 = time.perf_counter()
        selection, graph_doc, answer = self._score_and_answer(
            turn, history_entities, method, graph_params, generation)
        turn.selected_passages = selection
        turn.answer = answer
        timings["score_and_generate"] = time.perf_counter() - t0

        passages = [{
            "id": pid,
            "text": self.index.text_of(pid),
            "score": score,
            "entities": [_mention_dict(m) for m in passage_mentions[pid]],
        } for pid, score in pool]
        return TurnResult(turn=turn, graph_doc=graph_doc,
                          passages=passages, timings=timings)

    def _score_and_answer(self, turn: Turn, history_entities: set[str],
                          method: ScoringMethod, graph_params: GraphParams,
                          generation: GenerationConfig):
        """Selection + graph export + generation over a turn's cached candidates."""
        pool = turn.reranked[:graph_params.candidate_pool]
        candidates = [(pid, self.index.text_of(pid), score)
                      for pid, score in pool]
        graph_doc = {"nodes": [], "edges": []}
        pools = [turn.candidate_entities.get(pid, set()) for pid, _ in pool]
        entity_map = build_entity_map(history_entities, pools, graph_params.gamma)
        if entity_map.entities:
            graph = build_entity_graph(entity_map, graph_params.tau)
            ranks = entity_rank(graph, graph_params)
            graph_doc = export_graph(graph, ranks,
                                     self.config.export_top_fraction)
        if not candidates:
            return [], graph_doc, ""
        selection = select_passages(candidates, method, history_entities,
                                    turn.candidate_entities, self.kb,
                                    graph_params, generation.n_passages)
        summarizer_input = build_summarizer_input(
            [self.index.text_of(pid) for pid in selection], generation,
            turn.rewritten_query)
        answer = generate_answer(summarizer_input, generation, self.summarizer,
                                 self.config.summarizer.fallback_to_stub)
        return selection, graph_doc, answer

    def rescore_turn(self, conversation: Conversation, turn_number: int,
                     overrides: dict) -> dict:
        """What-if recomputation over a committed turn's cached candidates.

        Does not mutate conversation history.
        """
        if not 1 <= turn_number <= len(conversation.turns):
            raise KeyError(f"no turn {turn_number}")
        turn = conversation.turns[turn_number - 1]
        graph_params = _apply_graph_overrides(self.config.graph, overrides)
        generation = _apply_generation_overrides(self.config.generation, overrides)
        method = ScoringMethod(overrides.get("method", self.config.method.value))
        history = set()
        for t in conversation.turns[:turn_number]:
            history |= t.query_entities
        selection, graph_doc, answer = self._score_and_answer(
            turn, history, method, graph_params, generation)
        return {
            "turn": turn_number,
            "method": method.value,
            "gamma": graph_params.gamma,
            "selected": selection,
            "graph": graph_doc,
            "answer": answer,
            "answer_words": len(answer.split()),
        }

    def run_conversation(self, topic_id: str, queries: list[str]) -> list[TurnResult]:
        conversation = Conversation(topic_id=topic_id)
        results = []
        for query in queries:
            result = self.run_turn(conversation, query)
            advance_turn(conversation, result.turn)
            results.append(result)
        return results


def _mention_dict(m) -> dict:
    return {"surface": m.surface, "entity_id": m.entity_id,
            "confidence": m.confidence, "start": m.span[0], "end": m.span[1],
            "kind": m.kind}


def _apply_graph_overrides(base: GraphParams, overrides: dict | None) -> GraphParams:
    if not overrides:
        return base
    fields = {"gamma", "tau", "alpha", "candidate_pool", "relatedness_polarity",
              "eg_normalization"}
    kwargs = {k: overrides[k] for k in fields if k in overrides}
    if not kwargs:
        return base
    return GraphParams(**{**base.__dict__, **kwargs})


def _apply_generation_overrides(base: GenerationConfig,
                                overrides: dict | None) -> GenerationConfig:
    if not overrides:
        return base
    fields = {"min_length", "max_length", "include_query", "n_passages"}
    kwargs = {k: overrides[k] for k in fields if k in overrides}
    if not kwargs:
        return base
    return GenerationConfig(**{**base.__dict__, **kwargs})


def load_topics(path: str | Path) -> list[dict]:
    """Topics file: JSON list of {"topic_id": str, "turns": [query, ...]}."""
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(obj, list) or not obj:
        raise ValueError(f"topics file {path} is empty or not a list")
    for entry in obj:
        if "topic_id" not in entry or "turns" not in entry:
            raise ValueError("each topic needs topic_id and turns")
    return obj


def run_topics(pipeline: Pipeline, topics: list[dict]) -> list[dict]:
    """Execute the full pipeline for every topic/turn; returns run records."""
    records = []
    for topic in topics:
        results = pipeline.run_conversation(topic["topic_id"], topic["turns"])
        records.extend(r.run_record(topic["topic_id"]) for r in results)
    return records


def write_run_file(records: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
