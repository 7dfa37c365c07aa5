"""Pipeline configuration loading and adapter wiring."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .answer import GenerationConfig, HTTPSummarizer, ScoringMethod, stub_summarize
from .conversation import HTTPReranker, HTTPRewriter, stub_reranker, stub_rewriter
from .graph import GraphParams
from .linking import GazetteerLinker, SpotlightLinker
from .textindex import RetrievalParams

CONFIG_SCHEMA_VERSION = 1


@dataclass
class AdapterSpec:
    kind: str = "stub"  # "stub" | "http"
    endpoint: str = ""
    fallback_to_stub: bool = False


@dataclass
class LinkerSpec:
    kind: str = "gazetteer"  # "gazetteer" | "spotlight"
    path: str = ""           # gazetteer file
    endpoint: str = ""       # spotlight endpoint
    confidence: float = 0.5
    ignore_failures: bool = False  # treat unreachable-linker texts as entity-free


@dataclass
class PipelineConfig:
    index_path: str = ""
    kb_path: str = ""
    linker: LinkerSpec = field(default_factory=LinkerSpec)
    rewriter: AdapterSpec = field(default_factory=AdapterSpec)
    reranker: AdapterSpec = field(default_factory=AdapterSpec)
    summarizer: AdapterSpec = field(default_factory=AdapterSpec)
    retrieval: RetrievalParams = field(default_factory=RetrievalParams)
    graph: GraphParams = field(default_factory=GraphParams)
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    method: ScoringMethod = ScoringMethod.EG
    export_top_fraction: float = 0.5

    @classmethod
    def from_dict(cls, obj: dict) -> "PipelineConfig":
        version = obj.get("schema_version", CONFIG_SCHEMA_VERSION)
        if version != CONFIG_SCHEMA_VERSION:
            raise ValueError(f"unsupported config schema version {version}")
        cfg = cls(
            index_path=obj.get("index_path", ""),
            kb_path=obj.get("kb_path", ""),
            linker=LinkerSpec(**obj.get("linker", {})),
            rewriter=AdapterSpec(**obj.get("rewriter", {})),
            reranker=AdapterSpec(**obj.get("reranker", {})),
            summarizer=AdapterSpec(**obj.get("summarizer", {})),
            retrieval=RetrievalParams(**obj.get("retrieval", {})),
            graph=GraphParams(**obj.get("graph", {})),
            generation=GenerationConfig(**obj.get("generation", {})),
            method=ScoringMethod(obj.get("method", "EG")),
            export_top_fraction=obj.get("export_top_fraction", 0.5),
        )
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        cfg = cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        for label, p in (("index_path", cfg.index_path), ("kb_path", cfg.kb_path)):
            if p and not Path(p).exists():
                raise FileNotFoundError(f"{label} does not exist: {p}")
        if cfg.linker.kind == "gazetteer" and cfg.linker.path \
                and not Path(cfg.linker.path).exists():
            raise FileNotFoundError(f"gazetteer file missing: {cfg.linker.path}")
        return cfg

    def make_linker(self):
        if self.linker.kind == "gazetteer":
            return GazetteerLinker.from_file(self.linker.path)
        if self.linker.kind == "spotlight":
            return SpotlightLinker(self.linker.endpoint)
        raise ValueError(f"unknown linker kind {self.linker.kind!r}")

    def make_rewriter(self):
        if self.rewriter.kind == "http":
            return HTTPRewriter(self.rewriter.endpoint)
        return stub_rewriter

    def make_reranker(self):
        if self.reranker.kind == "http":
            return HTTPReranker(self.reranker.endpoint)
        return stub_reranker

    def make_summarizer(self):
        if self.summarizer.kind == "http":
            return HTTPSummarizer(self.summarizer.endpoint)
        return stub_summarize
