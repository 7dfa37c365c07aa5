"""Tokenization, stemming, inverted index and Dirichlet-smoothed retrieval."""

from __future__ import annotations

import gzip
import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

TOKEN_RE = re.compile(r"[a-z0-9]+")

TOKENIZER_VERSION = "lower-alnum-v1"
STEMMER_VERSION = "suffix-v1"
INDEX_FORMAT_VERSION = 1


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any non-alphanumeric run."""
    return TOKEN_RE.findall(text.lower())


def _strip_suffix_once(token: str) -> str:
    # plural forms
    if token.endswith("sses"):
        token = token[:-2]
    elif token.endswith("ies") and len(token) > 4:
        token = token[:-3] + "y"
    elif token.endswith("ss"):
        pass
    elif token.endswith("s") and len(token) > 3:
        token = token[:-1]
    # past tense / gerund
    if token.endswith("ed") and len(token) > 4:
        token = token[:-2]
    elif token.endswith("ing") and len(token) > 5:
        token = token[:-3]
    return token


def stem(token: str) -> str:
    """Deterministic suffix-stripping stem, iterated to a fixpoint (idempotent)."""
    while True:
        stripped = _strip_suffix_once(token)
        if stripped == token:
            return token
        token = stripped


def analyze(text: str) -> list[str]:
    """Tokenize then stem; the single analysis chain shared by index and queries."""
    return [stem(t) for t in tokenize(text)]


@dataclass
class PassageRecord:
    id: str
    text: str
    source: str = ""

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"passage {self.id!r} has empty text")


class DuplicatePassageError(ValueError):
    def __init__(self, passage_id: str):
        super().__init__(f"duplicate passage id: {passage_id}")
        self.passage_id = passage_id


class UnknownPassageError(KeyError):
    pass


@dataclass
class RetrievalParams:
    mu: float = 2500.0
    k: int = 1000
    rerank_depth: int = 10

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if not (0 < self.rerank_depth <= self.k):
            raise ValueError("require 0 < rerank_depth <= k")


@dataclass
class InvertedIndex:
    postings: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    doc_length: dict[str, int] = field(default_factory=dict)
    collection_frequency: dict[str, int] = field(default_factory=dict)
    total_tokens: int = 0
    passage_count: int = 0
    texts: dict[str, str] = field(default_factory=dict)
    sources: dict[str, str] = field(default_factory=dict)

    def text_of(self, passage_id: str) -> str:
        try:
            return self.texts[passage_id]
        except KeyError:
            raise UnknownPassageError(passage_id) from None


def build_index(corpus: Iterable[PassageRecord]) -> InvertedIndex:
    index = InvertedIndex()
    tf_by_term: dict[str, dict[str, int]] = {}
    for record in corpus:
        if record.id in index.doc_length:
            raise DuplicatePassageError(record.id)
        terms = analyze(record.text)
        index.doc_length[record.id] = len(terms)
        index.texts[record.id] = record.text
        index.sources[record.id] = record.source
        index.total_tokens += len(terms)
        index.passage_count += 1
        for term in terms:
            index.collection_frequency[term] = index.collection_frequency.get(term, 0) + 1
            tf_by_term.setdefault(term, {})
            tf_by_term[term][record.id] = tf_by_term[term].get(record.id, 0) + 1
    for term, tfs in tf_by_term.items():
        index.postings[term] = sorted(tfs.items())
    return index


def lmd_score(query_tokens: list[str], passage_id: str, index: InvertedIndex,
              mu: float) -> float:
    """Dirichlet-smoothed query log-likelihood of a passage.

    Query terms absent from the whole collection get a floored collection
    probability of 1/(total_tokens+1) so scores stay finite.
    """
    if passage_id not in index.doc_length:
        raise UnknownPassageError(passage_id)
    dl = index.doc_length[passage_id]
    total = index.total_tokens
    floor = 1.0 / (total + 1)
    score = 0.0
    for term in query_tokens:
        cf = index.collection_frequency.get(term, 0)
        if cf:
            p_coll = cf / total
            tf = 0
            for pid, freq in index.postings.get(term, ()):
                if pid == passage_id:
                    tf = freq
                    break
            score += math.log((tf + mu * p_coll) / (dl + mu))
        else:
            score += math.log(mu * floor / (dl + mu))
    return score


def retrieve(query_text: str, index: InvertedIndex,
             params: RetrievalParams) -> list[tuple[str, float]]:
    """Top-k passages by LMD score, ties broken by ascending passage id."""
    query_tokens = analyze(query_text)
    if not query_tokens:
        return []
    scored = [(pid, lmd_score(query_tokens, pid, index, params.mu))
              for pid in index.doc_length]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:params.k]


def read_corpus(path: str | Path) -> Iterator[PassageRecord]:
    """Newline-delimited JSON records with fields id, text, source."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                yield PassageRecord(id=obj["id"], text=obj["text"],
                                    source=obj.get("source", ""))
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad corpus record: {exc}") from exc


def _index_payload(index: InvertedIndex) -> dict:
    return {
        "postings": {t: [[pid, tf] for pid, tf in plist]
                     for t, plist in sorted(index.postings.items())},
        "doc_length": dict(sorted(index.doc_length.items())),
        "collection_frequency": dict(sorted(index.collection_frequency.items())),
        "total_tokens": index.total_tokens,
        "passage_count": index.passage_count,
        "texts": dict(sorted(index.texts.items())),
        "sources": dict(sorted(index.sources.items())),
    }


def save_index(index: InvertedIndex, out_dir: str | Path) -> dict:
    """Persist the index as a directory; returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(_index_payload(index), sort_keys=True).encode("utf-8")
    with gzip.GzipFile(out / "index.json.gz", "wb", mtime=0) as fh:
        fh.write(payload)
    manifest = {
        "format_version": INDEX_FORMAT_VERSION,
        "tokenizer": TOKENIZER_VERSION,
        "stemmer": STEMMER_VERSION,
        "passage_count": index.passage_count,
        "total_tokens": index.total_tokens,
        "content_sha256": hashlib.sha256(payload).hexdigest(),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest


def load_index(index_dir: str | Path) -> InvertedIndex:
    path = Path(index_dir)
    manifest = json.loads((path / "manifest.json").read_text())
    if manifest["format_version"] != INDEX_FORMAT_VERSION:
        raise ValueError(f"unsupported index format {manifest['format_version']}")
    with gzip.open(path / "index.json.gz", "rt", encoding="utf-8") as fh:
        obj = json.load(fh)
    return InvertedIndex(
        postings={t: [(pid, tf) for pid, tf in plist]
                  for t, plist in obj["postings"].items()},
        doc_length=obj["doc_length"],
        collection_frequency=obj["collection_frequency"],
        total_tokens=obj["total_tokens"],
        passage_count=obj["passage_count"],
        texts=obj["texts"],
        sources=obj["sources"],
    )
