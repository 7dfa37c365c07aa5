"""Entity linking: mention types, gazetteer and Spotlight linkers, KB inlink store."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import requests


@dataclass(frozen=True)
class EntityMention:
    surface: str
    entity_id: str
    confidence: float
    span: tuple[int, int]
    kind: str = "concept"  # "named-entity" | "concept"

    def __post_init__(self):
        start, end = self.span
        if not 0 <= start < end:
            raise ValueError(f"bad span {self.span} for {self.entity_id}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} out of [0,1]")


class LinkerAdapter(Protocol):
    def __call__(self, text: str, threshold: float) -> list[EntityMention]: ...


class LinkerError(RuntimeError):
    """The linker backend could not be reached or failed."""


def link(text: str, linker: LinkerAdapter, threshold: float = 0.5) -> list[EntityMention]:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0,1]")
    mentions = [m for m in linker(text, threshold) if m.confidence >= threshold]
    return sorted(mentions, key=lambda m: m.span)


def entity_set(mentions: list[EntityMention]) -> set[str]:
    return {m.entity_id for m in mentions}


class GazetteerLinker:
    """Offline deterministic linker: longest-match-first, case-insensitive.

    Matches only on token boundaries so "york" does not fire inside "yorkshire".
    """

    def __init__(self, entries: dict[str, str], kinds: dict[str, str] | None = None):
        self.entries = {surface.lower(): eid for surface, eid in entries.items()}
        self.kinds = {s.lower(): k for s, k in (kinds or {}).items()}
        # longest surfaces first so overlapping entries resolve to the longest match
        self._surfaces = sorted(self.entries, key=lambda s: (-len(s), s))

    @classmethod
    def from_file(cls, path: str | Path) -> "GazetteerLinker":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        entries = {}
        kinds = {}
        for surface, value in obj.items():
            if isinstance(value, str):
                entries[surface] = value
            else:
                entries[surface] = value["entity_id"]
                if "kind" in value:
                    kinds[surface] = value["kind"]
        return cls(entries, kinds)

    def __call__(self, text: str, threshold: float) -> list[EntityMention]:
        lowered = text.lower()
        taken: list[tuple[int, int]] = []
        mentions: list[EntityMention] = []
        for surface in self._surfaces:
            pattern = re.compile(r"(?<![a-z0-9])" + re.escape(surface) + r"(?![a-z0-9])")
            for match in pattern.finditer(lowered):
                span = (match.start(), match.end())
                if any(span[0] < e and s < span[1] for s, e in taken):
                    continue
                taken.append(span)
                mentions.append(EntityMention(
                    surface=text[span[0]:span[1]],
                    entity_id=self.entries[surface],
                    confidence=1.0,
                    span=span,
                    kind=self.kinds.get(surface, "concept"),
                ))
        return sorted(mentions, key=lambda m: m.span)


class SpotlightHTTPError(LinkerError):
    def __init__(self, status_code: int, body: str):
        super().__init__(f"spotlight returned HTTP {status_code}")
        self.status_code = status_code
        self.body = body


class SpotlightPayloadError(LinkerError):
    """Response parsed but does not match the expected annotate schema."""


def parse_spotlight_response(payload: dict) -> list[EntityMention]:
    resources = payload.get("Resources", [])
    if resources is None:
        resources = []
    if not isinstance(resources, list):
        raise SpotlightPayloadError("Resources is not an array")
    mentions = []
    for res in resources:
        try:
            uri = res["@URI"]
            surface = res["@surfaceForm"]
            offset = int(res["@offset"])
            score = float(res["@similarityScore"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SpotlightPayloadError(f"malformed resource: {exc}") from exc
        kind = "named-entity" if res.get("@types") else "concept"
        mentions.append(EntityMention(
            surface=surface,
            entity_id=uri,
            confidence=min(max(score, 0.0), 1.0),
            span=(offset, offset + len(surface)),
            kind=kind,
        ))
    return sorted(mentions, key=lambda m: m.span)


def spotlight_annotate(text: str, confidence: float, endpoint: str,
                       timeout: float = 30.0) -> list[EntityMention]:
    """Call a DBpedia-Spotlight-compatible annotate endpoint."""
    try:
        resp = requests.post(
            endpoint,
            data={"text": text, "confidence": confidence},
            headers={"Accept": "application/json"},
            timeout=timeout,
        )
    except requests.RequestException as exc:
        raise LinkerError(f"spotlight unreachable: {exc}") from exc
    if not 200 <= resp.status_code < 300:
        raise SpotlightHTTPError(resp.status_code, resp.text)
    try:
        payload = resp.json()
    except ValueError as exc:
        raise SpotlightPayloadError("response body is not JSON") from exc
    return parse_spotlight_response(payload)


class SpotlightLinker:
    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def __call__(self, text: str, threshold: float) -> list[EntityMention]:
        return spotlight_annotate(text, threshold, self.endpoint, self.timeout)


@dataclass
class KnowledgeBaseStore:
    inlinks: dict[str, frozenset[str]] = field(default_factory=dict)
    total_entities: int = 0

    def inlinks_of(self, entity_id: str) -> frozenset[str]:
        return self.inlinks.get(entity_id, frozenset())


def load_kb(path: str | Path) -> KnowledgeBaseStore:
    """Newline-delimited JSON records {entity_id, inlinks:[ids]}.

    An optional first record {"total_entities": N} overrides the distinct-id count.
    """
    inlinks: dict[str, frozenset[str]] = {}
    declared_total: int | None = None
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: malformed KB record") from exc
            if "total_entities" in obj and "entity_id" not in obj:
                declared_total = int(obj["total_entities"])
                continue
            try:
                eid = obj["entity_id"]
                links = frozenset(obj["inlinks"])
            except (KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed KB record") from exc
            inlinks[eid] = links
            seen.add(eid)
            seen.update(links)
    total = declared_total if declared_total is not None else len(seen)
    return KnowledgeBaseStore(inlinks=inlinks, total_entities=total)
