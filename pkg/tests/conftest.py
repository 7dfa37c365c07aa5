import json
from pathlib import Path

import pytest

from convsearch.linking import GazetteerLinker, KnowledgeBaseStore
from convsearch.textindex import PassageRecord, build_index

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def toy_index():
    return build_index([
        PassageRecord("p1", "apple banana apple"),
        PassageRecord("p2", "banana cherry"),
    ])


@pytest.fixture
def sample_corpus():
    return [PassageRecord(o["id"], o["text"], o.get("source", ""))
            for o in map(json.loads,
                         (FIXTURES / "corpus.jsonl").read_text().splitlines())]


@pytest.fixture
def sample_index(sample_corpus):
    return build_index(sample_corpus)


@pytest.fixture
def gazetteer():
    return GazetteerLinker.from_file(FIXTURES / "gazetteer.json")


@pytest.fixture
def small_kb():
    # 8 entities total; inlink sets chosen so relatedness values are easy to check
    return KnowledgeBaseStore(
        inlinks={
            "E:satellite": frozenset({"a", "b", "c", "d"}),
            "E:orbit": frozenset({"a", "b"}),
            "E:moon": frozenset({"c", "d"}),
            "E:rocket": frozenset({"e", "f"}),
        },
        total_entities=8,
    )
