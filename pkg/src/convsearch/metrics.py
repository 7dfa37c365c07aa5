"""Generation and retrieval metrics, reference construction, report emission."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .textindex import stem, tokenize

GENERATION_METRICS = [
    "rouge1_p", "rouge1_r", "rouge1_f", "rouge2_p", "rouge2_r", "rouge2_f",
    "rougeL_p", "rougeL_r", "rougeL_f", "bleu1", "bleu4",
    "bleu1_multi", "bleu4_multi", "meteor",
]
RETRIEVAL_METRICS = ["ndcg3", "ap", "rr"]


def ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: str, reference: str, n: int) -> tuple[float, float, float]:
    if n < 1:
        raise ValueError("n must be >= 1")
    cand = ngrams(tokenize(candidate), n)
    ref = ngrams(tokenize(reference), n)
    total_cand = sum(cand.values())
    total_ref = sum(ref.values())
    if total_cand == 0 or total_ref == 0:
        return (0.0, 0.0, 0.0)
    overlap = sum((cand & ref).values())
    p = overlap / total_cand
    r = overlap / total_ref
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return (p, r, f1)


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            cur[j] = prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, reference: str) -> tuple[float, float, float]:
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return (0.0, 0.0, 0.0)
    lcs = _lcs_length(cand, ref)
    p = lcs / len(cand)
    r = lcs / len(ref)
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return (p, r, f1)


def bleu(candidate: str, references: str | list[str], max_n: int = 4) -> float:
    """Clipped n-gram precision BLEU with brevity penalty.

    Zero-count orders get add-one smoothing. With multiple references, clip
    counts against the per-n-gram max across references and take the closest
    reference length for the brevity penalty.
    """
    if max_n not in (1, 2, 3, 4):
        raise ValueError("max_n must be in 1..4")
    refs = [references] if isinstance(references, str) else list(references)
    cand_tokens = tokenize(candidate)
    ref_token_lists = [tokenize(r) for r in refs]
    ref_token_lists = [r for r in ref_token_lists if r]
    if not cand_tokens or not ref_token_lists:
        return 0.0
    log_prec = 0.0
    for n in range(1, max_n + 1):
        cand_ngrams = ngrams(cand_tokens, n)
        total = sum(cand_ngrams.values())
        if total == 0:
            return 0.0
        max_ref: Counter = Counter()
        for ref_tokens in ref_token_lists:
            max_ref |= ngrams(ref_tokens, n)
        overlap = sum((cand_ngrams & max_ref).values())
        if overlap == 0:
            p_n = 1.0 / (total + 1)
        else:
            p_n = overlap / total
        log_prec += math.log(p_n)
    precision = math.exp(log_prec / max_n)
    cand_len = len(cand_tokens)
    ref_len = min((abs(len(r) - cand_len), len(r)) for r in ref_token_lists)[1]
    bp = math.exp(1 - ref_len / cand_len) if cand_len < ref_len else 1.0
    return precision * bp


def _greedy_alignment(cand: list[str], ref: list[str],
                      match) -> list[tuple[int, int]]:
    """Greedy left-to-right unigram alignment preferring contiguous runs."""
    used_ref: set[int] = set()
    pairs: list[tuple[int, int]] = []
    last_j = -2
    for i, token in enumerate(cand):
        chosen = -1
        for j, rtoken in enumerate(ref):
            if j in used_ref or not match(token, rtoken):
                continue
            if j == last_j + 1:  # extend the current chunk when possible
                chosen = j
                break
            if chosen == -1:
                chosen = j
        if chosen >= 0:
            used_ref.add(chosen)
            pairs.append((i, chosen))
            last_j = chosen
    return pairs


def _count_chunks(pairs: list[tuple[int, int]]) -> int:
    chunks = 0
    prev = None
    for i, j in pairs:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def meteor_lite(candidate: str, reference: str) -> float:
    """Unigram METEOR without the WordNet synonym stage.

    Exact matches are aligned first, then stem matches over the remainder.
    """
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0
    exact = _greedy_alignment(cand, ref, lambda a, b: a == b)
    matched_c = {i for i, _ in exact}
    matched_r = {j for _, j in exact}
    rest_c = [i for i in range(len(cand)) if i not in matched_c]
    rest_r = [j for j in range(len(ref)) if j not in matched_r]
    stem_pairs = _greedy_alignment(
        [cand[i] for i in rest_c], [ref[j] for j in rest_r],
        lambda a, b: stem(a) == stem(b))
    pairs = exact + [(rest_c[i], rest_r[j]) for i, j in stem_pairs]
    pairs.sort()
    matches = len(pairs)
    if matches == 0:
        return 0.0
    p = matches / len(cand)
    r = matches / len(ref)
    f_mean = 10 * p * r / (r + 9 * p)
    chunks = _count_chunks(pairs)
    penalty = 0.5 * (chunks / matches) ** 3
    return f_mean * (1 - penalty)


@dataclass
class QRels:
    grades: dict[tuple[str, int, str], int] = field(default_factory=dict)

    def slice(self, topic: str, turn: int) -> dict[str, int]:
        return {pid: g for (t, n, pid), g in self.grades.items()
                if t == topic and n == turn}

    def topics(self) -> set[str]:
        return {t for t, _, _ in self.grades}


def load_qrels(path: str | Path) -> QRels:
    """TREC format: "topic_turn Q0 passage_id grade" per line."""
    qrels = QRels()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 fields")
            key, _, pid, grade = parts
            topic, _, turn = key.rpartition("_")
            g = int(grade)
            if not topic or not 0 <= g <= 4:
                raise ValueError(f"{path}:{lineno}: bad qrels entry")
            qrels.grades[(topic, int(turn), pid)] = g
    return qrels


@dataclass
class ReferenceSet:
    # per (topic, turn): concatenation of grade>=3 passages + the individual texts
    concat: dict[tuple[str, int], str] = field(default_factory=dict)
    passages: dict[tuple[str, int], list[str]] = field(default_factory=dict)


def build_references(qrels: QRels, text_of) -> ReferenceSet:
    """References per turn: all passages judged 3 or 4, concatenated in id order."""
    refs = ReferenceSet()
    by_turn: dict[tuple[str, int], list[str]] = {}
    for (topic, turn, pid), grade in sorted(qrels.grades.items()):
        if grade >= 3:
            by_turn.setdefault((topic, turn), []).append(pid)
    for key, pids in by_turn.items():
        texts = [text_of(pid) for pid in pids]
        refs.passages[key] = texts
        refs.concat[key] = " ".join(texts)
    return refs


def ndcg_at_k(ranked_ids: list[str], grades: dict[str, int], k: int = 3) -> float:
    """Exponential-gain nDCG: gain (2^grade - 1) / log2(rank + 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    dcg = sum((2 ** grades.get(pid, 0) - 1) / math.log2(rank + 1)
              for rank, pid in enumerate(ranked_ids[:k], start=1))
    ideal = sorted(grades.values(), reverse=True)[:k]
    idcg = sum((2 ** g - 1) / math.log2(rank + 1)
               for rank, g in enumerate(ideal, start=1))
    return dcg / idcg if idcg > 0 else 0.0


def average_precision(ranked_ids: list[str], grades: dict[str, int],
                      cutoff: int = 1) -> float:
    relevant = {pid for pid, g in grades.items() if g >= cutoff}
    if not relevant:
        return 0.0
    hits = 0
    acc = 0.0
    for rank, pid in enumerate(ranked_ids, start=1):
        if pid in relevant:
            hits += 1
            acc += hits / rank
    return acc / len(relevant)


def reciprocal_rank(ranked_ids: list[str], grades: dict[str, int],
                    cutoff: int = 1) -> float:
    for rank, pid in enumerate(ranked_ids, start=1):
        if grades.get(pid, 0) >= cutoff:
            return 1.0 / rank
    return 0.0


def load_run(path: str | Path) -> list[dict]:
    """Run file: newline-delimited JSON, one object per turn."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    if not rows:
        raise ValueError(f"empty run file: {path}")
    return rows


def _turn_metrics(row: dict, qrels: QRels, refs: ReferenceSet) -> dict:
    topic, turn = row["topic"], int(row["turn"])
    grades = qrels.slice(topic, turn)
    answer = row.get("answer", "")
    key = (topic, turn)
    ref_concat = refs.concat.get(key, "")
    ref_list = refs.passages.get(key, [])
    out = {"topic": topic, "turn": turn,
           "answer_words": row.get("answer_words", len(answer.split()))}
    r1 = rouge_n(answer, ref_concat, 1)
    r2 = rouge_n(answer, ref_concat, 2)
    rl = rouge_l(answer, ref_concat)
    out.update(rouge1_p=r1[0], rouge1_r=r1[1], rouge1_f=r1[2],
               rouge2_p=r2[0], rouge2_r=r2[1], rouge2_f=r2[2],
               rougeL_p=rl[0], rougeL_r=rl[1], rougeL_f=rl[2])
    out["bleu1"] = bleu(answer, ref_concat, 1)
    out["bleu4"] = bleu(answer, ref_concat, 4)
    out["bleu1_multi"] = bleu(answer, ref_list, 1) if ref_list else 0.0
    out["bleu4_multi"] = bleu(answer, ref_list, 4) if ref_list else 0.0
    out["meteor"] = meteor_lite(answer, ref_concat)
    ranked = row.get("ranked", [])
    out["ndcg3"] = ndcg_at_k(ranked, grades, 3)
    out["ap"] = average_precision(ranked, grades)
    out["rr"] = reciprocal_rank(ranked, grades)
    return out


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


@dataclass
class MetricReport:
    per_turn: list[dict]
    per_topic: dict[str, dict[str, float]]
    mean_of_topics: dict[str, float]
    mean_of_turns: dict[str, float]

    def to_json(self) -> dict:
        return {
            "per_topic": self.per_topic,
            "mean_of_topics": self.mean_of_topics,
            "mean_of_turns": self.mean_of_turns,
            "n_turns": len(self.per_turn),
        }

    def to_csv(self) -> str:
        fields = (["topic", "turn", "answer_words"]
                  + GENERATION_METRICS + RETRIEVAL_METRICS)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in sorted(self.per_turn, key=lambda r: (r["topic"], r["turn"])):
            writer.writerow(row)
        return buf.getvalue()


def evaluate_run(run_rows: list[dict], qrels: QRels,
                 refs: ReferenceSet) -> MetricReport:
    run_topics = {row["topic"] for row in run_rows}
    missing = qrels.topics() - run_topics
    if missing:
        raise ValueError(f"run is missing topics: {sorted(missing)}")
    per_turn = sorted((_turn_metrics(row, qrels, refs) for row in run_rows),
                      key=lambda r: (r["topic"], r["turn"]))
    metric_names = ["answer_words"] + GENERATION_METRICS + RETRIEVAL_METRICS
    per_topic: dict[str, dict[str, float]] = {}
    for topic in sorted({r["topic"] for r in per_turn}):
        rows = [r for r in per_turn if r["topic"] == topic]
        per_topic[topic] = {m: _mean([r[m] for r in rows]) for m in metric_names}
    mean_of_topics = {m: _mean([per_topic[t][m] for t in per_topic])
                      for m in metric_names}
    mean_of_turns = {m: _mean([r[m] for r in per_turn]) for m in metric_names}
    return MetricReport(per_turn=per_turn, per_topic=per_topic,
                        mean_of_topics=mean_of_topics,
                        mean_of_turns=mean_of_turns)
