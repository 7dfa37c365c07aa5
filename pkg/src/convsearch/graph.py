"""Conversation entity map/graph, PageRank salience and passage scoring."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linking import KnowledgeBaseStore

#: Sentinel returned by relatedness passage scoring when either entity set is
#: empty; callers fall back to the retrieval order.
NO_ENTITIES = None


@dataclass
class GraphParams:
    gamma: float = 0.25
    tau: float = 0.0
    alpha: float = 0.99
    pagerank_tol: float = 1e-10
    pagerank_max_iter: int = 10_000
    candidate_pool: int = 10
    relatedness_polarity: str = "similarity"  # "similarity" | "raw"
    eg_normalization: str = "count"  # "count" (mean salience) | "degree"

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0,1]")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0,1)")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if self.relatedness_polarity not in ("similarity", "raw"):
            raise ValueError("relatedness_polarity must be 'similarity' or 'raw'")
        if self.eg_normalization not in ("count", "degree"):
            raise ValueError("eg_normalization must be 'count' or 'degree'")


def entity_relatedness(e1: str, e2: str, kb: KnowledgeBaseStore,
                       polarity: str = "similarity") -> float:
    """Link-overlap relatedness between two KB entities, in [0,1].

    Computes the normalized-log distance over inlink sets, clamped to [0,1]
    (distance 1 when the inlink sets do not intersect or the KB is degenerate),
    and returns similarity 1-d by default.
    """
    links1 = kb.inlinks_of(e1)
    links2 = kb.inlinks_of(e2)
    inter = len(links1 & links2)
    lo = min(len(links1), len(links2))
    hi = max(len(links1), len(links2))
    total = kb.total_entities
    if inter == 0 or total <= lo or lo == 0:
        distance = 1.0
    else:
        denom = math.log(total) - math.log(lo)
        distance = (math.log(hi) - math.log(inter)) / denom
        distance = min(max(distance, 0.0), 1.0)
    return distance if polarity == "raw" else 1.0 - distance


def passage_score_er(passage_entities: set[str], query_entities: set[str],
                     kb: KnowledgeBaseStore,
                     polarity: str = "similarity") -> float | None:
    """Mean pairwise relatedness between query and passage entity sets.

    Returns the NO_ENTITIES sentinel when either side is empty; the caller
    keeps the retrieval order in that case.
    """
    if not passage_entities or not query_entities:
        return NO_ENTITIES
    acc = 0.0
    for e1 in query_entities:
        for e2 in passage_entities:
            acc += entity_relatedness(e1, e2, kb, polarity)
    return acc / (len(query_entities) * len(passage_entities))


@dataclass
class EntityMap:
    entities: list[str]
    matrix: np.ndarray  # shape (n_entities, 1 + n_passages)
    gamma: float


@dataclass
class EntityGraph:
    entities: list[str]
    weights: np.ndarray  # symmetric, nonnegative, shape (n, n)
    tau: float = 0.0


@dataclass
class EntityRankVector:
    ranks: dict[str, float] = field(default_factory=dict)

    def get(self, entity_id: str, default: float = 0.0) -> float:
        return self.ranks.get(entity_id, default)


def build_entity_map(query_entities: set[str],
                     passages_entities: list[set[str]],
                     gamma: float) -> EntityMap:
    """Weighted presence matrix: one query column (gamma) + passage columns (1-gamma)."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must be in [0,1]")
    entities = sorted(query_entities.union(*passages_entities)
                      if passages_entities else query_entities)
    matrix = np.zeros((len(entities), 1 + len(passages_entities)))
    row = {e: i for i, e in enumerate(entities)}
    for e in query_entities:
        matrix[row[e], 0] = gamma
    for k, p_entities in enumerate(passages_entities):
        for e in p_entities:
            matrix[row[e], 1 + k] = 1.0 - gamma
    return EntityMap(entities=entities, matrix=matrix, gamma=gamma)


def build_entity_graph(entity_map: EntityMap, tau: float = 0.0) -> EntityGraph:
    """Gram matrix of the entity map; off-diagonal entries below tau are zeroed."""
    weights = entity_map.matrix @ entity_map.matrix.T
    weights = (weights + weights.T) / 2.0  # exact symmetry against fp noise
    if tau > 0:
        off_diag = ~np.eye(len(entity_map.entities), dtype=bool)
        weights[off_diag & (weights < tau)] = 0.0
    return EntityGraph(entities=entity_map.entities, weights=weights, tau=tau)


class PageRankDivergence(RuntimeError):
    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"pagerank did not converge in {iterations} iterations "
            f"(residual {residual:.3e})")
        self.residual = residual
        self.iterations = iterations


def entity_rank(graph: EntityGraph, params: GraphParams) -> EntityRankVector:
    """Power-iteration PageRank over the weighted entity graph.

    Self-loops are removed; each node distributes its rank proportionally to
    edge weight; dangling nodes redistribute their mass uniformly.
    """
    n = len(graph.entities)
    if n == 0:
        raise ValueError("graph has no entities")
    weights = graph.weights.copy()
    np.fill_diagonal(weights, 0.0)
    degree = weights.sum(axis=1)
    dangling = degree == 0
    # column-stochastic transition: T[i, j] = w(i,j)/deg(j)
    safe_degree = np.where(dangling, 1.0, degree)
    transition = weights / safe_degree[np.newaxis, :]
    alpha = params.alpha
    rank = np.full(n, 1.0 / n)
    for _ in range(params.pagerank_max_iter):
        dangling_mass = rank[dangling].sum()
        new_rank = (1.0 - alpha) / n + alpha * (transition @ rank
                                                + dangling_mass / n)
        residual = np.abs(new_rank - rank).sum()
        rank = new_rank
        if residual < params.pagerank_tol:
            break
    else:
        raise PageRankDivergence(residual, params.pagerank_max_iter)
    return EntityRankVector(ranks=dict(zip(graph.entities, rank.tolist())))


def passage_score_eg(passage_entities: set[str], rank_vector: EntityRankVector,
                     graph: EntityGraph | None = None,
                     normalization: str = "count") -> float:
    """Salience score of a passage from the entity-rank vector.

    Default reading: mean rank of the passage's graph entities. The "degree"
    alternative divides each entity's rank by its graph degree instead.
    """
    present = [e for e in passage_entities if e in rank_vector.ranks]
    if not present:
        return 0.0
    if normalization == "count":
        return sum(rank_vector.ranks[e] for e in present) / len(present)
    if graph is None:
        raise ValueError("degree normalization requires the graph")
    weights = graph.weights.copy()
    np.fill_diagonal(weights, 0.0)
    degree = {e: weights[i].sum() for i, e in enumerate(graph.entities)}
    return sum(rank_vector.ranks[e] / max(degree.get(e, 0.0), 1e-12)
               for e in present)


def export_graph(graph: EntityGraph, rank_vector: EntityRankVector,
                 top_fraction: float = 0.5) -> dict:
    """Portable node-link document for the explorer UI and plot emitters."""
    ordered = sorted(graph.entities,
                     key=lambda e: (-rank_vector.get(e), e))
    n_top = max(1, math.ceil(top_fraction * len(ordered))) if ordered else 0
    top_set = set(ordered[:n_top])
    nodes = [{"id": e, "rank": rank_vector.get(e),
              "tier": "top" if e in top_set else "bottom"}
             for e in sorted(graph.entities)]
    edges = []
    idx = {e: i for i, e in enumerate(graph.entities)}
    for a in sorted(graph.entities):
        for b in sorted(graph.entities):
            if a >= b:
                continue
            w = float(graph.weights[idx[a], idx[b]])
            if w > 0 and w >= graph.tau:
                edges.append({"source": a, "target": b, "weight": w})
    return {"nodes": nodes, "edges": edges}
