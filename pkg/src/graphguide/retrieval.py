"""Top-k retrieval over graph embeddings with rank-based prizes.

Similarity is exact cosine against every node and edge vector (graphs here
are small enough that an exhaustive scan beats any index). The top-k nodes
and edges receive prizes k - rank (best gets k, k-th gets 1; everything else
implicitly 0). The node for the user's current UI state, when given, is
pinned: it receives a dominating prize of k + 1 and later becomes the root
of the subgraph extraction, which guarantees the selected subgraph stays
connected to where the user actually is.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from graphguide.embeddings import EmbeddingVector, GraphEmbeddings


class UnknownNodeError(ValueError):
    """current_node does not exist in the graph."""


@dataclass(frozen=True)
class RetrievalResult:
    query: str
    top_nodes: tuple[tuple[int, float], ...]
    top_edges: tuple[tuple[int, float], ...]
    node_prizes: dict[int, float]
    edge_prizes: dict[int, float]
    pinned_node: int | None
    k: int


def prize_of_rank(k: int, rank: int) -> float:
    """Prize for the element ranked `rank` (0-based) in a top-k list: k - rank."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 <= rank < k:
        raise ValueError(f"rank {rank} outside [0, {k})")
    return float(k - rank)


def _ranked(ids: np.ndarray, sims: np.ndarray, k: int) -> list[tuple[int, float]]:
    # Descending similarity, ties broken by ascending id; lexsort's last key
    # is the primary one.
    order = np.lexsort((ids, -sims))
    top = order[: min(k, len(ids))]
    return [(int(ids[i]), float(sims[i])) for i in top]


def retrieve(
    ge: GraphEmbeddings,
    zq: EmbeddingVector,
    k: int,
    current_node: int | None = None,
    query_text: str = "",
) -> RetrievalResult:
    """Exact top-k nodes and edges by cosine, with rank prizes and pinning.

    When k exceeds the population, every element is ranked (no padding).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if zq.d != ge.d:
        raise ValueError(f"query dimension {zq.d} does not match graph embeddings ({ge.d})")
    if current_node is not None and current_node not in ge.node_ids:
        raise UnknownNodeError(f"current_node {current_node} not in graph {ge.graph_id}")

    node_ids = np.asarray(ge.node_ids, dtype=np.int64)
    node_sims = ge.node_matrix @ zq.values
    top_nodes = _ranked(node_ids, node_sims, k)

    edge_ids = np.arange(ge.n_edges, dtype=np.int64)
    edge_sims = ge.edge_matrix @ zq.values
    top_edges = _ranked(edge_ids, edge_sims, k)

    node_prizes = {node_id: prize_of_rank(k, rank) for rank, (node_id, _) in enumerate(top_nodes)}
    edge_prizes = {edge_idx: prize_of_rank(k, rank) for rank, (edge_idx, _) in enumerate(top_edges)}
    if current_node is not None:
        node_prizes[current_node] = float(k + 1)

    return RetrievalResult(
        query=query_text,
        top_nodes=tuple(top_nodes),
        top_edges=tuple(top_edges),
        node_prizes=node_prizes,
        edge_prizes=edge_prizes,
        pinned_node=current_node,
        k=k,
    )
