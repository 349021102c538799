"""Subgraph extraction: from retrieval prizes to a connected subgraph.

Builds the undirected working instance (parallel directed actions between
the same pair of states collapse into one traversable connection), folds
edge prizes, solves exactly when small enough and approximately otherwise,
then maps the solution back to the original directed edge records.

Self-loop actions (non-navigating buttons) never affect connectivity, so
they stay out of the solver: a prized loop at a selected state is re-attached
afterwards when its prize beats its cost, which keeps the overall objective
optimal whenever the solver was exact.
"""

from __future__ import annotations

from dataclasses import dataclass

from graphguide.graph import EdgeRecord, StateActionGraph
from graphguide.pcst.approx import solve_approx
from graphguide.pcst.exact import EXACT_EDGE_LIMIT, solve_exact
from graphguide.pcst.instance import PcstInstance, PcstSolution, fold_edge_prizes
from graphguide.retrieval import RetrievalResult


@dataclass(frozen=True)
class PcstConfig:
    edge_cost: float = 1.0
    exact_edge_limit: int = EXACT_EDGE_LIMIT
    mode: str = "auto"  # auto | exact | approx
    backend: str | None = None  # growth kernel override


@dataclass(frozen=True)
class Subgraph:
    """Connected prized subgraph with original directed edge records."""

    nodes: tuple[int, ...]
    edges: tuple[EdgeRecord, ...]
    objective: float
    connected: bool

    @property
    def node_set(self) -> frozenset[int]:
        return frozenset(self.nodes)


def is_connected(nodes, edge_pairs) -> bool:
    """Independent union-find connectivity check over an undirected projection."""
    nodes = list(nodes)
    if len(nodes) <= 1:
        return True
    parent = {v: v for v in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edge_pairs:
        if u in parent and v in parent:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    first = find(nodes[0])
    return all(find(v) == first for v in nodes)


@dataclass(frozen=True)
class _InstanceMap:
    node_ids: tuple[int, ...]  # instance index -> node_id
    idx_of: dict[int, int]  # node_id -> instance index
    group_members: tuple[tuple[int, ...], ...]  # instance edge -> directed edge indices
    loop_indices: tuple[int, ...]  # directed self-loop edge indices (kept out)


def build_instance(
    graph: StateActionGraph, retrieval: RetrievalResult, cfg: PcstConfig
) -> tuple[PcstInstance, _InstanceMap]:
    """Undirected working instance with prizes from a retrieval result."""
    node_ids = tuple(n.node_id for n in graph.nodes)
    idx_of = {nid: i for i, nid in enumerate(node_ids)}

    groups: dict[tuple[int, int], list[int]] = {}
    loops: list[int] = []
    for i, e in enumerate(graph.edges):
        if e.src == e.tgt:
            loops.append(i)
            continue
        key = (min(e.src, e.tgt), max(e.src, e.tgt))
        groups.setdefault(key, []).append(i)

    keys = sorted(groups)
    edges = tuple((idx_of[a], idx_of[b]) for a, b in keys)
    group_members = tuple(tuple(groups[k]) for k in keys)

    node_prizes = [0.0] * len(node_ids)
    for nid, p in retrieval.node_prizes.items():
        node_prizes[idx_of[nid]] = p
    edge_prizes = [0.0] * len(edges)
    for gi, members in enumerate(group_members):
        edge_prizes[gi] = sum(retrieval.edge_prizes.get(m, 0.0) for m in members)

    root = idx_of[retrieval.pinned_node] if retrieval.pinned_node is not None else None
    inst = PcstInstance(
        n=len(node_ids),
        edges=edges,
        costs=(cfg.edge_cost,) * len(edges),
        node_prizes=tuple(node_prizes),
        edge_prizes=tuple(edge_prizes),
        root=root,
    )
    return inst, _InstanceMap(
        node_ids=node_ids,
        idx_of=idx_of,
        group_members=group_members,
        loop_indices=tuple(loops),
    )


def solve_instance(inst: PcstInstance, cfg: PcstConfig | None = None) -> PcstSolution:
    """Fold edge prizes and dispatch to the exact or approximate solver."""
    cfg = cfg or PcstConfig()
    folded, fmap = fold_edge_prizes(inst)
    if cfg.mode == "exact" or (
        cfg.mode == "auto" and len(folded.edges) <= cfg.exact_edge_limit
    ):
        # forced exact keeps the size bound: too-large instances raise
        # InstanceTooLargeError instead of enumerating forever
        solution = solve_exact(folded, edge_limit=cfg.exact_edge_limit)
    else:
        solution = solve_approx(folded, backend=cfg.backend)
    return fmap.unfold(solution)


def extract_subgraph(
    graph: StateActionGraph, retrieval: RetrievalResult, cfg: PcstConfig | None = None
) -> Subgraph:
    """Connected subgraph collecting the retrieval prizes at minimal cost.

    Returns original directed EdgeRecords (all parallel actions between a
    selected pair of states are re-attached). With no prizes and no pinned
    node the subgraph is empty with objective 0.
    """
    cfg = cfg or PcstConfig()
    inst, imap = build_instance(graph, retrieval, cfg)
    solution = solve_instance(inst, cfg)

    node_ids = {imap.node_ids[i] for i in solution.nodes}
    edge_indices: set[int] = set()
    for gi in solution.edge_indices:
        edge_indices.update(imap.group_members[gi])
    objective = solution.objective

    # Re-attach profitable prized self-loops at selected states.
    for li in imap.loop_indices:
        e = graph.edges[li]
        prize = retrieval.edge_prizes.get(li, 0.0)
        if e.src in node_ids and prize > cfg.edge_cost:
            edge_indices.add(li)
            objective += prize - cfg.edge_cost

    records = tuple(graph.edges[i] for i in sorted(edge_indices))
    connected = is_connected(node_ids, [(e.src, e.tgt) for e in records])
    return Subgraph(
        nodes=tuple(sorted(node_ids)),
        edges=records,
        objective=objective,
        connected=connected,
    )
