"""State-action graph model and its on-disk nodes/adjacency JSON formats.

A graph describes one web application: nodes are UI states (pages), directed
edges are user actions (clicks, form submissions) that move between states.
Loaded graphs are immutable and safe to share across threads; all mutation
happens by building a new graph.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import IO, Iterable, Union

logger = logging.getLogger(__name__)

EDGE_KINDS = frozenset({"button", "link", "menu", "form", "dropdown", "system"})

Source = Union[str, bytes, IO]


class GraphError(Exception):
    """Base class for graph loading and validation failures."""


class GraphParseError(GraphError):
    """Input bytes are not well-formed JSON (carries line/column context)."""


class DuplicateNodeError(GraphError):
    """Two node records share the same node_id."""


class DanglingEdgeError(GraphError):
    """An edge references a node_id that does not exist."""


class GraphValidationError(GraphError):
    """A structural invariant is violated (missing home node, bad kind, ...)."""


@dataclass(frozen=True)
class NodeRecord:
    """One UI state. `description` is the text embedded for retrieval."""

    node_id: int
    name: str
    description: str = ""
    url: str = ""


@dataclass(frozen=True)
class EdgeRecord:
    """One directed user action from state `src` to state `tgt`."""

    src: int
    tgt: int
    action: str
    kind: str = "link"


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    reachable_fraction: float
    max_out_degree: int


@dataclass(frozen=True)
class ValidationReport:
    """Non-fatal findings from load-time validation."""

    unreachable_nodes: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.unreachable_nodes


@dataclass(frozen=True)
class StateActionGraph:
    graph_id: str
    nodes: tuple[NodeRecord, ...]
    edges: tuple[EdgeRecord, ...]
    home_node: int

    @cached_property
    def node_by_id(self) -> dict[int, NodeRecord]:
        return {n.node_id: n for n in self.nodes}

    @cached_property
    def out_edges(self) -> dict[int, tuple[int, ...]]:
        """Maps node_id to the indices of its outgoing edges."""
        out: dict[int, list[int]] = {n.node_id: [] for n in self.nodes}
        for i, e in enumerate(self.edges):
            out[e.src].append(i)
        return {k: tuple(v) for k, v in out.items()}

    def has_node(self, node_id: int) -> bool:
        return node_id in self.node_by_id

    def node(self, node_id: int) -> NodeRecord:
        return self.node_by_id[node_id]

    def reachable_from_home(self) -> set[int]:
        """Node ids reachable from home_node along directed edges."""
        seen = {self.home_node}
        stack = [self.home_node]
        while stack:
            u = stack.pop()
            for i in self.out_edges.get(u, ()):
                v = self.edges[i].tgt
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen


def _check_node(raw: dict, seen_ids: set[int]) -> NodeRecord:
    node_id = raw.get("node_id")
    if not isinstance(node_id, int) or isinstance(node_id, bool) or node_id < 0:
        raise GraphValidationError(f"node_id must be a non-negative integer, got {node_id!r}")
    if node_id in seen_ids:
        raise DuplicateNodeError(f"duplicate node_id {node_id}")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise GraphValidationError(f"node {node_id}: name must be non-empty text")
    description = raw.get("description", "")
    url = raw.get("url", "")
    if not isinstance(description, str) or not isinstance(url, str):
        raise GraphValidationError(f"node {node_id}: description and url must be text")
    return NodeRecord(node_id=node_id, name=name, description=description, url=url)


def _check_edge(raw: dict, node_ids: set[int], seen_triples: set) -> EdgeRecord:
    src, tgt = raw.get("src"), raw.get("tgt")
    action, kind = raw.get("action"), raw.get("kind")
    if not isinstance(action, str) or not action:
        raise GraphValidationError(f"edge ({src}, {tgt}): action must be non-empty text")
    for endpoint, label in ((src, "src"), (tgt, "tgt")):
        if not isinstance(endpoint, int) or isinstance(endpoint, bool):
            raise GraphValidationError(f"edge ({src}, {tgt}, {action!r}): {label} must be an integer")
        if endpoint not in node_ids:
            raise DanglingEdgeError(
                f"edge ({src}, {tgt}, {action!r}) references missing node {endpoint}"
            )
    if kind not in EDGE_KINDS:
        raise GraphValidationError(
            f"edge ({src}, {tgt}, {action!r}): unknown kind {kind!r}; expected one of {sorted(EDGE_KINDS)}"
        )
    triple = (src, tgt, action)
    if triple in seen_triples:
        raise GraphValidationError(f"duplicate edge {triple}")
    seen_triples.add(triple)
    return EdgeRecord(src=src, tgt=tgt, action=action, kind=kind)


def _read_json(source: Source, label: str) -> dict:
    if isinstance(source, (str, bytes)):
        data = source
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GraphParseError(
            f"{label}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise GraphParseError(f"{label}: top-level value must be a JSON object")
    return doc


def build_graph(
    graph_id: str,
    home_node: int,
    nodes: Iterable[NodeRecord],
    edges: Iterable[EdgeRecord],
) -> StateActionGraph:
    """Validate records and assemble an immutable graph.

    Raises on duplicate node ids, dangling edges, duplicate (src, tgt, action)
    triples, unknown edge kinds, or a missing home node. Unreachable nodes are
    reported via a warning, not an error, so hand-edited graphs stay loadable.
    """
    node_list: list[NodeRecord] = []
    seen_ids: set[int] = set()
    for n in nodes:
        node_list.append(_check_node(
            {"node_id": n.node_id, "name": n.name, "description": n.description, "url": n.url},
            seen_ids,
        ))
        seen_ids.add(n.node_id)
    if home_node not in seen_ids:
        raise GraphValidationError("graph must contain home node")
    edge_list: list[EdgeRecord] = []
    seen_triples: set = set()
    for e in edges:
        edge_list.append(_check_edge(
            {"src": e.src, "tgt": e.tgt, "action": e.action, "kind": e.kind},
            seen_ids, seen_triples,
        ))
    graph = StateActionGraph(
        graph_id=graph_id,
        nodes=tuple(node_list),
        edges=tuple(edge_list),
        home_node=home_node,
    )
    report = validate(graph)
    if not report.ok:
        logger.warning(
            "graph %s: %d node(s) unreachable from home node %d: %s",
            graph_id, len(report.unreachable_nodes), home_node,
            list(report.unreachable_nodes[:10]),
        )
    return graph


def validate(graph: StateActionGraph) -> ValidationReport:
    """Report nodes not reachable from the home node."""
    reachable = graph.reachable_from_home()
    unreachable = tuple(sorted(n.node_id for n in graph.nodes if n.node_id not in reachable))
    return ValidationReport(unreachable_nodes=unreachable)


def load_graph(nodes_source: Source, adjacency_source: Source) -> StateActionGraph:
    """Load and validate a graph from its nodes and adjacency JSON documents.

    Sources may be open files, paths already read into str/bytes, or raw JSON
    text. The two documents must agree on graph_id.
    """
    nodes_doc = _read_json(nodes_source, "nodes file")
    adj_doc = _read_json(adjacency_source, "adjacency file")

    graph_id = nodes_doc.get("graph_id")
    if not isinstance(graph_id, str) or not graph_id:
        raise GraphValidationError("nodes file: graph_id must be non-empty text")
    adj_id = adj_doc.get("graph_id")
    if adj_id != graph_id:
        raise GraphValidationError(
            f"graph_id mismatch: nodes file has {graph_id!r}, adjacency file has {adj_id!r}"
        )
    home_node = nodes_doc.get("home_node")
    if not isinstance(home_node, int) or isinstance(home_node, bool):
        raise GraphValidationError("nodes file: home_node must be an integer")

    raw_nodes = nodes_doc.get("nodes")
    raw_edges = adj_doc.get("edges")
    if not isinstance(raw_nodes, list):
        raise GraphValidationError("nodes file: 'nodes' must be a list")
    if not isinstance(raw_edges, list):
        raise GraphValidationError("adjacency file: 'edges' must be a list")

    nodes = []
    seen_ids: set[int] = set()
    for raw in raw_nodes:
        if not isinstance(raw, dict):
            raise GraphValidationError(f"nodes file: node record must be an object, got {raw!r}")
        node = _check_node(raw, seen_ids)
        seen_ids.add(node.node_id)
        nodes.append(node)
    if home_node not in seen_ids:
        raise GraphValidationError("graph must contain home node")

    edges = []
    seen_triples: set = set()
    for raw in raw_edges:
        if not isinstance(raw, dict):
            raise GraphValidationError(f"adjacency file: edge record must be an object, got {raw!r}")
        edges.append(_check_edge(raw, seen_ids, seen_triples))

    graph = StateActionGraph(
        graph_id=graph_id, nodes=tuple(nodes), edges=tuple(edges), home_node=home_node
    )
    report = validate(graph)
    if not report.ok:
        logger.warning(
            "graph %s: %d node(s) unreachable from home node %d: %s",
            graph_id, len(report.unreachable_nodes), home_node,
            list(report.unreachable_nodes[:10]),
        )
    return graph


def nodes_document(graph: StateActionGraph) -> dict:
    return {
        "graph_id": graph.graph_id,
        "home_node": graph.home_node,
        "nodes": [
            {"node_id": n.node_id, "name": n.name, "description": n.description, "url": n.url}
            for n in graph.nodes
        ],
    }


def adjacency_document(graph: StateActionGraph) -> dict:
    return {
        "graph_id": graph.graph_id,
        "edges": [
            {"src": e.src, "tgt": e.tgt, "action": e.action, "kind": e.kind}
            for e in graph.edges
        ],
    }


def dumps_nodes(graph: StateActionGraph) -> str:
    """Nodes document, keys in canonical order, 2-space indent (golden-file stable)."""
    return json.dumps(nodes_document(graph), indent=2, ensure_ascii=False) + "\n"


def dumps_adjacency(graph: StateActionGraph) -> str:
    return json.dumps(adjacency_document(graph), indent=2, ensure_ascii=False) + "\n"


def save_graph(graph: StateActionGraph, nodes_path: str, adjacency_path: str) -> None:
    """Write the two JSON documents; byte-identical for identical graphs."""
    with open(nodes_path, "w", encoding="utf-8") as f:
        f.write(dumps_nodes(graph))
    with open(adjacency_path, "w", encoding="utf-8") as f:
        f.write(dumps_adjacency(graph))


def load_graph_files(nodes_path: str, adjacency_path: str) -> StateActionGraph:
    with open(nodes_path, "rb") as nf, open(adjacency_path, "rb") as af:
        return load_graph(nf, af)


def graph_stats(graph: StateActionGraph) -> GraphStats:
    """Node/edge counts, fraction of nodes reachable from home, max out-degree."""
    reachable = graph.reachable_from_home()
    n = len(graph.nodes)
    max_out = max((len(v) for v in graph.out_edges.values()), default=0)
    return GraphStats(
        node_count=n,
        edge_count=len(graph.edges),
        reachable_fraction=len(reachable) / n if n else 0.0,
        max_out_degree=max_out,
    )
