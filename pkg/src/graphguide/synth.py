"""Deterministic synthetic state-action graphs.

Generates desk-scale stand-ins for production CRM/ERP graphs: a spanning
arborescence from the home node guarantees reachability, extra cross edges
bring the edge count to the requested total, and names/descriptions are drawn
from an enterprise-software vocabulary so embedding retrieval has real lexical
signal to work with.
"""

from __future__ import annotations

import random

from graphguide.graph import EdgeRecord, NodeRecord, StateActionGraph, build_graph

SECTIONS = [
    "Leads", "Contacts", "Accounts", "Opportunities", "Invoices", "Orders",
    "Reports", "Calendar", "Tasks", "Campaigns", "Products", "Quotes",
    "Cases", "Documents", "Settings", "Users", "Dashboards", "Forecasts",
]

VIEWS = [
    "List", "Details", "Creation Form", "Edit Form", "Search", "Overview",
    "Import", "Export", "History", "Filters", "Summary", "Assignment",
]

ACTION_VERBS = ["Open", "View", "Go to", "Click", "Select"]

SELF_ACTIONS = ["Save", "Refresh", "Apply Filters", "Export CSV", "Print"]

NAV_KINDS = ["link", "menu", "button"]


def synthesize_graph(
    n_nodes: int,
    n_edges: int,
    seed: int = 0,
    graph_id: str = "synthetic",
) -> StateActionGraph:
    """Build a graph with exactly n_nodes nodes and n_edges edges.

    Node 0 is the home node and every node is reachable from it. Requires
    n_edges >= n_nodes - 1 for the spanning arborescence.
    """
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    if n_edges < n_nodes - 1:
        raise ValueError("n_edges must be >= n_nodes - 1 to keep every node reachable")
    rng = random.Random(seed)

    nodes = [NodeRecord(0, "Home", "Home page with the main navigation dashboard",
                        f"https://{graph_id}.example/")]
    for i in range(1, n_nodes):
        section = SECTIONS[(i - 1) % len(SECTIONS)]
        view = VIEWS[((i - 1) // len(SECTIONS)) % len(VIEWS)]
        ordinal = (i - 1) // (len(SECTIONS) * len(VIEWS))
        name = f"{section} {view}" if ordinal == 0 else f"{section} {view} {ordinal + 1}"
        description = (
            f"{name} page of the {section.lower()} section where the user can "
            f"{rng.choice(['review', 'manage', 'edit', 'create', 'track'])} "
            f"{section.lower()}"
        )
        slug = name.lower().replace(" ", "-")
        nodes.append(NodeRecord(i, name, description, f"https://{graph_id}.example/{slug}"))

    edges: list[EdgeRecord] = []
    triples: set[tuple[int, int, str]] = set()

    def add_edge(src: int, tgt: int, action: str, kind: str) -> bool:
        if (src, tgt, action) in triples:
            return False
        triples.add((src, tgt, action))
        edges.append(EdgeRecord(src, tgt, action, kind))
        return True

    for i in range(1, n_nodes):
        parent = rng.randrange(0, i)
        verb = rng.choice(ACTION_VERBS)
        add_edge(parent, i, f"{verb} {nodes[i].name}", rng.choice(NAV_KINDS))

    while len(edges) < n_edges:
        if rng.random() < 0.1:
            u = rng.randrange(0, n_nodes)
            add_edge(u, u, rng.choice(SELF_ACTIONS), "button")
            continue
        src = rng.randrange(0, n_nodes)
        tgt = rng.randrange(0, n_nodes)
        if src == tgt:
            continue
        verb = rng.choice(ACTION_VERBS)
        action = f"{verb} {nodes[tgt].name}"
        if not add_edge(src, tgt, action, rng.choice(NAV_KINDS)):
            # Dense corner: disambiguate rather than spin on collisions.
            add_edge(src, tgt, f"{action} (alt {len(edges)})", rng.choice(NAV_KINDS))

    return build_graph(graph_id, 0, nodes, edges)
