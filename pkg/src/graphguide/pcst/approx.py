"""Goemans-Williamson style PCST approximation: moat growth + strong pruning.

The growth phase runs in a compiled kernel when the extension built, with a
pure-Python fallback selected at import time (override with the environment
variable GRAPHGUIDE_PURE_PYTHON=1). Both kernels implement the identical
event schedule, so results do not depend on which one is active.

Strong pruning is exact dynamic programming over the grown tree: it keeps a
subtree rooted at the root (or at the best root for unrooted instances) whose
net worth cannot be improved by dropping any branch. Virtual nodes from edge
folding collect their prize only when both of their half-edges are kept,
which prices folded edges exactly and keeps dangling virtual nodes out of
every solution.
"""

from __future__ import annotations

import os
from collections import defaultdict

import numpy as np

from graphguide.pcst import _pycore
from graphguide.pcst.instance import (
    FoldMap,
    PcstInstance,
    PcstSolution,
    fold_edge_prizes,
)

_KEEP_EPS = 1e-12

try:
    from graphguide.pcst import _fastcore  # compiled growth kernel
except ImportError:  # pragma: no cover - depends on build environment
    _fastcore = None

if os.environ.get("GRAPHGUIDE_PURE_PYTHON"):
    _default_backend = "pure-python"
else:
    _default_backend = "compiled" if _fastcore is not None else "pure-python"

BACKEND = _default_backend


def growth_backends() -> dict:
    """Available growth kernels by name."""
    backends = {"pure-python": _pycore}
    if _fastcore is not None:
        backends["compiled"] = _fastcore
    return backends


def _grow(inst: PcstInstance, backend: str | None):
    name = backend or BACKEND
    kernels = growth_backends()
    if name not in kernels:
        raise ValueError(f"unknown growth backend {name!r}; available: {sorted(kernels)}")
    m = len(inst.edges)
    eu = np.fromiter((e[0] for e in inst.edges), dtype=np.int64, count=m)
    ev = np.fromiter((e[1] for e in inst.edges), dtype=np.int64, count=m)
    cost = np.asarray(inst.costs, dtype=np.float64)
    prize = np.asarray(inst.node_prizes, dtype=np.float64)
    root = inst.root if inst.root is not None else -1
    return kernels[name].grow(inst.n, eu, ev, cost, prize, root)


def _tree_adjacency(inst: PcstInstance, tree_edge_ids):
    adj: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for i in tree_edge_ids:
        u, v = inst.edges[i]
        adj[u].append((v, i))
        adj[v].append((u, i))
    return adj


def _strong_prune(inst: PcstInstance, adj, root: int, virtuals: frozenset):
    """Best subtree containing `root` within the tree given by `adj`.

    Returns (value, kept_nodes, kept_edge_ids). A virtual node's prize counts
    only together with its second half-edge, so its keep decision is joint
    with its child edge.
    """
    parent_of: dict[int, tuple[int | None, int | None]] = {root: (None, None)}
    order = [root]
    stack = [root]
    while stack:
        u = stack.pop()
        for w, i in adj[u]:
            if w not in parent_of:
                parent_of[w] = (u, i)
                order.append(w)
                stack.append(w)

    nw: dict[int, float] = {}
    keep: set[int] = set()
    for u in reversed(order):
        children = [(w, i) for w, i in adj[u] if parent_of[w] == (u, i)]
        if u in virtuals:
            value = 0.0
            for w, i in children:
                joint = inst.node_prizes[u] + nw[w] - inst.costs[i]
                if joint > _KEEP_EPS:
                    value = joint
                    keep.add(i)
            nw[u] = value
        else:
            value = inst.node_prizes[u]
            for w, i in children:
                gain = nw[w] - inst.costs[i]
                if gain > _KEEP_EPS:
                    value += gain
                    keep.add(i)
            nw[u] = value

    kept_nodes = {root}
    kept_edges: list[int] = []
    stack = [root]
    while stack:
        u = stack.pop()
        for w, i in adj[u]:
            if i in keep and w not in kept_nodes and parent_of[w] == (u, i):
                kept_nodes.add(w)
                kept_edges.append(i)
                stack.append(w)
    return nw[root], kept_nodes, sorted(kept_edges)


def _best_root(inst: PcstInstance, comp_nodes, adj, virtuals: frozenset):
    """Rerooting DP: the real node maximizing the rooted strong-prune value.

    h[(u, away)] is the best subtree value at u in the direction away from a
    neighbor; two tree passes give every direction in linear time.
    """
    r0 = min(comp_nodes)
    parent_of: dict[int, tuple[int | None, int | None]] = {r0: (None, None)}
    order = [r0]
    stack = [r0]
    while stack:
        u = stack.pop()
        for w, i in adj[u]:
            if w not in parent_of:
                parent_of[w] = (u, i)
                order.append(w)
                stack.append(w)

    h: dict[tuple[int, int], float] = {}
    # upward pass: h[u -> parent]
    for u in reversed(order):
        p, _ = parent_of[u]
        if p is None:
            continue
        if u in virtuals:
            value = 0.0
            for w, i in adj[u]:
                if w != p:
                    value = max(0.0, inst.node_prizes[u] + h[(w, u)] - inst.costs[i])
            h[(u, p)] = value
        else:
            value = inst.node_prizes[u]
            for w, i in adj[u]:
                if w != p:
                    value += max(0.0, h[(w, u)] - inst.costs[i])
            h[(u, p)] = value

    # downward pass: h[u -> child], then F(u) for real nodes
    best_value = None
    best_node = None
    for u in order:
        p, pi = parent_of[u]
        if u in virtuals:
            nbrs = adj[u]
            for w, i in nbrs:
                others = [(x, j) for x, j in nbrs if x != w]
                value = 0.0
                if others:
                    x, j = others[0]
                    value = max(0.0, inst.node_prizes[u] + h[(x, u)] - inst.costs[j])
                h[(u, w)] = value
            continue
        total = inst.node_prizes[u]
        for w, i in adj[u]:
            total += max(0.0, h[(w, u)] - inst.costs[i])
        for w, i in adj[u]:
            h[(u, w)] = total - max(0.0, h[(w, u)] - inst.costs[i])
        if best_value is None or total > best_value + _KEEP_EPS or (
            abs(total - best_value) <= _KEEP_EPS and u < best_node
        ):
            best_value = total
            best_node = u
    return best_node


def _component_of(n: int, merge_edges, inst: PcstInstance):
    """Connected components of the merge forest, as lists of node ids."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in merge_edges:
        u, v = inst.edges[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    comps: dict[int, list[int]] = defaultdict(list)
    for v in range(n):
        comps[find(v)].append(v)
    return list(comps.values())


def _better(obj_a, edges_a, nodes_a, obj_b, edges_b, nodes_b) -> bool:
    if obj_a > obj_b + _KEEP_EPS:
        return True
    if obj_a < obj_b - _KEEP_EPS:
        return False
    if len(edges_a) != len(edges_b):
        return len(edges_a) < len(edges_b)
    return sorted(nodes_a) < sorted(nodes_b)


def solve_approx(inst: PcstInstance, backend: str | None = None) -> PcstSolution:
    """Connected prized subgraph via moat growth and strong pruning.

    Rooted instances always return a subgraph containing the root (at worst
    the root alone, objective >= 0). Deterministic for a given instance.
    Instances with live edge prizes are folded internally and mapped back.
    """
    if any(p > 0.0 for p in inst.edge_prizes) and not inst.is_folded:
        folded, fmap = fold_edge_prizes(inst)
        return fmap.unfold(solve_approx(folded, backend=backend))

    virtuals = frozenset(inst.virtual_nodes)
    merge_edges = _grow(inst, backend)
    forest_adj = _tree_adjacency(inst, merge_edges)

    if inst.root is not None:
        value, nodes, edges = _strong_prune(inst, forest_adj, inst.root, virtuals)
        return PcstSolution(
            nodes=frozenset(nodes), edge_indices=tuple(edges), objective=value
        )

    best = (0.0, (), frozenset())  # empty solution baseline
    for comp in _component_of(inst.n, merge_edges, inst):
        if sum(inst.node_prizes[v] for v in comp) <= 0.0:
            continue
        real = [v for v in comp if v not in virtuals]
        if not real:
            continue
        r = _best_root(inst, comp, forest_adj, virtuals)
        value, nodes, edges = _strong_prune(inst, forest_adj, r, virtuals)
        if _better(value, edges, nodes, best[0], best[1], best[2]):
            best = (value, tuple(edges), frozenset(nodes))
    return PcstSolution(nodes=best[2], edge_indices=best[1], objective=best[0])
