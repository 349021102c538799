"""Exact PCST solver for small instances: branch-and-bound over edge subsets.

Serves as the production path on tiny graphs and as the optimality reference
the approximate solver is measured against. The enumeration bound is on edge
count after folding; larger instances must go through solve_approx.

Decisions are made over selection units: a unit is a single edge, or an
atomic pair of half-edges from edge folding (selecting the pair is the only
way to collect the virtual node's prize). Ties between equal-objective
solutions are broken toward fewer edges, then the lexicographically smallest
node set.
"""

from __future__ import annotations

from graphguide.pcst.instance import InstanceTooLargeError, PcstInstance, PcstSolution

EXACT_EDGE_LIMIT = 18
_EPS = 1e-12


class _Unit:
    """One selection decision: an edge or a folded half-edge pair."""

    __slots__ = ("edge_ids", "endpoints", "cost", "edge_prize", "gain_ub")

    def __init__(self, edge_ids, endpoints, cost, edge_prize):
        self.edge_ids = edge_ids
        self.endpoints = endpoints
        self.cost = cost
        self.edge_prize = edge_prize
        self.gain_ub = 0.0


def _component_nodes(edge_list, endpoints_of, root):
    """Node set of the selection if it forms one connected component
    (containing the root when rooted), else None."""
    nodes: set[int] = set()
    for i in edge_list:
        u, v = endpoints_of[i]
        nodes.add(u)
        nodes.add(v)
    if not nodes:
        return frozenset() if root is None else frozenset({root})
    if root is not None and root not in nodes:
        return None
    parent = {v: v for v in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in edge_list:
        u, v = endpoints_of[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    first = find(next(iter(nodes)))
    if any(find(v) != first for v in nodes):
        return None
    return frozenset(nodes)


def _better(obj_a, edges_a, nodes_a, obj_b, edges_b, nodes_b) -> bool:
    """True if solution A beats B: higher objective, then fewer edges, then
    lexicographically smaller sorted node set."""
    if obj_a > obj_b + _EPS:
        return True
    if obj_a < obj_b - _EPS:
        return False
    if len(edges_a) != len(edges_b):
        return len(edges_a) < len(edges_b)
    return sorted(nodes_a) < sorted(nodes_b)


def _build_units(inst: PcstInstance) -> list[_Unit]:
    units: list[_Unit] = []
    in_pair: set[int] = set()
    for (a, b), w in zip(inst.edge_pairs, inst.virtual_nodes):
        in_pair.update((a, b))
        ua, va = inst.edges[a]
        ub, vb = inst.edges[b]
        endpoints = tuple(dict.fromkeys((ua, va, ub, vb)))
        cost = inst.costs[a] + inst.costs[b]
        prize = inst.edge_prizes[a] + inst.edge_prizes[b]
        units.append(_Unit((a, b), endpoints, cost, prize))
        assert w in endpoints
    for i, (u, v) in enumerate(inst.edges):
        if i not in in_pair:
            units.append(_Unit((i,), (u, v), inst.costs[i], inst.edge_prizes[i]))
    for unit in units:
        unit.gain_ub = unit.edge_prize - unit.cost + sum(
            inst.node_prizes[v] for v in unit.endpoints
        )
    # Trying high-gain units first tightens the bound early.
    units.sort(key=lambda u: (-u.gain_ub, u.edge_ids))
    return units


def solve_exact(inst: PcstInstance, edge_limit: int = EXACT_EDGE_LIMIT) -> PcstSolution:
    """Globally optimal connected prized subgraph by branch-and-bound.

    Rooted instances optimize over connected subgraphs containing the root;
    unrooted over all connected subgraphs plus the empty solution. The result
    is deterministic, including tie handling.
    """
    if len(inst.edges) > edge_limit:
        raise InstanceTooLargeError(
            f"{len(inst.edges)} edges exceeds the exact bound of {edge_limit}; "
            "use solve_approx for this instance"
        )

    units = _build_units(inst)
    n_units = len(units)
    suffix_ub = [0.0] * (n_units + 1)
    for i in range(n_units - 1, -1, -1):
        suffix_ub[i] = suffix_ub[i + 1] + max(0.0, units[i].gain_ub)

    root = inst.root
    prizes = inst.node_prizes
    endpoints_of = inst.edges

    if root is not None:
        best = [prizes[root], (), frozenset({root})]
        seed_nodes = {root}
        seed_value = prizes[root]
    else:
        best = [0.0, (), frozenset()]
        virtuals = set(inst.virtual_nodes)
        for v in range(inst.n):
            # A virtual node alone would collect an edge prize without the
            # edge; only real nodes stand as single-node solutions.
            if v in virtuals:
                continue
            if _better(prizes[v], (), {v}, best[0], best[1], best[2]):
                best = [prizes[v], (), frozenset({v})]
        seed_nodes = set()
        seed_value = 0.0

    chosen: list[int] = []
    touched = set(seed_nodes)

    def dfs(i: int, value: float) -> None:
        if value + suffix_ub[i] < best[0] - _EPS:
            return
        if i == n_units:
            nodes = _component_nodes(chosen, endpoints_of, root)
            if nodes is None:
                return
            if _better(value, chosen, nodes, best[0], best[1], best[2]):
                best[0] = value
                best[1] = tuple(chosen)
                best[2] = nodes
            return
        unit = units[i]
        newly = [v for v in unit.endpoints if v not in touched]
        gain = unit.edge_prize - unit.cost + sum(prizes[v] for v in newly)
        touched.update(newly)
        chosen.extend(unit.edge_ids)
        dfs(i + 1, value + gain)
        for v in newly:
            touched.discard(v)
        del chosen[len(chosen) - len(unit.edge_ids):]
        dfs(i + 1, value)

    dfs(0, seed_value)

    return PcstSolution(
        nodes=best[2],
        edge_indices=tuple(sorted(best[1])),
        objective=best[0],
    )
