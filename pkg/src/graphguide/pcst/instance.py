"""Prize-collecting Steiner tree instances and edge-prize folding.

An instance is an undirected working graph with non-negative node prizes,
strictly positive edge costs, optional non-negative edge prizes, and an
optional root that any solution must contain. Solvers maximize

    sum(node prizes of selected nodes)
    + sum(edge prizes of selected edges)
    - sum(costs of selected edges)

over connected subgraphs. Edge prizes are handled by folding: a prized edge
is replaced by a virtual node carrying the prize, tied to the edge's
endpoints by two half-edges of half the cost. The two half-edges are an
atomic pair - collecting the virtual prize through a single half-edge would
misprice the original objective, so solvers treat pairs as all-or-nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class InstanceTooLargeError(ValueError):
    """The instance exceeds the exact solver's enumeration bound; use solve_approx."""


@dataclass(frozen=True)
class PcstInstance:
    """Undirected PCST instance over nodes 0..n-1. Self-loops are not allowed;
    they are resolved outside the solver (a loop never affects connectivity)."""

    n: int
    edges: tuple[tuple[int, int], ...]
    costs: tuple[float, ...]
    node_prizes: tuple[float, ...]
    edge_prizes: tuple[float, ...] = ()
    root: int | None = None
    num_clusters: int = 1
    # Folding metadata: pairs of half-edge indices selected atomically, and
    # the virtual node each pair collects its prize through.
    edge_pairs: tuple[tuple[int, int], ...] = ()
    virtual_nodes: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("instance needs at least one node")
        if self.num_clusters != 1:
            raise ValueError("only single-component solutions are supported (num_clusters=1)")
        if len(self.costs) != len(self.edges):
            raise ValueError("costs must align with edges")
        if not self.edge_prizes:
            object.__setattr__(self, "edge_prizes", (0.0,) * len(self.edges))
        if len(self.edge_prizes) != len(self.edges):
            raise ValueError("edge_prizes must align with edges")
        if len(self.node_prizes) != self.n:
            raise ValueError("node_prizes must have one entry per node")
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) endpoint out of range")
            if u == v:
                raise ValueError(f"self-loop ({u}, {v}) not allowed in a working instance")
        for c in self.costs:
            if not c > 0.0:
                raise ValueError("edge costs must be strictly positive")
        for p in self.node_prizes:
            if p < 0.0:
                raise ValueError("node prizes must be non-negative")
        for p in self.edge_prizes:
            if p < 0.0:
                raise ValueError("edge prizes must be non-negative")
        if self.root is not None and not (0 <= self.root < self.n):
            raise ValueError(f"root {self.root} not in graph")
        if len(self.virtual_nodes) != len(self.edge_pairs):
            raise ValueError("virtual_nodes must align with edge_pairs")

    @property
    def is_folded(self) -> bool:
        return bool(self.edge_pairs)


@dataclass(frozen=True)
class PcstSolution:
    """A connected prized subgraph of one instance."""

    nodes: frozenset[int]
    edge_indices: tuple[int, ...]
    objective: float


def solution_value(inst: PcstInstance, nodes, edge_indices) -> float:
    """Objective of an arbitrary node/edge selection (no connectivity check)."""
    total = sum(inst.node_prizes[v] for v in nodes)
    for i in edge_indices:
        total += inst.edge_prizes[i] - inst.costs[i]
    return total


@dataclass(frozen=True)
class FoldMap:
    """Reverse mapping from a folded instance's solutions to the original."""

    original: PcstInstance
    kept_edge_of: tuple[int, ...]  # folded edge idx -> original edge idx (kept edges)
    virtual_edge_of: dict[int, int] = field(default_factory=dict)  # virtual node -> original edge idx
    pair_of_virtual: dict[int, tuple[int, int]] = field(default_factory=dict)

    def unfold(self, solution: PcstSolution) -> PcstSolution:
        """Translate a solution over the folded instance back to the original.

        Virtual nodes become their original edges. A virtual node must appear
        with both of its half-edges; solvers guarantee this (dangling virtual
        nodes can never be part of a correctly priced solution).
        """
        nodes = set()
        edges = []
        selected = set(solution.edge_indices)
        for v in solution.nodes:
            if v in self.virtual_edge_of:
                half_a, half_b = self.pair_of_virtual[v]
                if half_a not in selected or half_b not in selected:
                    raise RuntimeError(f"dangling virtual node {v} in folded solution")
                edges.append(self.virtual_edge_of[v])
            else:
                nodes.add(v)
        n_kept = len(self.kept_edge_of)
        for i in solution.edge_indices:
            if i < n_kept:
                edges.append(self.kept_edge_of[i])
        return PcstSolution(
            nodes=frozenset(nodes),
            edge_indices=tuple(sorted(edges)),
            objective=solution.objective,
        )


def fold_edge_prizes(inst: PcstInstance) -> tuple[PcstInstance, FoldMap]:
    """Replace each prized edge with a prized virtual node and two half-edges.

    Instances with no edge prizes are returned unchanged. The transformation
    preserves the objective exactly: selecting the pair costs the original
    edge cost and collects the original edge prize via the virtual node.
    """
    identity = FoldMap(
        original=inst,
        kept_edge_of=tuple(range(len(inst.edges))),
    )
    if all(p == 0.0 for p in inst.edge_prizes):
        return inst, identity

    kept_edges: list[tuple[int, int]] = []
    kept_costs: list[float] = []
    kept_edge_of: list[int] = []
    prized: list[int] = []
    for i, (e, c, p) in enumerate(zip(inst.edges, inst.costs, inst.edge_prizes)):
        if p > 0.0:
            prized.append(i)
        else:
            kept_edges.append(e)
            kept_costs.append(c)
            kept_edge_of.append(i)

    n = inst.n
    node_prizes = list(inst.node_prizes)
    edges = kept_edges
    costs = kept_costs
    pairs: list[tuple[int, int]] = []
    virtuals: list[int] = []
    virtual_edge_of: dict[int, int] = {}
    pair_of_virtual: dict[int, tuple[int, int]] = {}
    for i in prized:
        u, v = inst.edges[i]
        w = n
        n += 1
        node_prizes.append(inst.edge_prizes[i])
        half = inst.costs[i] / 2.0
        a_idx = len(edges)
        edges.append((u, w))
        costs.append(half)
        b_idx = len(edges)
        edges.append((w, v))
        costs.append(half)
        pairs.append((a_idx, b_idx))
        virtuals.append(w)
        virtual_edge_of[w] = i
        pair_of_virtual[w] = (a_idx, b_idx)

    folded = PcstInstance(
        n=n,
        edges=tuple(edges),
        costs=tuple(costs),
        node_prizes=tuple(node_prizes),
        edge_prizes=(0.0,) * len(edges),
        root=inst.root,
        edge_pairs=tuple(pairs),
        virtual_nodes=tuple(virtuals),
    )
    fold_map = FoldMap(
        original=inst,
        kept_edge_of=tuple(kept_edge_of),
        virtual_edge_of=virtual_edge_of,
        pair_of_virtual=pair_of_virtual,
    )
    return folded, fold_map
