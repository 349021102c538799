import random

import pytest

from graphguide.embeddings import embed_graph, embed_text
from graphguide.graph import EdgeRecord, NodeRecord, build_graph
from graphguide.pcst import (
    InstanceTooLargeError,
    PcstConfig,
    PcstInstance,
    extract_subgraph,
    fold_edge_prizes,
    growth_backends,
    is_connected,
    solution_value,
    solve_approx,
    solve_exact,
    solve_instance,
)
from graphguide.retrieval import RetrievalResult, retrieve

from pcst_oracle import enumerate_optimum, random_instance

BACKENDS = sorted(growth_backends())


def path_instance(prize_c: float, root=0) -> PcstInstance:
    return PcstInstance(
        n=3, edges=((0, 1), (1, 2)), costs=(1.0, 1.0),
        node_prizes=(0.0, 0.0, prize_c), root=root,
    )


def star_instance() -> PcstInstance:
    return PcstInstance(
        n=4, edges=((0, 1), (0, 2), (0, 3)), costs=(1.0, 1.0, 1.0),
        node_prizes=(0.0, 2.0, 0.5, 3.0), root=0,
    )


def tree_instance() -> PcstInstance:
    # root 0 - 1(1.2) - 2(3.0); root 0 - 3(0.2)
    return PcstInstance(
        n=4, edges=((0, 1), (1, 2), (0, 3)), costs=(1.0, 1.0, 1.0),
        node_prizes=(0.0, 1.2, 3.0, 0.2), root=0,
    )


CURATED = [
    (path_instance(5.0), 3.0),
    (path_instance(1.5), 0.0),
    (star_instance(), 3.0),
    (tree_instance(), 2.2),
]


class TestFold:
    def test_prized_edge_becomes_virtual_node(self):
        inst = PcstInstance(n=2, edges=((0, 1),), costs=(1.0,),
                            node_prizes=(0.0, 0.0), edge_prizes=(3.0,))
        folded, fmap = fold_edge_prizes(inst)
        assert folded.n == 3
        assert folded.edges == ((0, 2), (2, 1))
        assert folded.costs == (0.5, 0.5)
        assert folded.node_prizes == (0.0, 0.0, 3.0)
        assert folded.edge_pairs == ((0, 1),)
        assert folded.virtual_nodes == (2,)
        assert fmap.virtual_edge_of == {2: 0}

    def test_zero_edge_prizes_is_identity(self):
        inst = path_instance(5.0)
        folded, fmap = fold_edge_prizes(inst)
        assert folded is inst
        sol = solve_exact(folded)
        assert fmap.unfold(sol) == sol

    def test_subdivided_pair_selected_iff_prize_beats_cost(self):
        for prize, expect_edge in [(3.0, True), (0.9, False)]:
            inst = PcstInstance(n=2, edges=((0, 1),), costs=(1.0,),
                                node_prizes=(0.0, 0.0), edge_prizes=(prize,), root=0)
            folded, fmap = fold_edge_prizes(inst)
            sol = fmap.unfold(solve_exact(folded))
            if expect_edge:
                assert sol.edge_indices == (0,)
                assert sol.objective == pytest.approx(prize - 1.0)
            else:
                assert sol.edge_indices == ()
                assert sol.nodes == frozenset({0})
                assert sol.objective == 0.0

    def test_mixed_prized_and_plain_edges(self):
        inst = PcstInstance(
            n=3, edges=((0, 1), (1, 2)), costs=(1.0, 1.0),
            node_prizes=(0.0, 0.0, 0.0), edge_prizes=(0.0, 2.5), root=0,
        )
        folded, fmap = fold_edge_prizes(inst)
        assert len(folded.edges) == 3  # kept edge + two halves
        sol = fmap.unfold(solve_exact(folded))
        # collecting the prized edge requires traversing the plain one:
        # 2.5 - 1.0 - 1.0 = 0.5 > 0
        assert sol.edge_indices == (0, 1)
        assert sol.objective == pytest.approx(0.5)


class TestExact:
    def test_path_collects_distant_prize(self):
        sol = solve_exact(path_instance(5.0))
        assert sol.nodes == frozenset({0, 1, 2})
        assert sol.edge_indices == (0, 1)
        assert sol.objective == pytest.approx(3.0)

    def test_path_stays_home_when_prize_too_small(self):
        sol = solve_exact(path_instance(1.5))
        assert sol.nodes == frozenset({0})
        assert sol.edge_indices == ()
        assert sol.objective == 0.0

    def test_star_keeps_profitable_leaves_only(self):
        sol = solve_exact(star_instance())
        assert sol.nodes == frozenset({0, 1, 3})
        assert sol.objective == pytest.approx(3.0)

    def test_size_bound_error_mentions_approx(self):
        n = 20
        edges = tuple((i, i + 1) for i in range(n - 1))
        inst = PcstInstance(n=n, edges=edges, costs=(1.0,) * len(edges),
                            node_prizes=(1.0,) * n, root=0)
        with pytest.raises(InstanceTooLargeError, match="solve_approx"):
            solve_exact(inst)

    def test_unrooted_empty_when_nothing_profitable(self):
        inst = PcstInstance(n=3, edges=((0, 1), (1, 2)), costs=(1.0, 1.0),
                            node_prizes=(0.0, 0.0, 0.0))
        sol = solve_exact(inst)
        assert sol.nodes == frozenset()
        assert sol.objective == 0.0

    def test_unrooted_picks_best_single_node(self):
        inst = PcstInstance(n=3, edges=((0, 1), (1, 2)), costs=(5.0, 5.0),
                            node_prizes=(1.0, 4.0, 2.0))
        sol = solve_exact(inst)
        assert sol.nodes == frozenset({1})
        assert sol.objective == pytest.approx(4.0)

    def test_monotone_in_node_prize(self):
        base = star_instance()
        previous = solve_exact(base).objective
        for bump in (1.0, 2.0, 5.0):
            prizes = list(base.node_prizes)
            prizes[2] += bump
            bumped = PcstInstance(n=base.n, edges=base.edges, costs=base.costs,
                                  node_prizes=tuple(prizes), root=base.root)
            objective = solve_exact(bumped).objective
            assert objective >= previous - 1e-12
            previous = objective


class TestApprox:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_curated_suite_matches_exact(self, backend):
        for inst, expected in CURATED:
            exact = solve_exact(inst)
            approx = solve_approx(inst, backend=backend)
            assert exact.objective == pytest.approx(expected)
            assert approx.objective == pytest.approx(expected)
            assert approx.nodes == exact.nodes
            assert approx.edge_indices == exact.edge_indices

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_folded_pair_both_halves_or_neither(self, backend):
        inst = PcstInstance(n=2, edges=((0, 1),), costs=(1.0,),
                            node_prizes=(0.0, 0.0), edge_prizes=(3.0,), root=0)
        folded, fmap = fold_edge_prizes(inst)
        sol = fmap.unfold(solve_approx(folded, backend=backend))
        assert sol.edge_indices == (0,)
        assert sol.objective == pytest.approx(2.0)

    def test_oracle_sweep_rooted(self):
        """200 random rooted instances: approx connected, rooted, bounded."""
        rng = random.Random(20260809)
        ratios = []
        suboptimal = 0
        for _ in range(200):
            inst = random_instance(rng, rooted=True)
            folded, fmap = fold_edge_prizes(inst)
            exact = fmap.unfold(solve_exact(folded))
            approx = fmap.unfold(solve_approx(folded))
            assert inst.root in approx.nodes
            assert approx.objective >= -1e-12
            assert approx.objective <= exact.objective + 1e-9
            assert is_connected(approx.nodes, [inst.edges[i] for i in approx.edge_indices])
            recomputed = solution_value(inst, approx.nodes, approx.edge_indices)
            assert recomputed == pytest.approx(approx.objective, abs=1e-9)
            if exact.objective > 1e-9:
                ratio = approx.objective / exact.objective
                ratios.append(ratio)
                assert ratio >= 0.5, f"approx ratio {ratio} below 0.5 on {inst}"
                if ratio < 1.0 - 1e-9:
                    suboptimal += 1
        mean_ratio = sum(ratios) / len(ratios)
        print(f"\napprox/exact mean ratio {mean_ratio:.4f} "
              f"({len(ratios) - suboptimal}/{len(ratios)} optimal)")
        assert mean_ratio > 0.9

    @pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
    def test_backends_agree_exactly(self):
        rng = random.Random(99)
        for trial in range(80):
            inst = random_instance(rng, rooted=(trial % 2 == 0))
            folded, _ = fold_edge_prizes(inst)
            solutions = [solve_approx(folded, backend=b) for b in BACKENDS]
            first = solutions[0]
            for other in solutions[1:]:
                assert other.nodes == first.nodes
                assert other.edge_indices == first.edge_indices
                assert other.objective == first.objective

    def test_no_virtual_node_ever_returned(self):
        rng = random.Random(5)
        for _ in range(40):
            inst = random_instance(rng, rooted=True)
            folded, fmap = fold_edge_prizes(inst)
            sol = fmap.unfold(solve_approx(folded))
            assert all(v < inst.n for v in sol.nodes)
            assert all(i < len(inst.edges) for i in sol.edge_indices)


class TestExactVsOracle:
    def test_exact_is_optimal_on_random_instances(self):
        rng = random.Random(31415)
        for rooted in (True, False):
            for _ in range(40):
                inst = random_instance(rng, rooted=rooted, max_nodes=8, max_edges=12)
                optimum = enumerate_optimum(inst)
                folded, fmap = fold_edge_prizes(inst)
                sol = fmap.unfold(solve_exact(folded))
                assert sol.objective == pytest.approx(optimum[0], abs=1e-9)


def lead_retrieval(lead_graph, embedder, question, k=15, current_node=0):
    ge = embed_graph(embedder, lead_graph)
    zq = embed_text(embedder, question)
    return retrieve(ge, zq, k=k, current_node=current_node, query_text=question)


class TestExtractSubgraph:
    def test_lead_fixture_full_reconstruction(self, lead_graph, embedder):
        r = lead_retrieval(lead_graph, embedder, "How to create a lead?")
        sg = extract_subgraph(lead_graph, r)
        assert sg.nodes == (0, 3, 4, 374, 511, 549, 555)
        assert len(sg.edges) == 6
        assert sg.connected

    def test_empty_retrieval_empty_subgraph(self, lead_graph):
        r = RetrievalResult(query="", top_nodes=(), top_edges=(),
                            node_prizes={}, edge_prizes={}, pinned_node=None, k=1)
        sg = extract_subgraph(lead_graph, r)
        assert sg.nodes == ()
        assert sg.edges == ()
        assert sg.objective == 0.0
        assert sg.connected

    def test_no_match_with_pinned_root_gives_root_only(self, lead_graph):
        r = RetrievalResult(query="", top_nodes=(), top_edges=(),
                            node_prizes={0: 16.0}, edge_prizes={}, pinned_node=0, k=15)
        sg = extract_subgraph(lead_graph, r)
        assert sg.nodes == (0,)
        assert sg.edges == ()
        assert sg.objective == pytest.approx(16.0)

    def test_prized_self_loop_reattached(self):
        g = build_graph(
            "g", 0,
            [NodeRecord(0, "home"), NodeRecord(1, "editor")],
            [EdgeRecord(0, 1, "Open Editor", "link"),
             EdgeRecord(1, 1, "Save Draft", "button")],
        )
        r = RetrievalResult(
            query="save", top_nodes=((1, 0.9),), top_edges=((1, 0.95), (0, 0.2)),
            node_prizes={1: 2.0, 0: 3.0}, edge_prizes={1: 2.0, 0: 1.0},
            pinned_node=0, k=2,
        )
        sg = extract_subgraph(g, r)
        assert sg.nodes == (0, 1)
        loops = [e for e in sg.edges if e.src == e.tgt]
        assert len(loops) == 1 and loops[0].action == "Save Draft"

    def test_unprofitable_self_loop_stays_out(self):
        g = build_graph(
            "g", 0,
            [NodeRecord(0, "home")],
            [EdgeRecord(0, 0, "Refresh", "button")],
        )
        r = RetrievalResult(query="", top_nodes=((0, 1.0),), top_edges=((0, 0.4),),
                            node_prizes={0: 2.0}, edge_prizes={0: 0.5},
                            pinned_node=0, k=1)
        sg = extract_subgraph(g, r)
        assert sg.nodes == (0,)
        assert sg.edges == ()

    def test_parallel_directed_edges_reattached_both_ways(self):
        g = build_graph(
            "g", 0,
            [NodeRecord(0, "a"), NodeRecord(1, "b")],
            [EdgeRecord(0, 1, "forward", "link"), EdgeRecord(1, 0, "back", "link")],
        )
        r = RetrievalResult(query="", top_nodes=((1, 0.9),), top_edges=(),
                            node_prizes={1: 5.0, 0: 6.0}, edge_prizes={},
                            pinned_node=0, k=1)
        sg = extract_subgraph(g, r)
        assert sg.nodes == (0, 1)
        assert {(e.src, e.tgt) for e in sg.edges} == {(0, 1), (1, 0)}

    def test_mode_forced_approx_matches_auto_on_small_graph(self, lead_graph, embedder):
        r = lead_retrieval(lead_graph, embedder, "How to create a lead?")
        auto = extract_subgraph(lead_graph, r, PcstConfig(mode="auto"))
        approx = extract_subgraph(lead_graph, r, PcstConfig(mode="approx"))
        assert auto.nodes == approx.nodes
        assert [  # same records
            (e.src, e.tgt, e.action) for e in auto.edges
        ] == [(e.src, e.tgt, e.action) for e in approx.edges]

    def test_solve_instance_dispatches_by_size(self):
        small = path_instance(5.0)
        assert solve_instance(small).objective == pytest.approx(3.0)
        n = 40
        edges = tuple((i, i + 1) for i in range(n - 1))
        big = PcstInstance(n=n, edges=edges, costs=(1.0,) * len(edges),
                           node_prizes=(0.5,) * n, root=0)
        sol = solve_instance(big)  # exceeds the exact bound: approx path
        assert 0 in sol.nodes
        assert sol.objective >= 0.0

    def test_forced_exact_keeps_size_bound(self):
        n = 40
        edges = tuple((i, i + 1) for i in range(n - 1))
        big = PcstInstance(n=n, edges=edges, costs=(1.0,) * len(edges),
                           node_prizes=(0.5,) * n, root=0)
        with pytest.raises(InstanceTooLargeError):
            solve_instance(big, PcstConfig(mode="exact"))
