import numpy as np
import pytest

from graphguide.embeddings import EmbeddingVector, GraphEmbeddings, embed_graph
from graphguide.retrieval import UnknownNodeError, prize_of_rank, retrieve


def embeddings_from_matrix(node_ids, node_matrix, edge_matrix=None):
    node_matrix = np.asarray(node_matrix, dtype=np.float32)
    node_matrix = node_matrix / np.linalg.norm(node_matrix, axis=1, keepdims=True)
    if edge_matrix is None:
        edge_matrix = np.zeros((0, node_matrix.shape[1]), dtype=np.float32)
    else:
        edge_matrix = np.asarray(edge_matrix, dtype=np.float32)
        edge_matrix = edge_matrix / np.linalg.norm(edge_matrix, axis=1, keepdims=True)
    return GraphEmbeddings(
        graph_id="t", embedder_id="test", d=node_matrix.shape[1],
        node_ids=tuple(node_ids), node_matrix=node_matrix, edge_matrix=edge_matrix,
    )


def brute_force_rank(ids, matrix, zq, k):
    sims = matrix @ zq.values
    ranked = sorted(zip(ids, sims), key=lambda p: (-p[1], p[0]))
    return [(int(i), float(s)) for i, s in ranked[:k]]


class TestPrizeOfRank:
    def test_top_rank_gets_k(self):
        assert prize_of_rank(15, 0) == 15.0

    def test_last_in_set_gets_one(self):
        assert prize_of_rank(15, 14) == 1.0

    def test_k_one(self):
        assert prize_of_rank(1, 0) == 1.0

    def test_rank_at_k_rejected(self):
        with pytest.raises(ValueError):
            prize_of_rank(5, 5)

    def test_negative_rank_rejected(self):
        with pytest.raises(ValueError):
            prize_of_rank(5, -1)

    def test_monotone_in_rank(self):
        prizes = [prize_of_rank(10, r) for r in range(10)]
        assert prizes == sorted(prizes, reverse=True)
        assert min(prizes) == 1.0


class TestRetrieve:
    def test_query_equal_to_node_vector_ranks_it_first(self, lead_graph, embedder):
        ge = embed_graph(embedder, lead_graph)
        zq = ge.node_vector(4)
        result = retrieve(ge, zq, k=3)
        assert result.top_nodes[0][0] == 4
        assert result.top_nodes[0][1] == pytest.approx(1.0, abs=1e-6)

    def test_k15_caps_result_size(self, lead_graph, embedder):
        ge = embed_graph(embedder, lead_graph)
        zq = ge.node_vector(0)
        result = retrieve(ge, zq, k=15)
        assert len(result.top_nodes) == 7  # k > |V|: all ranked, no padding
        assert len(result.top_edges) == 6

    def test_hand_set_vectors_with_pinning(self):
        # Node 0 is the pinned current state but ranks last by similarity;
        # nodes 3 and 1 are the top-2. Expected prizes {0: 3, 3: 2, 1: 1}.
        zq = EmbeddingVector(np.array([1.0, 0.0, 0.0], dtype=np.float32))
        matrix = [
            [-1.0, 0.0, 0.0],   # node 0: cosine -1
            [0.8, 0.6, 0.0],    # node 1: 0.8
            [0.5, 0.866, 0.0],  # node 2: 0.5
            [1.0, 0.0, 0.0],    # node 3: 1.0
            [0.0, 1.0, 0.0],    # node 4: 0.0
        ]
        ge = embeddings_from_matrix([0, 1, 2, 3, 4], matrix)
        result = retrieve(ge, zq, k=2, current_node=0)
        assert [nid for nid, _ in result.top_nodes] == [3, 1]
        assert result.node_prizes == {3: 2.0, 1: 1.0, 0: 3.0}
        assert result.pinned_node == 0

    def test_pinned_prize_dominates_rank_prizes(self, lead_graph, embedder):
        ge = embed_graph(embedder, lead_graph)
        zq = ge.node_vector(555)
        result = retrieve(ge, zq, k=7, current_node=0)
        assert result.node_prizes[0] == 8.0
        others = [p for nid, p in result.node_prizes.items() if nid != 0]
        assert all(p < result.node_prizes[0] for p in others)

    def test_pinning_overrides_own_rank_prize(self):
        zq = EmbeddingVector(np.eye(3, dtype=np.float32)[0])
        ge = embeddings_from_matrix([0, 1], [[1.0, 0, 0], [0.9, 0.1, 0]])
        result = retrieve(ge, zq, k=2, current_node=0)
        # node 0 ranks first (prize 2) but the pin lifts it to k + 1 = 3
        assert result.node_prizes[0] == 3.0

    def test_unknown_current_node(self, lead_graph, embedder):
        ge = embed_graph(embedder, lead_graph)
        with pytest.raises(UnknownNodeError):
            retrieve(ge, ge.node_vector(0), k=3, current_node=12345)

    def test_k_must_be_positive(self, lead_graph, embedder):
        ge = embed_graph(embedder, lead_graph)
        with pytest.raises(ValueError):
            retrieve(ge, ge.node_vector(0), k=0)

    def test_ties_break_by_ascending_id(self):
        zq = EmbeddingVector(np.eye(3, dtype=np.float32)[0])
        same = [1.0, 0.0, 0.0]
        ge = embeddings_from_matrix([7, 3, 9], [same, same, same])
        result = retrieve(ge, zq, k=3)
        assert [nid for nid, _ in result.top_nodes] == [3, 7, 9]

    def test_matches_brute_force_with_ties(self):
        rng = np.random.default_rng(4)
        pool = rng.normal(size=(12, 16)).astype(np.float32)
        rows = pool[rng.integers(0, 12, size=80)]  # duplicates force ties
        ids = list(range(80))
        ge = embeddings_from_matrix(ids, rows)
        for _ in range(25):
            zq = EmbeddingVector(rng.normal(size=16).astype(np.float32))
            expected = brute_force_rank(ids, ge.node_matrix, zq, 10)
            got = list(retrieve(ge, zq, k=10).top_nodes)
            assert got == expected

    def test_edge_ranking_same_contract(self, lead_graph, embedder):
        ge = embed_graph(embedder, lead_graph)
        zq = ge.edge_vector(2)  # "Click Create Lead"
        result = retrieve(ge, zq, k=3)
        assert result.top_edges[0][0] == 2
        assert result.top_edges[0][1] == pytest.approx(1.0, abs=1e-6)
        assert result.edge_prizes[2] == 3.0

    def test_prize_monotonicity(self, lead_graph, embedder):
        ge = embed_graph(embedder, lead_graph)
        result = retrieve(ge, ge.node_vector(511), k=5)
        prizes = [result.node_prizes[nid] for nid, _ in result.top_nodes]
        assert prizes == sorted(prizes, reverse=True)
