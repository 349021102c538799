"""Pipeline orchestration: graphs in, grounded answers out.

One Engine holds loaded graphs with their embeddings and wires together
query embedding, retrieval, subgraph extraction, textualization, and the
completion client, timing each stage. The HTTP service, the CLI, and the
eval harness all drive this one object.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass, field

from graphguide.embeddings import Embedder, GraphEmbeddings, embed_graph, embed_text
from graphguide.graph import GraphStats, StateActionGraph, graph_stats
from graphguide.llm import CompletionRequest, CompletionResponse, LlmClient
from graphguide.pcst import PcstConfig, Subgraph, extract_subgraph
from graphguide.retrieval import RetrievalResult, retrieve
from graphguide.textualize import (
    PromptBundle,
    PromptConfig,
    build_prompt,
    estimate_tokens,
    textualize,
)


class UnknownGraphError(KeyError):
    """graph_id not loaded."""


@dataclass(frozen=True)
class EngineConfig:
    k_default: int = 15
    edge_cost: float = 1.0
    token_budget: int = 8000
    system_prompt: str | None = None
    model_id: str = "mock"
    max_answer_tokens: int = 1024
    cache_dir: str | None = None

    def prompt_config(self) -> PromptConfig:
        if self.system_prompt is None:
            return PromptConfig(token_budget=self.token_budget)
        return PromptConfig(system_prompt=self.system_prompt, token_budget=self.token_budget)

    def pcst_config(self) -> PcstConfig:
        return PcstConfig(edge_cost=self.edge_cost)


@dataclass(frozen=True)
class GraphEntry:
    graph: StateActionGraph
    embeddings: GraphEmbeddings
    stats: GraphStats
    fingerprint: str


@dataclass(frozen=True)
class RetrievalPayload:
    retrieval: RetrievalResult
    subgraph: Subgraph
    subgraph_text: str
    timings: dict[str, float]


@dataclass(frozen=True)
class QueryPayload:
    answer: str
    prompt: PromptBundle
    subgraph: Subgraph | None
    retrieval: RetrievalResult | None
    subgraph_text: str
    timings: dict[str, float] = field(default_factory=dict)


def graph_fingerprint(graph: StateActionGraph) -> str:
    from graphguide.graph import adjacency_document, nodes_document

    blob = json.dumps(
        [nodes_document(graph), adjacency_document(graph)], sort_keys=True
    ).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


class Engine:
    def __init__(self, embedder: Embedder, llm: LlmClient | None = None,
                 cfg: EngineConfig | None = None):
        self.embedder = embedder
        self.llm = llm
        self.cfg = cfg or EngineConfig()
        self._graphs: dict[str, GraphEntry] = {}
        self._lock = threading.Lock()

    # -- graph store ------------------------------------------------------

    def add_graph(self, graph: StateActionGraph) -> GraphEntry:
        """Embed and store a graph. Re-uploading identical content is a no-op."""
        fingerprint = graph_fingerprint(graph)
        with self._lock:
            existing = self._graphs.get(graph.graph_id)
            if existing is not None and existing.fingerprint == fingerprint:
                return existing
        embeddings = embed_graph(self.embedder, graph, cache_dir=self.cfg.cache_dir)
        entry = GraphEntry(
            graph=graph,
            embeddings=embeddings,
            stats=graph_stats(graph),
            fingerprint=fingerprint,
        )
        with self._lock:
            self._graphs[graph.graph_id] = entry
        return entry

    def entry(self, graph_id: str) -> GraphEntry:
        try:
            return self._graphs[graph_id]
        except KeyError:
            raise UnknownGraphError(graph_id) from None

    def graph_ids(self) -> list[str]:
        return sorted(self._graphs)

    # -- pipeline stages ----------------------------------------------------

    def retrieve(
        self,
        graph_id: str,
        question: str,
        k: int | None = None,
        current_node: int | None = None,
    ) -> RetrievalPayload:
        """Embed the question, rank nodes/edges, extract the prized subgraph.

        current_node=None pins the graph's home node (users start somewhere).
        """
        entry = self.entry(graph_id)
        k = k or self.cfg.k_default
        if current_node is None:
            current_node = entry.graph.home_node
        timings: dict[str, float] = {}

        t0 = time.perf_counter()
        zq = embed_text(self.embedder, question)
        timings["embed_query"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        result = retrieve(entry.embeddings, zq, k, current_node=current_node,
                          query_text=question)
        timings["retrieve"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        subgraph = extract_subgraph(entry.graph, result, self.cfg.pcst_config())
        timings["pcst"] = time.perf_counter() - t0

        text = textualize(subgraph, entry.graph)
        return RetrievalPayload(
            retrieval=result, subgraph=subgraph, subgraph_text=text, timings=timings
        )

    def query(
        self,
        graph_id: str,
        question: str,
        k: int | None = None,
        current_node: int | None = None,
        bare: bool = False,
        llm: LlmClient | None = None,
    ) -> QueryPayload:
        """Answer a question, grounded in the graph unless bare=True."""
        client = llm or self.llm
        if client is None:
            raise ValueError("no completion client configured")
        total_start = time.perf_counter()

        if bare:
            if not question.strip():
                raise ValueError("question must be non-empty")
            self.entry(graph_id)  # still validates the id
            prompt_cfg = self.cfg.prompt_config()
            user_content = f"User question: {question}"
            full_prompt = f"{prompt_cfg.system_prompt}\n\n{user_content}"
            bundle = PromptBundle(
                system_prompt=prompt_cfg.system_prompt,
                subgraph_text="",
                question=question,
                user_content=user_content,
                full_prompt=full_prompt,
                token_estimate=estimate_tokens(full_prompt),
            )
            retrieval_payload = None
        else:
            retrieval_payload = self.retrieve(
                graph_id, question, k=k, current_node=current_node
            )
            bundle = build_prompt(
                retrieval_payload.subgraph_text, question, self.cfg.prompt_config()
            )

        timings = dict(retrieval_payload.timings) if retrieval_payload else {}
        t0 = time.perf_counter()
        try:
            response: CompletionResponse = client.complete(CompletionRequest(
                model_id=self.cfg.model_id,
                system=bundle.system_prompt,
                user=bundle.user_content,
                max_tokens=self.cfg.max_answer_tokens,
            ))
        except Exception as exc:
            # callers surface the stage timings accumulated up to the failure
            timings["llm"] = time.perf_counter() - t0
            timings["total"] = time.perf_counter() - total_start
            exc.stage_timings = timings
            raise
        timings["llm"] = time.perf_counter() - t0
        timings["total"] = time.perf_counter() - total_start

        return QueryPayload(
            answer=response.text,
            prompt=bundle,
            subgraph=retrieval_payload.subgraph if retrieval_payload else None,
            retrieval=retrieval_payload.retrieval if retrieval_payload else None,
            subgraph_text=retrieval_payload.subgraph_text if retrieval_payload else "",
            timings=timings,
        )
