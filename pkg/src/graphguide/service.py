"""HTTP service: graph management, retrieval debugging, query answering,
and a plain-text metrics endpoint.

Every error response is machine-readable: `{"error": {"class", "stage",
"detail"}}`. Graphs are held in memory (the largest production graphs are a
few thousand nodes); uploads of identical content are idempotent and skip
re-embedding.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from graphguide import graph as graphmod
from graphguide.embeddings import HashingEmbedder, remote_embedder_from_env
from graphguide.engine import Engine, EngineConfig, UnknownGraphError
from graphguide.llm import LlmConfigError, LlmError, MockLlmClient, client_from_env
from graphguide.metrics import MetricsRegistry
from graphguide.retrieval import UnknownNodeError
from graphguide.textualize import PromptBudgetError

logger = logging.getLogger("graphguide.service")

STAGES = ("embed_query", "retrieve", "pcst", "llm", "total")


@dataclass(frozen=True)
class ServiceConfig:
    embedder: str = "local"  # local | remote
    embed_dim: int = 384
    k_default: int = 15
    edge_cost: float = 1.0
    token_budget: int = 8000
    llm_mode: str = "echo"  # echo | fixed | map | remote
    llm_script: str | None = None
    model_id: str = "mock"
    cache_dir: str | None = None

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        path = os.environ.get("SERVICE_CONFIG")
        if not path:
            return cls()
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
        return cls(**doc)


def build_engine(config: ServiceConfig) -> Engine:
    if config.embedder == "remote":
        embedder = remote_embedder_from_env()
    else:
        embedder = HashingEmbedder(d=config.embed_dim)
    if config.llm_mode == "remote":
        llm = client_from_env()
    elif config.llm_script:
        llm = MockLlmClient.from_script(config.llm_script)
    else:
        llm = MockLlmClient(mode=config.llm_mode)
    return Engine(
        embedder,
        llm,
        EngineConfig(
            k_default=config.k_default,
            edge_cost=config.edge_cost,
            token_budget=config.token_budget,
            model_id=config.model_id,
            cache_dir=config.cache_dir,
        ),
    )


class GraphUpload(BaseModel):
    nodes: dict
    adjacency: dict


class RetrieveBody(BaseModel):
    graph_id: str
    question: str
    k: int | None = None
    current_node: int | None = None


class QueryBody(RetrieveBody):
    bare: bool = False


def _error(status: int, error_class: str, stage: str, detail: str, **extra):
    payload = {"error": {"class": error_class, "stage": stage, "detail": detail, **extra}}
    return JSONResponse(status_code=status, content=payload)


def _subgraph_payload(sg) -> dict | None:
    if sg is None:
        return None
    return {
        "nodes": list(sg.nodes),
        "edges": [
            {"src": e.src, "tgt": e.tgt, "action": e.action, "kind": e.kind}
            for e in sg.edges
        ],
        "objective": sg.objective,
        "connected": sg.connected,
    }


def create_app(config: ServiceConfig | None = None, engine: Engine | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    engine = engine or build_engine(config)
    app = FastAPI(title="graphguide", version="0.1.0")
    metrics = MetricsRegistry()
    app.state.engine = engine
    app.state.metrics = metrics
    app.state.query_log = []

    queries_total = metrics.counter("graphguide_queries_total", "Queries answered")
    errors_total = metrics.counter("graphguide_errors_total", "Requests failed")
    graphs_loaded = metrics.gauge("graphguide_graphs_loaded", "Graphs in memory")
    graphs_loaded.set(len(engine.graph_ids()))  # count preloaded graphs too
    stage_hist = {
        stage: metrics.histogram(
            f"graphguide_stage_{stage}_seconds", f"Latency of the {stage} stage"
        )
        for stage in STAGES
    }

    def observe(timings: dict) -> None:
        for stage, value in timings.items():
            if stage in stage_hist:
                stage_hist[stage].observe(value)

    def fail(status, error_class, stage, detail, **extra):
        errors_total.inc(error_class=error_class)
        return _error(status, error_class, stage, detail, **extra)

    @app.post("/v1/graphs")
    def upload_graph(body: GraphUpload):
        try:
            g = graphmod.load_graph(json.dumps(body.nodes), json.dumps(body.adjacency))
        except graphmod.DuplicateNodeError as exc:
            return fail(422, "duplicate-node", "validate", str(exc))
        except graphmod.DanglingEdgeError as exc:
            return fail(422, "dangling-edge", "validate", str(exc))
        except graphmod.GraphParseError as exc:
            return fail(422, "parse-error", "validate", str(exc))
        except graphmod.GraphError as exc:
            return fail(422, "validation-error", "validate", str(exc))
        entry = engine.add_graph(g)
        graphs_loaded.set(len(engine.graph_ids()))
        s = entry.stats
        return {
            "graph_id": g.graph_id,
            "stats": {
                "node_count": s.node_count,
                "edge_count": s.edge_count,
                "reachable_fraction": s.reachable_fraction,
                "max_out_degree": s.max_out_degree,
            },
        }

    @app.post("/v1/retrieve")
    def retrieve_endpoint(body: RetrieveBody):
        if not body.question.strip():
            return fail(422, "empty-question", "validate", "question must be non-empty")
        if body.k is not None and body.k < 1:
            return fail(422, "invalid-k", "validate", "k must be >= 1")
        try:
            payload = engine.retrieve(
                body.graph_id, body.question, k=body.k, current_node=body.current_node
            )
        except UnknownGraphError:
            return fail(404, "unknown-graph", "lookup", f"graph {body.graph_id!r} not loaded")
        except UnknownNodeError as exc:
            return fail(422, "unknown-node", "retrieve", str(exc))
        observe(payload.timings)
        return {
            "top_nodes": [[nid, sim] for nid, sim in payload.retrieval.top_nodes],
            "top_edges": [[idx, sim] for idx, sim in payload.retrieval.top_edges],
            "pinned_node": payload.retrieval.pinned_node,
            "subgraph": _subgraph_payload(payload.subgraph),
            "subgraph_text": payload.subgraph_text,
            "timings": payload.timings,
        }

    @app.post("/v1/query")
    def query_endpoint(body: QueryBody):
        if not body.question.strip():
            return fail(422, "empty-question", "validate", "question must be non-empty")
        if body.k is not None and body.k < 1:
            return fail(422, "invalid-k", "validate", "k must be >= 1")
        started = time.time()
        try:
            payload = engine.query(
                body.graph_id,
                body.question,
                k=body.k,
                current_node=body.current_node,
                bare=body.bare,
            )
        except UnknownGraphError:
            return fail(404, "unknown-graph", "lookup", f"graph {body.graph_id!r} not loaded")
        except UnknownNodeError as exc:
            return fail(422, "unknown-node", "retrieve", str(exc))
        except PromptBudgetError as exc:
            return fail(422, "prompt-budget", "prompt", str(exc), estimate=exc.estimate)
        except (LlmConfigError, LlmError) as exc:
            timings = getattr(exc, "stage_timings", {})
            observe(timings)
            _log_query(app, engine, body, started, None, timings, outcome="llm-error")
            return fail(502, "llm-error", "llm", str(exc), timings=timings)

        queries_total.inc()
        observe(payload.timings)
        _log_query(app, engine, body, started, payload, payload.timings, outcome="ok")
        return {
            "answer": payload.answer,
            "subgraph": _subgraph_payload(payload.subgraph),
            "subgraph_text": payload.subgraph_text,
            "prompt": payload.prompt.full_prompt,
            "token_estimate": payload.prompt.token_estimate,
            "timings": payload.timings,
        }

    @app.get("/v1/graphs/{graph_id}/stats")
    def stats_endpoint(graph_id: str):
        try:
            entry = engine.entry(graph_id)
        except UnknownGraphError:
            return fail(404, "unknown-graph", "lookup", f"graph {graph_id!r} not loaded")
        s = entry.stats
        return {
            "graph_id": graph_id,
            "node_count": s.node_count,
            "edge_count": s.edge_count,
            "reachable_fraction": s.reachable_fraction,
            "max_out_degree": s.max_out_degree,
            "home_node": entry.graph.home_node,
            "embedder_id": entry.embeddings.embedder_id,
        }

    @app.get("/v1/graphs")
    def list_graphs():
        return {"graphs": engine.graph_ids()}

    @app.get("/metrics")
    def metrics_endpoint():
        return PlainTextResponse(metrics.render())

    @app.get("/v1/logs")
    def logs_endpoint(limit: int = 50):
        return {"queries": app.state.query_log[-limit:]}

    return app


def _log_query(app, engine, body, started, payload, timings, outcome):
    """Append one structured QueryLog record and emit it as a JSON log line."""
    record = {
        "timestamp": started,
        "graph_id": body.graph_id,
        "question": body.question,
        "k": body.k,
        "current_node": body.current_node,
        "bare": body.bare,
        "outcome": outcome,
        "timings": timings,
    }
    if payload is not None and payload.retrieval is not None:
        sims = [sim for _, sim in payload.retrieval.top_nodes]
        record["pinned_node"] = payload.retrieval.pinned_node
        record["subgraph_nodes"] = len(payload.subgraph.nodes)
        record["subgraph_edges"] = len(payload.subgraph.edges)
        record["similarity_max"] = max(sims) if sims else 0.0
        record["similarity_mean"] = sum(sims) / len(sims) if sims else 0.0
    app.state.query_log.append(record)
    logger.info("%s", json.dumps(record, sort_keys=True))


app = None  # built lazily by the CLI's serve command
