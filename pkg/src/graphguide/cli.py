"""Command-line interface. Verbs mirror the service endpoints so everything
the HTTP API does is scriptable: crawl, embed, retrieve, query, serve, eval,
pcst-solve, synth."""

from __future__ import annotations

import glob
import json
import logging
import os
import sys

import click

from graphguide import graph as graphmod
from graphguide.crawl import FixtureSiteProvider, crawl
from graphguide.embeddings import HashingEmbedder, embed_graph, remote_embedder_from_env
from graphguide.engine import Engine, EngineConfig
from graphguide.evalharness import load_cases, render_report, run_eval
from graphguide.llm import MockLlmClient, client_from_env
from graphguide.pcst import PcstConfig, PcstInstance, solve_instance
from graphguide.synth import synthesize_graph


def _echo_json(doc) -> None:
    click.echo(json.dumps(doc, indent=2, ensure_ascii=False))


def _load_graph_files(nodes_path: str, adj_path: str):
    return graphmod.load_graph_files(nodes_path, adj_path)


def _make_embedder(kind: str):
    if kind == "remote":
        return remote_embedder_from_env()
    return HashingEmbedder()


def _make_llm(spec: str):
    if spec == "remote":
        return client_from_env()
    if spec in ("echo", "fixed", "map"):
        return MockLlmClient(mode=spec)
    return MockLlmClient.from_script(spec)


def _load_graph_dir(engine: Engine, graph_dir: str) -> list[str]:
    loaded = []
    for nodes_path in sorted(glob.glob(os.path.join(graph_dir, "*.nodes.json"))):
        adj_path = nodes_path.replace(".nodes.json", ".adj.json")
        if not os.path.exists(adj_path):
            raise click.ClickException(f"missing adjacency file for {nodes_path}")
        g = _load_graph_files(nodes_path, adj_path)
        engine.add_graph(g)
        loaded.append(g.graph_id)
    return loaded


@click.group()
@click.option("--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool):
    """Graph-grounded software assistance engine."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )


@main.command("crawl")
@click.option("--fixtures", "fixtures_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out-nodes", required=True, type=click.Path())
@click.option("--out-adj", required=True, type=click.Path())
@click.option("--max-pages", default=1000, show_default=True)
@click.option("--strip-query", is_flag=True)
def crawl_cmd(fixtures_dir, out_nodes, out_adj, max_pages, strip_query):
    """Crawl a fixture site directory into nodes/adjacency files."""
    provider = FixtureSiteProvider(fixtures_dir)
    result = crawl(provider, provider.crawl_config(max_pages=max_pages, strip_query=strip_query))
    graphmod.save_graph(result.graph, out_nodes, out_adj)
    stats = graphmod.graph_stats(result.graph)
    for w in result.warnings:
        click.echo(f"warning: {w}", err=True)
    _echo_json({
        "graph_id": result.graph.graph_id,
        "nodes": stats.node_count,
        "edges": stats.edge_count,
        "truncated": result.truncated,
        "pages_visited": len(result.visit_order),
    })


@main.command("embed")
@click.option("--nodes", "nodes_path", required=True, type=click.Path(exists=True))
@click.option("--adj", "adj_path", required=True, type=click.Path(exists=True))
@click.option("--cache-dir", required=True, type=click.Path())
@click.option("--embedder", default="local", type=click.Choice(["local", "remote"]), show_default=True)
def embed_cmd(nodes_path, adj_path, cache_dir, embedder):
    """Embed a graph and persist the vector cache."""
    g = _load_graph_files(nodes_path, adj_path)
    ge = embed_graph(_make_embedder(embedder), g, cache_dir=cache_dir)
    _echo_json({
        "graph_id": g.graph_id,
        "embedder_id": ge.embedder_id,
        "d": ge.d,
        "node_vectors": ge.n_nodes,
        "edge_vectors": ge.n_edges,
    })


@main.command("retrieve")
@click.option("--nodes", "nodes_path", required=True, type=click.Path(exists=True))
@click.option("--adj", "adj_path", required=True, type=click.Path(exists=True))
@click.option("--question", required=True)
@click.option("--k", default=15, show_default=True)
@click.option("--current-node", type=int, default=None)
@click.option("--embedder", default="local", type=click.Choice(["local", "remote"]))
@click.option("--cache-dir", default=None, type=click.Path())
def retrieve_cmd(nodes_path, adj_path, question, k, current_node, embedder, cache_dir):
    """Rank nodes/edges for a question and print the extracted subgraph."""
    g = _load_graph_files(nodes_path, adj_path)
    engine = Engine(_make_embedder(embedder), cfg=EngineConfig(k_default=k, cache_dir=cache_dir))
    engine.add_graph(g)
    payload = engine.retrieve(g.graph_id, question, k=k, current_node=current_node)
    _echo_json({
        "top_nodes": [[nid, round(sim, 6)] for nid, sim in payload.retrieval.top_nodes],
        "top_edges": [[idx, round(sim, 6)] for idx, sim in payload.retrieval.top_edges],
        "pinned_node": payload.retrieval.pinned_node,
        "subgraph_nodes": list(payload.subgraph.nodes),
        "objective": payload.subgraph.objective,
        "subgraph_text": payload.subgraph_text,
        "timings": payload.timings,
    })


@main.command("query")
@click.option("--nodes", "nodes_path", required=True, type=click.Path(exists=True))
@click.option("--adj", "adj_path", required=True, type=click.Path(exists=True))
@click.option("--question", required=True)
@click.option("--k", default=15, show_default=True)
@click.option("--current-node", type=int, default=None)
@click.option("--llm", default="echo", show_default=True,
              help="echo | fixed | map | remote | path to a mock script JSON")
@click.option("--bare", is_flag=True, help="Skip graph grounding (standalone LLM).")
@click.option("--embedder", default="local", type=click.Choice(["local", "remote"]))
@click.option("--show-prompt", is_flag=True)
def query_cmd(nodes_path, adj_path, question, k, current_node, llm, bare, embedder, show_prompt):
    """Answer one question end to end."""
    g = _load_graph_files(nodes_path, adj_path)
    engine = Engine(_make_embedder(embedder), _make_llm(llm), EngineConfig(k_default=k))
    engine.add_graph(g)
    payload = engine.query(g.graph_id, question, k=k, current_node=current_node, bare=bare)
    doc = {
        "answer": payload.answer,
        "timings": {k2: round(v, 6) for k2, v in payload.timings.items()},
    }
    if payload.subgraph is not None:
        doc["subgraph_nodes"] = list(payload.subgraph.nodes)
        doc["subgraph_edges"] = len(payload.subgraph.edges)
    if show_prompt:
        doc["prompt"] = payload.prompt.full_prompt
    _echo_json(doc)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8040, show_default=True)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--graph-dir", default=None, type=click.Path(exists=True, file_okay=False),
              help="Preload every *.nodes.json/*.adj.json pair.")
@click.option("--ui-dir", default=None, type=click.Path(exists=True, file_okay=False),
              help="Serve a static web UI at /ui.")
def serve_cmd(host, port, config_path, graph_dir, ui_dir):
    """Run the HTTP service."""
    import uvicorn

    from graphguide.service import ServiceConfig, build_engine, create_app

    if config_path:
        os.environ["SERVICE_CONFIG"] = config_path
    # query log records are structured JSON on stdout; everything else stderr
    log_handler = logging.StreamHandler(sys.stdout)
    log_handler.setFormatter(logging.Formatter("%(message)s"))
    logging.getLogger("graphguide.service").addHandler(log_handler)
    config = ServiceConfig.from_env()
    engine = build_engine(config)
    if graph_dir:
        for gid in _load_graph_dir(engine, graph_dir):
            click.echo(f"loaded graph {gid}", err=True)
    app = create_app(config, engine)
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command("eval")
@click.option("--cases", "cases_path", required=True, type=click.Path(exists=True))
@click.option("--graph-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--mock-llm", "mock_llm", default=None, type=click.Path(exists=True),
              help="Mock script JSON; omit to use the remote client from env.")
@click.option("--embedder", default="local", type=click.Choice(["local", "remote"]))
@click.option("--k", default=15, show_default=True)
def eval_cmd(cases_path, graph_dir, out_path, mock_llm, embedder, k):
    """Compare bare vs graph-grounded answers over a case file."""
    llm = MockLlmClient.from_script(mock_llm) if mock_llm else client_from_env()
    engine = Engine(_make_embedder(embedder), llm, EngineConfig(k_default=k))
    loaded = _load_graph_dir(engine, graph_dir)
    if not loaded:
        raise click.ClickException(f"no graph pairs found in {graph_dir}")
    cases = load_cases(cases_path)
    report = run_eval(cases, engine)
    fmt = "json" if out_path.endswith(".json") else "markdown"
    with open(out_path, "w", encoding="utf-8") as f:
        f.write(render_report(report, fmt))
    _echo_json(report.aggregates)


@main.command("pcst-solve")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--mode", default="auto", type=click.Choice(["auto", "exact", "approx"]),
              show_default=True)
@click.option("--backend", default=None, type=click.Choice(["compiled", "pure-python"]))
def pcst_solve_cmd(instance_path, mode, backend):
    """Solve a PCST instance from its JSON description (debug entry point)."""
    with open(instance_path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    edges = tuple((int(u), int(v)) for u, v in doc["edges"])
    costs = doc.get("costs")
    if costs is None:
        costs = [float(doc.get("cost", 1.0))] * len(edges)
    inst = PcstInstance(
        n=int(doc["n"]),
        edges=edges,
        costs=tuple(float(c) for c in costs),
        node_prizes=tuple(float(p) for p in doc["node_prizes"]),
        edge_prizes=tuple(float(p) for p in doc.get("edge_prizes", [])),
        root=doc.get("root"),
    )
    from graphguide.pcst import InstanceTooLargeError

    try:
        solution = solve_instance(inst, PcstConfig(mode=mode, backend=backend))
    except InstanceTooLargeError as exc:
        raise click.ClickException(str(exc)) from None
    _echo_json({
        "nodes": sorted(solution.nodes),
        "edge_indices": list(solution.edge_indices),
        "edges": [list(inst.edges[i]) for i in solution.edge_indices],
        "objective": solution.objective,
    })


@main.command("synth")
@click.option("--nodes", "n_nodes", required=True, type=int)
@click.option("--edges", "n_edges", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--graph-id", default="synthetic", show_default=True)
@click.option("--out-nodes", required=True, type=click.Path())
@click.option("--out-adj", required=True, type=click.Path())
def synth_cmd(n_nodes, n_edges, seed, graph_id, out_nodes, out_adj):
    """Generate a deterministic synthetic graph at a requested scale."""
    g = synthesize_graph(n_nodes, n_edges, seed=seed, graph_id=graph_id)
    graphmod.save_graph(g, out_nodes, out_adj)
    _echo_json({"graph_id": graph_id, "nodes": n_nodes, "edges": n_edges, "seed": seed})


if __name__ == "__main__":
    main()
