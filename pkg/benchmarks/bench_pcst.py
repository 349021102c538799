"""Benchmark: compiled vs pure-Python moat-growth kernel.

Times the growth kernel alone (the hot loop) and the full subgraph
extraction on synthetic graphs at the scales of real enterprise deployments.
Run:  python benchmarks/bench_pcst.py [--repeats N]
"""

from __future__ import annotations

import argparse
import statistics
import time

from graphguide.embeddings import HashingEmbedder, embed_graph, embed_text
from graphguide.pcst import PcstConfig, extract_subgraph, fold_edge_prizes, growth_backends
from graphguide.pcst.approx import _grow
from graphguide.pcst.extract import build_instance
from graphguide.retrieval import retrieve
from graphguide.synth import synthesize_graph

SCALES = [
    ("crm-small", 120, 694),
    ("erp-small", 450, 464),
    ("erp-mid", 1714, 2196),
    ("crm-large", 7640, 7655),
]

QUESTION = "How to create a new lead?"


def timeit(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    backends = sorted(growth_backends())
    if len(backends) < 2:
        print(f"note: only {backends[0]} available; build the extension to compare")

    embedder = HashingEmbedder()
    header = f"{'graph':<18} {'nodes':>6} {'edges':>6}"
    for b in backends:
        header += f" {b + ' grow':>18} {b + ' extract':>20}"
    if len(backends) == 2:
        header += f" {'grow speedup':>14}"
    print(header)
    print("-" * len(header))

    for graph_id, n, m in SCALES:
        graph = synthesize_graph(n, m, seed=42, graph_id=graph_id)
        ge = embed_graph(embedder, graph)
        zq = embed_text(embedder, QUESTION)
        result = retrieve(ge, zq, k=15, current_node=0, query_text=QUESTION)
        inst, _ = build_instance(graph, result, PcstConfig())
        folded, _ = fold_edge_prizes(inst)

        row = f"{graph_id:<18} {n:>6} {m:>6}"
        grow_times = {}
        for b in backends:
            grow_times[b] = timeit(lambda b=b: _grow(folded, b), args.repeats)
            extract_time = timeit(
                lambda b=b: extract_subgraph(graph, result, PcstConfig(mode="approx", backend=b)),
                args.repeats,
            )
            row += f" {grow_times[b] * 1000:>15.2f} ms {extract_time * 1000:>17.2f} ms"
        if len(backends) == 2:
            speedup = grow_times["pure-python"] / grow_times["compiled"]
            row += f" {speedup:>13.1f}x"
        print(row)


if __name__ == "__main__":
    main()
