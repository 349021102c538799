"""Batch evaluation: standalone completions versus graph-grounded ones.

Cases come from a JSON-lines file, one per line. For each case the harness
issues a bare query (system prompt + question) and a grounded one through
the full pipeline, recording both answers and wall-clock times. Answer
quality is left to human review; the only scored quantities are retrieval
hit rate against expected node sets (when the case provides them) and
latency. Reports render as markdown for side-by-side reading or as stable
JSON for machines.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field

from graphguide.engine import Engine


@dataclass(frozen=True)
class EvalCase:
    question: str
    graph_id: str
    language: str = "en"
    expected_nodes: tuple[int, ...] | None = None
    notes: str = ""

    def __post_init__(self):
        if not self.question.strip():
            raise ValueError("question must be non-empty")


@dataclass(frozen=True)
class EvalRow:
    question: str
    language: str
    graph_id: str
    llm_answer: str = ""
    grag_answer: str = ""
    llm_time: float = 0.0
    grag_time: float = 0.0
    subgraph_nodes: int = 0
    subgraph_edges: int = 0
    retrieval_hit_rate: float | None = None
    failed: bool = False
    failure: str = ""


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]
    aggregates: dict[str, float] = field(default_factory=dict)


def load_cases(path: str) -> list[EvalCase]:
    cases = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: bad JSON: {exc}") from None
            expected = doc.get("expected_nodes")
            cases.append(EvalCase(
                question=doc["question"],
                graph_id=doc["graph_id"],
                language=doc.get("language", "en"),
                expected_nodes=tuple(expected) if expected is not None else None,
                notes=doc.get("notes", ""),
            ))
    return cases


def run_eval(cases: list[EvalCase], engine: Engine) -> EvalReport:
    """Run every case; individual failures mark their row and the run goes on."""
    rows: list[EvalRow] = []
    for case in cases:
        try:
            bare = engine.query(case.graph_id, case.question, bare=True)
            grag = engine.query(case.graph_id, case.question)
        except Exception as exc:
            rows.append(EvalRow(
                question=case.question, language=case.language, graph_id=case.graph_id,
                failed=True, failure=f"{type(exc).__name__}: {exc}",
            ))
            continue
        hit_rate = None
        if case.expected_nodes:
            got = set(grag.subgraph.nodes)
            expected = set(case.expected_nodes)
            hit_rate = len(got & expected) / len(expected)
        rows.append(EvalRow(
            question=case.question,
            language=case.language,
            graph_id=case.graph_id,
            llm_answer=bare.answer,
            grag_answer=grag.answer,
            llm_time=bare.timings["total"],
            grag_time=grag.timings["total"],
            subgraph_nodes=len(grag.subgraph.nodes),
            subgraph_edges=len(grag.subgraph.edges),
            retrieval_hit_rate=hit_rate,
        ))

    ok = [r for r in rows if not r.failed]
    hits = [r.retrieval_hit_rate for r in ok if r.retrieval_hit_rate is not None]
    aggregates = {
        "cases": float(len(rows)),
        "failed": float(sum(1 for r in rows if r.failed)),
        "llm_time_mean": statistics.fmean(r.llm_time for r in ok) if ok else 0.0,
        "llm_time_median": statistics.median(r.llm_time for r in ok) if ok else 0.0,
        "grag_time_mean": statistics.fmean(r.grag_time for r in ok) if ok else 0.0,
        "grag_time_median": statistics.median(r.grag_time for r in ok) if ok else 0.0,
        "hit_rate_mean": statistics.fmean(hits) if hits else 0.0,
    }
    return EvalReport(rows=tuple(rows), aggregates=aggregates)


def render_report(report: EvalReport, fmt: str = "markdown") -> str:
    if fmt == "json":
        doc = {
            "rows": [vars(r) | {} for r in report.rows],
            "aggregates": report.aggregates,
        }
        return json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True) + "\n"
    if fmt != "markdown":
        raise ValueError(f"unknown report format {fmt!r}")

    out = ["# Evaluation report", ""]
    agg = report.aggregates
    out.append(f"Cases: {int(agg['cases'])} ({int(agg['failed'])} failed)")
    out.append("")
    out.append("| metric | LLM | LLM+G-RAG |")
    out.append("|---|---|---|")
    out.append(f"| mean time (s) | {agg['llm_time_mean']:.3f} | {agg['grag_time_mean']:.3f} |")
    out.append(f"| median time (s) | {agg['llm_time_median']:.3f} | {agg['grag_time_median']:.3f} |")
    if any(r.retrieval_hit_rate is not None for r in report.rows):
        out.append(f"| retrieval hit rate | - | {agg['hit_rate_mean']:.3f} |")
    out.append("")
    for i, r in enumerate(report.rows, 1):
        out.append(f"## Case {i}: {r.question}")
        out.append("")
        if r.failed:
            out.append(f"**FAILED**: {r.failure}")
            out.append("")
            continue
        out.append(f"*graph {r.graph_id}, language {r.language}, "
                   f"subgraph {r.subgraph_nodes} nodes / {r.subgraph_edges} edges*")
        if r.retrieval_hit_rate is not None:
            out.append(f"*retrieval hit rate: {r.retrieval_hit_rate:.2f}*")
        out.append("")
        out.append(f"**LLM** ({r.llm_time:.3f} s):")
        out.append("")
        out.append(r.llm_answer or "(empty)")
        out.append("")
        out.append(f"**LLM+G-RAG** ({r.grag_time:.3f} s):")
        out.append("")
        out.append(r.grag_answer or "(empty)")
        out.append("")
    return "\n".join(out)
