"""Subgraph textualization and prompt assembly.

The text block is two CSV sections: nodes (`node_id,node_name`, sorted by id)
and edges (`node_src,node_tgt,action,type`, sorted by src, tgt, action),
separated by a blank line. The format is bit-deterministic and golden-file
stable; fields containing commas or quotes get standard CSV quoting. The
prompt wraps the block in labeled fences so the model (and the prompt
inspector) can find it unambiguously.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from graphguide.graph import StateActionGraph
from graphguide.pcst.extract import Subgraph

NODE_HEADER = "node_id,node_name"
EDGE_HEADER = "node_src,node_tgt,action,type"

GRAPH_FENCE_BEGIN = "GRAPH CONTEXT BEGIN"
GRAPH_FENCE_END = "GRAPH CONTEXT END"

DEFAULT_SYSTEM_PROMPT = (
    "You are an expert assistant for enterprise software like CRM, ERP, HRMS, "
    "or other complex platforms. Help the user complete tasks by giving clear, "
    "step-by-step instructions using the actual menus, buttons, and labels in "
    "the software. If a step cannot be done, explain why. Avoid guessing or "
    "inventing features. Keep instructions precise and actionable."
)


class SubgraphIntegrityError(ValueError):
    """The subgraph references nodes that are absent from it or the graph."""


class PromptBudgetError(ValueError):
    """The assembled prompt exceeds the configured token budget."""

    def __init__(self, estimate: int, budget: int):
        super().__init__(f"prompt estimate {estimate} tokens exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


@dataclass(frozen=True)
class PromptConfig:
    system_prompt: str = DEFAULT_SYSTEM_PROMPT
    token_budget: int = 8000


@dataclass(frozen=True)
class PromptBundle:
    system_prompt: str
    subgraph_text: str
    question: str
    user_content: str  # what goes into the provider's user role
    full_prompt: str
    token_estimate: int


def textualize(
    sg: Subgraph,
    graph: StateActionGraph,
    details: dict[tuple[int, int, str], str] | None = None,
) -> str:
    """Serialize a subgraph to the two-section CSV block.

    `details` optionally appends a fifth column to matching edge rows (richer
    action payloads such as form field lists); absent by default.
    """
    node_set = set(sg.nodes)
    for nid in sg.nodes:
        if not graph.has_node(nid):
            raise SubgraphIntegrityError(f"subgraph node {nid} not present in graph")
    for e in sg.edges:
        if e.src not in node_set or e.tgt not in node_set:
            raise SubgraphIntegrityError(
                f"edge ({e.src}, {e.tgt}, {e.action!r}) references a node missing from the subgraph"
            )

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    buf.write(NODE_HEADER + "\n")
    for nid in sorted(sg.nodes):
        writer.writerow([nid, graph.node(nid).name])
    buf.write("\n")
    buf.write(EDGE_HEADER + "\n")
    for e in sorted(sg.edges, key=lambda e: (e.src, e.tgt, e.action)):
        row = [e.src, e.tgt, e.action, e.kind]
        if details:
            detail = details.get((e.src, e.tgt, e.action))
            if detail is not None:
                row.append(detail)
        writer.writerow(row)
    return buf.getvalue()


def parse_subgraph_text(text: str):
    """Parse a textualized block back into node and edge tuples.

    Returns (nodes, edges): nodes as (node_id, name), edges as
    (src, tgt, action, kind). Inverse of textualize for round-trip checks.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != NODE_HEADER.split(","):
        raise ValueError("missing node header")
    try:
        sep = rows.index([])
    except ValueError:
        raise ValueError("missing blank separator line") from None
    if sep + 1 >= len(rows) or rows[sep + 1] != EDGE_HEADER.split(","):
        raise ValueError("missing edge header")

    nodes = [(int(r[0]), r[1]) for r in rows[1:sep]]
    edges = [(int(r[0]), int(r[1]), r[2], r[3]) for r in rows[sep + 2:] if r]
    return nodes, edges


def estimate_tokens(text: str) -> int:
    """Provider-independent heuristic: one token per four characters."""
    return max(1, math.ceil(len(text) / 4))


def build_prompt(
    subgraph_text: str, question: str, cfg: PromptConfig | None = None
) -> PromptBundle:
    """Assemble the grounded prompt: system text, fenced graph block, question.

    Raises PromptBudgetError (carrying the estimate) instead of silently
    truncating when the assembled prompt exceeds the token budget.
    """
    cfg = cfg or PromptConfig()
    if not question.strip():
        raise ValueError("question must be non-empty")
    user_content = (
        f"{GRAPH_FENCE_BEGIN}\n{subgraph_text}{GRAPH_FENCE_END}\n\n"
        f"User question: {question}"
    )
    full_prompt = f"{cfg.system_prompt}\n\n{user_content}"
    estimate = estimate_tokens(full_prompt)
    if estimate > cfg.token_budget:
        raise PromptBudgetError(estimate, cfg.token_budget)
    return PromptBundle(
        system_prompt=cfg.system_prompt,
        subgraph_text=subgraph_text,
        question=question,
        user_content=user_content,
        full_prompt=full_prompt,
        token_estimate=estimate,
    )


def extract_graph_block(prompt: str) -> str:
    """The text between the graph fences of an assembled prompt."""
    begin = prompt.index(GRAPH_FENCE_BEGIN) + len(GRAPH_FENCE_BEGIN) + 1
    end = prompt.index(GRAPH_FENCE_END)
    return prompt[begin:end]
