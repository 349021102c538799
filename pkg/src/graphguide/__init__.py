"""Graph-RAG assistance engine.

Pipeline: crawl a web application into a state-action graph, embed node and
edge texts, retrieve prized top-k elements for a question, extract a minimal
connected subgraph (prize-collecting Steiner tree), textualize it and assemble
a grounded prompt for a chat-completion model.
"""

__version__ = "0.1.0"

from graphguide.graph import (  # noqa: F401
    EdgeRecord,
    NodeRecord,
    StateActionGraph,
    graph_stats,
    load_graph,
    save_graph,
)
