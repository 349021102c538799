import os

import pytest

from graphguide.embeddings import HashingEmbedder
from graphguide.graph import load_graph_files

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

LEADCRM_NODES = os.path.join(FIXTURES, "leadcrm", "nodes.json")
LEADCRM_ADJ = os.path.join(FIXTURES, "leadcrm", "adjacency.json")
GOLDEN_SUBGRAPH = os.path.join(FIXTURES, "golden", "lead_subgraph.txt")
SITE25 = os.path.join(FIXTURES, "site25")

LEAD_NODE_IDS = (0, 3, 4, 374, 511, 549, 555)


@pytest.fixture(scope="session")
def lead_graph():
    """The 7-node lead-creation fixture graph."""
    return load_graph_files(LEADCRM_NODES, LEADCRM_ADJ)


@pytest.fixture(scope="session")
def embedder():
    return HashingEmbedder()


@pytest.fixture()
def tiny_site(tmp_path):
    """Builder for throwaway fixture sites: tiny_site({name: html, ...})."""

    def build(pages: dict, host: str = "app.example", home: str = "home.html"):
        import json

        for name, content in pages.items():
            (tmp_path / name).write_text(content, encoding="utf-8")
        (tmp_path / "site.json").write_text(
            json.dumps({"home": home, "host": host}), encoding="utf-8"
        )
        return str(tmp_path)

    return build
