"""Breadth-first traversal of a web interface into a state-action graph.

Pages become nodes in discovery order (home is node 0); every internal
clickable with a target becomes a directed edge, external targets are
ignored, and each page is enqueued exactly once. After the traversal a
second pass over the visited pages attaches non-navigating button actions
as self-loop edges. The loop is strictly sequential so that node numbering,
edge order, and saved files are identical across runs.
"""

from __future__ import annotations

import logging
from collections import deque
from urllib.parse import urlsplit

from graphguide.crawl.html import is_external, normalize_url
from graphguide.crawl.model import (
    CrawlConfig,
    CrawlError,
    CrawlResult,
    Page,
    PageLoadError,
    PageProvider,
)
from graphguide.graph import EdgeRecord, NodeRecord, build_graph

logger = logging.getLogger(__name__)


def collect_clickables(provider: PageProvider, url: str):
    """Clickables of one page in document order; empty list when unloadable."""
    try:
        return list(provider.load(url).clickables)
    except PageLoadError as exc:
        logger.warning("collect_clickables: %s", exc)
        return []


def _url_tail(url: str) -> str:
    path = urlsplit(url).path.strip("/")
    return path.rsplit("/", 1)[-1] if path else urlsplit(url).netloc


class _NodeDraft:
    __slots__ = ("node_id", "name", "description", "url")

    def __init__(self, node_id: int, name: str, url: str):
        self.node_id = node_id
        self.name = name
        self.description = ""
        self.url = url


def crawl(provider: PageProvider, cfg: CrawlConfig) -> CrawlResult:
    """Breadth-first crawl from cfg.home_url through the provider.

    An unloadable home page is fatal; an unloadable page mid-crawl keeps its
    node (empty description) and its inbound edges, with a warning. Exceeding
    max_pages stops the traversal and flags the result truncated.
    """
    home = normalize_url(cfg.home_url, cfg.strip_query)
    drafts: dict[str, _NodeDraft] = {home: _NodeDraft(0, _url_tail(home) or "Home", home)}
    edges: list[EdgeRecord] = []
    seen_triples: set[tuple[int, int, str]] = set()
    queue: deque[str] = deque([home])
    pages: dict[str, Page] = {}
    visit_order: list[str] = []
    warnings: list[str] = []
    truncated = False
    loaded = 0

    def add_edge(src: int, tgt: int, action: str, kind: str) -> None:
        triple = (src, tgt, action)
        if triple not in seen_triples:
            seen_triples.add(triple)
            edges.append(EdgeRecord(src=src, tgt=tgt, action=action, kind=kind))

    while queue:
        if loaded >= cfg.max_pages:
            truncated = True
            warnings.append(f"stopped after {cfg.max_pages} pages; {len(queue)} queued URLs unvisited")
            break
        url = queue.popleft()
        visit_order.append(url)
        draft = drafts[url]
        try:
            page = provider.load(url)
        except PageLoadError as exc:
            if url == home:
                raise CrawlError(f"home page unloadable: {exc}") from None
            warnings.append(f"page load failed, node kept with empty description: {url}")
            logger.warning("crawl: %s", exc)
            continue
        loaded += 1
        pages[url] = page
        if page.title:
            draft.name = page.title
        draft.description = page.description

        for c in page.clickables:
            if c.target_url is None:
                continue
            target = normalize_url(c.target_url, cfg.strip_query)
            if is_external(target, cfg):
                continue  # action leads outside the application: ignore
            if target not in drafts:
                drafts[target] = _NodeDraft(len(drafts), c.label or _url_tail(target), target)
                queue.append(target)
            add_edge(draft.node_id, drafts[target].node_id, c.label, c.kind)

    # Second pass: attach non-navigating button actions as self-loops.
    for url in visit_order:
        page = pages.get(url)
        if page is None:
            continue
        node_id = drafts[url].node_id
        for c in page.clickables:
            if c.target_url is None and c.kind == "button":
                add_edge(node_id, node_id, c.label, "button")

    nodes = [
        NodeRecord(d.node_id, d.name, d.description, d.url)
        for d in sorted(drafts.values(), key=lambda d: d.node_id)
    ]
    graph = build_graph(cfg.allowed_host, 0, nodes, edges)
    return CrawlResult(
        graph=graph,
        visit_order=tuple(visit_order),
        truncated=truncated,
        warnings=tuple(warnings),
    )
