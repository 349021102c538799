"""Web-interface crawler: BFS traversal, DOM extraction, page providers."""

from graphguide.crawl.bfs import collect_clickables, crawl  # noqa: F401
from graphguide.crawl.html import is_external, normalize_url, parse_page  # noqa: F401
from graphguide.crawl.model import (  # noqa: F401
    Clickable,
    CrawlConfig,
    CrawlError,
    CrawlResult,
    Page,
    PageLoadError,
    PageProvider,
)
from graphguide.crawl.providers import FixtureSiteProvider, WebDriverProvider  # noqa: F401
