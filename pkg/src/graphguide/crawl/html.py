"""DOM inspection: clickable extraction and URL normalization.

Built on the stdlib HTML parser so fixture crawls stay hermetic. Extraction
is strictly document-order, which makes breadth-first traversal (and thus
node numbering) deterministic for a given site.
"""

from __future__ import annotations

from html.parser import HTMLParser
from urllib.parse import urljoin, urlsplit, urlunsplit

from graphguide.crawl.model import Clickable, CrawlConfig, Page

HEADING_TAGS = ("h1", "h2", "h3")


def normalize_url(url: str, strip_query: bool = False) -> str:
    """Canonical URL: lowercased scheme/host, no fragment, optional no query."""
    parts = urlsplit(url)
    path = parts.path or "/"
    return urlunsplit((
        parts.scheme.lower(),
        parts.netloc.lower(),
        path,
        "" if strip_query else parts.query,
        "",
    ))


def is_external(url: str, cfg: CrawlConfig) -> bool:
    """True when the URL leaves the application host (those actions are
    ignored). Anything that does not parse as http(s) is treated as external."""
    try:
        parts = urlsplit(url)
    except ValueError:
        return True
    if parts.scheme not in ("http", "https"):
        return True
    host = (parts.hostname or "").lower()
    return host != cfg.allowed_host.lower()


def _squash(text: str) -> str:
    return " ".join(text.split())


class _ClickableParser(HTMLParser):
    """Collects anchors, buttons, submits, and selects in document order."""

    def __init__(self, base_url: str):
        super().__init__(convert_charrefs=True)
        self.base_url = base_url
        self.clickables: list[Clickable] = []
        self.title = ""
        self.headings: list[str] = []
        self._nav_depth = 0
        self._form_action: str | None = None
        self._in_form = False
        self._capture: list[str] | None = None  # text of the open anchor/button
        self._capture_tag = ""
        self._capture_target: str | None = None
        self._capture_kind = ""
        self._title_parts: list[str] | None = None
        self._heading_parts: list[str] | None = None

    def handle_starttag(self, tag, attrs):
        a = dict(attrs)
        if tag == "nav":
            self._nav_depth += 1
        elif tag == "form":
            self._in_form = True
            action = a.get("action")
            self._form_action = urljoin(self.base_url, action) if action else None
        elif tag == "a":
            href = a.get("href")
            if href is not None:
                self._begin_capture(
                    tag, urljoin(self.base_url, href),
                    "menu" if self._nav_depth > 0 else "link",
                )
        elif tag == "button":
            if self._in_form and self._form_action is not None:
                self._begin_capture(tag, self._form_action, "form")
            else:
                self._begin_capture(tag, None, "button")
        elif tag == "input" and a.get("type", "").lower() == "submit":
            label = _squash(a.get("value", "") or "Submit")
            if self._in_form and self._form_action is not None:
                self._emit(label, self._form_action, "form")
            else:
                self._emit(label, None, "button")
        elif tag == "select":
            label = _squash(a.get("aria-label") or a.get("name") or a.get("id") or "")
            if label:
                self._emit(label, None, "dropdown")
        elif tag == "title":
            self._title_parts = []
        elif tag in HEADING_TAGS:
            self._heading_parts = []

    def handle_endtag(self, tag):
        if tag == "nav" and self._nav_depth > 0:
            self._nav_depth -= 1
        elif tag == "form":
            self._in_form = False
            self._form_action = None
        elif tag in ("a", "button") and self._capture_tag == tag:
            label = _squash("".join(self._capture or []))
            if label:
                self._emit(label, self._capture_target, self._capture_kind)
            self._capture = None
            self._capture_tag = ""
        elif tag == "title":
            self.title = _squash("".join(self._title_parts or []))
            self._title_parts = None
        elif tag in HEADING_TAGS and self._heading_parts is not None:
            text = _squash("".join(self._heading_parts))
            if text:
                self.headings.append(text)
            self._heading_parts = None

    def handle_data(self, data):
        if self._capture is not None:
            self._capture.append(data)
        if self._title_parts is not None:
            self._title_parts.append(data)
        if self._heading_parts is not None:
            self._heading_parts.append(data)

    def _begin_capture(self, tag, target, kind):
        self._capture = []
        self._capture_tag = tag
        self._capture_target = target
        self._capture_kind = kind

    def _emit(self, label, target, kind):
        self.clickables.append(Clickable(label=label, target_url=target, kind=kind))


def parse_page(url: str, html_text: str) -> Page:
    """Parse one document into a Page: title, description, clickables.

    The description is the title joined with the h1-h3 heading texts; it is
    the node attribute later embedded for retrieval.
    """
    parser = _ClickableParser(base_url=url)
    parser.feed(html_text)
    parser.close()
    title = parser.title
    if parser.headings:
        description = f"{title} — {'; '.join(parser.headings)}" if title else "; ".join(parser.headings)
    else:
        description = title
    return Page(
        url=url,
        title=title,
        description=description,
        clickables=tuple(parser.clickables),
    )
