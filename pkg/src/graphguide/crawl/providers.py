"""Page providers: where the crawler gets its pages from.

The fixture provider reads a directory of static HTML files and is the
deterministic surface all tests run against. The WebDriver provider is a
best-effort client for the W3C wire protocol so the same traversal can run
against a live browser session; it is excluded from acceptance testing.
"""

from __future__ import annotations

import json
import os
from urllib.parse import urlsplit

import httpx

from graphguide.crawl.html import parse_page
from graphguide.crawl.model import CrawlConfig, CrawlError, Page, PageLoadError


class FixtureSiteProvider:
    """Serves pages from a directory of .html files plus a site.json manifest
    (`{"home": "home.html", "host": "app.example"}`). URLs map to file names:
    https://{host}/{name} -> {dir}/{name}."""

    def __init__(self, root_dir: str):
        self.root_dir = root_dir
        manifest_path = os.path.join(root_dir, "site.json")
        try:
            with open(manifest_path, "r", encoding="utf-8") as f:
                manifest = json.load(f)
        except (OSError, ValueError) as exc:
            raise CrawlError(f"unreadable fixture manifest {manifest_path}: {exc}") from None
        self.host = manifest["host"]
        self.home_file = manifest["home"]

    @property
    def home_url(self) -> str:
        return f"https://{self.host}/{self.home_file}"

    def crawl_config(self, max_pages: int = 1000, strip_query: bool = False) -> CrawlConfig:
        return CrawlConfig(
            home_url=self.home_url,
            allowed_host=self.host,
            max_pages=max_pages,
            strip_query=strip_query,
        )

    def _file_for(self, url: str) -> str:
        path = urlsplit(url).path.lstrip("/")
        if not path:
            path = self.home_file
        name = os.path.normpath(path)
        if name.startswith("..") or os.path.isabs(name):
            raise PageLoadError(f"path escapes fixture directory: {url}")
        return os.path.join(self.root_dir, name)

    def load(self, url: str) -> Page:
        file_path = self._file_for(url)
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                html_text = f.read()
        except OSError as exc:
            raise PageLoadError(f"cannot load {url}: {exc}") from None
        return parse_page(url, html_text)


class WebDriverProvider:
    """Thin W3C WebDriver client: navigate, grab page source, parse.

    Session setup (including any login cookies/headers the target needs) is
    provider configuration, not part of the traversal. Best-effort: live
    sites are not deterministic.
    """

    def __init__(
        self,
        server_url: str,
        capabilities: dict | None = None,
        timeout_s: float = 30.0,
        client: httpx.Client | None = None,
    ):
        self.server_url = server_url.rstrip("/")
        self.capabilities = capabilities or {"capabilities": {"alwaysMatch": {}}}
        self._client = client or httpx.Client(timeout=timeout_s)
        self._session_id: str | None = None

    def _session(self) -> str:
        if self._session_id is None:
            resp = self._client.post(f"{self.server_url}/session", json=self.capabilities)
            if resp.status_code != 200:
                raise CrawlError(f"webdriver session failed: HTTP {resp.status_code}")
            self._session_id = resp.json()["value"]["sessionId"]
        return self._session_id

    def load(self, url: str) -> Page:
        sid = self._session()
        try:
            nav = self._client.post(f"{self.server_url}/session/{sid}/url", json={"url": url})
            if nav.status_code != 200:
                raise PageLoadError(f"navigation to {url} failed: HTTP {nav.status_code}")
            src = self._client.get(f"{self.server_url}/session/{sid}/source")
            if src.status_code != 200:
                raise PageLoadError(f"source fetch for {url} failed: HTTP {src.status_code}")
        except httpx.HTTPError as exc:
            raise PageLoadError(f"webdriver transport error for {url}: {exc}") from None
        return parse_page(url, src.json()["value"])

    def close(self) -> None:
        if self._session_id is not None:
            try:
                self._client.delete(f"{self.server_url}/session/{self._session_id}")
            except httpx.HTTPError:
                pass
            self._session_id = None
