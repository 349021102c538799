"""Crawler domain types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

from graphguide.graph import StateActionGraph


class CrawlError(Exception):
    """Fatal crawl failure (home page unreachable, bad configuration)."""


class PageLoadError(Exception):
    """A single page could not be loaded."""


@dataclass(frozen=True)
class Clickable:
    """One actionable element found on a page, in document order."""

    label: str
    target_url: str | None
    kind: str  # button | link | menu | form | dropdown


@dataclass(frozen=True)
class Page:
    url: str
    title: str
    description: str
    clickables: tuple[Clickable, ...]


class PageProvider(Protocol):
    def load(self, url: str) -> Page: ...


@dataclass(frozen=True)
class CrawlConfig:
    home_url: str
    allowed_host: str
    max_pages: int = 1000
    strip_query: bool = False  # fragments are always stripped

    def __post_init__(self):
        if self.max_pages < 1:
            raise ValueError("max_pages must be >= 1")


@dataclass(frozen=True)
class CrawlResult:
    """Crawl output: the graph plus traversal evidence.

    visit_order records the URLs in dequeue (breadth-first) order; truncated
    flags a crawl cut short by max_pages.
    """

    graph: StateActionGraph
    visit_order: tuple[str, ...]
    truncated: bool = False
    warnings: tuple[str, ...] = field(default_factory=tuple)
