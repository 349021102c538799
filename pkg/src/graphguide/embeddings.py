"""Text embeddings for node descriptions, edge actions, and queries.

Two embedder implementations share one interface: a hermetic feature-hashing
embedder (deterministic, used for tests and offline work) and a client for an
external embedding service speaking a minimal JSON protocol. All vectors are
L2-normalized float32 of a fixed dimension; a persistent per-graph cache
avoids re-embedding unchanged texts.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import os
import re
import time
from dataclasses import dataclass
from typing import Protocol, Sequence

import httpx
import numpy as np

from graphguide.graph import StateActionGraph

logger = logging.getLogger(__name__)

DEFAULT_DIM = 384

# Function words carrying no retrieval signal, English and French. Texts that
# reduce to nothing after filtering map to the fixed fallback basis vector.
STOPWORDS = frozenset("""
a an the to of in on at for and or is are was be been do does did how what
which who where when why can could should would will i you he she it we they
my your his her its our their this that these those with from by as
le la les un une des de du au aux et ou est sont comment quoi qui que quels
quel quelle ou j je tu il elle nous vous ils elles mon ma mes ton ta tes son
sa ses ce cette ces avec pour dans sur par
""".split())

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


class EmbeddingError(Exception):
    """Embedding computation failed (bad service response, exhausted retries)."""


class DimensionMismatchError(ValueError):
    """Vectors of different dimensions were combined."""


@dataclass(frozen=True)
class EmbeddingVector:
    """Unit-norm embedding. `values` is a read-only float32 array."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float32)
        if v.ndim != 1:
            raise ValueError("embedding must be a 1-d vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("embedding has non-finite components")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > 1e-6:
            if norm == 0.0:
                raise ValueError("embedding must not be the zero vector")
            v = v / norm
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def d(self) -> int:
        return int(self.values.shape[0])


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity of two unit vectors, clamped to [-1, 1]."""
    if a.d != b.d:
        raise DimensionMismatchError(f"dimension mismatch: {a.d} vs {b.d}")
    return float(np.clip(np.dot(a.values, b.values), -1.0, 1.0))


class Embedder(Protocol):
    embedder_id: str
    d: int

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray: ...


def embed_text(embedder: Embedder, text: str) -> EmbeddingVector:
    return EmbeddingVector(embedder.embed_batch([text])[0])


def _tokens(text: str) -> list[str]:
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in STOPWORDS]


def _feature_hash(feature: str) -> int:
    return int.from_bytes(
        hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest(), "little"
    )


class HashingEmbedder:
    """Signed feature hashing of word unigrams and bigrams.

    Pure and deterministic: the same text always produces the same vector,
    with meaningful lexical overlap between related texts. Not a semantic
    model; it is the hermetic stand-in used when no embedding service is
    configured.
    """

    def __init__(self, d: int = DEFAULT_DIM):
        if d < 2:
            raise ValueError("dimension must be >= 2")
        self.d = d
        self.embedder_id = f"hashing-v1:d={d}"

    def _embed_one(self, text: str) -> np.ndarray:
        toks = _tokens(text)
        features = toks + [f"{a} {b}" for a, b in zip(toks, toks[1:])]
        v = np.zeros(self.d, dtype=np.float64)
        for feat in features:
            h = _feature_hash(feat)
            bucket = h % self.d
            sign = 1.0 if (h >> 8) & 1 else -1.0
            v[bucket] += sign
        norm = np.linalg.norm(v)
        if norm == 0.0:
            v[0] = 1.0
            return v.astype(np.float32)
        return (v / norm).astype(np.float32)

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.d), dtype=np.float32)
        return np.stack([self._embed_one(t) for t in texts])


class RemoteEmbedder:
    """Client for an embedding service: POST {base_url}/embed.

    Request `{"model": str, "texts": [str]}`, response `{"vectors": [[float]]}`.
    Transport failures and non-200 responses are retried with exponential
    backoff before failing hard. Vectors are normalized on receipt.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        timeout_s: float = 30.0,
        d: int = DEFAULT_DIM,
        retries: int = 3,
        backoff_s: float = 0.5,
        client: httpx.Client | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.d = d
        self.retries = retries
        self.backoff_s = backoff_s
        self.embedder_id = f"remote:{model}"
        self._client = client or httpx.Client(timeout=timeout_s)

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.d), dtype=np.float32)
        payload = {"model": self.model, "texts": list(texts)}
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            try:
                resp = self._client.post(f"{self.base_url}/embed", json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                logger.warning("embedding service transport error (attempt %d): %s", attempt + 1, exc)
                continue
            if resp.status_code != 200:
                last_error = EmbeddingError(f"embedding service returned HTTP {resp.status_code}")
                logger.warning("embedding service HTTP %d (attempt %d)", resp.status_code, attempt + 1)
                continue
            return self._parse(resp, len(texts))
        raise EmbeddingError(f"embedding service failed after {self.retries + 1} attempts: {last_error}")

    def _parse(self, resp: httpx.Response, expected: int) -> np.ndarray:
        try:
            vectors = resp.json()["vectors"]
        except (KeyError, ValueError) as exc:
            raise EmbeddingError(f"malformed embedding service response: {exc}") from None
        arr = np.asarray(vectors, dtype=np.float32)
        if arr.ndim != 2 or arr.shape[0] != expected:
            raise EmbeddingError(f"expected {expected} vectors, got shape {arr.shape}")
        if arr.shape[1] != self.d:
            self.d = int(arr.shape[1])
        norms = np.linalg.norm(arr, axis=1, keepdims=True)
        if not np.all(np.isfinite(arr)) or np.any(norms == 0.0):
            raise EmbeddingError("embedding service returned zero or non-finite vectors")
        return arr / norms


def remote_embedder_from_env() -> RemoteEmbedder:
    """Build a RemoteEmbedder from EMBED_URL, EMBED_MODEL, EMBED_TIMEOUT_MS."""
    url = os.environ.get("EMBED_URL")
    if not url:
        raise EmbeddingError("EMBED_URL is not set")
    model = os.environ.get("EMBED_MODEL", "paraphrase-multilingual-MiniLM-L12-v2")
    timeout_s = int(os.environ.get("EMBED_TIMEOUT_MS", "30000")) / 1000.0
    return RemoteEmbedder(url, model, timeout_s=timeout_s)


@dataclass(frozen=True)
class GraphEmbeddings:
    """Embeddings for every node and edge of one graph.

    Node vectors are keyed by node_id; edge vectors by the edge's position in
    the adjacency file (stable under the graph round-trip guarantee).
    """

    graph_id: str
    embedder_id: str
    d: int
    node_ids: tuple[int, ...]
    node_matrix: np.ndarray  # (len(node_ids), d) float32, rows unit-norm
    edge_matrix: np.ndarray  # (n_edges, d) float32, rows unit-norm

    def node_vector(self, node_id: int) -> EmbeddingVector:
        return EmbeddingVector(self.node_matrix[self.node_ids.index(node_id)])

    def edge_vector(self, edge_index: int) -> EmbeddingVector:
        return EmbeddingVector(self.edge_matrix[edge_index])

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return int(self.edge_matrix.shape[0])


def node_text(node) -> str:
    """Text embedded for a node: its description, or the name as fallback
    for states whose page never loaded during crawling."""
    return node.description or node.name


def edge_text(edge, include_kind: bool = False) -> str:
    return f"{edge.action} ({edge.kind})" if include_kind else edge.action


def _text_key(text: str) -> str:
    return hashlib.sha1(text.encode("utf-8")).hexdigest()


def _encode_vec(row: np.ndarray) -> str:
    return base64.b64encode(np.asarray(row, dtype="<f4").tobytes()).decode("ascii")


def _decode_vec(data: str, d: int) -> np.ndarray:
    arr = np.frombuffer(base64.b64decode(data), dtype="<f4")
    if arr.shape[0] != d:
        raise EmbeddingError(f"cached vector has dimension {arr.shape[0]}, expected {d}")
    return arr.astype(np.float32)


def cache_path(cache_dir: str, graph_id: str) -> str:
    return os.path.join(cache_dir, f"{graph_id}.emb.json")


def _load_cache(path: str, embedder_id: str, d: int) -> tuple[dict, dict]:
    if not os.path.exists(path):
        return {}, {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, ValueError):
        logger.warning("ignoring unreadable embedding cache %s", path)
        return {}, {}
    if doc.get("embedder_id") != embedder_id or doc.get("d") != d:
        return {}, {}
    return doc.get("nodes", {}), doc.get("edges", {})


def _write_cache(path: str, doc: dict) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(doc, f)
    os.replace(tmp, path)


def embed_graph(
    embedder: Embedder,
    graph: StateActionGraph,
    cache_dir: str | None = None,
    include_edge_kind: bool = False,
) -> GraphEmbeddings:
    """Embed every node description and edge action of the graph.

    With a cache_dir, vectors for texts already embedded by the same embedder
    are reused and only the remainder goes through embed_batch; the cache file
    is rewritten atomically, so a failed run leaves the old cache intact.
    """
    node_texts = [node_text(n) for n in graph.nodes]
    edge_texts = [edge_text(e, include_edge_kind) for e in graph.edges]

    cached_nodes: dict = {}
    cached_edges: dict = {}
    path = None
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        path = cache_path(cache_dir, graph.graph_id)
        cached_nodes, cached_edges = _load_cache(path, embedder.embedder_id, embedder.d)

    d = embedder.d
    node_rows: list[np.ndarray | None] = [None] * len(node_texts)
    edge_rows: list[np.ndarray | None] = [None] * len(edge_texts)
    missing: list[tuple[str, int, str]] = []  # (kind, index, text)

    for i, (node, text) in enumerate(zip(graph.nodes, node_texts)):
        entry = cached_nodes.get(str(node.node_id))
        if entry and entry.get("t") == _text_key(text):
            node_rows[i] = _decode_vec(entry["v"], d)
        else:
            missing.append(("node", i, text))
    for i, text in enumerate(edge_texts):
        entry = cached_edges.get(str(i))
        if entry and entry.get("t") == _text_key(text):
            edge_rows[i] = _decode_vec(entry["v"], d)
        else:
            missing.append(("edge", i, text))

    if missing:
        fresh = embedder.embed_batch([t for _, _, t in missing])
        for (kind, i, _), row in zip(missing, fresh):
            if kind == "node":
                node_rows[i] = row
            else:
                edge_rows[i] = row

    node_matrix = (
        np.stack(node_rows) if node_rows else np.zeros((0, d), dtype=np.float32)
    )
    edge_matrix = (
        np.stack(edge_rows) if edge_rows else np.zeros((0, d), dtype=np.float32)
    )

    if path is not None:
        doc = {
            "graph_id": graph.graph_id,
            "embedder_id": embedder.embedder_id,
            "d": d,
            "nodes": {
                str(n.node_id): {"t": _text_key(t), "v": _encode_vec(node_matrix[i])}
                for i, (n, t) in enumerate(zip(graph.nodes, node_texts))
            },
            "edges": {
                str(i): {"t": _text_key(t), "v": _encode_vec(edge_matrix[i])}
                for i, t in enumerate(edge_texts)
            },
        }
        _write_cache(path, doc)

    return GraphEmbeddings(
        graph_id=graph.graph_id,
        embedder_id=embedder.embedder_id,
        d=d,
        node_ids=tuple(n.node_id for n in graph.nodes),
        node_matrix=node_matrix,
        edge_matrix=edge_matrix,
    )
