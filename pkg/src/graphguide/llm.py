"""Chat-completion clients: a scripted mock and an OpenAI-compatible adapter.

Generation is delegated to a black-box API; the engine never needs model
weights. The mock is fully deterministic and is what tests and CI use: it can
echo the user content back (enabling end-to-end prompt assertions), return a
fixed text, or map question substrings to canned answers.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from typing import Protocol

import httpx


class LlmError(Exception):
    """Completion failed after retries."""


class LlmConfigError(LlmError):
    """Terminal configuration problem (bad credentials, missing endpoint)."""


@dataclass(frozen=True)
class CompletionRequest:
    model_id: str
    system: str
    user: str
    max_tokens: int = 1024
    temperature: float = 0.0

    def __post_init__(self):
        if not self.user:
            raise ValueError("user message must be non-empty")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    latency: float
    usage: dict | None = None


class LlmClient(Protocol):
    def complete(self, req: CompletionRequest) -> CompletionResponse: ...


class MockLlmClient:
    """Deterministic scripted client.

    Modes: "echo" returns the user content verbatim; "fixed" returns one
    configured text; "map" returns the response whose key is a substring of
    the user message (longest key first, then alphabetical), falling back to
    a default.
    """

    def __init__(self, mode: str = "echo", responses: dict[str, str] | None = None,
                 fixed_text: str = "", default: str = ""):
        if mode not in ("echo", "fixed", "map"):
            raise ValueError(f"unknown mock mode {mode!r}")
        self.mode = mode
        self.responses = dict(responses or {})
        self.fixed_text = fixed_text
        self.default = default

    @classmethod
    def from_script(cls, path: str) -> "MockLlmClient":
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
        return cls(
            mode=doc.get("mode", "map"),
            responses=doc.get("responses", {}),
            fixed_text=doc.get("text", ""),
            default=doc.get("default", ""),
        )

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        start = time.perf_counter()
        if self.mode == "echo":
            text = req.user
        elif self.mode == "fixed":
            text = self.fixed_text
        else:
            text = self.default
            for key in sorted(self.responses, key=lambda k: (-len(k), k)):
                if key in req.user:
                    text = self.responses[key]
                    break
        return CompletionResponse(text=text, latency=time.perf_counter() - start)


class OpenAiCompatClient:
    """Adapter for any endpoint speaking the common chat-completions schema.

    The system prompt travels in the system role and the graph block plus
    question in the user role. Timeouts, rate limits, and 5xx responses are
    retried with exponential backoff; auth failures are terminal. A semaphore
    bounds in-flight requests to respect provider rate limits.
    """

    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        timeout_s: float = 60.0,
        max_retries: int = 3,
        backoff_s: float = 0.5,
        max_in_flight: int = 8,
        client: httpx.Client | None = None,
    ):
        if not base_url:
            raise LlmConfigError("LLM endpoint URL is not configured")
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.max_retries = max_retries
        self.backoff_s = backoff_s
        self._sem = threading.Semaphore(max_in_flight)
        self._client = client or httpx.Client(timeout=timeout_s)

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        payload = {
            "model": req.model_id,
            "messages": [
                {"role": "system", "content": req.system},
                {"role": "user", "content": req.user},
            ],
            "max_tokens": req.max_tokens,
            "temperature": req.temperature,
        }
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        start = time.perf_counter()
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            with self._sem:
                try:
                    resp = self._client.post(
                        f"{self.base_url}/chat/completions", json=payload, headers=headers
                    )
                except httpx.TimeoutException as exc:
                    last_error = exc
                    continue
                except httpx.HTTPError as exc:
                    last_error = exc
                    continue
            if resp.status_code in (401, 403):
                raise LlmConfigError(f"authentication failed (HTTP {resp.status_code})")
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = LlmError(f"HTTP {resp.status_code} from completion endpoint")
                continue
            if resp.status_code != 200:
                raise LlmError(f"HTTP {resp.status_code} from completion endpoint: {resp.text[:200]}")
            return self._parse(resp, start)
        raise LlmError(f"completion failed after {self.max_retries + 1} attempts: {last_error}")

    def _parse(self, resp: httpx.Response, start: float) -> CompletionResponse:
        try:
            doc = resp.json()
            text = doc["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise LlmError(f"malformed completion response: {exc}") from None
        if text is None:
            text = ""
        return CompletionResponse(
            text=text,
            latency=time.perf_counter() - start,
            usage=doc.get("usage"),
        )


def client_from_env() -> OpenAiCompatClient:
    """Build a remote client from LLM_URL, LLM_API_KEY, LLM_TIMEOUT_MS."""
    url = os.environ.get("LLM_URL", "")
    if not url:
        raise LlmConfigError("LLM_URL is not set")
    timeout_s = int(os.environ.get("LLM_TIMEOUT_MS", "60000")) / 1000.0
    return OpenAiCompatClient(url, api_key=os.environ.get("LLM_API_KEY", ""), timeout_s=timeout_s)


def default_model_id() -> str:
    return os.environ.get("LLM_MODEL", "gpt-4")
