"""Generation providers behind one interface: remote chat-completion services,
deterministic mocks for hermetic tests, and an embedding-service client.

Remote failures are encoded in the GenerationResult status, never raised;
the only exception path is configuration (e.g. an unresolvable auth secret),
which fails before any network call.  Record-replay cassettes make provider
tests hermetic; live calls happen only when a real transport is wired in.
"""

import json
import os
import threading
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from leveltext.corpus import LeveledPair
from leveltext.errors import ProviderConfigError, ProviderError
from leveltext.prompting import PromptBundle

STATUS_OK = "ok"
STATUS_CONTEXT_OVERFLOW = "context_overflow"
STATUS_PROVIDER_ERROR = "provider_error"
STATUS_TIMEOUT = "timeout"

_MARKERS = ("[TEXT START]", "[TEXT END]")


@dataclass(frozen=True)
class RetryPolicy:
    """Bounded retries with a non-decreasing backoff schedule (seconds)."""

    max_attempts: int = 3
    backoff: tuple[float, ...] = (0.5, 1.0, 2.0)

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if any(b < 0 for b in self.backoff):
            raise ValueError("backoff delays must be non-negative")
        if any(b > a for b, a in zip(self.backoff, self.backoff[1:])):
            raise ValueError("backoff schedule must be non-decreasing")

    def delay_before(self, attempt: int) -> float:
        """Delay before retry number ``attempt`` (2-based); clamps to the last entry."""
        if not self.backoff:
            return 0.0
        return self.backoff[min(attempt - 2, len(self.backoff) - 1)]


@dataclass(frozen=True)
class ProviderConfig:
    name: str
    endpoint: str = ""
    model_id: str = ""
    context_limit: int = 16384
    max_output_tokens: int = 1024
    temperature: float = 0.0
    timeout: float = 60.0
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    auth_env: str | None = None

    def __post_init__(self):
        if self.context_limit <= 0:
            raise ValueError("context_limit must be positive")


@dataclass(frozen=True)
class GenerationResult:
    output_text: str | None
    status: str
    latency: float
    attempt_count: int
    raw_usage: dict | None = None

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


class TransportTimeout(Exception):
    """Raised by transports when a request exceeds its deadline."""


@dataclass
class TransportReply:
    status_code: int
    body: dict


class Transport(Protocol):
    def __call__(
        self, url: str, payload: dict, headers: dict[str, str], timeout: float
    ) -> TransportReply: ...


def requests_transport(
    url: str, payload: dict, headers: dict[str, str], timeout: float
) -> TransportReply:
    """Default live transport; imported lazily so hermetic tests never need it."""
    import requests

    try:
        response = requests.post(url, json=payload, headers=headers, timeout=timeout)
    except requests.Timeout as exc:
        raise TransportTimeout(str(exc)) from exc
    try:
        body = response.json()
    except ValueError:
        body = {"raw": response.text}
    return TransportReply(response.status_code, body)


def strip_markers(text: str) -> str:
    """Drop marker-only lines; never touches markers embedded inside a line."""
    kept = [
        line for line in text.splitlines() if line.strip() not in _MARKERS
    ]
    return "\n".join(kept).strip()


def _resolve_auth(cfg: ProviderConfig) -> dict[str, str]:
    if not cfg.auth_env:
        return {}
    token = os.environ.get(cfg.auth_env)
    if not token:
        raise ProviderConfigError(
            f"provider {cfg.name!r}: auth env var {cfg.auth_env!r} is not set"
        )
    return {"Authorization": f"Bearer {token}"}


def _overflow(cfg: ProviderConfig, bundle: PromptBundle) -> GenerationResult | None:
    if bundle.estimated_tokens > cfg.context_limit:
        return GenerationResult(None, STATUS_CONTEXT_OVERFLOW, 0.0, 0)
    return None


class GenerationProvider(Protocol):
    name: str

    def generate(self, bundle: PromptBundle) -> GenerationResult: ...


class HttpChatProvider:
    """Chat-completions client: request ``{model, messages, temperature,
    max_tokens}``, response text at ``choices[0].message.content``.

    Retries 429/5xx and timeouts up to max_attempts requests total; other 4xx
    are terminal.  Shareable across threads.
    """

    def __init__(
        self,
        cfg: ProviderConfig,
        transport: Transport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.cfg = cfg
        self.name = cfg.name
        self._transport = transport or requests_transport
        self._sleep = sleep

    def generate(self, bundle: PromptBundle) -> GenerationResult:
        overflow = _overflow(self.cfg, bundle)
        if overflow:
            return overflow
        headers = {"Content-Type": "application/json", **_resolve_auth(self.cfg)}
        payload = {
            "model": self.cfg.model_id,
            "messages": [{"role": "user", "content": bundle.rendered_text}],
            "temperature": self.cfg.temperature,
            "max_tokens": self.cfg.max_output_tokens,
        }
        started = time.monotonic()
        status = STATUS_PROVIDER_ERROR
        usage = None
        for attempt in range(1, self.cfg.retry.max_attempts + 1):
            if attempt > 1:
                self._sleep(self.cfg.retry.delay_before(attempt))
            try:
                reply = self._transport(
                    self.cfg.endpoint, payload, headers, self.cfg.timeout
                )
            except TransportTimeout:
                status = STATUS_TIMEOUT
                continue
            if reply.status_code == 200:
                text = self._extract_text(reply.body)
                usage = reply.body.get("usage")
                if text:
                    return GenerationResult(
                        text, STATUS_OK, time.monotonic() - started, attempt, usage
                    )
                status = STATUS_PROVIDER_ERROR
                break
            if reply.status_code == 429 or reply.status_code >= 500:
                status = STATUS_PROVIDER_ERROR
                continue
            status = STATUS_PROVIDER_ERROR
            break
        attempts = min(attempt, self.cfg.retry.max_attempts)
        return GenerationResult(None, status, time.monotonic() - started, attempts, usage)

    @staticmethod
    def _extract_text(body: dict) -> str | None:
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            return None
        if not isinstance(content, str):
            return None
        stripped = strip_markers(content)
        return stripped or None


MockRule = tuple[Callable[[PromptBundle], bool], Callable[[PromptBundle], str | None]]


class MockProvider:
    """Scripted provider: first matching rule answers; unmatched prompts fail.

    Records every prompt it receives (thread-safe) so tests can assert on
    traffic.  Rules returning None simulate a provider error.
    """

    def __init__(
        self,
        rules: Sequence[MockRule],
        name: str = "mock",
        cfg: ProviderConfig | None = None,
    ):
        self.rules = list(rules)
        self.name = name
        self.cfg = cfg or ProviderConfig(name=name)
        self.prompts: list[PromptBundle] = []
        self._lock = threading.Lock()

    def generate(self, bundle: PromptBundle) -> GenerationResult:
        with self._lock:
            self.prompts.append(bundle)
        overflow = _overflow(self.cfg, bundle)
        if overflow:
            return overflow
        for predicate, respond in self.rules:
            if predicate(bundle):
                raw = respond(bundle)
                if raw is None:
                    return GenerationResult(None, STATUS_PROVIDER_ERROR, 0.0, 1)
                text = strip_markers(raw)
                if not text:
                    return GenerationResult(None, STATUS_PROVIDER_ERROR, 0.0, 1)
                return GenerationResult(text, STATUS_OK, 0.0, 1)
        return GenerationResult(None, STATUS_PROVIDER_ERROR, 0.0, 1)

    @property
    def prompt_count(self) -> int:
        with self._lock:
            return len(self.prompts)

    @classmethod
    def oracle(
        cls,
        pairs: Sequence[LeveledPair],
        name: str = "oracle",
        cfg: ProviderConfig | None = None,
    ) -> "MockProvider":
        """Returns each pair's gold target text verbatim."""
        gold = {p.pair_id: p.target_text for p in pairs}
        return cls(
            [(lambda b: b.pair_id in gold, lambda b: gold[b.pair_id])], name, cfg
        )

    @classmethod
    def echo_source(
        cls,
        pairs: Sequence[LeveledPair],
        name: str = "echo-source",
        cfg: ProviderConfig | None = None,
    ) -> "MockProvider":
        """Returns each pair's source text unchanged (no readability movement)."""
        sources = {p.pair_id: p.source_text for p in pairs}
        return cls(
            [(lambda b: b.pair_id in sources, lambda b: sources[b.pair_id])], name, cfg
        )

    @classmethod
    def canned(
        cls, text: str, name: str = "canned", cfg: ProviderConfig | None = None
    ) -> "MockProvider":
        return cls([(lambda b: True, lambda b: text)], name, cfg)


class EmbeddingClient:
    """Client for an embedding endpoint: request ``{model, input:[...]}``,
    response ``{data:[{embedding:[...]}...]}``.  Vectors are L2-normalized
    here, one per input, all the same dimension.
    """

    def __init__(self, cfg: ProviderConfig, transport: Transport | None = None):
        self.cfg = cfg
        self._transport = transport or requests_transport

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        if not texts:
            return []
        headers = {"Content-Type": "application/json", **_resolve_auth(self.cfg)}
        payload = {"model": self.cfg.model_id, "input": list(texts)}
        try:
            reply = self._transport(self.cfg.endpoint, payload, headers, self.cfg.timeout)
        except TransportTimeout as exc:
            raise ProviderError(f"embedding request timed out: {exc}") from exc
        if reply.status_code != 200:
            raise ProviderError(f"embedding endpoint returned {reply.status_code}")
        try:
            rows = [item["embedding"] for item in reply.body["data"]]
        except (KeyError, TypeError) as exc:
            raise ProviderError("malformed embedding response") from exc
        if len(rows) != len(texts):
            raise ProviderError(
                f"expected {len(texts)} embeddings, got {len(rows)}"
            )
        dims = {len(r) for r in rows}
        if len(dims) != 1:
            raise ProviderError(f"dimension mismatch across batch: {sorted(dims)}")
        out = []
        for row in rows:
            vec = np.asarray(row, dtype=float)
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise ProviderError("zero-norm embedding in response")
            out.append(vec / norm)
        return out


class CassetteRecorder:
    """Transport wrapper that appends request/response records to a JSONL file."""

    def __init__(self, inner: Transport, path: str | Path):
        self._inner = inner
        self._path = Path(path)
        self._lock = threading.Lock()

    def __call__(
        self, url: str, payload: dict, headers: dict[str, str], timeout: float
    ) -> TransportReply:
        reply = self._inner(url, payload, headers, timeout)
        record = {
            "request": {"url": url, "payload": payload},
            "response": {"status_code": reply.status_code, "body": reply.body},
        }
        with self._lock:
            with open(self._path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
        return reply


class CassetteReplayer:
    """Replays recorded replies, matching requests by (url, payload)."""

    def __init__(self, path: str | Path):
        self._replies: dict[str, list[TransportReply]] = {}
        self._lock = threading.Lock()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            key = self._key(record["request"]["url"], record["request"]["payload"])
            reply = TransportReply(
                record["response"]["status_code"], record["response"]["body"]
            )
            self._replies.setdefault(key, []).append(reply)

    @staticmethod
    def _key(url: str, payload: dict) -> str:
        return json.dumps({"url": url, "payload": payload}, sort_keys=True)

    def __call__(
        self, url: str, payload: dict, headers: dict[str, str], timeout: float
    ) -> TransportReply:
        key = self._key(url, payload)
        with self._lock:
            queue = self._replies.get(key)
            if not queue:
                raise ProviderError(f"no cassette entry for request: {key[:200]}")
            return queue.pop(0)


def build_provider(
    spec: dict,
    pairs: Sequence[LeveledPair] = (),
    transport: Transport | None = None,
) -> GenerationProvider:
    """Construct a provider from a JSON config entry.

    ``type`` selects the implementation: "http" (default) or "mock" with a
    ``mode`` of oracle / echo-source / canned.
    """
    kind = spec.get("type", "http")
    if kind == "mock":
        mode = spec.get("mode", "oracle")
        cfg = _config_from(spec)
        if mode == "oracle":
            return MockProvider.oracle(pairs, name=cfg.name, cfg=cfg)
        if mode == "echo-source":
            return MockProvider.echo_source(pairs, name=cfg.name, cfg=cfg)
        if mode == "canned":
            return MockProvider.canned(spec.get("text", ""), name=cfg.name, cfg=cfg)
        raise ProviderConfigError(f"unknown mock mode {mode!r}")
    if kind == "http":
        return HttpChatProvider(_config_from(spec), transport=transport)
    raise ProviderConfigError(f"unknown provider type {kind!r}")


def _config_from(spec: dict) -> ProviderConfig:
    retry_spec = spec.get("retry", {})
    retry = RetryPolicy(
        max_attempts=int(retry_spec.get("max_attempts", 3)),
        backoff=tuple(retry_spec.get("backoff", (0.5, 1.0, 2.0))),
    )
    return ProviderConfig(
        name=spec["name"],
        endpoint=spec.get("endpoint", ""),
        model_id=spec.get("model_id", ""),
        context_limit=int(spec.get("context_limit", 16384)),
        max_output_tokens=int(spec.get("max_output_tokens", 1024)),
        temperature=float(spec.get("temperature", 0.0)),
        timeout=float(spec.get("timeout", 60.0)),
        retry=retry,
        auth_env=spec.get("auth_env"),
    )
