"""Provider clients driven by scripted transports: retry/backoff, context
overflow, marker stripping, auth, mocks, embeddings, and record/replay."""

import json
import random
import threading

import numpy as np
import pytest

from leveltext.errors import ProviderConfigError, ProviderError
from leveltext.prompting import PromptBundle
from leveltext.providers import (
    STATUS_CONTEXT_OVERFLOW,
    STATUS_OK,
    STATUS_PROVIDER_ERROR,
    STATUS_TIMEOUT,
    CassetteRecorder,
    CassetteReplayer,
    EmbeddingClient,
    GenerationResult,
    HttpChatProvider,
    MockProvider,
    ProviderConfig,
    RetryPolicy,
    TransportReply,
    TransportTimeout,
    build_provider,
    strip_markers,
)
from support import make_pair


class ScriptedTransport:
    """Replays a fixed list of replies (or raises queued exceptions)."""

    def __init__(self, replies):
        self.replies = list(replies)
        self.calls = []

    def __call__(self, url, payload, headers, timeout):
        self.calls.append({"url": url, "payload": payload, "headers": headers, "timeout": timeout})
        item = self.replies.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def chat_ok(text, usage=None):
    body = {"choices": [{"message": {"content": text}}]}
    if usage is not None:
        body["usage"] = usage
    return TransportReply(200, body)


def bundle(text="Rewrite the passage now.", pair_id="1:0>1"):
    return PromptBundle(
        rendered_text=text,
        shots_used=(),
        task_verb="simplify it",
        estimated_tokens=max(1, len(text) // 4),
        pair_id=pair_id,
    )


def cfg(**kwargs):
    defaults = dict(name="test", endpoint="https://example.test/v1/chat", model_id="m-1")
    defaults.update(kwargs)
    return ProviderConfig(**defaults)


# --- retry policy -----------------------------------------------------------


def test_retry_policy_validation():
    with pytest.raises(ValueError):
        RetryPolicy(max_attempts=0)
    with pytest.raises(ValueError):
        RetryPolicy(backoff=(1.0, 0.5))
    with pytest.raises(ValueError):
        RetryPolicy(backoff=(-0.1,))


def test_delay_before_clamps_to_last_entry():
    policy = RetryPolicy(max_attempts=6, backoff=(0.5, 1.0, 2.0))
    assert policy.delay_before(2) == 0.5
    assert policy.delay_before(3) == 1.0
    assert policy.delay_before(4) == 2.0
    assert policy.delay_before(6) == 2.0
    assert RetryPolicy(backoff=()).delay_before(2) == 0.0


# --- http provider ----------------------------------------------------------


def test_success_first_attempt():
    transport = ScriptedTransport([chat_ok("A simpler text.", usage={"total_tokens": 42})])
    provider = HttpChatProvider(cfg(), transport, sleep=lambda s: None)
    result = provider.generate(bundle())
    assert result.ok
    assert result.output_text == "A simpler text."
    assert result.attempt_count == 1
    assert result.raw_usage == {"total_tokens": 42}
    assert len(transport.calls) == 1


def test_request_payload_shape():
    transport = ScriptedTransport([chat_ok("ok")])
    provider = HttpChatProvider(
        cfg(temperature=0.7, max_output_tokens=256, timeout=12.5), transport, sleep=lambda s: None
    )
    provider.generate(bundle("The prompt body."))
    call = transport.calls[0]
    assert call["url"] == "https://example.test/v1/chat"
    assert call["timeout"] == 12.5
    assert call["payload"]["model"] == "m-1"
    assert call["payload"]["messages"] == [{"role": "user", "content": "The prompt body."}]
    assert call["payload"]["temperature"] == 0.7
    assert call["payload"]["max_tokens"] == 256
    assert call["headers"]["Content-Type"] == "application/json"
    assert "Authorization" not in call["headers"]


def test_retries_5xx_then_succeeds():
    transport = ScriptedTransport(
        [TransportReply(500, {}), TransportReply(503, {}), chat_ok("Recovered.")]
    )
    sleeps = []
    provider = HttpChatProvider(cfg(), transport, sleep=sleeps.append)
    result = provider.generate(bundle())
    assert result.ok
    assert result.attempt_count == 3
    assert sleeps == [0.5, 1.0]


def test_retries_429():
    transport = ScriptedTransport([TransportReply(429, {}), chat_ok("After backoff.")])
    provider = HttpChatProvider(cfg(), transport, sleep=lambda s: None)
    assert provider.generate(bundle()).ok
    assert len(transport.calls) == 2


def test_timeouts_retry_then_report():
    transport = ScriptedTransport([TransportTimeout("slow"), chat_ok("Made it.")])
    provider = HttpChatProvider(cfg(), transport, sleep=lambda s: None)
    assert provider.generate(bundle()).ok

    transport = ScriptedTransport([TransportTimeout("t")] * 3)
    provider = HttpChatProvider(cfg(), transport, sleep=lambda s: None)
    result = provider.generate(bundle())
    assert result.status == STATUS_TIMEOUT
    assert result.attempt_count == 3
    assert result.output_text is None


def test_terminal_4xx_no_retry():
    transport = ScriptedTransport([TransportReply(400, {"error": "bad"})])
    sleeps = []
    provider = HttpChatProvider(cfg(), transport, sleep=sleeps.append)
    result = provider.generate(bundle())
    assert result.status == STATUS_PROVIDER_ERROR
    assert result.attempt_count == 1
    assert sleeps == []
    assert len(transport.calls) == 1


def test_never_exceeds_max_attempts():
    rng = random.Random(5)
    for _ in range(30):
        max_attempts = rng.randint(1, 4)
        replies = []
        for _ in range(10):
            roll = rng.random()
            if roll < 0.4:
                replies.append(TransportReply(500, {}))
            elif roll < 0.6:
                replies.append(TransportTimeout("t"))
            elif roll < 0.8:
                replies.append(TransportReply(400, {}))
            else:
                replies.append(chat_ok("Text."))
        transport = ScriptedTransport(replies)
        provider = HttpChatProvider(
            cfg(retry=RetryPolicy(max_attempts=max_attempts, backoff=(0.0,))),
            transport,
            sleep=lambda s: None,
        )
        result = provider.generate(bundle())
        assert len(transport.calls) <= max_attempts
        assert result.attempt_count <= max_attempts


def test_missing_content_is_provider_error():
    transport = ScriptedTransport([TransportReply(200, {"choices": []})])
    provider = HttpChatProvider(cfg(), transport, sleep=lambda s: None)
    result = provider.generate(bundle())
    assert result.status == STATUS_PROVIDER_ERROR
    assert len(transport.calls) == 1


def test_marker_only_reply_is_provider_error():
    transport = ScriptedTransport([chat_ok("[TEXT START]\n\n[TEXT END]")])
    provider = HttpChatProvider(cfg(), transport, sleep=lambda s: None)
    assert provider.generate(bundle()).status == STATUS_PROVIDER_ERROR


def test_markers_stripped_at_line_granularity():
    reply = chat_ok("[TEXT START]\nKeep [TEXT END] when inline.\n[TEXT END]")
    provider = HttpChatProvider(cfg(), ScriptedTransport([reply]), sleep=lambda s: None)
    assert provider.generate(bundle()).output_text == "Keep [TEXT END] when inline."


def test_context_overflow_skips_network():
    transport = ScriptedTransport([])
    provider = HttpChatProvider(cfg(context_limit=10), transport, sleep=lambda s: None)
    big = bundle("x" * 100)
    assert big.estimated_tokens > 10
    result = provider.generate(big)
    assert result.status == STATUS_CONTEXT_OVERFLOW
    assert result.attempt_count == 0
    assert transport.calls == []


def test_auth_env_missing_fails_before_network():
    transport = ScriptedTransport([])
    provider = HttpChatProvider(cfg(auth_env="LVT_TOKEN_MISSING"), transport, sleep=lambda s: None)
    with pytest.raises(ProviderConfigError, match="LVT_TOKEN_MISSING"):
        provider.generate(bundle())
    assert transport.calls == []


def test_auth_env_present_sets_bearer(monkeypatch):
    monkeypatch.setenv("LVT_TOKEN", "secret-token")
    transport = ScriptedTransport([chat_ok("ok")])
    provider = HttpChatProvider(cfg(auth_env="LVT_TOKEN"), transport, sleep=lambda s: None)
    provider.generate(bundle())
    assert transport.calls[0]["headers"]["Authorization"] == "Bearer secret-token"


def test_strip_markers_examples():
    assert strip_markers("[TEXT START]\nBody.\n[TEXT END]") == "Body."
    assert strip_markers("  [TEXT END]  \nBody.") == "Body."
    assert strip_markers("Keep [TEXT START] inline.") == "Keep [TEXT START] inline."
    assert strip_markers("[TEXT START]") == ""


def test_generation_result_ok_property():
    assert GenerationResult("x", STATUS_OK, 0.0, 1).ok
    assert not GenerationResult(None, STATUS_TIMEOUT, 0.0, 1).ok


# --- mock provider ----------------------------------------------------------


def test_mock_oracle_returns_target():
    pair = make_pair("3:0>1", 800, 600)
    provider = MockProvider.oracle([pair])
    result = provider.generate(bundle(pair_id="3:0>1"))
    assert result.ok
    assert result.output_text == pair.target_text
    assert provider.prompt_count == 1


def test_mock_echo_returns_source():
    pair = make_pair("3:0>1", 800, 600)
    provider = MockProvider.echo_source([pair])
    assert provider.generate(bundle(pair_id="3:0>1")).output_text == pair.source_text


def test_mock_canned_and_unmatched():
    provider = MockProvider.canned("Always this text.")
    assert provider.generate(bundle()).output_text == "Always this text."

    strict = MockProvider([])
    assert strict.generate(bundle()).status == STATUS_PROVIDER_ERROR


def test_mock_rule_returning_none_fails():
    provider = MockProvider([(lambda b: True, lambda b: None)])
    assert provider.generate(bundle()).status == STATUS_PROVIDER_ERROR


def test_mock_strips_markers():
    provider = MockProvider.canned("[TEXT START]\nClean text.\n[TEXT END]")
    assert provider.generate(bundle()).output_text == "Clean text."


def test_mock_honors_context_limit():
    provider = MockProvider.canned("x", cfg=ProviderConfig(name="m", context_limit=5))
    result = provider.generate(bundle("y" * 100))
    assert result.status == STATUS_CONTEXT_OVERFLOW


def test_mock_prompt_log_is_thread_safe():
    provider = MockProvider.canned("ok")

    def worker():
        for _ in range(25):
            provider.generate(bundle())

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert provider.prompt_count == 200


# --- embeddings -------------------------------------------------------------


def embed_reply(vectors):
    return TransportReply(200, {"data": [{"embedding": list(v)} for v in vectors]})


def test_embed_empty_batch_no_call():
    transport = ScriptedTransport([])
    client = EmbeddingClient(cfg(), transport)
    assert client.embed([]) == []
    assert transport.calls == []


def test_embed_normalizes_vectors():
    transport = ScriptedTransport([embed_reply([[3.0, 4.0], [0.0, 2.0]])])
    client = EmbeddingClient(cfg(), transport)
    vecs = client.embed(["a", "b"])
    assert np.allclose(vecs[0], [0.6, 0.8])
    assert np.allclose(vecs[1], [0.0, 1.0])
    assert transport.calls[0]["payload"] == {"model": "m-1", "input": ["a", "b"]}


def test_embed_scaling_invariance():
    t1 = ScriptedTransport([embed_reply([[1.0, 2.0, 2.0]])])
    t2 = ScriptedTransport([embed_reply([[10.0, 20.0, 20.0]])])
    v1 = EmbeddingClient(cfg(), t1).embed(["x"])[0]
    v2 = EmbeddingClient(cfg(), t2).embed(["x"])[0]
    assert np.allclose(v1, v2)


def test_embed_count_mismatch():
    transport = ScriptedTransport([embed_reply([[1.0, 0.0]])])
    with pytest.raises(ProviderError, match="expected 2"):
        EmbeddingClient(cfg(), transport).embed(["a", "b"])


def test_embed_dimension_mismatch():
    transport = ScriptedTransport([embed_reply([[1.0, 0.0], [1.0, 0.0, 0.0]])])
    with pytest.raises(ProviderError, match="dimension"):
        EmbeddingClient(cfg(), transport).embed(["a", "b"])


def test_embed_zero_vector_rejected():
    transport = ScriptedTransport([embed_reply([[0.0, 0.0]])])
    with pytest.raises(ProviderError, match="zero-norm"):
        EmbeddingClient(cfg(), transport).embed(["a"])


def test_embed_http_error():
    transport = ScriptedTransport([TransportReply(500, {})])
    with pytest.raises(ProviderError, match="500"):
        EmbeddingClient(cfg(), transport).embed(["a"])


def test_embed_malformed_body():
    transport = ScriptedTransport([TransportReply(200, {"nope": 1})])
    with pytest.raises(ProviderError, match="malformed"):
        EmbeddingClient(cfg(), transport).embed(["a"])


def test_embed_timeout_raises():
    transport = ScriptedTransport([TransportTimeout("slow")])
    with pytest.raises(ProviderError, match="timed out"):
        EmbeddingClient(cfg(), transport).embed(["a"])


# --- cassettes --------------------------------------------------------------


def test_cassette_record_then_replay(tmp_path):
    path = tmp_path / "tape.jsonl"
    live = ScriptedTransport([chat_ok("First."), chat_ok("Second.")])
    recorder = CassetteRecorder(live, path)
    provider = HttpChatProvider(cfg(), recorder, sleep=lambda s: None)
    first = provider.generate(bundle("Prompt A."))
    second = provider.generate(bundle("Prompt A."))
    assert first.output_text == "First."
    assert second.output_text == "Second."

    # Same provider, no live transport: replies come back in recorded order.
    replay = HttpChatProvider(cfg(), CassetteReplayer(path), sleep=lambda s: None)
    assert replay.generate(bundle("Prompt A.")).output_text == "First."
    assert replay.generate(bundle("Prompt A.")).output_text == "Second."


def test_cassette_file_format(tmp_path):
    path = tmp_path / "tape.jsonl"
    recorder = CassetteRecorder(ScriptedTransport([chat_ok("Hi.")]), path)
    HttpChatProvider(cfg(), recorder, sleep=lambda s: None).generate(bundle())
    record = json.loads(path.read_text().splitlines()[0])
    assert set(record) == {"request", "response"}
    assert record["request"]["url"] == "https://example.test/v1/chat"
    assert record["response"]["status_code"] == 200


def test_cassette_missing_entry(tmp_path):
    path = tmp_path / "tape.jsonl"
    recorder = CassetteRecorder(ScriptedTransport([chat_ok("Hi.")]), path)
    HttpChatProvider(cfg(), recorder, sleep=lambda s: None).generate(bundle("Recorded."))
    replay = HttpChatProvider(cfg(), CassetteReplayer(path), sleep=lambda s: None)
    with pytest.raises(ProviderError, match="no cassette entry"):
        replay.generate(bundle("Never recorded prompt."))


# --- config factory ---------------------------------------------------------


def test_build_provider_mock_modes():
    pair = make_pair("5:0>1", 700, 500)
    oracle = build_provider({"type": "mock", "mode": "oracle", "name": "o"}, pairs=[pair])
    assert oracle.generate(bundle(pair_id="5:0>1")).output_text == pair.target_text
    echo = build_provider({"type": "mock", "mode": "echo-source", "name": "e"}, pairs=[pair])
    assert echo.generate(bundle(pair_id="5:0>1")).output_text == pair.source_text
    canned = build_provider({"type": "mock", "mode": "canned", "name": "c", "text": "Fixed."})
    assert canned.generate(bundle()).output_text == "Fixed."


def test_build_provider_http_with_retry_config():
    transport = ScriptedTransport([TransportReply(500, {}), chat_ok("ok")])
    provider = build_provider(
        {
            "name": "svc",
            "endpoint": "https://example.test/v1",
            "model_id": "m",
            "retry": {"max_attempts": 5, "backoff": [0.0]},
        },
        transport=transport,
    )
    provider._sleep = lambda s: None
    assert provider.cfg.retry.max_attempts == 5
    assert provider.generate(bundle()).ok


def test_build_provider_unknown_kind():
    with pytest.raises(ProviderConfigError, match="unknown provider type"):
        build_provider({"type": "carrier-pigeon", "name": "x"})
    with pytest.raises(ProviderConfigError, match="unknown mock mode"):
        build_provider({"type": "mock", "mode": "psychic", "name": "x"})
