import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor

import pytest

from contrastkit.errors import (
    BackendError,
    CompletionError,
    DataFormatError,
    TransientBackendError,
)
from contrastkit.synthesis import LlmClient, LlmEndpointConfig, MockTransport, mock_key


def config(**kwargs):
    defaults = dict(role="generator", model_id="test-model", max_retries=3, backoff_base_ms=1)
    defaults.update(kwargs)
    return LlmEndpointConfig(**defaults)


class FlakyTransport:
    """Fails with transient errors a fixed number of times, then succeeds."""

    def __init__(self, failures, response="ok"):
        self.failures = failures
        self.response = response
        self.calls = 0

    def send(self, prompt):
        self.calls += 1
        if self.calls <= self.failures:
            raise TransientBackendError("HTTP 429")
        return self.response


class TestEndpointConfig:
    def test_concurrency_floor(self):
        with pytest.raises(ValueError):
            config(max_concurrency=0)

    def test_retry_floor(self):
        with pytest.raises(ValueError):
            config(max_retries=-1)

    def test_role_checked(self):
        with pytest.raises(ValueError):
            LlmEndpointConfig(role="oracle", model_id="m")

    def test_public_dict_names_env_not_key(self):
        c = config(api_key_env="MY_KEY")
        assert c.public_dict()["api_key_env"] == "MY_KEY"


class TestMockTransport:
    def test_same_prompt_same_response(self):
        table = MockTransport({mock_key("hello"): "world"})
        assert table.send("hello") == "world"
        assert table.send("hello") == "world"

    def test_missing_entry_is_permanent_failure(self):
        table = MockTransport({})
        with pytest.raises(BackendError, match="no mock entry"):
            table.send("hello")

    def test_from_jsonl_accepts_both_keyings(self, tmp_path):
        path = tmp_path / "table.jsonl"
        rows = [
            {"prompt": "alpha", "response": "one"},
            {"prompt_sha256": mock_key("beta"), "response": "two"},
        ]
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        table = MockTransport.from_jsonl(path)
        assert table.send("alpha") == "one"
        assert table.send("beta") == "two"

    def test_from_jsonl_requires_response(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps({"prompt": "x"}) + "\n")
        with pytest.raises(DataFormatError, match="response"):
            MockTransport.from_jsonl(path)


class TestRetries:
    def test_two_transient_failures_then_success(self):
        transport = FlakyTransport(failures=2)
        client = LlmClient(config(max_retries=3), transport, sleeper=lambda _s: None)
        assert client.complete("p") == "ok"
        assert transport.calls == 3

    def test_persistent_429_exhausts_budget(self):
        transport = FlakyTransport(failures=10_000)
        client = LlmClient(config(max_retries=3), transport, sleeper=lambda _s: None)
        with pytest.raises(CompletionError) as err:
            client.complete("p")
        assert err.value.attempts == 4
        assert transport.calls == 4

    def test_zero_retries_means_single_attempt(self):
        transport = FlakyTransport(failures=10_000)
        client = LlmClient(config(max_retries=0), transport, sleeper=lambda _s: None)
        with pytest.raises(CompletionError):
            client.complete("p")
        assert transport.calls == 1

    def test_permanent_errors_do_not_retry(self):
        class Permanent:
            calls = 0

            def send(self, prompt):
                self.calls += 1
                raise BackendError("HTTP 401")

        transport = Permanent()
        client = LlmClient(config(max_retries=5), transport, sleeper=lambda _s: None)
        with pytest.raises(BackendError):
            client.complete("p")
        assert transport.calls == 1

    def test_backoff_delays_grow_exponentially(self):
        delays = []
        transport = FlakyTransport(failures=3)
        client = LlmClient(
            config(max_retries=3, backoff_base_ms=1000),
            transport,
            sleeper=delays.append,
        )
        client.complete("p")
        assert len(delays) == 3
        # full jitter: each delay lands in [0, base * 2^attempt] seconds
        for attempt, delay in enumerate(delays):
            assert 0 <= delay <= 1.0 * (2**attempt)


class TestConcurrencyCap:
    def test_in_flight_never_exceeds_max_concurrency(self):
        lock = threading.Lock()
        state = {"current": 0, "peak": 0}

        class SlowTransport:
            def send(self, prompt):
                with lock:
                    state["current"] += 1
                    state["peak"] = max(state["peak"], state["current"])
                time.sleep(0.01)
                with lock:
                    state["current"] -= 1
                return "ok"

        client = LlmClient(config(max_concurrency=2), SlowTransport(), sleeper=lambda _s: None)
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(client.complete, [f"p{i}" for i in range(16)]))
        assert results == ["ok"] * 16
        assert state["peak"] <= 2
