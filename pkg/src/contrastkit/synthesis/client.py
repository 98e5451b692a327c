"""Chat-completion transport with retries, backoff, and a mock twin.

`LlmClient` wraps any transport with exponential backoff + full jitter
(backoff_base_ms * 2^attempt) on transient failures and caps in-flight
requests per endpoint with a semaphore. The HTTP transport speaks the
OpenAI-style /chat/completions wire format; the mock transport replays a
prompt-hash-keyed table for deterministic offline runs.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import threading
import time
from dataclasses import dataclass

import requests

from ..errors import BackendError, CompletionError, DataFormatError, TransientBackendError

logger = logging.getLogger(__name__)

__all__ = [
    "LlmEndpointConfig",
    "LlmClient",
    "HttpChatTransport",
    "MockTransport",
    "mock_key",
]

_TRANSIENT_STATUS = {408, 429, 500, 502, 503, 504}


@dataclass(frozen=True)
class LlmEndpointConfig:
    """Connection and retry policy for one generator or judge endpoint."""

    role: str  # "generator" | "judge"
    model_id: str
    base_url: str = ""
    api_key_env: str = ""
    max_retries: int = 3
    backoff_base_ms: int = 250
    timeout_ms: int = 60000
    max_concurrency: int = 4

    def __post_init__(self):
        if self.role not in ("generator", "judge"):
            raise ValueError(f"role must be generator or judge, got {self.role!r}")
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    def public_dict(self) -> dict:
        """Manifest-safe echo (names the key env var, never the key)."""
        return {
            "role": self.role,
            "model_id": self.model_id,
            "base_url": self.base_url,
            "api_key_env": self.api_key_env,
            "max_retries": self.max_retries,
            "backoff_base_ms": self.backoff_base_ms,
            "timeout_ms": self.timeout_ms,
            "max_concurrency": self.max_concurrency,
        }


def mock_key(prompt: str) -> str:
    """Table key for a prompt: sha256 of its UTF-8 bytes."""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class HttpChatTransport:
    """POSTs to ``<base_url>/chat/completions`` with bearer auth."""

    def __init__(self, config: LlmEndpointConfig, session=None):
        if not config.base_url:
            raise BackendError(f"{config.role} endpoint has no base_url")
        if not config.api_key_env:
            raise BackendError(f"{config.role} endpoint has no api_key_env")
        api_key = os.environ.get(config.api_key_env)
        if not api_key:
            raise BackendError(
                f"environment variable {config.api_key_env} is not set; "
                "refusing to start network calls"
            )
        self._config = config
        self._api_key = api_key
        self._session = session or requests.Session()

    def send(self, prompt: str) -> str:
        config = self._config
        url = config.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": config.model_id,
            "messages": [{"role": "user", "content": prompt}],
        }
        try:
            response = self._session.post(
                url,
                json=payload,
                headers={"Authorization": f"Bearer {self._api_key}"},
                timeout=config.timeout_ms / 1000.0,
            )
        except (requests.Timeout, requests.ConnectionError) as exc:
            raise TransientBackendError(f"{config.model_id}: {exc}")
        if response.status_code in _TRANSIENT_STATUS:
            raise TransientBackendError(
                f"{config.model_id}: HTTP {response.status_code}"
            )
        if response.status_code != 200:
            raise BackendError(
                f"{config.model_id}: HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"{config.model_id}: malformed completion body: {exc}")


class MockTransport:
    """Deterministic offline backend keyed by prompt hash.

    Table entries are jsonl records with a ``response`` plus either a
    ``prompt`` (hashed at load) or a precomputed ``prompt_sha256``.
    """

    def __init__(self, table: dict):
        self._table = dict(table)

    @classmethod
    def from_jsonl(cls, path) -> "MockTransport":
        table = {}
        with open(path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataFormatError(f"line {lineno}: invalid json ({exc.msg})")
                if "response" not in rec:
                    raise DataFormatError(f"line {lineno}: missing field 'response'")
                if "prompt_sha256" in rec:
                    key = rec["prompt_sha256"]
                elif "prompt" in rec:
                    key = mock_key(rec["prompt"])
                else:
                    raise DataFormatError(
                        f"line {lineno}: need 'prompt' or 'prompt_sha256'"
                    )
                table[key] = rec["response"]
        return cls(table)

    def send(self, prompt: str) -> str:
        key = mock_key(prompt)
        if key not in self._table:
            raise BackendError(f"no mock entry for prompt hash {key[:12]}...")
        return self._table[key]


class LlmClient:
    """Retrying, concurrency-capped completion client over one endpoint."""

    def __init__(self, config: LlmEndpointConfig, transport, sleeper=time.sleep, rng=None):
        self.config = config
        self._transport = transport
        self._sleep = sleeper
        self._rng = rng or random.Random()
        self._semaphore = threading.Semaphore(config.max_concurrency)

    def complete(self, prompt: str) -> str:
        """Return the model's text, retrying transient failures.

        Backoff before attempt k+1 is uniform in [0, backoff_base_ms * 2^k]
        (full jitter). Raises CompletionError once max_retries are spent.
        """
        config = self.config
        last_error = None
        for attempt in range(config.max_retries + 1):
            with self._semaphore:
                try:
                    return self._transport.send(prompt)
                except TransientBackendError as exc:
                    last_error = exc
                    logger.warning(
                        "%s attempt %d/%d failed: %s",
                        config.model_id,
                        attempt + 1,
                        config.max_retries + 1,
                        exc,
                    )
            if attempt < config.max_retries:
                delay_ms = self._rng.uniform(0, config.backoff_base_ms * (2**attempt))
                self._sleep(delay_ms / 1000.0)
        raise CompletionError(
            f"{config.model_id}: retries exhausted ({last_error})",
            attempts=config.max_retries + 1,
        )
