"""Chat-completion and embedding backends.

The scripted backend is the deterministic substitute used for reproducible
runs and tests: a pure function of (prompt, seed). It reads the machine
context block that every prompt template embeds between ``<<<CONTEXT`` and
``>>>`` and answers according to the task named there. The http backend
speaks a chat-completion JSON shape against a configurable endpoint.
"""
from __future__ import annotations

import json
import os
from typing import Protocol

import numpy as np

from ..errors import ConfigError, TransportError

CONTEXT_OPEN = "<<<CONTEXT"
CONTEXT_CLOSE = ">>>"

_CLOSERS = (
    "Position accordingly.",
    "Monitoring continues.",
    "No further remarks.",
    "Review stands as written.",
)


class ChatBackend(Protocol):
    def complete(self, prompt: str) -> str: ...


def extract_context(prompt: str) -> dict:
    """The JSON context block a template embeds, or {} when absent."""
    start = prompt.find(CONTEXT_OPEN)
    if start < 0:
        return {}
    start += len(CONTEXT_OPEN)
    end = prompt.find(CONTEXT_CLOSE, start)
    if end < 0:
        return {}
    try:
        return json.loads(prompt[start:end].strip())
    except json.JSONDecodeError:
        return {}


class ScriptedBackend:
    """Deterministic reply generator.

    ``overrides`` maps prompt substrings to literal replies and wins over the
    built-in task handling (checked in sorted key order for determinism).
    """

    def __init__(self, seed: int = 0, overrides: dict[str, str] | None = None):
        self.seed = int(seed)
        self.overrides = dict(overrides or {})
        self.calls = 0

    def complete(self, prompt: str) -> str:
        self.calls += 1
        for needle in sorted(self.overrides):
            if needle in prompt:
                return self.overrides[needle]
        context = extract_context(prompt)
        task = context.get("task", "")
        if task == "investment-decision":
            weights = context.get("target_weights")
            if weights:
                return json.dumps({"kind": "Rebalance", "payload": {"weights": weights}})
            return json.dumps({"kind": "BuySellHold", "payload": {"side": "hold"}})
        if task == "report-synthesis":
            kind = context.get("kind", "report")
            date = context.get("date", "")
            highlights = context.get("highlights", [])
            closer = _CLOSERS[(self.seed + len(highlights)) % len(_CLOSERS)]
            body = " ".join(f"[{i + 1}] {h}" for i, h in enumerate(highlights))
            return f"{kind} synthesis for {date}: {body} {closer}".strip()
        if task == "sentiment":
            return "0.0"
        return json.dumps({"kind": "BuySellHold", "payload": {"side": "hold"}})


class HttpChatBackend:
    """Chat-completion client for an OpenAI-style JSON endpoint.

    The credential is read from ``api_key_env`` (default QUANTDESK_API_KEY)
    at call time; transient transport failures retry up to ``max_retries``
    before surfacing a TransportError.
    """

    def __init__(self, endpoint: str, model: str, temperature: float = 0.7,
                 api_key_env: str = "QUANTDESK_API_KEY", timeout: float = 60.0,
                 max_retries: int = 2):
        if not endpoint:
            raise ConfigError("http backend requires an endpoint")
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.max_retries = max_retries
        self.calls = 0

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def complete(self, prompt: str) -> str:
        import requests

        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        }
        last_error: Exception | None = None
        for _ in range(self.max_retries + 1):
            self.calls += 1
            try:
                resp = requests.post(self.endpoint, json=payload,
                                     headers=self._headers(), timeout=self.timeout)
                resp.raise_for_status()
                body = resp.json()
                return body["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
        raise TransportError(f"chat completion failed: {last_error}")


class HttpEmbedder:
    """Embedding client for an OpenAI-style /embeddings endpoint."""

    def __init__(self, endpoint: str, model: str,
                 api_key_env: str = "QUANTDESK_API_KEY", timeout: float = 60.0,
                 max_retries: int = 2):
        if not endpoint:
            raise ConfigError("http embedder requires an endpoint")
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.max_retries = max_retries
        self.calls = 0

    def __call__(self, text: str) -> np.ndarray:
        import requests

        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        last_error: Exception | None = None
        for _ in range(self.max_retries + 1):
            self.calls += 1
            try:
                resp = requests.post(self.endpoint,
                                     json={"model": self.model, "input": [text]},
                                     headers=headers, timeout=self.timeout)
                resp.raise_for_status()
                vec = np.array(resp.json()["data"][0]["embedding"], dtype=float)
                norm = float(np.linalg.norm(vec))
                return vec / norm if norm > 0 else vec
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
        raise TransportError(f"embedding call failed: {last_error}")
