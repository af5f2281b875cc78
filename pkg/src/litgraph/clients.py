"""HTTP clients for completion and embedding endpoints.

Both speak the common OpenAI-compatible JSON shapes. Anything with the same
``complete`` / ``embed`` methods can stand in for these in tests.
"""

from __future__ import annotations

import os
import time
from typing import Callable, Protocol, Sequence

import requests

from .errors import EndpointError

LLM_URL_ENV = "LITGRAPH_LLM_URL"
LLM_KEY_ENV = "LITGRAPH_LLM_KEY"
EMBED_URL_ENV = "LITGRAPH_EMBED_URL"
MODEL_URL_ENV = "LITGRAPH_MODEL_URL"


class CompletionClient(Protocol):
    def complete(self, prompt: str, max_new_tokens: int | None = None) -> str: ...


class EmbeddingClient(Protocol):
    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


class HttpCompletionClient:
    """Chat-completions client: ``{model, messages, temperature=0}`` body.

    Decoding is always greedy (temperature 0); ``max_new_tokens`` maps to the
    ``max_tokens`` field when given.
    """

    def __init__(
        self,
        url: str | None = None,
        model: str = "default",
        api_key: str | None = None,
        timeout: float = 120.0,
        url_env: str = LLM_URL_ENV,
    ):
        self.url = url or os.environ.get(url_env, "")
        if not self.url:
            raise EndpointError(f"no completion endpoint configured (set {url_env})")
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(LLM_KEY_ENV)
        self.timeout = timeout
        self._session = requests.Session()

    def complete(self, prompt: str, max_new_tokens: int | None = None) -> str:
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        if max_new_tokens is not None:
            body["max_tokens"] = max_new_tokens
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = self._session.post(self.url, json=body, headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except requests.RequestException as exc:
            raise EndpointError(f"completion request failed: {exc}") from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise EndpointError(f"unexpected completion response shape: {exc}") from exc


class HttpEmbeddingClient:
    """Embedding client: ``{model, input: [text]}`` -> ``{data: [{embedding}]}``."""

    def __init__(self, url: str | None = None, model: str = "default", timeout: float = 120.0):
        self.url = url or os.environ.get(EMBED_URL_ENV, "")
        if not self.url:
            raise EndpointError(f"no embedding endpoint configured (set {EMBED_URL_ENV})")
        self.model = model
        self.timeout = timeout
        self._session = requests.Session()

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        try:
            resp = self._session.post(
                self.url,
                json={"model": self.model, "input": list(texts)},
                timeout=self.timeout,
            )
            resp.raise_for_status()
            data = resp.json()
            return [row["embedding"] for row in data["data"]]
        except requests.RequestException as exc:
            raise EndpointError(f"embedding request failed: {exc}") from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise EndpointError(f"unexpected embedding response shape: {exc}") from exc


def with_retries(
    call: Callable[[], str],
    attempts: int = 3,
    backoff: float = 1.0,
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    """Run ``call`` with bounded retries and exponential backoff.

    Re-raises the last failure once attempts are exhausted.
    """
    last: Exception | None = None
    for attempt in range(attempts):
        try:
            return call()
        except Exception as exc:
            last = exc
            if attempt < attempts - 1:
                sleep(backoff * (2 ** attempt))
    assert last is not None
    raise last
