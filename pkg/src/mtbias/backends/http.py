"""Generic HTTP providers configured entirely at runtime.

No vendor endpoint is hard-coded: each provider takes an endpoint URL, a JSON
request template with ``{placeholder}`` substitution, and a dotted response
extraction path. Transient transport failures are retried with exponential
backoff; anything else surfaces as :class:`ProviderError`.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import httpx
import numpy as np

from ..detection.prompts import build_translation_prompt
from ..errors import ConfigError, ProviderError, UnsupportedLanguageError


@dataclass
class HttpProviderConfig:
    endpoint: str
    request_template: Any
    response_path: str
    model: str = ""
    auth_env: str | None = None
    headers: dict[str, str] = field(default_factory=dict)
    timeout: float = 30.0
    max_attempts: int = 3
    backoff_base: float = 0.5
    requests_per_second: float | None = None


class _SafeDict(dict):
    def __missing__(self, key: str) -> str:
        return "{" + key + "}"


def render_template(template: Any, values: Mapping[str, Any]) -> Any:
    """Fill ``{placeholder}`` strings recursively; ``"$messages"`` expands in place."""
    if isinstance(template, str):
        if template.startswith("$") and template[1:] in values:
            return values[template[1:]]
        return template.format_map(_SafeDict(values))
    if isinstance(template, Mapping):
        return {k: render_template(v, values) for k, v in template.items()}
    if isinstance(template, list):
        return [render_template(v, values) for v in template]
    return template


def extract_path(payload: Any, path: str) -> Any:
    """Walk a dotted path with integer segments indexing lists."""
    node = payload
    for segment in path.split("."):
        try:
            if isinstance(node, list):
                node = node[int(segment)]
            else:
                node = node[segment]
        except (KeyError, IndexError, TypeError, ValueError):
            raise ProviderError(f"response path {path!r} failed at segment {segment!r}") from None
    return node


class _HttpBase:
    def __init__(self, config: HttpProviderConfig, provider_id: str, transport: httpx.BaseTransport | None = None):
        self.config = config
        self.id = provider_id
        headers = dict(config.headers)
        if config.auth_env:
            token = os.environ.get(config.auth_env)
            if not token:
                raise ConfigError(f"auth env var {config.auth_env!r} is not set")
            headers.setdefault("Authorization", f"Bearer {token}")
        self._client = httpx.Client(timeout=config.timeout, headers=headers, transport=transport)
        self._rate_lock = threading.Lock()
        self._last_request = 0.0

    def _throttle(self) -> None:
        if not self.config.requests_per_second:
            return
        interval = 1.0 / self.config.requests_per_second
        with self._rate_lock:
            wait = self._last_request + interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()

    def _post(self, body: Any) -> Any:
        last_error: Exception | None = None
        for attempt in range(self.config.max_attempts):
            if attempt:
                time.sleep(self.config.backoff_base * 2 ** (attempt - 1))
            self._throttle()
            try:
                response = self._client.post(self.config.endpoint, json=body)
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code >= 500 or response.status_code == 429:
                last_error = ProviderError(f"{self.id}: HTTP {response.status_code}", retryable=True)
                continue
            if response.status_code >= 400:
                raise ProviderError(f"{self.id}: HTTP {response.status_code}: {response.text[:200]}")
            try:
                return response.json()
            except ValueError as exc:
                raise ProviderError(f"{self.id}: non-JSON response: {exc}") from None
        raise ProviderError(f"{self.id}: giving up after {self.config.max_attempts} attempts: {last_error}")

    def _call(self, values: Mapping[str, Any]) -> Any:
        body = render_template(self.config.request_template, {"model": self.config.model, **values})
        return extract_path(self._post(body), self.config.response_path)


class HttpTranslator(_HttpBase):
    """Template-driven translation endpoint.

    ``prompt_mode="chat"`` exposes a ``{prompt}`` placeholder holding the
    fixed translation instruction wrapped around the source text, for chat
    LLM endpoints; ``"raw"`` exposes only ``{text}``/``{source_lang}``/
    ``{target_lang}`` for conventional MT APIs.
    """

    def __init__(
        self,
        config: HttpProviderConfig,
        provider_id: str,
        prompt_mode: str = "raw",
        supported_languages: Sequence[str] | None = None,
        transport: httpx.BaseTransport | None = None,
    ):
        super().__init__(config, provider_id, transport)
        if prompt_mode not in ("raw", "chat"):
            raise ConfigError(f"prompt_mode must be 'raw' or 'chat', got {prompt_mode!r}")
        self.prompt_mode = prompt_mode
        self.supported = (
            {s.split("-")[0].lower() for s in supported_languages}
            if supported_languages is not None
            else None
        )

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        if self.supported is not None and target_lang.split("-")[0].lower() not in self.supported:
            raise UnsupportedLanguageError(f"{self.id} does not support {target_lang!r}")
        values: dict[str, Any] = {
            "text": text,
            "source_lang": source_lang,
            "target_lang": target_lang,
        }
        if self.prompt_mode == "chat":
            values["prompt"] = build_translation_prompt(text, target_lang)
        result = self._call(values)
        if not isinstance(result, str):
            raise ProviderError(f"{self.id}: expected text result, got {type(result).__name__}")
        return result


class HttpJudge(_HttpBase):
    """Chat endpoint; the template's ``"$messages"`` slot receives the history."""

    def reply(self, messages: list[tuple[str, str]]) -> str:
        wire = [{"role": role, "content": content} for role, content in messages]
        result = self._call({"messages": wire})
        if not isinstance(result, str):
            raise ProviderError(f"{self.id}: expected text result, got {type(result).__name__}")
        return result


class HttpEmbedder(_HttpBase):
    def embed(self, text: str) -> np.ndarray:
        result = self._call({"text": text})
        try:
            vector = np.asarray([float(v) for v in result], dtype=np.float64)
        except (TypeError, ValueError):
            raise ProviderError(f"{self.id}: response is not a numeric vector") from None
        if vector.ndim != 1 or vector.size == 0:
            raise ProviderError(f"{self.id}: response is not a flat non-empty vector")
        return vector
