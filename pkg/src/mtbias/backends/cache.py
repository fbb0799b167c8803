"""Persistent content-addressed response cache and cached provider wrappers.

One file per entry, named by the hex hash of the canonical request payload.
Writes go through a temp file and ``os.replace`` so concurrent writers of the
same key are idempotent and readers never see partial entries.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..errors import ProviderError
from .base import Embedder, Judge, Translator


def canonical_payload(payload: Mapping[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def cache_key(payload: Mapping[str, Any]) -> str:
    return hashlib.sha256(canonical_payload(payload).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CacheStats:
    entries: int
    total_bytes: int


class ResponseCache:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> str | None:
        path = self._path(key)
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return None
        except json.JSONDecodeError:
            return None  # partial/corrupt entry: treat as a miss, it will be rewritten
        return entry["value"]

    def put(self, key: str, value: str) -> None:
        entry = {"value": value, "created_at": time.time()}
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, ensure_ascii=False)
            os.replace(tmp, self._path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def stats(self) -> CacheStats:
        entries = 0
        total = 0
        for path in self.directory.glob("*.json"):
            entries += 1
            total += path.stat().st_size
        return CacheStats(entries, total)

    def clear(self) -> int:
        removed = 0
        for path in self.directory.glob("*.json"):
            path.unlink()
            removed += 1
        return removed


class _Counted:
    """Shared bookkeeping for the cached wrappers."""

    def __init__(self, cache: ResponseCache | None, offline: bool):
        self.cache = cache
        self.offline = offline
        self.provider_requests = 0
        self.cache_hits = 0
        self._lock = threading.Lock()

    def _fetch(self, payload: Mapping[str, Any], compute) -> str:
        key = cache_key(payload)
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                with self._lock:
                    self.cache_hits += 1
                return hit
        if self.offline:
            raise ProviderError(f"offline mode: cache miss for {canonical_payload(payload)[:200]}")
        value = compute()
        with self._lock:
            self.provider_requests += 1
        if self.cache is not None:
            self.cache.put(key, value)
        return value


class CachedTranslator(_Counted):
    def __init__(self, inner: Translator, cache: ResponseCache | None, offline: bool = False):
        super().__init__(cache, offline)
        self.inner = inner
        self.id = inner.id

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        payload = {
            "op": "translate",
            "provider": self.id,
            "source_lang": source_lang,
            "target_lang": target_lang,
            "text": text,
        }
        return self._fetch(payload, lambda: self.inner.translate(text, source_lang, target_lang))


class CachedJudge(_Counted):
    def __init__(self, inner: Judge, cache: ResponseCache | None, offline: bool = False):
        super().__init__(cache, offline)
        self.inner = inner
        self.id = inner.id

    def reply(self, messages: list[tuple[str, str]]) -> str:
        # The full history is part of the key: the second message's meaning
        # depends on the first exchange.
        payload = {
            "op": "chat",
            "provider": self.id,
            "messages": [[role, content] for role, content in messages],
        }
        return self._fetch(payload, lambda: self.inner.reply(messages))


class CachedEmbedder(_Counted):
    def __init__(self, inner: Embedder, cache: ResponseCache | None, offline: bool = False):
        super().__init__(cache, offline)
        self.inner = inner
        self.id = inner.id

    def embed(self, text: str) -> np.ndarray:
        payload = {"op": "embed", "provider": self.id, "text": text}
        raw = self._fetch(payload, lambda: json.dumps([float(v) for v in self.inner.embed(text)]))
        return np.asarray(json.loads(raw), dtype=np.float64)
