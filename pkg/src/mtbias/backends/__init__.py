"""Provider abstractions, deterministic mocks, and the response cache."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping

from ..errors import ConfigError
from .base import ChatSession, Embedder, Judge, Translator, judge_exchange
from .cache import (
    CachedEmbedder,
    CachedJudge,
    CachedTranslator,
    CacheStats,
    ResponseCache,
    cache_key,
)

__all__ = [
    "ChatSession",
    "Embedder",
    "Judge",
    "Translator",
    "judge_exchange",
    "CachedEmbedder",
    "CachedJudge",
    "CachedTranslator",
    "CacheStats",
    "ResponseCache",
    "cache_key",
    "make_translator",
    "make_judge",
    "make_embedder",
]


def _http_config(spec: Mapping[str, Any]):
    from .http import HttpProviderConfig

    try:
        return HttpProviderConfig(
            endpoint=spec["endpoint"],
            request_template=spec["request_template"],
            response_path=spec["response_path"],
            model=spec.get("model", ""),
            auth_env=spec.get("auth_env"),
            headers=dict(spec.get("headers", {})),
            timeout=float(spec.get("timeout", 30.0)),
            max_attempts=int(spec.get("max_attempts", 3)),
            backoff_base=float(spec.get("backoff_base", 0.5)),
            requests_per_second=spec.get("requests_per_second"),
        )
    except KeyError as exc:
        raise ConfigError(f"http provider spec missing {exc.args[0]!r}") from None


def make_translator(spec: Mapping[str, Any], base_dir: Path | None = None) -> Translator:
    from . import mock

    kind = spec.get("kind")
    name = spec.get("name", kind)
    if kind == "identity":
        return mock.IdentityTranslator(spec.get("supported_languages"), provider_id=name)
    if kind == "table":
        return mock.TableTranslator.from_json(
            _resolve(spec, "table", base_dir),
            supported=spec.get("supported_languages"),
            provider_id=name,
        )
    if kind == "http":
        from .http import HttpTranslator

        return HttpTranslator(
            _http_config(spec),
            provider_id=name,
            prompt_mode=spec.get("prompt_mode", "raw"),
            supported_languages=spec.get("supported_languages"),
        )
    raise ConfigError(f"unknown translator kind {kind!r}")


def make_judge(spec: Mapping[str, Any], base_dir: Path | None = None) -> Judge:
    from . import mock

    kind = spec.get("kind")
    name = spec.get("name", kind)
    if kind == "scripted":
        return mock.ScriptedJudge.from_json(_resolve(spec, "script", base_dir), provider_id=name)
    if kind == "http":
        from .http import HttpJudge

        return HttpJudge(_http_config(spec), provider_id=name)
    raise ConfigError(f"unknown judge kind {kind!r}")


def make_embedder(spec: Mapping[str, Any], seed: int, base_dir: Path | None = None) -> Embedder:
    from . import mock

    kind = spec.get("kind")
    name = spec.get("name", kind)
    if kind == "hash":
        return mock.HashEmbedder(
            seed=int(spec.get("seed", seed)), dim=int(spec.get("dim", 16)), provider_id=name
        )
    if kind == "table":
        import json

        table = json.loads(Path(_resolve(spec, "table", base_dir)).read_text(encoding="utf-8"))
        fallback = None
        if spec.get("hash_fallback", True):
            fallback = mock.HashEmbedder(seed=int(spec.get("seed", seed)), dim=int(spec.get("dim", 16)))
        return mock.TableEmbedder(table, fallback=fallback, provider_id=name)
    if kind == "http":
        from .http import HttpEmbedder

        return HttpEmbedder(_http_config(spec), provider_id=name)
    raise ConfigError(f"unknown embedder kind {kind!r}")


def _resolve(spec: Mapping[str, Any], key: str, base_dir: Path | None) -> Path:
    try:
        raw = spec[key]
    except KeyError:
        raise ConfigError(f"provider spec ({spec.get('kind')!r}) missing {key!r}") from None
    path = Path(raw)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    if not path.exists():
        raise ConfigError(f"provider file does not exist: {path}")
    return path
