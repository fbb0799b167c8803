"""Run configuration: one YAML document describing corpus, providers, and scoring.

Secrets never live in the file; HTTP providers name an environment variable
instead. Relative paths are resolved against the config file's directory.
The config hash covers everything that can change results; execution knobs
(parallelism, offline) are excluded so a resumed run matches.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigError
from .detection.pipeline import Thresholds

DEFAULT_AGGREGATION_LEVELS = (3, 4)


@dataclass(frozen=True)
class ReferencesConfig:
    labor_stats: Path | None = None
    country_by_language: dict[str, str] = field(default_factory=dict)
    year_mode: str | int = "latest"


@dataclass(frozen=True)
class StereotypesConfig:
    ratings: Path
    variance_threshold: float = 1.5


@dataclass(frozen=True)
class RunConfig:
    corpus: Path
    taxonomy: Path
    languages: tuple[str, ...]
    translators: tuple[dict[str, Any], ...]
    judge: dict[str, Any]
    embedder: dict[str, Any]
    cache_dir: Path
    source_language: str = "en"
    seed: int = 0
    parallelism: int = 1
    aggregation_levels: tuple[int, ...] = DEFAULT_AGGREGATION_LEVELS
    thresholds: Thresholds = field(default_factory=Thresholds)
    references: ReferencesConfig = field(default_factory=ReferencesConfig)
    stereotypes: StereotypesConfig | None = None
    base_dir: Path = Path(".")

    def config_hash(self) -> str:
        """Hash of every result-affecting setting (not parallelism)."""
        payload = {
            "corpus": str(self.corpus),
            "taxonomy": str(self.taxonomy),
            "languages": list(self.languages),
            "source_language": self.source_language,
            "seed": self.seed,
            "aggregation_levels": list(self.aggregation_levels),
            "thresholds": {"fuzzy": self.thresholds.fuzzy, "isco_match": self.thresholds.isco_match},
            "translators": [_hashable(t) for t in self.translators],
            "judge": _hashable(self.judge),
            "embedder": _hashable(self.embedder),
            "references": {
                "labor_stats": str(self.references.labor_stats) if self.references.labor_stats else None,
                "country_by_language": dict(sorted(self.references.country_by_language.items())),
                "year_mode": self.references.year_mode,
            },
            "stereotypes": (
                {
                    "ratings": str(self.stereotypes.ratings),
                    "variance_threshold": self.stereotypes.variance_threshold,
                }
                if self.stereotypes
                else None
            ),
        }
        canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @property
    def translator_names(self) -> list[str]:
        return [t.get("name", t.get("kind", "?")) for t in self.translators]


def _hashable(spec: Mapping[str, Any]) -> Any:
    return json.loads(json.dumps(spec, sort_keys=True, default=str))


def _resolve(base: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else base / path


def _require_file(path: Path, what: str) -> Path:
    if not path.is_file():
        raise ConfigError(f"{what} does not exist: {path}")
    return path


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    return parse_config(raw, base_dir=path.parent)


def parse_config(raw: Mapping[str, Any], base_dir: Path) -> RunConfig:
    def need(key: str) -> Any:
        if key not in raw:
            raise ConfigError(f"config is missing {key!r}")
        return raw[key]

    languages = tuple(need("languages"))
    if not languages:
        raise ConfigError("languages must be non-empty")

    translators = tuple(dict(t) for t in need("translators"))
    if not translators:
        raise ConfigError("translators must be non-empty")
    names = [t.get("name", t.get("kind")) for t in translators]
    if len(set(names)) != len(names):
        raise ConfigError(f"translator names must be unique, got {names}")

    parallelism = int(raw.get("parallelism", 1))
    if parallelism < 1:
        raise ConfigError(f"parallelism must be >= 1, got {parallelism}")

    thresholds_raw = raw.get("thresholds", {})
    try:
        thresholds = Thresholds(
            fuzzy=float(thresholds_raw.get("fuzzy", Thresholds().fuzzy)),
            isco_match=float(thresholds_raw.get("isco_match", Thresholds().isco_match)),
        )
    except Exception as exc:
        raise ConfigError(f"invalid thresholds: {exc}") from None

    levels = tuple(int(l) for l in raw.get("aggregation_levels", DEFAULT_AGGREGATION_LEVELS))
    if not levels or any(l not in (1, 2, 3, 4) for l in levels):
        raise ConfigError(f"aggregation_levels must be within 1..4, got {levels}")

    references_raw = raw.get("references", {}) or {}
    labor_path = references_raw.get("labor_stats")
    references = ReferencesConfig(
        labor_stats=_require_file(_resolve(base_dir, labor_path), "labor_stats") if labor_path else None,
        country_by_language=dict(references_raw.get("country_by_language", {})),
        year_mode=references_raw.get("year_mode", "latest"),
    )
    if isinstance(references.year_mode, str) and references.year_mode not in ("latest", "pooled"):
        if not references.year_mode.isdigit():
            raise ConfigError(f"year_mode must be latest, pooled, or a year: {references.year_mode!r}")
        references = ReferencesConfig(
            references.labor_stats, references.country_by_language, int(references.year_mode)
        )

    stereotypes_raw = raw.get("stereotypes")
    stereotypes = None
    if stereotypes_raw:
        stereotypes = StereotypesConfig(
            ratings=_require_file(_resolve(base_dir, stereotypes_raw["ratings"]), "stereotype ratings"),
            variance_threshold=float(stereotypes_raw.get("variance_threshold", 1.5)),
        )

    return RunConfig(
        corpus=_require_file(_resolve(base_dir, str(need("corpus"))), "corpus"),
        taxonomy=_require_file(_resolve(base_dir, str(need("taxonomy"))), "taxonomy"),
        languages=languages,
        translators=translators,
        judge=dict(need("judge")),
        embedder=dict(need("embedder")),
        cache_dir=_resolve(base_dir, str(raw.get("cache_dir", "cache"))),
        source_language=str(raw.get("source_language", "en")),
        seed=int(raw.get("seed", 0)),
        parallelism=parallelism,
        aggregation_levels=levels,
        thresholds=thresholds,
        references=references,
        stereotypes=stereotypes,
        base_dir=base_dir,
    )
