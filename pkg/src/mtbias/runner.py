"""End-to-end orchestration: translate, detect, score, and validate.

A run directory holds one stage output per directory (``translations/``,
``detections/``, ``scores/``, ``reports/``); each stage consumes only the
previous stage's serialized output, so stages are independently re-runnable
and an interrupted run resumes from what is already on disk.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import FIRST_COMPLETED, Future, ThreadPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Sequence

from . import metrics
from .backends import (
    CachedEmbedder,
    CachedJudge,
    CachedTranslator,
    ResponseCache,
    make_embedder,
    make_judge,
    make_translator,
)
from .config import RunConfig
from .corpus import (
    LaborStatsTable,
    StereotypeRecord,
    TextSample,
    build_stereotype_assignment,
    load_labor_stats,
    load_samples,
    load_stereotype_ratings,
)
from .detection.pipeline import DetectedOccupation, detect, select_primary
from .errors import (
    ConfigError,
    InsufficientOverlapError,
    MissingGoldError,
    MtbiasError,
    UnsupportedLanguageError,
)
from .gender import GenderLabel
from .manifest import STATUS_DONE, STATUS_SKIPPED, RunManifest
from .metrics import GenderCounts, ReferenceDistribution
from .taxonomy import Taxonomy, load_taxonomy, truncate_to_level

log = logging.getLogger(__name__)

ProgressFn = Callable[[str, str, str], None]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunPaths:
    root: Path

    def translations(self, model: str, lang: str) -> Path:
        return self.root / "translations" / model / f"{lang}.jsonl"

    def detections(self, model: str, lang: str) -> Path:
        return self.root / "detections" / model / f"{lang}.jsonl"

    def scores_dir(self, model: str, lang: str) -> Path:
        return self.root / "scores" / model / lang

    def correlations_dir(self) -> Path:
        return self.root / "scores" / "correlations"

    def reports_dir(self) -> Path:
        return self.root / "reports"

    def validation_dir(self) -> Path:
        return self.root / "validation"


@dataclass
class Providers:
    translators: dict[str, CachedTranslator]
    judge: CachedJudge
    embedder: CachedEmbedder

    @classmethod
    def build(
        cls,
        config: RunConfig,
        offline: bool = False,
        cache: ResponseCache | None = None,
        raw_translators: Mapping[str, Any] | None = None,
        raw_judge: Any = None,
        raw_embedder: Any = None,
        need_translators: bool = True,
    ) -> "Providers":
        cache = cache or ResponseCache(config.cache_dir)
        if raw_translators is None:
            raw_translators = {}
            if need_translators:
                for spec in config.translators:
                    translator = make_translator(spec, base_dir=config.base_dir)
                    raw_translators[spec.get("name", spec.get("kind"))] = translator
        translators = {
            name: CachedTranslator(t, cache, offline) for name, t in raw_translators.items()
        }
        judge = CachedJudge(raw_judge or make_judge(config.judge, base_dir=config.base_dir), cache, offline)
        embedder = CachedEmbedder(
            raw_embedder or make_embedder(config.embedder, config.seed, base_dir=config.base_dir),
            cache,
            offline,
        )
        return cls(translators=translators, judge=judge, embedder=embedder)

    def stats(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for name, translator in self.translators.items():
            out[f"translator:{name}"] = {
                "requests": translator.provider_requests,
                "cache_hits": translator.cache_hits,
            }
        out["judge"] = {"requests": self.judge.provider_requests, "cache_hits": self.judge.cache_hits}
        out["embedder"] = {
            "requests": self.embedder.provider_requests,
            "cache_hits": self.embedder.cache_hits,
        }
        return out

    @property
    def total_requests(self) -> int:
        return sum(v["requests"] for v in self.stats().values())


# ---------------------------------------------------------------------------
# JSONL stage files
# ---------------------------------------------------------------------------

def _read_jsonl(path: Path) -> list[dict]:
    """Read complete rows, silently dropping a torn final line."""
    rows: list[dict] = []
    if not path.is_file():
        return rows
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError:
                continue
    return rows


def _rewrite_sorted(path: Path, rows: Iterable[dict], key: str) -> None:
    rows = sorted(rows, key=lambda r: r[key])
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
    os.replace(tmp, path)


def _run_stage(
    pending: Sequence[TextSample],
    worker: Callable[[TextSample], tuple[dict | None, str | None]],
    out_path: Path,
    key: str,
    existing: list[dict],
    unit: str,
    stage: str,
    manifest: RunManifest,
    parallelism: int,
    progress: ProgressFn | None,
) -> list[dict]:
    """Fan ``pending`` out to a worker pool, appending durable rows as they finish.

    The worker returns (row, skip_reason); exactly one is set. The file is
    rewritten in sorted order once the stage completes so final artifacts are
    order-independent.
    """
    out_path.parent.mkdir(parents=True, exist_ok=True)
    rows = list(existing)
    with out_path.open("a", encoding="utf-8") as fh:

        def record(sample_id: str, row: dict | None, reason: str | None) -> None:
            if row is not None:
                fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
                fh.flush()
                rows.append(row)
                manifest.set_sample(unit, sample_id, STATUS_DONE)
            else:
                manifest.set_sample(unit, sample_id, STATUS_SKIPPED, reason)
            if progress is not None:
                progress(unit, stage, sample_id)

        if parallelism <= 1:
            for sample in pending:
                row, reason = worker(sample)
                record(sample.id, row, reason)
        else:
            with ThreadPoolExecutor(max_workers=parallelism) as pool:
                futures: dict[Future, str] = {
                    pool.submit(worker, sample): sample.id for sample in pending
                }
                try:
                    not_done = set(futures)
                    while not_done:
                        done, not_done = wait(not_done, return_when=FIRST_COMPLETED)
                        for future in done:
                            row, reason = future.result()
                            record(futures[future], row, reason)
                except BaseException:
                    for future in futures:
                        future.cancel()
                    raise
    _rewrite_sorted(out_path, rows, key)
    return rows


# ---------------------------------------------------------------------------
# Evaluate
# ---------------------------------------------------------------------------

@dataclass
class EvalResult:
    run_dir: Path
    manifest: RunManifest
    providers: Providers


def _load_run_inputs(config: RunConfig) -> tuple[Taxonomy, list[TextSample]]:
    tax = load_taxonomy(config.taxonomy)
    log.info("taxonomy: %d entries, %d unit groups", len(tax), tax.unit_group_count)
    samples = load_samples(config.corpus, tax)
    if not samples:
        raise ConfigError(f"corpus is empty: {config.corpus}")
    return tax, samples


def _prepare_manifest(config: RunConfig, run_dir: Path) -> RunManifest:
    existing = RunManifest.load(run_dir)
    config_hash = config.config_hash()
    if existing is not None:
        if existing.config_hash != config_hash:
            raise ConfigError(
                f"run directory {run_dir} belongs to a different configuration "
                f"({existing.config_hash[:12]} != {config_hash[:12]})"
            )
        return existing
    return RunManifest.new(config_hash)


def evaluate(
    config: RunConfig,
    run_dir: str | Path,
    providers: Providers | None = None,
    parallelism: int | None = None,
    offline: bool = False,
    progress: ProgressFn | None = None,
) -> EvalResult:
    """Run the full pipeline for every (translator, language) pair."""
    if not config.translators and providers is None:
        raise ConfigError("config declares no translators")
    run_dir = Path(run_dir)
    paths = RunPaths(run_dir)
    parallelism = parallelism or config.parallelism
    tax, samples = _load_run_inputs(config)
    manifest = _prepare_manifest(config, run_dir)
    providers = providers or Providers.build(config, offline=offline)
    manifest.save(run_dir)

    samples_by_id = {s.id: s for s in samples}
    try:
        for model in sorted(providers.translators):
            translator = providers.translators[model]
            for lang in config.languages:
                unit = f"{model}/{lang}"
                _translate_unit(
                    unit, model, lang, samples, translator, config, paths, manifest, parallelism, progress
                )
                _detect_unit(
                    unit, model, lang, samples_by_id, tax, providers, config, paths, manifest, parallelism, progress
                )
    finally:
        manifest.provider_stats = providers.stats()
        manifest.save(run_dir)

    score_run(config, run_dir, tax)
    from .reporting import render_reports

    render_reports(run_dir)
    manifest.mark_stage("reports")
    manifest.provider_stats = providers.stats()
    manifest.save(run_dir)
    return EvalResult(run_dir=run_dir, manifest=manifest, providers=providers)


def _translate_unit(
    unit: str,
    model: str,
    lang: str,
    samples: Sequence[TextSample],
    translator: CachedTranslator,
    config: RunConfig,
    paths: RunPaths,
    manifest: RunManifest,
    parallelism: int,
    progress: ProgressFn | None,
) -> None:
    stage = f"translate:{unit}"
    out_path = paths.translations(model, lang)
    existing = _read_jsonl(out_path)
    done_ids = {row["id"] for row in existing}
    pending = [s for s in samples if s.id not in done_ids]
    if manifest.stage_done(stage) and not pending:
        return

    def worker(sample: TextSample) -> tuple[dict | None, str | None]:
        try:
            text = translator.translate(sample.text, config.source_language, lang)
        except UnsupportedLanguageError:
            raise
        except MtbiasError as exc:
            return None, f"translate: {exc}"
        return {"id": sample.id, "text": text}, None

    try:
        _run_stage(pending, worker, out_path, "id", existing, unit, stage, manifest, parallelism, progress)
    except UnsupportedLanguageError as exc:
        raise ConfigError(f"translator {model!r} cannot produce {lang!r}: {exc}") from exc
    manifest.mark_stage(stage)
    manifest.save(paths.root)


def _detect_unit(
    unit: str,
    model: str,
    lang: str,
    samples_by_id: Mapping[str, TextSample],
    tax: Taxonomy,
    providers: Providers,
    config: RunConfig,
    paths: RunPaths,
    manifest: RunManifest,
    parallelism: int,
    progress: ProgressFn | None,
) -> None:
    stage = f"detect:{unit}"
    out_path = paths.detections(model, lang)
    translations = {row["id"]: row["text"] for row in _read_jsonl(paths.translations(model, lang))}
    existing = _read_jsonl(out_path)
    done_ids = {row["sample_id"] for row in existing}
    pending = [
        samples_by_id[sid] for sid in sorted(translations) if sid not in done_ids and sid in samples_by_id
    ]
    if manifest.stage_done(stage) and not pending:
        return

    def worker(sample: TextSample) -> tuple[dict | None, str | None]:
        translated = translations[sample.id]
        try:
            detections = detect(
                text=translated,
                language=lang,
                candidate_codes=[sample.isco_code],
                tax=tax,
                judge=providers.judge,
                embedder=providers.embedder,
                thresholds=config.thresholds,
            )
        except (MtbiasError, ValueError) as exc:
            return None, f"detect: {exc}"
        primary, warnings = select_primary(detections)
        row: dict[str, Any] = {
            "sample_id": sample.id,
            "surface_title": None,
            "fuzzy_score": None,
            "matched_code": None,
            "match_similarity": None,
            "gender": None,
            "warnings": warnings,
        }
        if primary is not None:
            row.update(
                surface_title=primary.surface_title,
                fuzzy_score=primary.fuzzy_score,
                matched_code=primary.matched_code,
                match_similarity=primary.match_similarity,
                gender=primary.gender.value,
            )
        return row, None

    _run_stage(pending, worker, out_path, "sample_id", existing, unit, stage, manifest, parallelism, progress)
    manifest.mark_stage(stage)
    manifest.save(paths.root)


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

def _detection_records(rows: Iterable[dict]) -> list[DetectedOccupation]:
    records = []
    for row in rows:
        if row.get("matched_code") is None:
            continue
        records.append(
            DetectedOccupation(
                surface_title=row["surface_title"],
                in_text_verified=True,
                fuzzy_score=row["fuzzy_score"],
                matched_code=row["matched_code"],
                match_similarity=row["match_similarity"],
                gender=GenderLabel(row["gender"]),
            )
        )
    return records


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    import csv

    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _score_rows(scores: Iterable[metrics.GrapeScore], level: int | str) -> list[list[Any]]:
    return [
        [s.group, level, s.gender, s.reference, repr(s.value), s.counts.n_m, s.counts.n_f, s.counts.n_unclear]
        for s in scores
    ]


def _overall_real_score(
    counts_by_code3: Mapping[str, GenderCounts], reference: ReferenceDistribution
) -> tuple[metrics.GrapeScore | None, metrics.GrapeScore | None]:
    """Whole-corpus GRAPE under a per-group reference.

    Pools the groups that the reference covers and scores against the
    binary-count-weighted mean reference probability; groups without a
    reference entry are left out of both sides.
    """
    covered = {
        code: counts
        for code, counts in counts_by_code3.items()
        if reference.p_ref_m(code) is not None and counts.n_binary > 0
    }
    if not covered:
        return None, None
    pooled = metrics.pooled_counts(covered)
    weight = sum(c.n_binary for c in covered.values())
    p_ref_m = sum(reference.p_ref_m(code) * c.n_binary for code, c in covered.items()) / weight
    return (
        metrics.GrapeScore("ALL", "m", reference.name, metrics.grape(pooled, p_ref_m, "m"), pooled),
        metrics.GrapeScore("ALL", "f", reference.name, metrics.grape(pooled, p_ref_m, "f"), pooled),
    )


def score_run(config: RunConfig, run_dir: str | Path, tax: Taxonomy | None = None) -> None:
    """Compute every score table from the detection stage artifacts."""
    run_dir = Path(run_dir)
    paths = RunPaths(run_dir)
    manifest = RunManifest.load(run_dir)
    if manifest is None:
        raise ConfigError(f"no manifest in {run_dir}")
    tax = tax or load_taxonomy(config.taxonomy)

    labor: LaborStatsTable | None = None
    if config.references.labor_stats:
        labor = load_labor_stats(config.references.labor_stats)
    stereotype_records: list[StereotypeRecord] = []
    assignment4 = None
    if config.stereotypes:
        stereotype_records = load_stereotype_ratings(config.stereotypes.ratings, tax)
        assignment4 = build_stereotype_assignment(
            stereotype_records, level=4, variance_threshold=config.stereotypes.variance_threshold
        )

    parity = ReferenceDistribution.parity()
    p_f_series_all: dict[tuple[str, str], dict[str, float]] = {}
    real_shares: dict[str, dict[str, float]] = {}

    models = sorted({u.split("/")[0] for u in manifest.samples}) or config.translator_names
    for model in sorted(models):
        for lang in config.languages:
            unit = f"{model}/{lang}"
            rows = _read_jsonl(paths.detections(model, lang))
            if not rows and not manifest.stage_done(f"detect:{unit}"):
                continue
            records = _detection_records(rows)
            out_dir = paths.scores_dir(model, lang)

            references: list[ReferenceDistribution] = [parity]
            country = config.references.country_by_language.get(lang)
            if labor is not None and country:
                reference = ReferenceDistribution.from_labor_stats(labor, country, config.references.year_mode)
                references.append(reference)
                real_shares[lang] = labor.shares_for(country, config.references.year_mode)
            elif labor is not None:
                log.warning("no country mapped for language %r; ref=real skipped", lang)

            grape_rows: list[list[Any]] = []
            skipped_groups: dict[str, list[str]] = {}
            overall = metrics.pooled_counts(metrics.aggregate(records, 1)) if records else GenderCounts()
            counts_by_level = {
                level: metrics.aggregate(records, level) for level in config.aggregation_levels
            }
            counts3 = metrics.aggregate(records, 3) if records else {}
            counts4 = metrics.aggregate(records, 4) if records else {}

            for reference in references:
                if overall.n_binary > 0:
                    if reference.constant is not None:
                        grape_rows.extend(
                            _score_rows(
                                [
                                    metrics.GrapeScore(
                                        "ALL", g, reference.name, metrics.grape(overall, reference.constant, g), overall
                                    )
                                    for g in ("m", "f")
                                ],
                                0,
                            )
                        )
                    else:
                        score_m, score_f = _overall_real_score(counts3, reference)
                        if score_m and score_f:
                            grape_rows.extend(_score_rows([score_m, score_f], 0))
                for level in config.aggregation_levels:
                    scores, skipped = metrics.score_groups(counts_by_level[level], reference)
                    grape_rows.extend(_score_rows(scores, level))
                    if skipped:
                        skipped_groups.setdefault(reference.name, []).extend(
                            f"{level}:{code}" for code in skipped
                        )

            _write_csv(
                out_dir / "grape.csv",
                ["group", "level", "gender", "reference", "value", "n_m", "n_f", "n_unclear"],
                grape_rows,
            )

            extremity_rows = []
            extremity_counts = {c: 0 for c in metrics.ExtremityClass}
            for code in sorted(counts4):
                counts = counts4[code]
                if counts.n_binary == 0:
                    continue
                magnitude = abs(metrics.grape(counts, 0.5, "m"))
                cls = metrics.classify_extremity(magnitude)
                extremity_counts[cls] += 1
                extremity_rows.append([code, 4, repr(counts.p_m), repr(magnitude), cls.value])
            _write_csv(
                out_dir / "extremity.csv",
                ["group", "level", "p_m", "grape_parity_abs", "class"],
                extremity_rows,
            )

            if assignment4 is not None:
                stereo_rows = []
                for gender in ("m", "f"):
                    by_group = metrics.stereotype_grape(counts4, assignment4, parity, gender=gender)
                    for group, score in sorted(by_group.items(), key=lambda kv: kv[0].value):
                        stereo_rows.append(
                            [
                                group.value,
                                gender,
                                score.reference,
                                repr(score.value),
                                score.counts.n_m,
                                score.counts.n_f,
                                score.counts.n_unclear,
                            ]
                        )
                _write_csv(
                    out_dir / "stereotype.csv",
                    ["group", "gender", "reference", "value", "n_m", "n_f", "n_unclear"],
                    stereo_rows,
                )

            occ_scores = [
                metrics.grape(counts, 0.5, "m") for counts in counts4.values() if counts.n_binary > 0
            ]
            summary = {
                "model": model,
                "language": lang,
                "n_done": len(rows),
                "n_skipped": len(manifest.skipped_in(unit)),
                "n_detected": len(records),
                "n_multi_detect": sum(1 for r in rows if "multi_detect" in (r.get("warnings") or [])),
                "unclear_rate": (metrics.unclear_rate(overall) if overall.total else None),
                "grape_m_parity_overall": (
                    metrics.grape(overall, 0.5, "m") if overall.n_binary else None
                ),
                "grape_m_parity_occupation_mean": (
                    sum(occ_scores) / len(occ_scores) if occ_scores else None
                ),
                "extremity_counts": {c.value: n for c, n in extremity_counts.items()},
                "skipped_groups": {k: sorted(v) for k, v in sorted(skipped_groups.items())},
            }
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / "summary.json").write_text(
                json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False), encoding="utf-8"
            )

            if counts3:
                p_f_series_all[(model, lang)] = metrics.p_f_series(counts3)

    _write_correlations(paths, p_f_series_all, real_shares, stereotype_records, config)
    manifest.mark_stage("scores")
    manifest.save(run_dir)


def _write_correlations(
    paths: RunPaths,
    p_f_series_all: Mapping[tuple[str, str], Mapping[str, float]],
    real_shares: Mapping[str, Mapping[str, float]],
    stereotype_records: Sequence[StereotypeRecord],
    config: RunConfig,
) -> None:
    stereo_means = None
    if stereotype_records and config.stereotypes:
        from .corpus import aggregate_stereotype_means

        stereo_means = aggregate_stereotype_means(
            stereotype_records, config.stereotypes.variance_threshold
        )
    out_dir = paths.correlations_dir()
    out_dir.mkdir(parents=True, exist_ok=True)

    notices: list[str] = []
    try:
        report = metrics.correlation_report(
            p_f_series_all, real_shares or None, stereo_means
        )
    except InsufficientOverlapError as exc:
        notices.append(f"correlations unavailable: {exc}")
        report = metrics.CorrelationReport({}, {}, {}, {})

    _write_csv(
        out_dir / "real.csv",
        ["model", "language", "r", "n_groups"],
        [[m, l, repr(r), n] for (m, l), (r, n) in sorted(report.real.items())],
    )
    _write_csv(
        out_dir / "stereotype.csv",
        ["model", "language", "r", "n_groups"],
        [[m, l, repr(r), n] for (m, l), (r, n) in sorted(report.stereotype.items())],
    )
    _write_csv(
        out_dir / "cross_lingual.csv",
        ["model", "language_a", "language_b", "r", "n_groups"],
        [[m, a, b, repr(r), n] for (m, a, b), (r, n) in sorted(report.cross_lingual.items())],
    )
    for lang, (model_names, matrix) in sorted(report.intra_lingual.items()):
        _write_csv(
            out_dir / f"intra_{lang}.csv",
            ["model"] + model_names,
            [[model_names[i]] + [repr(v) for v in row] for i, row in enumerate(matrix)],
        )
    (out_dir / "notices.json").write_text(
        json.dumps(notices, indent=2, sort_keys=True), encoding="utf-8"
    )


# ---------------------------------------------------------------------------
# Validate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    n_samples: int
    occupation_accuracy: float
    gender_accuracy: float
    overall_accuracy: float
    n_detection_failures: int
    n_skipped: int

    def as_dict(self) -> dict[str, Any]:
        return {
            "n_samples": self.n_samples,
            "occupation_accuracy": self.occupation_accuracy,
            "gender_accuracy": self.gender_accuracy,
            "overall_accuracy": self.overall_accuracy,
            "n_detection_failures": self.n_detection_failures,
            "n_skipped": self.n_skipped,
        }


def validate(
    config: RunConfig,
    run_dir: str | Path,
    providers: Providers | None = None,
    parallelism: int | None = None,
    offline: bool = False,
    progress: ProgressFn | None = None,
) -> ValidationReport:
    """Measure pipeline accuracy on a gold-labeled corpus.

    The corpus texts are already in their target language, so no translation
    happens; a sample whose occupation is not detected counts as incorrect for
    both the occupation and the gender, matching how pipeline accuracy is
    defined for this protocol.
    """
    run_dir = Path(run_dir)
    paths = RunPaths(run_dir)
    parallelism = parallelism or config.parallelism
    tax, samples = _load_run_inputs(config)
    missing_gold = [s.id for s in samples if s.gold_gender is None]
    if missing_gold:
        raise MissingGoldError(
            f"{len(missing_gold)} samples lack gold_gender (first: {missing_gold[0]})"
        )
    manifest = _prepare_manifest(config, run_dir)
    providers = providers or Providers.build(config, offline=offline, need_translators=False)
    manifest.save(run_dir)

    unit = "validation/all"
    out_path = paths.validation_dir() / "details.jsonl"
    existing = _read_jsonl(out_path)
    done_ids = {row["sample_id"] for row in existing}
    pending = [s for s in samples if s.id not in done_ids]

    def worker(sample: TextSample) -> tuple[dict | None, str | None]:
        try:
            detections = detect(
                text=sample.text,
                language=sample.language,
                candidate_codes=[sample.isco_code],
                tax=tax,
                judge=providers.judge,
                embedder=providers.embedder,
                thresholds=config.thresholds,
            )
        except (MtbiasError, ValueError) as exc:
            return None, f"detect: {exc}"
        primary, warnings = select_primary(detections)
        detected = primary is not None
        occupation_correct = detected and primary.matched_code == sample.isco_code
        gender_correct = detected and primary.gender == sample.gold_gender
        return {
            "sample_id": sample.id,
            "detected": detected,
            "matched_code": primary.matched_code if detected else None,
            "gender": primary.gender.value if detected else None,
            "gold_code": sample.isco_code,
            "gold_gender": sample.gold_gender.value,
            "occupation_correct": occupation_correct,
            "gender_correct": gender_correct,
            "warnings": warnings,
        }, None

    rows = _run_stage(
        pending, worker, out_path, "sample_id", existing, unit, "validate", manifest, parallelism, progress
    )
    manifest.mark_stage("validate")
    manifest.provider_stats = providers.stats()

    n_skipped = len(manifest.skipped_in(unit))
    n_total = len(rows) + n_skipped
    n_occ = sum(1 for r in rows if r["occupation_correct"])
    n_gender = sum(1 for r in rows if r["gender_correct"])
    n_overall = sum(1 for r in rows if r["occupation_correct"] and r["gender_correct"])
    n_failures = sum(1 for r in rows if not r["detected"]) + n_skipped
    report = ValidationReport(
        n_samples=n_total,
        occupation_accuracy=n_occ / n_total if n_total else 0.0,
        gender_accuracy=n_gender / n_total if n_total else 0.0,
        overall_accuracy=n_overall / n_total if n_total else 0.0,
        n_detection_failures=n_failures,
        n_skipped=n_skipped,
    )
    (paths.validation_dir() / "accuracy.json").write_text(
        json.dumps({"schema_version": SCHEMA_VERSION, **report.as_dict()}, indent=2, sort_keys=True),
        encoding="utf-8",
    )
    manifest.save(run_dir)
    return report


# ---------------------------------------------------------------------------
# Prompt emission
# ---------------------------------------------------------------------------

def genprompts_rows(
    occupations: Sequence[str],
    categories: Sequence[Any],
    genders: Sequence[GenderLabel],
    language: str | None = None,
) -> list[dict[str, str]]:
    """One generation prompt per (occupation, category, gender) combination."""
    from .detection.prompts import build_generation_prompt

    rows = []
    for occupation in occupations:
        for category in categories:
            for gender in genders:
                rows.append(
                    {
                        "occupation": occupation,
                        "category": category.value,
                        "gender": gender.value,
                        "language": language or "",
                        "prompt": build_generation_prompt(category, occupation, gender, language),
                    }
                )
    return rows
