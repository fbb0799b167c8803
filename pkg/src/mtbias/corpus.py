"""Benchmark samples, labor statistics, and stereotype ratings.

Three inputs are ingested here:

* gender-ambiguous benchmark samples (JSON lines, one object per line),
* real-world labor shares per (country, year, 3-digit code) from a derived CSV,
* 1-7 perceived-gender stereotype ratings mapped onto 4-digit codes.
"""

from __future__ import annotations

import json
import csv
import math
import unicodedata
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    DuplicateIdError,
    EmptyCorpusError,
    FormatError,
    LevelError,
    RangeError,
    UnknownCodeError,
)
from .gender import GenderLabel
from .taxonomy import Taxonomy, truncate_to_level, validate_code


class Category(Enum):
    SHORT_STORY = "short_story"
    BRIEF_NEWS_REPORT = "brief_news_report"
    SHORT_STATEMENT = "short_statement"
    SHORT_CONVERSATION = "short_conversation"
    SHORT_PRESENTATION = "short_presentation"


SAMPLE_FIELDS = ("id", "text", "language", "isco_code", "occupation_title", "category")


@dataclass(frozen=True)
class TextSample:
    id: str
    text: str
    language: str
    isco_code: str
    occupation_title: str
    category: Category
    gold_gender: GenderLabel | None = None


def load_samples(path: str | Path, tax: Taxonomy) -> list[TextSample]:
    """Load and validate benchmark samples from a JSON-lines file.

    Every sample must carry a 4-digit code known to ``tax``; duplicate ids and
    malformed rows are rejected outright rather than skipped.
    """
    path = Path(path)
    samples: list[TextSample] = []
    seen_ids: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON: {exc}", line=lineno) from None
            if not isinstance(obj, dict):
                raise FormatError("each line must be a JSON object", line=lineno)
            missing = [k for k in SAMPLE_FIELDS if k not in obj]
            if missing:
                raise FormatError(f"missing fields: {', '.join(missing)}", line=lineno)
            sample_id = str(obj["id"])
            if sample_id in seen_ids:
                raise DuplicateIdError(f"duplicate sample id {sample_id!r} (line {lineno})")
            seen_ids.add(sample_id)
            text = obj["text"]
            if not isinstance(text, str) or not text.strip():
                raise FormatError("text must be non-empty", line=lineno)
            code = str(obj["isco_code"])
            validate_code(code)
            if len(code) != 4:
                raise FormatError(f"isco_code must be 4 digits, got {code!r}", line=lineno)
            if code not in tax:
                raise UnknownCodeError(f"unknown isco_code {code!r} (line {lineno})")
            try:
                category = Category(obj["category"])
            except ValueError:
                raise FormatError(f"unknown category {obj['category']!r}", line=lineno) from None
            gold = obj.get("gold_gender")
            gold_gender = GenderLabel(gold) if gold is not None else None
            samples.append(
                TextSample(
                    id=sample_id,
                    text=text,
                    language=str(obj["language"]),
                    isco_code=code,
                    occupation_title=str(obj["occupation_title"]),
                    category=category,
                    gold_gender=gold_gender,
                )
            )
    return samples


def save_samples(samples: Iterable[TextSample], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for s in samples:
            obj = {
                "id": s.id,
                "text": s.text,
                "language": s.language,
                "isco_code": s.isco_code,
                "occupation_title": s.occupation_title,
                "category": s.category.value,
            }
            if s.gold_gender is not None:
                obj["gold_gender"] = s.gold_gender.value
            fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Corpus statistics
# ---------------------------------------------------------------------------

def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def word_tokenize(text: str) -> list[str]:
    """Whitespace split with leading/trailing punctuation as separate tokens.

    "Hello, world!" -> ["Hello", ",", "world", "!"]. Internal punctuation
    (hyphens, apostrophes) stays attached, which tracks common word tokenizers
    closely enough for length statistics.
    """
    tokens: list[str] = []
    for chunk in text.split():
        leading: list[str] = []
        while chunk and _is_punct(chunk[0]):
            leading.append(chunk[0])
            chunk = chunk[1:]
        trailing: list[str] = []
        while chunk and _is_punct(chunk[-1]):
            trailing.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(leading)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trailing))
    return tokens


@dataclass(frozen=True)
class CategoryStats:
    n: int
    char_mean: float
    char_std: float
    word_mean: float
    word_std: float


def _mean_pstd(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def corpus_stats(samples: Sequence[TextSample]) -> dict[Category, CategoryStats]:
    """Per-category character/word length statistics (population stddev)."""
    if not samples:
        raise EmptyCorpusError("corpus_stats requires at least one sample")
    by_category: dict[Category, list[TextSample]] = {}
    for s in samples:
        by_category.setdefault(s.category, []).append(s)
    stats: dict[Category, CategoryStats] = {}
    for category, group in by_category.items():
        chars = [float(len(s.text)) for s in group]
        words = [float(len(word_tokenize(s.text))) for s in group]
        char_mean, char_std = _mean_pstd(chars)
        word_mean, word_std = _mean_pstd(words)
        stats[category] = CategoryStats(len(group), char_mean, char_std, word_mean, word_std)
    return stats


# ---------------------------------------------------------------------------
# Labor statistics (real-world reference)
# ---------------------------------------------------------------------------

LABOR_HEADER = ["country", "year", "isco3", "female_share"]


@dataclass(frozen=True)
class LaborStatsTable:
    """Female share per (country, year, 3-digit code), each in [0, 1]."""

    rows: dict[tuple[str, int, str], float]

    def countries(self) -> list[str]:
        return sorted({c for c, _, _ in self.rows})

    def years(self, country: str) -> list[int]:
        return sorted({y for c, y, _ in self.rows if c == country})

    def female_share(self, country: str, code3: str, year_mode: str | int = "latest") -> float | None:
        """Female share for one 3-digit group under a year-selection policy.

        ``year_mode`` is ``"latest"`` (newest year carrying this group),
        ``"pooled"`` (mean over all years), or a specific year.
        """
        if isinstance(year_mode, int):
            return self.rows.get((country, year_mode, code3))
        years = [y for (c, y, k) in self.rows if c == country and k == code3]
        if not years:
            return None
        if year_mode == "latest":
            return self.rows[(country, max(years), code3)]
        if year_mode == "pooled":
            return sum(self.rows[(country, y, code3)] for y in years) / len(years)
        raise ValueError(f"unknown year_mode {year_mode!r}")

    def shares_for(self, country: str, year_mode: str | int = "latest") -> dict[str, float]:
        """All 3-digit female shares for a country under one year policy."""
        codes = sorted({k for (c, _, k) in self.rows if c == country})
        out: dict[str, float] = {}
        for code in codes:
            share = self.female_share(country, code, year_mode)
            if share is not None:
                out[code] = share
        return out


def load_labor_stats(path: str | Path) -> LaborStatsTable:
    """Load the derived labor-share CSV (``country,year,isco3,female_share``)."""
    path = Path(path)
    rows: dict[tuple[str, int, str], float] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return LaborStatsTable({})
        if [h.strip() for h in header] != LABOR_HEADER:
            raise FormatError(f"expected header {','.join(LABOR_HEADER)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                raise FormatError(f"expected 4 fields, got {len(row)}", line=lineno)
            country = row[0].strip()
            if not country:
                raise FormatError("country must be non-empty", line=lineno)
            try:
                year = int(row[1])
            except ValueError:
                raise FormatError(f"year must be an integer, got {row[1]!r}", line=lineno) from None
            code = row[2].strip()
            validate_code(code)
            if len(code) != 3:
                raise FormatError(f"isco3 must be 3 digits, got {code!r}", line=lineno)
            try:
                share = float(row[3])
            except ValueError:
                raise FormatError(f"female_share must be a number, got {row[3]!r}", line=lineno) from None
            if not 0.0 <= share <= 1.0:
                raise RangeError(f"female_share {share} outside [0, 1] (line {lineno})")
            key = (country, year, code)
            if key in rows:
                raise FormatError(f"duplicate key {key}", line=lineno)
            rows[key] = share
    return LaborStatsTable(rows)


# ---------------------------------------------------------------------------
# Stereotype ratings
# ---------------------------------------------------------------------------

STEREOTYPE_HEADER = ["occupation", "rating", "isco4"]

RATING_MIN, RATING_MAX = 1.0, 7.0
DEFAULT_VARIANCE_THRESHOLD = 1.5
# Band edges: below the first -> masculine, inside [second, third] -> neutral,
# above the fourth -> feminine; the two gaps stay unassigned.
DEFAULT_BANDS = (2.5, 3.0, 5.0, 5.5)


@dataclass(frozen=True)
class StereotypeRecord:
    occupation_label: str
    rating: float
    mapped_code: str

    def __post_init__(self) -> None:
        if not RATING_MIN <= self.rating <= RATING_MAX:
            raise RangeError(f"rating {self.rating} outside [{RATING_MIN}, {RATING_MAX}]")
        validate_code(self.mapped_code)
        if len(self.mapped_code) != 4:
            raise FormatError(f"mapped_code must be 4 digits, got {self.mapped_code!r}")


class StereotypeGroup(Enum):
    MASCULINE = "stereo_masculine"
    NEUTRAL = "stereo_neutral"
    FEMININE = "stereo_feminine"
    UNASSIGNED = "unassigned"
    EXCLUDED = "excluded"


@dataclass(frozen=True)
class CodeStereotype:
    mean_rating: float
    group: StereotypeGroup
    variance: float
    n_records: int


@dataclass(frozen=True)
class StereotypeAssignment:
    level: int
    per_code: dict[str, CodeStereotype]

    def codes_in(self, group: StereotypeGroup) -> list[str]:
        return sorted(c for c, cs in self.per_code.items() if cs.group == group)

    def mean_ratings(self, include_unassigned: bool = True) -> dict[str, float]:
        """Representative ratings for all non-excluded groups."""
        skip = {StereotypeGroup.EXCLUDED}
        if not include_unassigned:
            skip.add(StereotypeGroup.UNASSIGNED)
        return {
            c: cs.mean_rating for c, cs in sorted(self.per_code.items()) if cs.group not in skip
        }


def load_stereotype_ratings(path: str | Path, tax: Taxonomy) -> list[StereotypeRecord]:
    """Load rating CSV (``occupation,rating,isco4``); codes must be known unit groups.

    Multiple records may map to the same code; merging happens in
    :func:`build_stereotype_assignment`.
    """
    path = Path(path)
    records: list[StereotypeRecord] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        if [h.strip() for h in header] != STEREOTYPE_HEADER:
            raise FormatError(f"expected header {','.join(STEREOTYPE_HEADER)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise FormatError(f"expected 3 fields, got {len(row)}", line=lineno)
            label = row[0].strip()
            try:
                rating = float(row[1])
            except ValueError:
                raise FormatError(f"rating must be a number, got {row[1]!r}", line=lineno) from None
            code = row[2].strip()
            try:
                record = StereotypeRecord(label, rating, code)
            except (RangeError, FormatError) as exc:
                exc.args = (f"line {lineno}: {exc.args[0]}",)
                raise
            if code not in tax:
                raise UnknownCodeError(f"unknown isco4 {code!r} (line {lineno})")
            records.append(record)
    return records


def build_stereotype_assignment(
    records: Sequence[StereotypeRecord],
    level: int = 4,
    variance_threshold: float = DEFAULT_VARIANCE_THRESHOLD,
    bands: tuple[float, float, float, float] = DEFAULT_BANDS,
) -> StereotypeAssignment:
    """Group ratings at ``level`` digits and band the per-group means.

    Variance is population variance (divide by n); groups at or above
    ``variance_threshold`` are excluded before banding. Band edges are
    exclusive for the masculine/feminine extremes and inclusive for neutral.
    """
    if not records:
        raise EmptyCorpusError("no stereotype records to assign")
    if level not in (3, 4):
        raise LevelError(f"stereotype assignment level must be 3 or 4, got {level}")
    lo_m, lo_n, hi_n, hi_f = bands
    grouped: dict[str, list[float]] = {}
    for rec in records:
        grouped.setdefault(truncate_to_level(rec.mapped_code, level), []).append(rec.rating)
    per_code: dict[str, CodeStereotype] = {}
    for code, ratings in grouped.items():
        mean = sum(ratings) / len(ratings)
        variance = sum((r - mean) ** 2 for r in ratings) / len(ratings)
        if variance >= variance_threshold:
            group = StereotypeGroup.EXCLUDED
        elif mean < lo_m:
            group = StereotypeGroup.MASCULINE
        elif mean < lo_n:
            group = StereotypeGroup.UNASSIGNED
        elif mean <= hi_n:
            group = StereotypeGroup.NEUTRAL
        elif mean <= hi_f:
            group = StereotypeGroup.UNASSIGNED
        else:
            group = StereotypeGroup.FEMININE
        per_code[code] = CodeStereotype(mean, group, variance, len(ratings))
    return StereotypeAssignment(level=level, per_code=per_code)


def aggregate_stereotype_means(
    records: Sequence[StereotypeRecord],
    variance_threshold: float = DEFAULT_VARIANCE_THRESHOLD,
) -> dict[str, float]:
    """Representative stereotype rating per 3-digit group.

    Two-step aggregation: per-4-digit means first, then those means averaged
    by 3-digit prefix, excluding groups whose constituent 4-digit means vary
    at or above the threshold. Returns code3 -> mean rating.
    """
    assignment4 = build_stereotype_assignment(records, level=4, variance_threshold=variance_threshold)
    means4 = assignment4.mean_ratings(include_unassigned=True)
    if not means4:
        return {}
    records3 = [StereotypeRecord(code, rating, code) for code, rating in means4.items()]
    assignment3 = build_stereotype_assignment(records3, level=3, variance_threshold=variance_threshold)
    return assignment3.mean_ratings(include_unassigned=True)
