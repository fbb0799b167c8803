"""The full per-text detection pipeline: extract, filter twice, label gender."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..backends.base import ChatSession, Embedder, Judge, judge_exchange
from ..errors import RangeError
from ..gender import GenderLabel
from ..taxonomy import Taxonomy
from .matching import (
    DEFAULT_FUZZY_THRESHOLD,
    DEFAULT_ISCO_MATCH_THRESHOLD,
    match_isco,
    verify_in_text,
)
from .parsing import parse_message1_reply, parse_message2_reply
from .prompts import build_message1, build_message2

MULTI_DETECT_WARNING = "multi_detect"


@dataclass(frozen=True)
class Thresholds:
    fuzzy: float = DEFAULT_FUZZY_THRESHOLD
    isco_match: float = DEFAULT_ISCO_MATCH_THRESHOLD

    def __post_init__(self) -> None:
        for name, value in (("fuzzy", self.fuzzy), ("isco_match", self.isco_match)):
            if not 0.0 <= value <= 1.0:
                raise RangeError(f"threshold {name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class DetectedOccupation:
    surface_title: str
    in_text_verified: bool
    fuzzy_score: float
    matched_code: str | None
    match_similarity: float | None
    gender: GenderLabel


def detect(
    text: str,
    language: str,
    candidate_codes: Sequence[str],
    tax: Taxonomy,
    judge: Judge,
    embedder: Embedder,
    thresholds: Thresholds = Thresholds(),
) -> list[DetectedOccupation]:
    """Run the two-message judge protocol over one translated text.

    Candidates that fail in-text verification never reach gender labeling;
    candidates whose definition does not match any expected taxonomy entry are
    discarded as hallucinations. Only survivors of both filters are returned,
    each verified and carrying a matched code.
    """
    session = ChatSession(provider_id=judge.id)
    reply1 = judge_exchange(session, build_message1(text, language), judge)
    candidates = parse_message1_reply(reply1)
    if candidates is None:
        return []

    survivors: list[tuple[str, float, str, float]] = []
    seen_titles: set[str] = set()
    for candidate in candidates:
        key = candidate.surface_title.casefold()
        if key in seen_titles:
            continue
        seen_titles.add(key)
        verified, fuzzy_score = verify_in_text(candidate.surface_title, text, thresholds.fuzzy)
        if not verified:
            continue
        match = match_isco(
            candidate.definition, candidate_codes, tax, embedder, thresholds.isco_match
        )
        if match is None:
            continue
        survivors.append((candidate.surface_title, fuzzy_score, match[0], match[1]))

    if not survivors:
        return []

    reply2 = judge_exchange(session, build_message2(text, language), judge)
    labels = parse_message2_reply(reply2, [title for title, _, _, _ in survivors])
    return [
        DetectedOccupation(
            surface_title=title,
            in_text_verified=True,
            fuzzy_score=fuzzy_score,
            matched_code=code,
            match_similarity=similarity,
            gender=labels[title],
        )
        for title, fuzzy_score, code, similarity in survivors
    ]


def select_primary(
    detections: Sequence[DetectedOccupation],
) -> tuple[DetectedOccupation | None, list[str]]:
    """Pick the single detection that counts for a single-occupation sample.

    Benchmark texts mention exactly one occupation by construction, so
    multiple survivors are collapsed to the highest match similarity and
    flagged rather than double-counted.
    """
    if not detections:
        return None, []
    if len(detections) == 1:
        return detections[0], []
    best = max(detections, key=lambda d: (d.match_similarity or 0.0, d.surface_title))
    return best, [MULTI_DETECT_WARNING]
