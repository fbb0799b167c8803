"""Hallucination filters: in-text fuzzy verification and taxonomy matching."""

from __future__ import annotations

import unicodedata
from typing import Sequence

import numpy as np

from ..backends.base import Embedder, require_text
from ..errors import EmptyCandidatesError
from ..taxonomy import Taxonomy

DEFAULT_FUZZY_THRESHOLD = 0.85
DEFAULT_ISCO_MATCH_THRESHOLD = 0.8


def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit costs (two-row dynamic program)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, start=1):
        current = [i]
        for j, ch_b in enumerate(b, start=1):
            cost = 0 if ch_a == ch_b else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def normalized_similarity(a: str, b: str) -> float:
    """1 - edit_distance / max(len); both-empty strings count as identical."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _strip_edge_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def _match_tokens(text: str) -> list[str]:
    tokens = []
    for chunk in text.split():
        stripped = _strip_edge_punct(chunk)
        if stripped:
            tokens.append(stripped)
    return tokens


def verify_in_text(
    surface_title: str, text: str, threshold: float = DEFAULT_FUZZY_THRESHOLD
) -> tuple[bool, float]:
    """Check that a detected title actually occurs in the text.

    The score is the best normalized similarity between the title and any
    token window of the same length (case-folded, accents preserved); small
    edits like plural or feminine suffixes keep the score near 1, while terms
    absent from the text fall well below the threshold.
    """
    require_text(surface_title)
    require_text(text)
    title_tokens = _match_tokens(surface_title.casefold())
    text_tokens = _match_tokens(text.casefold())
    if not title_tokens or not text_tokens:
        return False, 0.0
    title_joined = " ".join(title_tokens)
    width = len(title_tokens)
    if width >= len(text_tokens):
        spans = [" ".join(text_tokens)]
    else:
        spans = [
            " ".join(text_tokens[i : i + width]) for i in range(len(text_tokens) - width + 1)
        ]
    score = max(normalized_similarity(title_joined, span) for span in spans)
    return score >= threshold, score


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        raise ValueError("cosine similarity undefined for zero vectors")
    return float(np.dot(u, v) / (norm_u * norm_v))


def match_isco(
    definition: str,
    candidate_codes: Sequence[str],
    tax: Taxonomy,
    embedder: Embedder,
    threshold: float = DEFAULT_ISCO_MATCH_THRESHOLD,
) -> tuple[str, float] | None:
    """Closest candidate entry by description embedding, if close enough.

    Returns the argmax (code, cosine) when the similarity reaches the
    threshold (inclusive); otherwise ``None``, discarding the candidate as a
    hallucination. Candidates must be 4-digit codes with descriptions.
    """
    require_text(definition)
    codes = sorted(set(candidate_codes))
    if not codes:
        raise EmptyCandidatesError("match_isco needs at least one candidate code")
    definition_vec = embedder.embed(definition)
    best: tuple[str, float] | None = None
    for code in codes:
        entry = tax.lookup(code)
        similarity = cosine_similarity(definition_vec, embedder.embed(entry.description))
        if best is None or similarity > best[1]:
            best = (code, similarity)
    assert best is not None
    return best if best[1] >= threshold else None
