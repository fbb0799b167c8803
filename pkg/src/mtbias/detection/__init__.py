"""Occupation and gender detection via the two-message judge protocol."""

from .matching import (
    DEFAULT_FUZZY_THRESHOLD,
    DEFAULT_ISCO_MATCH_THRESHOLD,
    cosine_similarity,
    levenshtein,
    match_isco,
    normalized_similarity,
    verify_in_text,
)
from .parsing import (
    NO_OCCUPATION_SENTINEL,
    CandidateOccupation,
    parse_message1_reply,
    parse_message2_reply,
    render_message1_reply,
    render_message2_reply,
)
from .pipeline import (
    MULTI_DETECT_WARNING,
    DetectedOccupation,
    Thresholds,
    detect,
    select_primary,
)
from .prompts import (
    MESSAGE1_EXAMPLES,
    FewShotExample,
    build_generation_prompt,
    build_message1,
    build_message2,
    build_translation_prompt,
)

__all__ = [
    "DEFAULT_FUZZY_THRESHOLD",
    "DEFAULT_ISCO_MATCH_THRESHOLD",
    "MESSAGE1_EXAMPLES",
    "MULTI_DETECT_WARNING",
    "NO_OCCUPATION_SENTINEL",
    "CandidateOccupation",
    "DetectedOccupation",
    "FewShotExample",
    "Thresholds",
    "build_generation_prompt",
    "build_message1",
    "build_message2",
    "build_translation_prompt",
    "cosine_similarity",
    "detect",
    "levenshtein",
    "match_isco",
    "normalized_similarity",
    "parse_message1_reply",
    "parse_message2_reply",
    "render_message1_reply",
    "render_message2_reply",
    "select_primary",
    "verify_in_text",
]
