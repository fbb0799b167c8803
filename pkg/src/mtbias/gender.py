"""The three-way gender label used throughout the pipeline."""

from __future__ import annotations

from enum import Enum

from .errors import UnknownLabelError


class GenderLabel(Enum):
    MASCULINE = "masculine"
    FEMININE = "feminine"
    NOT_CLEAR = "not_clear"


# How each label is written in judge replies and prompt examples.
REPLY_STRINGS: dict[GenderLabel, str] = {
    GenderLabel.MASCULINE: "Masculine",
    GenderLabel.FEMININE: "Feminine",
    GenderLabel.NOT_CLEAR: "Not clear",
}

_PARSE_TABLE = {
    "masculine": GenderLabel.MASCULINE,
    "feminine": GenderLabel.FEMININE,
    "not clear": GenderLabel.NOT_CLEAR,
    "not_clear": GenderLabel.NOT_CLEAR,
}


def parse_gender_label(text: str) -> GenderLabel:
    """Parse one of the three allowed labels, case-insensitively.

    Anything else raises :class:`UnknownLabelError`; there is deliberately no
    silent default.
    """
    normalized = " ".join(text.strip().lower().replace(".", " ").split())
    try:
        return _PARSE_TABLE[normalized]
    except KeyError:
        raise UnknownLabelError(f"not a recognized gender label: {text!r}") from None
