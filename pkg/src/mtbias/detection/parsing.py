"""Grammar of judge replies: render and parse both protocol messages.

``render_*`` and ``parse_*`` are inverses on well-formed inputs; the scripted
mock judge renders with the same functions the pipeline parses with.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import MissingTitleError, ParseError, UnknownLabelError
from ..gender import GenderLabel, REPLY_STRINGS, parse_gender_label

NO_OCCUPATION_SENTINEL = "No occupation found."

_TITLE_RE = re.compile(r"^\s*occupation title\s*:\s*(.*)$", re.IGNORECASE)
_DEFINITION_RE = re.compile(r"^\s*definition\s*:\s*(.*)$", re.IGNORECASE)
_SENTINEL_RE = re.compile(r"no occupation found", re.IGNORECASE)


@dataclass(frozen=True)
class CandidateOccupation:
    surface_title: str
    definition: str


def render_message1_reply(occupations: Sequence[tuple[str, str]]) -> str:
    if not occupations:
        return NO_OCCUPATION_SENTINEL
    return "\n".join(
        f"Occupation title: {title}\nDefinition: {definition}" for title, definition in occupations
    )


def render_message2_reply(labels: Mapping[str, GenderLabel]) -> str:
    return "\n".join(f"{title}: {REPLY_STRINGS[label]}" for title, label in labels.items())


def parse_message1_reply(raw: str) -> list[CandidateOccupation] | None:
    """Extract (title, definition) pairs in reply order.

    Returns ``None`` for the no-occupation sentinel. Raises
    :class:`ParseError` when the reply is neither the sentinel nor contains at
    least one well-formed pair, or when a title appears without a definition.
    """
    candidates: list[CandidateOccupation] = []
    pending_title: str | None = None
    for line in raw.splitlines():
        if not line.strip():
            continue
        title_match = _TITLE_RE.match(line)
        if title_match:
            if pending_title is not None:
                raise ParseError(f"title {pending_title!r} has no definition", raw=raw)
            pending_title = title_match.group(1).strip()
            if not pending_title:
                raise ParseError("empty occupation title", raw=raw)
            continue
        definition_match = _DEFINITION_RE.match(line)
        if definition_match:
            if pending_title is None:
                raise ParseError("definition without a preceding title", raw=raw)
            definition = definition_match.group(1).strip()
            if not definition:
                raise ParseError(f"empty definition for {pending_title!r}", raw=raw)
            candidates.append(CandidateOccupation(pending_title, definition))
            pending_title = None
    if pending_title is not None:
        raise ParseError(f"title {pending_title!r} has no definition", raw=raw)
    if candidates:
        return candidates
    if _SENTINEL_RE.search(raw):
        return None
    raise ParseError("reply contains neither occupations nor the sentinel", raw=raw)


def parse_message2_reply(
    raw: str, expected_titles: Sequence[str]
) -> dict[str, GenderLabel]:
    """One gender label per expected title from "Title: Label" lines.

    Lines about titles we did not ask for are tolerated (the judge answers for
    everything it detected); an unparsable label on an expected title raises
    :class:`UnknownLabelError`, and a missing expected title raises
    :class:`MissingTitleError`.
    """
    expected = {t.casefold(): t for t in expected_titles}
    found: dict[str, GenderLabel] = {}
    for line in raw.splitlines():
        line = line.strip()
        if not line or ":" not in line:
            continue
        title, _, label_text = line.partition(":")
        title_key = title.strip().casefold()
        if not label_text.strip():
            continue  # e.g. a bare "Answer:" line
        try:
            label = parse_gender_label(label_text)
        except UnknownLabelError:
            if title_key in expected:
                raise
            continue  # noise line about something we did not ask for
        found[title_key] = label
    result: dict[str, GenderLabel] = {}
    for key, original in expected.items():
        if key not in found:
            raise MissingTitleError(f"no gender line for {original!r}")
        result[original] = found[key]
    return result
