"""Deterministic mock providers for offline runs and tests.

All mocks are pure functions of their inputs (and a seed where applicable):
two runs with the same seed produce byte-identical pipeline outputs.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..detection.parsing import render_message1_reply, render_message2_reply, NO_OCCUPATION_SENTINEL
from ..errors import ProviderError, UnsupportedLanguageError
from ..gender import GenderLabel
from .base import require_text


def _primary_tag(lang: str) -> str:
    return lang.split("-")[0].lower()


class IdentityTranslator:
    """Returns the source text unchanged; useful with judge scripts keyed by id."""

    def __init__(self, supported: Sequence[str] | None = None, provider_id: str = "mock-identity"):
        self.id = provider_id
        self.supported = {_primary_tag(s) for s in supported} if supported is not None else None

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        if self.supported is not None and _primary_tag(target_lang) not in self.supported:
            raise UnsupportedLanguageError(f"{self.id} does not support {target_lang!r}")
        return text


class TableTranslator:
    """Translates by exact source-text lookup."""

    def __init__(
        self,
        table: Mapping[str, str],
        supported: Sequence[str] | None = None,
        provider_id: str = "mock-table",
    ):
        self.id = provider_id
        self.table = dict(table)
        self.supported = {_primary_tag(s) for s in supported} if supported is not None else None

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        if self.supported is not None and _primary_tag(target_lang) not in self.supported:
            raise UnsupportedLanguageError(f"{self.id} does not support {target_lang!r}")
        try:
            return self.table[text]
        except KeyError:
            raise ProviderError(f"{self.id}: no translation scripted for {text!r}") from None

    @classmethod
    def from_json(cls, path: str | Path, **kwargs) -> "TableTranslator":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")), **kwargs)


@dataclass(frozen=True)
class ScriptedOccupation:
    title: str
    definition: str
    gender: GenderLabel


ID_MARKER_PATTERN = r"\[id:([^\]]+)\]"


def id_marker(sample_id: str) -> str:
    """Marker a fixture corpus embeds in its texts so the judge can be scripted."""
    return f"[id:{sample_id}]"


class ScriptedJudge:
    """Judge driven by a fixture table keyed on an id marker in the text.

    The first user turn gets occupation/definition blocks (or the sentinel for
    ids scripted empty or absent); the second turn gets gender lines. Replies
    are a pure function of the message history.
    """

    def __init__(
        self,
        script: Mapping[str, Sequence[ScriptedOccupation]],
        id_pattern: str = ID_MARKER_PATTERN,
        provider_id: str = "mock-judge",
    ):
        self.id = provider_id
        self.script = {k: tuple(v) for k, v in script.items()}
        self.id_pattern = re.compile(id_pattern)

    def _entry(self, messages: list[tuple[str, str]]) -> tuple[int, tuple[ScriptedOccupation, ...]]:
        user_contents = [c for role, c in messages if role == "user"]
        if not user_contents:
            raise ProviderError(f"{self.id}: empty message history")
        match = self.id_pattern.search(user_contents[0])
        entry = self.script.get(match.group(1), ()) if match else ()
        return len(user_contents), entry

    def reply(self, messages: list[tuple[str, str]]) -> str:
        turn, entry = self._entry(messages)
        if not entry:
            return NO_OCCUPATION_SENTINEL
        if turn == 1:
            return render_message1_reply([(o.title, o.definition) for o in entry])
        return render_message2_reply({o.title: o.gender for o in entry})

    @classmethod
    def from_json(cls, path: str | Path, **kwargs) -> "ScriptedJudge":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        script = {
            sample_id: [
                ScriptedOccupation(o["title"], o["definition"], GenderLabel(o["gender"]))
                for o in occupations
            ]
            for sample_id, occupations in raw.items()
        }
        return cls(script, **kwargs)


def dump_judge_script(
    script: Mapping[str, Sequence[ScriptedOccupation]], path: str | Path
) -> None:
    raw = {
        sample_id: [
            {"title": o.title, "definition": o.definition, "gender": o.gender.value}
            for o in occupations
        ]
        for sample_id, occupations in script.items()
    }
    Path(path).write_text(json.dumps(raw, ensure_ascii=False, sort_keys=True), encoding="utf-8")


class CannedJudge:
    """Fixed reply per user turn, for single-exchange tests."""

    def __init__(self, replies: Sequence[str], provider_id: str = "mock-canned"):
        self.id = provider_id
        self.replies = list(replies)

    def reply(self, messages: list[tuple[str, str]]) -> str:
        turn = sum(1 for role, _ in messages if role == "user")
        try:
            return self.replies[turn - 1]
        except IndexError:
            raise ProviderError(f"{self.id}: no reply scripted for turn {turn}") from None


class HashEmbedder:
    """Reproducible pseudo-random projection: a pure function of (seed, text)."""

    def __init__(self, seed: int = 0, dim: int = 16, provider_id: str | None = None):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.seed = seed
        self.dim = dim
        self.id = provider_id or f"mock-hash-embed:{seed}:{dim}"

    def embed(self, text: str) -> np.ndarray:
        require_text(text)
        digest = hashlib.sha256(f"{self.seed}|{text}".encode("utf-8")).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
        return rng.standard_normal(self.dim)


class TableEmbedder:
    """Embeds by exact text lookup, with an optional fallback embedder.

    Lets tests construct vector pairs with an exact cosine (e.g. the 0.8
    boundary) while everything else takes the hash projection.
    """

    def __init__(
        self,
        table: Mapping[str, Sequence[float]],
        fallback: HashEmbedder | None = None,
        provider_id: str = "mock-table-embed",
    ):
        self.id = provider_id
        self.table = {k: np.asarray(v, dtype=np.float64) for k, v in table.items()}
        self.fallback = fallback

    def embed(self, text: str) -> np.ndarray:
        require_text(text)
        hit = self.table.get(text)
        if hit is not None:
            return hit
        if self.fallback is not None:
            return self.fallback.embed(text)
        raise ProviderError(f"{self.id}: no vector scripted for {text!r}")
