"""ISCO-08 occupation hierarchy: loading, validation, and digit-level queries.

Codes are strings of 1-4 decimal digits; the string length is the hierarchy
level. Codes are never treated as integers so that leading zeros (the armed
forces major group "0") keep their prefix semantics.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .errors import FormatError, HierarchyError, LevelError, NotFoundError

TAXONOMY_HEADER = ["code", "title", "description", "example_titles"]
EXAMPLE_TITLE_SEP = "|"


def validate_code(code: str) -> str:
    """Check that ``code`` is 1-4 decimal digits and return it unchanged."""
    if not code or len(code) > 4 or not all("0" <= ch <= "9" for ch in code):
        raise FormatError(f"not a valid occupation code: {code!r}")
    return code


def truncate_to_level(code: str, level: int) -> str:
    """First ``level`` digits of ``code``; the code must be at least that deep."""
    validate_code(code)
    if not 1 <= level <= 4:
        raise LevelError(f"level must be in 1..4, got {level}")
    if level > len(code):
        raise LevelError(f"cannot truncate {code!r} (level {len(code)}) to level {level}")
    return code[:level]


@dataclass(frozen=True)
class IscoEntry:
    code: str
    title: str
    description: str = ""
    example_titles: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        validate_code(self.code)
        if not self.title.strip():
            raise FormatError(f"entry {self.code}: title must be non-empty")
        # 4-digit descriptions feed embedding-based matching and cannot be blank.
        if len(self.code) == 4 and not self.description.strip():
            raise FormatError(f"entry {self.code}: 4-digit entries need a description")

    @property
    def level(self) -> int:
        return len(self.code)


@dataclass(frozen=True)
class Taxonomy:
    """Immutable code -> entry map, closed under prefix truncation."""

    entries: dict[str, IscoEntry] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for code, entry in self.entries.items():
            if code != entry.code:
                raise FormatError(f"entry keyed {code!r} carries code {entry.code!r}")
            if len(code) > 1 and code[:-1] not in self.entries:
                raise HierarchyError(f"code {code} is missing its parent {code[:-1]}")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, code: str) -> bool:
        return code in self.entries

    def __iter__(self) -> Iterator[IscoEntry]:
        return iter(self.entries.values())

    def lookup(self, code: str) -> IscoEntry:
        try:
            return self.entries[code]
        except KeyError:
            raise NotFoundError(f"code {code!r} is not in the taxonomy") from None

    def get(self, code: str) -> IscoEntry | None:
        return self.entries.get(code)

    def codes_at_level(self, level: int) -> list[str]:
        if not 1 <= level <= 4:
            raise LevelError(f"level must be in 1..4, got {level}")
        return sorted(c for c in self.entries if len(c) == level)

    @property
    def unit_group_count(self) -> int:
        """Number of 4-digit unit groups (436 in the usual ISCO-08 snapshot)."""
        return sum(1 for c in self.entries if len(c) == 4)


def load_taxonomy(path: str | Path) -> Taxonomy:
    """Load a taxonomy CSV (``code,title,description,example_titles``).

    The file must be prefix-closed: every multi-digit code needs its parent
    present. An empty file yields an empty taxonomy.
    """
    path = Path(path)
    entries: dict[str, IscoEntry] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return Taxonomy({})
        if [h.strip() for h in header] != TAXONOMY_HEADER:
            raise FormatError(
                f"expected header {','.join(TAXONOMY_HEADER)}, got {','.join(header)}", line=1
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(TAXONOMY_HEADER):
                raise FormatError(f"expected {len(TAXONOMY_HEADER)} fields, got {len(row)}", line=lineno)
            code, title, description, examples = (cell.strip() for cell in row)
            try:
                entry = IscoEntry(
                    code=code,
                    title=title,
                    description=description,
                    example_titles=tuple(t.strip() for t in examples.split(EXAMPLE_TITLE_SEP) if t.strip()),
                )
            except FormatError as exc:
                raise FormatError(str(exc), line=lineno) from None
            if code in entries:
                raise FormatError(f"duplicate code {code}", line=lineno)
            entries[code] = entry
    return Taxonomy(entries)


def save_taxonomy(tax: Taxonomy, path: str | Path) -> None:
    """Write a taxonomy back out in the load format (codes sorted)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TAXONOMY_HEADER)
        for code in sorted(tax.entries):
            entry = tax.entries[code]
            writer.writerow(
                [entry.code, entry.title, entry.description, EXAMPLE_TITLE_SEP.join(entry.example_titles)]
            )
