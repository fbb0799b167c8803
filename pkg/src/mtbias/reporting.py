"""Render score artifacts into Markdown, CSV, and JSON reports.

The report stage only reads ``scores/`` and the manifest, never raw provider
output, and contains no timestamps so identical runs render byte-identical
files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import IncompleteRunError
from .manifest import RunManifest
from .runner import SCHEMA_VERSION, RunPaths


@dataclass
class UnitScores:
    model: str
    language: str
    grape: list[dict[str, Any]] = field(default_factory=list)
    extremity: list[dict[str, Any]] = field(default_factory=list)
    stereotype: list[dict[str, Any]] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)


@dataclass
class ScoresBundle:
    run_id: str
    config_hash: str
    units: list[UnitScores]
    correlations: dict[str, Any]

    @property
    def models(self) -> list[str]:
        return sorted({u.model for u in self.units})

    @property
    def languages(self) -> list[str]:
        return sorted({u.language for u in self.units})

    def unit(self, model: str, language: str) -> UnitScores | None:
        for u in self.units:
            if u.model == model and u.language == language:
                return u
        return None


def _read_csv(path: Path) -> list[dict[str, str]]:
    if not path.is_file():
        return []
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def load_scores(run_dir: str | Path) -> ScoresBundle:
    run_dir = Path(run_dir)
    manifest = RunManifest.load(run_dir)
    if manifest is None:
        raise IncompleteRunError(f"no manifest in {run_dir}")
    if not manifest.stage_done("scores"):
        raise IncompleteRunError("scoring stage has not completed for this run directory")
    scores_root = run_dir / "scores"
    units: list[UnitScores] = []
    for model_dir in sorted(p for p in scores_root.iterdir() if p.is_dir() and p.name != "correlations"):
        for lang_dir in sorted(p for p in model_dir.iterdir() if p.is_dir()):
            summary_path = lang_dir / "summary.json"
            summary = (
                json.loads(summary_path.read_text(encoding="utf-8")) if summary_path.is_file() else {}
            )
            units.append(
                UnitScores(
                    model=model_dir.name,
                    language=lang_dir.name,
                    grape=_read_csv(lang_dir / "grape.csv"),
                    extremity=_read_csv(lang_dir / "extremity.csv"),
                    stereotype=_read_csv(lang_dir / "stereotype.csv"),
                    summary=summary,
                )
            )
    correlations: dict[str, Any] = {}
    corr_dir = run_dir / "scores" / "correlations"
    if corr_dir.is_dir():
        for path in sorted(corr_dir.glob("*.csv")):
            correlations[path.stem] = _read_csv(path)
        notices = corr_dir / "notices.json"
        if notices.is_file():
            correlations["notices"] = json.loads(notices.read_text(encoding="utf-8"))
    return ScoresBundle(
        run_id=manifest.run_id,
        config_hash=manifest.config_hash,
        units=units,
        correlations=correlations,
    )


# ---------------------------------------------------------------------------
# Markdown
# ---------------------------------------------------------------------------

def _fmt(value: Any, digits: int = 4) -> str:
    if value is None or value == "":
        return "—"
    try:
        return f"{float(value):.{digits}f}"
    except (TypeError, ValueError):
        return str(value)


def _md_table(header: list[str], rows: list[list[str]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join(["---"] * len(header)) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return lines


def _overall_value(unit: UnitScores, reference_prefix: str, gender: str) -> float | None:
    for row in unit.grape:
        if row["group"] == "ALL" and row["gender"] == gender and row["reference"].startswith(reference_prefix):
            return float(row["value"])
    return None


def render_markdown(bundle: ScoresBundle) -> str:
    lines: list[str] = [
        "# MT gender-bias evaluation report",
        "",
        f"Run `{bundle.run_id}` (config `{bundle.config_hash[:12]}`).",
        "",
    ]

    # Data quality -----------------------------------------------------------
    lines += ["## Data quality", ""]
    rows = []
    for u in bundle.units:
        s = u.summary
        rows.append(
            [
                u.model,
                u.language,
                str(s.get("n_done", "—")),
                str(s.get("n_skipped", "—")),
                str(s.get("n_detected", "—")),
                str(s.get("n_multi_detect", "—")),
                _fmt(s.get("unclear_rate")),
            ]
        )
    lines += _md_table(
        ["model", "language", "done", "skipped", "detected", "multi-detect", "unclear rate"], rows
    )
    lines.append("")

    # Whole-corpus GRAPE ------------------------------------------------------
    lines += ["## Whole-corpus GRAPE", ""]
    references = [("parity", "parity")]
    if any(row["reference"].startswith("real") for u in bundle.units for row in u.grape):
        references.append(("real", "real"))
    columns: list[tuple[str, str, str]] = []  # (ref_prefix, language, gender)
    for ref_prefix, _ in references:
        for language in bundle.languages:
            for gender in ("m", "f"):
                columns.append((ref_prefix, language, gender))
    header = ["MT"] + [f"{ref} {language} {gender}" for ref, language, gender in columns]
    table_rows = []
    values_by_column: dict[int, list[tuple[str, float]]] = {}
    for model in bundle.models:
        row = [model]
        for idx, (ref_prefix, language, gender) in enumerate(columns):
            unit = bundle.unit(model, language)
            value = _overall_value(unit, ref_prefix, gender) if unit else None
            row.append(_fmt(value))
            if value is not None:
                values_by_column.setdefault(idx, []).append((model, value))
        table_rows.append(row)
    lines += _md_table(header, table_rows)
    lines.append("")
    annotations = []
    for idx, (ref_prefix, language, gender) in enumerate(columns):
        entries = values_by_column.get(idx)
        if not entries or len(entries) < 2:
            continue
        hi = max(entries, key=lambda kv: abs(kv[1]))
        lo = min(entries, key=lambda kv: abs(kv[1]))
        annotations.append(
            f"- `{ref_prefix} {language} {gender}`: max |GRAPE| {hi[0]} ({_fmt(hi[1])}), "
            f"min |GRAPE| {lo[0]} ({_fmt(lo[1])})"
        )
    if annotations:
        lines += ["Column extremes (replacing bold/underline marks):", ""] + annotations + [""]

    # Extremity ----------------------------------------------------------------
    lines += ["## Extreme and moderate gendering (4-digit groups)", ""]
    rows = []
    for u in bundle.units:
        counts = u.summary.get("extremity_counts", {})
        rows.append(
            [
                u.model,
                u.language,
                str(counts.get("extreme", 0)),
                str(counts.get("moderate", 0)),
                str(counts.get("neither", 0)),
            ]
        )
    lines += _md_table(["model", "language", "extreme", "moderate", "neither"], rows)
    lines.append("")

    # Stereotype ----------------------------------------------------------------
    lines += ["## GRAPE_m (parity) by stereotype band", ""]
    if any(u.stereotype for u in bundle.units):
        bands = ["stereo_masculine", "stereo_neutral", "stereo_feminine"]
        rows = []
        for u in bundle.units:
            by_band = {
                row["group"]: row["value"] for row in u.stereotype if row["gender"] == "m"
            }
            rows.append([u.model, u.language] + [_fmt(by_band.get(b)) for b in bands])
        lines += _md_table(["model", "language", "masculine", "neutral", "feminine"], rows)
    else:
        lines.append("_Stereotype ratings not configured; section omitted._")
    lines.append("")

    # Correlations ---------------------------------------------------------------
    lines += ["## Correlations (p_f per 3-digit group)", ""]
    real = {(r["model"], r["language"]): r for r in bundle.correlations.get("real", [])}
    stereo = {(r["model"], r["language"]): r for r in bundle.correlations.get("stereotype", [])}
    if real or stereo:
        rows = []
        for key in sorted(set(real) | set(stereo)):
            r_real = real.get(key)
            r_stereo = stereo.get(key)
            rows.append(
                [
                    key[0],
                    key[1],
                    _fmt(r_real["r"]) if r_real else "—",
                    str(r_real["n_groups"]) if r_real else "—",
                    _fmt(r_stereo["r"]) if r_stereo else "—",
                    str(r_stereo["n_groups"]) if r_stereo else "—",
                ]
            )
        lines += _md_table(
            ["model", "language", "r vs real", "n", "r vs stereotype", "n"], rows
        )
        lines.append("")
    cross = bundle.correlations.get("cross_lingual", [])
    if cross:
        lines += ["### Cross-lingual consistency", ""]
        rows = [
            [r["model"], f'{r["language_a"]}/{r["language_b"]}', _fmt(r["r"]), r["n_groups"]]
            for r in cross
        ]
        lines += _md_table(["model", "languages", "r", "n"], rows)
        lines.append("")
    intra_names = sorted(k for k in bundle.correlations if k.startswith("intra_"))
    for name in intra_names:
        language = name.removeprefix("intra_")
        lines += [f"### Model agreement in {language}", ""]
        matrix_rows = bundle.correlations[name]
        if matrix_rows:
            header = ["model"] + [k for k in matrix_rows[0] if k != "model"]
            rows = [[r["model"]] + [_fmt(r[k]) for k in header[1:]] for r in matrix_rows]
            lines += _md_table(header, rows)
        lines.append("")
    if not (real or stereo or cross or intra_names):
        lines += ["_No correlation inputs available (single unit or missing references)._", ""]

    return "\n".join(lines).rstrip() + "\n"


# ---------------------------------------------------------------------------
# CSV / JSON
# ---------------------------------------------------------------------------

def render_csv(bundle: ScoresBundle, path: Path) -> None:
    header = [
        "model",
        "language",
        "group",
        "level",
        "gender",
        "reference",
        "value",
        "n_m",
        "n_f",
        "n_unclear",
    ]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for u in bundle.units:
            for row in u.grape:
                writer.writerow([u.model, u.language] + [row[k] for k in header[2:]])


def render_json_payload(bundle: ScoresBundle) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "run_id": bundle.run_id,
        "config_hash": bundle.config_hash,
        "units": [
            {
                "model": u.model,
                "language": u.language,
                "summary": u.summary,
                "grape": u.grape,
                "extremity": u.extremity,
                "stereotype": u.stereotype,
            }
            for u in bundle.units
        ],
        "correlations": bundle.correlations,
    }


def render_reports(run_dir: str | Path, formats: tuple[str, ...] = ("md", "csv", "json")) -> dict[str, Path]:
    """Render requested report formats from the score artifacts."""
    run_dir = Path(run_dir)
    bundle = load_scores(run_dir)
    out_dir = RunPaths(run_dir).reports_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}
    if "md" in formats:
        path = out_dir / "summary.md"
        path.write_text(render_markdown(bundle), encoding="utf-8")
        written["md"] = path
    if "csv" in formats:
        path = out_dir / "scores.csv"
        render_csv(bundle, path)
        written["csv"] = path
    if "json" in formats:
        path = out_dir / "scores.json"
        path.write_text(
            json.dumps(render_json_payload(bundle), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        written["json"] = path
    return written
