"""Run manifest: config identity, stage completion, and per-sample status."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

MANIFEST_NAME = "manifest.json"

STATUS_DONE = "done"
STATUS_SKIPPED = "skipped"


@dataclass
class RunManifest:
    run_id: str
    config_hash: str
    stages: dict[str, bool] = field(default_factory=dict)
    samples: dict[str, dict[str, dict]] = field(default_factory=dict)  # unit -> sample_id -> status
    provider_stats: dict[str, dict[str, int]] = field(default_factory=dict)

    @classmethod
    def new(cls, config_hash: str) -> "RunManifest":
        return cls(run_id=config_hash[:12], config_hash=config_hash)

    @classmethod
    def load(cls, run_dir: str | Path) -> "RunManifest | None":
        path = Path(run_dir) / MANIFEST_NAME
        if not path.is_file():
            return None
        raw = json.loads(path.read_text(encoding="utf-8"))
        return cls(
            run_id=raw["run_id"],
            config_hash=raw["config_hash"],
            stages=dict(raw.get("stages", {})),
            samples={u: dict(v) for u, v in raw.get("samples", {}).items()},
            provider_stats={k: dict(v) for k, v in raw.get("provider_stats", {}).items()},
        )

    def save(self, run_dir: str | Path) -> None:
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "run_id": self.run_id,
            "config_hash": self.config_hash,
            "stages": dict(sorted(self.stages.items())),
            "samples": {u: dict(sorted(v.items())) for u, v in sorted(self.samples.items())},
            "provider_stats": {k: dict(sorted(v.items())) for k, v in sorted(self.provider_stats.items())},
        }
        fd, tmp = tempfile.mkstemp(dir=run_dir, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        os.replace(tmp, run_dir / MANIFEST_NAME)

    def stage_done(self, stage: str) -> bool:
        return self.stages.get(stage, False)

    def mark_stage(self, stage: str, done: bool = True) -> None:
        self.stages[stage] = done

    def set_sample(self, unit: str, sample_id: str, status: str, reason: str | None = None) -> None:
        entry: dict = {"status": status}
        if reason:
            entry["reason"] = reason
        self.samples.setdefault(unit, {})[sample_id] = entry

    def sample_status(self, unit: str, sample_id: str) -> str | None:
        entry = self.samples.get(unit, {}).get(sample_id)
        return entry["status"] if entry else None

    def skipped_in(self, unit: str) -> dict[str, str]:
        return {
            sid: entry.get("reason", "")
            for sid, entry in self.samples.get(unit, {}).items()
            if entry["status"] == STATUS_SKIPPED
        }
