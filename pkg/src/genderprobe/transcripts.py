"""Append-only JSON-lines transcript store for raw model completions.

One file per (language, model) under a root directory, one record per line:
``{"prompt_hash": ..., "noun": ..., "sample_index": ..., "raw_text": ...,
"model": ..., "timestamp": ...}``. Records are content-addressed by
(prompt_hash, sample_index) within a file, so re-running an elicitation never
refetches what is already stored. Duplicate keys resolve last-write-wins on
reload. Writes are serialized by a lock and flushed per record.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, asdict
from pathlib import Path

from .errors import LexiconParseError

# Fixed timestamp used where wall-clock time would break byte-reproducibility
# (synthetic backends and generated fixtures).
EPOCH_TIMESTAMP = "1970-01-01T00:00:00Z"

_SAFE_NAME_RE = re.compile(r"[^A-Za-z0-9._-]+")


def _safe_name(name: str) -> str:
    return _SAFE_NAME_RE.sub("_", name) or "unknown"


@dataclass(frozen=True)
class TranscriptRecord:
    prompt_hash: str
    noun: str
    sample_index: int
    raw_text: str
    model: str
    timestamp: str

    def to_line(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True)


class TranscriptStore:
    """Disk-backed completion store with an in-memory index per file."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()
        self._index: dict[tuple[str, str], dict[tuple[str, int], TranscriptRecord]] = {}

    def path_for(self, language: str, model: str) -> Path:
        return self.root / f"{_safe_name(language)}__{_safe_name(model)}.jsonl"

    def _load(self, language: str, model: str) -> dict[tuple[str, int], TranscriptRecord]:
        key = (language, model)
        if key in self._index:
            return self._index[key]
        records: dict[tuple[str, int], TranscriptRecord] = {}
        path = self.path_for(language, model)
        if path.exists():
            with path.open("r", encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        obj = json.loads(line)
                        record = TranscriptRecord(
                            prompt_hash=obj["prompt_hash"],
                            noun=obj["noun"],
                            sample_index=int(obj["sample_index"]),
                            raw_text=obj["raw_text"],
                            model=obj["model"],
                            timestamp=obj.get("timestamp", EPOCH_TIMESTAMP),
                        )
                    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                        raise LexiconParseError(
                            f"bad transcript record: {exc}", path=str(path), line_no=line_no
                        )
                    records[(record.prompt_hash, record.sample_index)] = record
        self._index[key] = records
        return records

    def get(
        self, language: str, model: str, prompt_hash: str, sample_index: int
    ) -> TranscriptRecord | None:
        return self._load(language, model).get((prompt_hash, sample_index))

    def put(self, language: str, model: str, record: TranscriptRecord) -> None:
        """Append one record (atomic line write; single writer)."""
        with self._lock:
            records = self._load(language, model)
            path = self.path_for(language, model)
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("a", encoding="utf-8") as fh:
                fh.write(record.to_line() + "\n")
                fh.flush()
            records[(record.prompt_hash, record.sample_index)] = record

    def records(self, language: str, model: str) -> list[TranscriptRecord]:
        """All records for one (language, model), in stable key order."""
        loaded = self._load(language, model)
        return [loaded[k] for k in sorted(loaded)]

    def languages_and_models(self) -> list[tuple[str, str]]:
        """Infer (language, model) pairs from file names under the root."""
        pairs = []
        if self.root.exists():
            for path in sorted(self.root.glob("*.jsonl")):
                stem = path.stem
                if "__" in stem:
                    language, model = stem.split("__", 1)
                    pairs.append((language, model))
        return pairs
