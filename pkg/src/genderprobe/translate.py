"""Adjective translation into the English pivot, with a persistent cache.

Source-language adjectives may be gender-inflected, which would let a
classifier shortcut to the noun's gender from morphology alone; mapping
everything onto English removes that signal and makes profiles comparable
across languages. Translation is token-level and context-free. When two
source forms collapse onto one pivot token their frequencies are summed and
clamped to 1.0.

Clients implement ``Translator`` and return (target, origin) pairs; shipped
implementations are an offline TSV dictionary (default for hermetic runs) and
a JSON HTTP client keyed by the GENDERPROBE_TRANSLATE_KEY environment
variable.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Protocol

import requests

from .describe import AdjectiveProfile, normalize_token
from .errors import TranslationError, TransportError, ValidationError
from .lexicon import PIVOT_LANGUAGE

TRANSLATE_KEY_ENV = "GENDERPROBE_TRANSLATE_KEY"

CACHE_COLUMNS = ("source_language", "source", "target", "origin")
DICTIONARY_COLUMNS = ("source_language", "source", "target")

ORIGIN_ONLINE = "online"
ORIGIN_DICTIONARY = "dictionary"
ORIGIN_IDENTITY = "identity"
ORIGIN_PASSTHROUGH = "passthrough"


class TranslationResult(NamedTuple):
    target: str
    origin: str


class Translator(Protocol):
    def translate(self, token: str, source_language: str) -> TranslationResult: ...


@dataclass(frozen=True)
class TranslationEntry:
    source_language: str
    source: str
    target: str
    origin: str


class TranslationCache:
    """(language, source) -> target map, optionally mirrored to an append-only TSV.

    Reload is last-write-wins, so corrections appended later shadow earlier
    rows without rewriting the file.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: dict[tuple[str, str], TranslationEntry] = {}
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        with self.path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh, delimiter="\t")
            header = next(reader, None)
            if header is None:
                return
            if tuple(h.strip() for h in header) != CACHE_COLUMNS:
                raise ValidationError(
                    f"bad cache header in {self.path}: {header!r}"
                )
            for row in reader:
                if not row:
                    continue
                if len(row) != len(CACHE_COLUMNS):
                    raise ValidationError(f"bad cache row in {self.path}: {row!r}")
                language, source, target, origin = row
                self._entries[(language, source)] = TranslationEntry(
                    source_language=language, source=source, target=target, origin=origin
                )

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self._entries

    def get(self, source_language: str, source: str) -> TranslationEntry | None:
        return self._entries.get((source_language, source))

    def put(self, entry: TranslationEntry) -> None:
        self._entries[(entry.source_language, entry.source)] = entry
        if self.path is not None:
            new_file = not self.path.exists()
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8", newline="\n") as fh:
                if new_file:
                    fh.write("\t".join(CACHE_COLUMNS) + "\n")
                fh.write(
                    f"{entry.source_language}\t{entry.source}\t{entry.target}\t{entry.origin}\n"
                )


class DictionaryTranslator:
    """Offline dictionary lookup from a three-column TSV.

    ``on_missing`` is either ``"error"`` (default) or ``"passthrough"``, which
    returns the source token unchanged but marked with a passthrough origin.
    """

    def __init__(self, path: str | Path, on_missing: str = "error"):
        if on_missing not in ("error", "passthrough"):
            raise ValidationError(f"unknown on_missing policy {on_missing!r}")
        self.path = Path(path)
        self.on_missing = on_missing
        self._table: dict[tuple[str, str], str] = {}
        with self.path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh, delimiter="\t")
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != DICTIONARY_COLUMNS:
                raise ValidationError(
                    f"bad dictionary header in {self.path}: {header!r}"
                )
            for row in reader:
                if not row:
                    continue
                if len(row) != len(DICTIONARY_COLUMNS):
                    raise ValidationError(f"bad dictionary row in {self.path}: {row!r}")
                language, source, target = row
                self._table[(language, source)] = target

    def __len__(self) -> int:
        return len(self._table)

    def covers(self, token: str, source_language: str) -> bool:
        return (source_language, token) in self._table

    def targets(self) -> set[str]:
        return set(self._table.values())

    def translate(self, token: str, source_language: str) -> TranslationResult:
        target = self._table.get((source_language, token))
        if target is not None:
            return TranslationResult(target, ORIGIN_DICTIONARY)
        if self.on_missing == "passthrough":
            return TranslationResult(token, ORIGIN_PASSTHROUGH)
        raise TranslationError([token], source_language, detail="not in offline dictionary")


class OnlineTranslator:
    """JSON HTTP translate client: POST {q, source, target} -> {translatedText}."""

    def __init__(self, endpoint: str, timeout: float = 30.0,
                 session: requests.Session | None = None):
        if not endpoint:
            raise ValidationError("online translator requires an endpoint")
        self.endpoint = endpoint
        self.timeout = timeout
        self._session = session or requests.Session()

    def translate(self, token: str, source_language: str) -> TranslationResult:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(TRANSLATE_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            response = self._session.post(
                self.endpoint,
                json={"q": token, "source": source_language, "target": PIVOT_LANGUAGE},
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"translate endpoint unreachable: {exc}")
        if response.status_code != 200:
            raise TransportError(
                f"translate endpoint returned {response.status_code}: {response.text[:200]}"
            )
        data = response.json()
        target = data.get("translatedText")
        if not isinstance(target, str) or not target:
            raise TransportError(f"malformed translate response: {str(data)[:200]}")
        return TranslationResult(target, ORIGIN_ONLINE)


def translate_adjective(
    cache: TranslationCache,
    client: Translator,
    token: str,
    language: str,
) -> str:
    """Pivot form of one adjective; cache hits never touch the client."""
    if language == PIVOT_LANGUAGE:
        return token
    cached = cache.get(language, token)
    if cached is not None:
        return cached.target
    try:
        target, origin = client.translate(token, language)
    except TransportError as exc:
        raise TranslationError([token], language, detail=str(exc))
    target = normalize_token(target)
    if not target:
        raise TranslationError([token], language, detail="translation normalized to empty")
    cache.put(
        TranslationEntry(source_language=language, source=token, target=target, origin=origin)
    )
    return target


def translate_profile(
    profile: AdjectiveProfile,
    cache: TranslationCache,
    client: Translator,
) -> AdjectiveProfile:
    """Replace every adjective by its pivot form, merging collisions.

    Frequencies of source adjectives that map to one pivot token are summed
    and clamped to 1.0 (both inflections may appear in one sample, so the sum
    over-counts at most up to the clamp). All failing tokens are reported in
    one error rather than stopping at the first.
    """
    language = profile.adjective_language
    if language == PIVOT_LANGUAGE:
        return profile
    translated: dict[str, float] = {}
    failures: list[str] = []
    for token, frequency in profile.entries.items():
        try:
            target = translate_adjective(cache, client, token, language)
        except TranslationError as exc:
            failures.extend(exc.tokens)
            continue
        translated[target] = translated.get(target, 0.0) + frequency
    if failures:
        raise TranslationError(sorted(set(failures)), language)
    merged = {
        token: min(1.0, freq)
        for token, freq in sorted(translated.items(), key=lambda kv: (-kv[1], kv[0]))
    }
    return AdjectiveProfile(
        noun=profile.noun,
        entries=merged,
        n_samples=profile.n_samples,
        truncated_to=profile.truncated_to,
        adjective_language=PIVOT_LANGUAGE,
    )
