"""Turn raw completions into adjective sets and per-noun frequency profiles.

A completion is read only up to its first line break or ``***`` marker (models
tend to continue the few-shot pattern), split on commas and normalized. The
frequency of an adjective is the fraction of the N samples whose set contains
it; empty parses still count in the denominator. Profiles keep only the top-p
frequencies, breaking ties lexicographically so truncation is deterministic.
"""

from __future__ import annotations

import json
import logging
import string
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError
from .gateway import Completion
from .lexicon import Gender, Noun

logger = logging.getLogger(__name__)

MAX_TOKEN_LENGTH = 40
DEFAULT_TOP_P = 50

_BREAK_MARKER = "***"
_STRIP_CHARS = string.punctuation + string.whitespace + "«»“”‘’„…–—।"


@dataclass(frozen=True)
class AdjectiveSet:
    """Normalized, deduplicated adjectives from one sample."""

    noun: Noun
    sample_index: int
    adjectives: tuple[str, ...]


@dataclass(frozen=True)
class AdjectiveProfile:
    """Adjective -> frequency map for one noun over n_samples promptings."""

    noun: Noun
    entries: Mapping[str, float]
    n_samples: int
    truncated_to: int
    adjective_language: str


def normalize_token(token: str) -> str:
    """Lowercase, collapse inner whitespace, strip edge punctuation."""
    token = " ".join(token.split()).lower()
    return token.strip(_STRIP_CHARS)


def parse_completion(completion: Completion) -> AdjectiveSet:
    """Extract the comma-separated adjective list from a raw completion.

    Zero surviving tokens is recorded as a warning, not an error; the sample
    then contributes an empty set (it still counts toward the denominator).
    """
    text = completion.raw_text
    cut = len(text)
    newline = text.find("\n")
    if newline != -1:
        cut = newline
    marker = text.find(_BREAK_MARKER)
    if marker != -1:
        cut = min(cut, marker)
    head = text[:cut]

    seen: set[str] = set()
    adjectives: list[str] = []
    for piece in head.split(","):
        token = normalize_token(piece)
        if not token or len(token) > MAX_TOKEN_LENGTH:
            continue
        if token not in seen:
            seen.add(token)
            adjectives.append(token)
    if not adjectives:
        logger.warning(
            "empty adjective parse for %s sample %d (raw: %r)",
            completion.noun.key,
            completion.sample_index,
            text[:60],
        )
    return AdjectiveSet(
        noun=completion.noun,
        sample_index=completion.sample_index,
        adjectives=tuple(adjectives),
    )


def aggregate(sets: Sequence[AdjectiveSet], n_samples: int, p: int = DEFAULT_TOP_P) -> AdjectiveProfile:
    """Membership frequencies over all samples, truncated to the top p.

    f(adjective) = (#samples containing it) / n_samples. The denominator is
    the number of promptings, so empty sets dilute every frequency. At the
    truncation boundary ties resolve by ascending token order.
    """
    if p < 1:
        raise ValidationError("p must be >= 1")
    if len(sets) != n_samples:
        raise ValidationError(f"got {len(sets)} sample sets, expected n_samples={n_samples}")
    nouns = {s.noun for s in sets}
    if len(nouns) != 1:
        raise ValidationError(f"sample sets span {len(nouns)} nouns, expected exactly one")
    noun = sets[0].noun

    counts: Counter[str] = Counter()
    for sample in sets:
        counts.update(sample.adjectives)

    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:p]
    entries = {token: count / n_samples for token, count in ranked}
    return AdjectiveProfile(
        noun=noun,
        entries=entries,
        n_samples=n_samples,
        truncated_to=p,
        adjective_language=noun.language,
    )


def write_profiles(path: str | Path, profiles: Iterable[AdjectiveProfile]) -> Path:
    """One JSON object per noun per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for profile in profiles:
            fh.write(
                json.dumps(
                    {
                        "noun": profile.noun.surface,
                        "language": profile.noun.language,
                        "gender": profile.noun.gender.value,
                        "n_samples": profile.n_samples,
                        "truncated_to": profile.truncated_to,
                        "adjective_language": profile.adjective_language,
                        "entries": dict(profile.entries),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    return path


def read_profiles(path: str | Path) -> list[AdjectiveProfile]:
    """Reload a profile store file (gloss/animacy of the nouns are not kept)."""
    profiles = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            noun = Noun(
                surface=obj["noun"],
                language=obj["language"],
                gender=Gender.from_token(obj["gender"]),
                pivot_gloss="",
                animate=False,
            )
            profiles.append(
                AdjectiveProfile(
                    noun=noun,
                    entries={k: float(v) for k, v in obj["entries"].items()},
                    n_samples=int(obj["n_samples"]),
                    truncated_to=int(obj.get("truncated_to", DEFAULT_TOP_P)),
                    adjective_language=obj.get("adjective_language", obj["language"]),
                )
            )
    return profiles
