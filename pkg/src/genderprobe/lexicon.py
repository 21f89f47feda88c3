"""Gendered-noun lexicons: ingestion, validation, animacy filtering, train/test splits.

A lexicon is a per-language TSV with header ``surface\tgender\tpivot_gloss\tanimate``,
gender tokens ``m``/``f``/``n`` (neuter rows are dropped on load) and animate
tokens ``0``/``1``. All functions here are pure over immutable inputs.
"""

from __future__ import annotations

import csv
import random
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import LexiconParseError, ValidationError

SOURCE_LANGUAGES = ("bg", "cs", "de", "el", "es", "fr", "hi", "it", "lv", "pt")
PIVOT_LANGUAGE = "en"
SUPPORTED_LANGUAGES = SOURCE_LANGUAGES + (PIVOT_LANGUAGE,)

LEXICON_COLUMNS = ("surface", "gender", "pivot_gloss", "animate")

MIN_SPLIT_SIZE = 10
TEST_FRACTION = 0.10

_LANGUAGE_RE = re.compile(r"^[a-z][a-z0-9_-]{1,15}$")


class Gender(Enum):
    FEMININE = "f"
    MASCULINE = "m"

    @classmethod
    def from_token(cls, token: str) -> "Gender":
        try:
            return cls(token)
        except ValueError:
            raise ValidationError(f"unknown gender token {token!r} (expected 'm' or 'f')")


def validate_language(code: str, *, source_only: bool = False) -> str:
    """Check a language tag.

    Real source languages come from SOURCE_LANGUAGES; synthetic validation
    languages may use any short lowercase tag. English is pivot-only and is
    rejected wherever gendered nouns are expected.
    """
    if not isinstance(code, str) or not _LANGUAGE_RE.match(code):
        raise ValidationError(f"invalid language tag {code!r}")
    if source_only and code == PIVOT_LANGUAGE:
        raise ValidationError("'en' is the pivot language and cannot hold gendered nouns")
    return code


@dataclass(frozen=True)
class Noun:
    """One lexicon entry: a gendered noun and its English gloss."""

    surface: str
    language: str
    gender: Gender
    pivot_gloss: str
    animate: bool

    def __post_init__(self):
        if not self.surface.strip():
            raise ValidationError("noun surface is empty")

    @property
    def key(self) -> str:
        return f"{self.language}:{self.surface}"


@dataclass(frozen=True)
class Lexicon:
    """Ordered collection of nouns sharing one language."""

    language: str
    entries: tuple[Noun, ...]

    def __post_init__(self):
        for noun in self.entries:
            if noun.language != self.language:
                raise ValidationError(
                    f"noun {noun.surface!r} has language {noun.language!r}, "
                    f"lexicon is {self.language!r}"
                )

    @property
    def total_count(self) -> int:
        return len(self.entries)

    @property
    def masculine_count(self) -> int:
        return sum(1 for n in self.entries if n.gender is Gender.MASCULINE)

    @property
    def feminine_count(self) -> int:
        return sum(1 for n in self.entries if n.gender is Gender.FEMININE)

    @property
    def counts(self) -> tuple[int, int, int]:
        """(total, masculine, feminine) tallies recomputed from entries."""
        return (self.total_count, self.masculine_count, self.feminine_count)


@dataclass(frozen=True)
class Split:
    """Disjoint train/test partition of a lexicon, reproducible per seed."""

    train: tuple[Noun, ...]
    test: tuple[Noun, ...]
    seed: int


def load_lexicon(path: str | Path, language: str) -> Lexicon:
    """Read a four-column lexicon TSV.

    Neuter rows are dropped (and not counted); duplicate (surface, language)
    pairs and malformed rows abort the load with the offending line number.
    """
    language = validate_language(language, source_only=True)
    path = Path(path)
    entries: list[Noun] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        try:
            header = next(reader)
        except StopIteration:
            raise LexiconParseError("file is empty", path=str(path), line_no=1)
        if tuple(h.strip() for h in header) != LEXICON_COLUMNS:
            raise LexiconParseError(
                f"bad header {header!r}, expected {list(LEXICON_COLUMNS)}",
                path=str(path),
                line_no=1,
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(LEXICON_COLUMNS):
                raise LexiconParseError(
                    f"expected {len(LEXICON_COLUMNS)} columns, got {len(row)}",
                    path=str(path),
                    line_no=line_no,
                )
            surface, gender_tok, gloss, animate_tok = (c.strip() for c in row)
            if not surface:
                raise LexiconParseError("empty surface", path=str(path), line_no=line_no)
            if gender_tok == "n":
                continue
            if gender_tok not in ("m", "f"):
                raise LexiconParseError(
                    f"unknown gender token {gender_tok!r}", path=str(path), line_no=line_no
                )
            if animate_tok not in ("0", "1"):
                raise LexiconParseError(
                    f"bad animate flag {animate_tok!r} (expected 0 or 1)",
                    path=str(path),
                    line_no=line_no,
                )
            if surface in seen:
                raise LexiconParseError(
                    f"duplicate surface {surface!r}", path=str(path), line_no=line_no
                )
            seen.add(surface)
            entries.append(
                Noun(
                    surface=surface,
                    language=language,
                    gender=Gender.from_token(gender_tok),
                    pivot_gloss=gloss,
                    animate=animate_tok == "1",
                )
            )
    if not entries:
        raise ValidationError(f"lexicon {path} holds no usable (non-neuter) rows")
    return Lexicon(language=language, entries=tuple(entries))


def save_lexicon(lexicon: Lexicon, path: str | Path) -> Path:
    """Write a lexicon back out in the canonical TSV format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(LEXICON_COLUMNS)
        for noun in lexicon.entries:
            writer.writerow(
                [noun.surface, noun.gender.value, noun.pivot_gloss, "1" if noun.animate else "0"]
            )
    return path


def filter_animate(lexicon: Lexicon) -> Lexicon:
    """Drop animate entries (idempotent; may produce an empty lexicon)."""
    kept = tuple(n for n in lexicon.entries if not n.animate)
    return Lexicon(language=lexicon.language, entries=kept)


def split_lexicon(lexicon: Lexicon, seed: int) -> Split:
    """Shuffle under ``seed`` and hold out round(10%) of the nouns as test.

    The shuffle uses a dedicated PRNG so the result is bit-reproducible for a
    fixed (lexicon, seed). Halves round per Python's round-half-to-even.
    """
    total = lexicon.total_count
    if total < MIN_SPLIT_SIZE:
        raise ValidationError(
            f"cannot split a lexicon of {total} nouns (need >= {MIN_SPLIT_SIZE})"
        )
    order = list(range(total))
    random.Random(seed).shuffle(order)
    n_test = round(TEST_FRACTION * total)
    test = tuple(lexicon.entries[i] for i in order[:n_test])
    train = tuple(lexicon.entries[i] for i in order[n_test:])
    return Split(train=train, test=test, seed=seed)
