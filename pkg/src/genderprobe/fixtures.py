"""Cross-checks over the checked-in fixture tree.

The repo ships mini-lexicons, replay transcripts, a toy embedding table, an
offline dictionary and a synthetic generation config under ``fixtures/`` so
the whole test suite runs without network access or model weights. This
module re-parses every fixture with its production loader and validates the
cross-references between them.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .describe import normalize_token
from .embed import load_embeddings
from .errors import GenderProbeError
from .lexicon import PIVOT_LANGUAGE, load_lexicon
from .transcripts import TranscriptStore
from .translate import DictionaryTranslator

EMBEDDING_COVERAGE_MIN = 0.95


@dataclass(frozen=True)
class FixtureCheck:
    name: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class FixtureReport:
    checks: tuple[FixtureCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[FixtureCheck]:
        return [c for c in self.checks if not c.ok]

    def summary(self) -> str:
        lines = [f"{'PASS' if c.ok else 'FAIL'}: {c.name} - {c.detail}" for c in self.checks]
        return "\n".join(lines)


def _transcript_tokens(store: TranscriptStore, language: str, model: str) -> set[str]:
    tokens: set[str] = set()
    for record in store.records(language, model):
        head = record.raw_text.split("\n", 1)[0].split("***", 1)[0]
        for piece in head.split(","):
            token = normalize_token(piece)
            if token:
                tokens.add(token)
    return tokens


def verify_fixtures(root: str | Path) -> FixtureReport:
    """Validate every fixture and the references between them."""
    root = Path(root)
    checks: list[FixtureCheck] = []

    lexicons = {}
    lexicon_dir = root / "lexicons"
    for path in sorted(lexicon_dir.glob("*.tsv")) if lexicon_dir.exists() else []:
        language = path.stem
        try:
            lexicons[language] = load_lexicon(path, language)
            total, masc, fem = lexicons[language].counts
            checks.append(
                FixtureCheck(
                    f"lexicon:{language}", True, f"{total} nouns ({masc} m / {fem} f)"
                )
            )
        except GenderProbeError as exc:
            checks.append(FixtureCheck(f"lexicon:{language}", False, str(exc)))
    if not lexicons:
        checks.append(FixtureCheck("lexicons", False, f"no lexicon TSVs under {lexicon_dir}"))

    store = TranscriptStore(root / "transcripts")
    pairs = store.languages_and_models()
    if not pairs:
        checks.append(
            FixtureCheck("transcripts", False, f"no transcript files under {store.root}")
        )
    transcript_languages = []
    for language, model in pairs:
        try:
            records = store.records(language, model)
        except GenderProbeError as exc:
            checks.append(FixtureCheck(f"transcript:{language}:{model}", False, str(exc)))
            continue
        lexicon = lexicons.get(language)
        if lexicon is None:
            checks.append(
                FixtureCheck(
                    f"transcript:{language}:{model}", False, f"no lexicon for {language!r}"
                )
            )
            continue
        surfaces = {noun.surface for noun in lexicon.entries}
        strays = sorted({r.noun for r in records} - surfaces)
        if strays:
            checks.append(
                FixtureCheck(
                    f"transcript:{language}:{model}",
                    False,
                    f"transcript nouns missing from lexicon: {strays[:5]}",
                )
            )
        else:
            checks.append(
                FixtureCheck(
                    f"transcript:{language}:{model}", True, f"{len(records)} records"
                )
            )
            transcript_languages.append((language, model))

    dictionary = None
    dictionary_path = root / "dictionaries" / "synthetic.tsv"
    try:
        dictionary = DictionaryTranslator(dictionary_path)
        checks.append(
            FixtureCheck("dictionary", True, f"{len(dictionary)} entries in {dictionary_path.name}")
        )
    except (GenderProbeError, OSError) as exc:
        checks.append(FixtureCheck("dictionary", False, str(exc)))

    if dictionary is not None:
        for language, model in transcript_languages:
            if language == PIVOT_LANGUAGE:
                continue
            tokens = _transcript_tokens(store, language, model)
            uncovered = sorted(t for t in tokens if not dictionary.covers(t, language))
            checks.append(
                FixtureCheck(
                    f"dictionary-coverage:{language}",
                    not uncovered,
                    f"{len(tokens) - len(uncovered)}/{len(tokens)} adjectives covered"
                    + (f"; missing {uncovered[:5]}" if uncovered else ""),
                )
            )

    embeddings_path = root / "embeddings" / "pivot.txt"
    try:
        table = load_embeddings(embeddings_path)
        checks.append(
            FixtureCheck(
                "embeddings", True, f"{len(table)} vectors of dimension {table.dimension}"
            )
        )
        if dictionary is not None:
            targets = dictionary.targets()
            covered = sum(1 for t in targets if t in table)
            coverage = covered / len(targets) if targets else 1.0
            checks.append(
                FixtureCheck(
                    "embedding-coverage",
                    coverage >= EMBEDDING_COVERAGE_MIN,
                    f"{covered}/{len(targets)} dictionary targets ({coverage:.1%})",
                )
            )
    except (GenderProbeError, OSError) as exc:
        checks.append(FixtureCheck("embeddings", False, str(exc)))

    synth_config = root / "synth.toml"
    if synth_config.exists():
        try:
            with synth_config.open("rb") as fh:
                tomllib.load(fh)
            checks.append(FixtureCheck("synth-config", True, synth_config.name))
        except tomllib.TOMLDecodeError as exc:
            checks.append(FixtureCheck("synth-config", False, str(exc)))
    else:
        checks.append(FixtureCheck("synth-config", False, f"{synth_config} missing"))

    return FixtureReport(checks=tuple(checks))
