"""Synthetic gendered languages with planted adjective bias.

A SyntheticSpec defines pivot-level adjective pools (masculine, feminine,
neutral), a shared semantic map (pivot token -> vector, standing in for a real
embedding table) and a bias strength beta. For each response slot the sampler
draws from the noun's gendered pool with probability beta, otherwise from the
neutral pool, so beta=1 yields gendered pools only and beta=0 is gender-blind.

Per-language surface forms are derived from the pivot tokens (several variants
per pivot, so translation collapses them back together, exercising the same
collision path as real gender-inflected adjectives). Generated lexicons,
transcripts, dictionaries and embedding files use the exact on-disk formats of
the real pipeline, byte-for-byte reproducible for a fixed (spec, seed).
"""

from __future__ import annotations

import hashlib
import string
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PoolExhaustionError, ValidationError
from .lexicon import Gender, Lexicon, Noun, save_lexicon, validate_language
from .prompts import prompt_sha256, render_prompt, template_for
from .transcripts import EPOCH_TIMESTAMP, TranscriptRecord, TranscriptStore

DEFAULT_MODEL_NAME = "synth-v1"


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one planted-bias language."""

    n_nouns: int = 60
    masculine_fraction: float = 0.5
    vocab_masculine: tuple[str, ...] = ()
    vocab_feminine: tuple[str, ...] = ()
    vocab_neutral: tuple[str, ...] = ()
    bias_strength: float = 0.8
    adjectives_per_response: int = 6
    n_samples: int = 10
    semantic_map: dict[str, tuple[float, ...]] = field(default_factory=dict)
    surface_variants: int = 2
    oov_tokens: tuple[str, ...] = ()
    animate_every: int = 7  # every k-th noun flagged animate; 0 disables

    def __post_init__(self):
        if self.n_nouns < 1:
            raise ValidationError("n_nouns must be >= 1")
        if not 0.0 < self.masculine_fraction < 1.0:
            raise ValidationError("masculine_fraction must lie in (0, 1)")
        if not 0.0 <= self.bias_strength <= 1.0:
            raise ValidationError("bias_strength must lie in [0, 1]")
        if self.adjectives_per_response < 1:
            raise ValidationError("adjectives_per_response must be >= 1")
        if self.n_samples < 1:
            raise ValidationError("n_samples must be >= 1")
        if self.surface_variants < 1:
            raise ValidationError("surface_variants must be >= 1")
        pools = (set(self.vocab_masculine), set(self.vocab_feminine), set(self.vocab_neutral))
        if not all(pools):
            raise ValidationError("all three adjective pools must be non-empty")
        if pools[0] & pools[1] or pools[0] & pools[2] or pools[1] & pools[2]:
            raise ValidationError("adjective pools must be pairwise disjoint")
        missing = (pools[0] | pools[1] | pools[2]) - set(self.semantic_map)
        if missing:
            raise ValidationError(f"semantic map misses pool tokens: {sorted(missing)}")

    def pool_for(self, gender: Gender) -> tuple[str, ...]:
        return self.vocab_masculine if gender is Gender.MASCULINE else self.vocab_feminine


def build_spec(
    n_nouns: int = 60,
    bias_strength: float = 0.8,
    masculine_fraction: float = 0.5,
    adjectives_per_response: int = 6,
    n_samples: int = 10,
    pool_sizes: tuple[int, int, int] = (20, 20, 40),
    dimension: int = 8,
    surface_variants: int = 2,
    n_oov: int = 2,
    map_seed: int = 0,
    token_prefix: str = "trait",
) -> SyntheticSpec:
    """Construct a spec with a structured semantic map.

    Masculine pivot vectors get a positive first coordinate, feminine a
    negative one, neutral near zero; remaining coordinates are noise. This
    keeps gendered features linearly separable when beta is high. Distinct
    ``token_prefix``/``map_seed`` values give disjoint vocabularies and maps,
    which is how transfer-null (unrelated language) scenarios are built.
    """
    n_m, n_f, n_n = pool_sizes
    masc = tuple(f"{token_prefix}m{i:02d}" for i in range(n_m))
    fem = tuple(f"{token_prefix}f{i:02d}" for i in range(n_f))
    neut = tuple(f"{token_prefix}n{i:02d}" for i in range(n_n))
    rng = np.random.default_rng(np.random.SeedSequence([map_seed, _tag_entropy(token_prefix)]))
    semantic_map: dict[str, tuple[float, ...]] = {}
    for token in masc:
        vec = rng.uniform(-1.0, 1.0, dimension)
        vec[0] = rng.uniform(0.5, 1.0)
        semantic_map[token] = tuple(float(v) for v in vec)
    for token in fem:
        vec = rng.uniform(-1.0, 1.0, dimension)
        vec[0] = rng.uniform(-1.0, -0.5)
        semantic_map[token] = tuple(float(v) for v in vec)
    for token in neut:
        vec = rng.uniform(-1.0, 1.0, dimension)
        vec[0] = rng.uniform(-0.1, 0.1)
        semantic_map[token] = tuple(float(v) for v in vec)
    oov = neut[:n_oov] if n_oov else ()
    return SyntheticSpec(
        n_nouns=n_nouns,
        masculine_fraction=masculine_fraction,
        vocab_masculine=masc,
        vocab_feminine=fem,
        vocab_neutral=neut,
        bias_strength=bias_strength,
        adjectives_per_response=adjectives_per_response,
        n_samples=n_samples,
        semantic_map=semantic_map,
        surface_variants=surface_variants,
        oov_tokens=oov,
    )


def spec_to_dict(spec: SyntheticSpec) -> dict:
    """JSON-serializable form of a spec (used in config snapshots)."""
    return {
        "n_nouns": spec.n_nouns,
        "masculine_fraction": spec.masculine_fraction,
        "vocab_masculine": list(spec.vocab_masculine),
        "vocab_feminine": list(spec.vocab_feminine),
        "vocab_neutral": list(spec.vocab_neutral),
        "bias_strength": spec.bias_strength,
        "adjectives_per_response": spec.adjectives_per_response,
        "n_samples": spec.n_samples,
        "semantic_map": {k: list(v) for k, v in sorted(spec.semantic_map.items())},
        "surface_variants": spec.surface_variants,
        "oov_tokens": list(spec.oov_tokens),
        "animate_every": spec.animate_every,
    }


def spec_from_dict(data: dict) -> SyntheticSpec:
    return SyntheticSpec(
        n_nouns=int(data["n_nouns"]),
        masculine_fraction=float(data["masculine_fraction"]),
        vocab_masculine=tuple(data["vocab_masculine"]),
        vocab_feminine=tuple(data["vocab_feminine"]),
        vocab_neutral=tuple(data["vocab_neutral"]),
        bias_strength=float(data["bias_strength"]),
        adjectives_per_response=int(data["adjectives_per_response"]),
        n_samples=int(data["n_samples"]),
        semantic_map={k: tuple(v) for k, v in data["semantic_map"].items()},
        surface_variants=int(data["surface_variants"]),
        oov_tokens=tuple(data["oov_tokens"]),
        animate_every=int(data["animate_every"]),
    )


_DEFAULT_SPEC: SyntheticSpec | None = None


def default_spec() -> SyntheticSpec:
    """Spec used by a synthetic backend configured without an explicit one."""
    global _DEFAULT_SPEC
    if _DEFAULT_SPEC is None:
        _DEFAULT_SPEC = build_spec()
    return _DEFAULT_SPEC


def _tag_entropy(tag: str) -> int:
    return int.from_bytes(hashlib.sha256(tag.encode("utf-8")).digest()[:4], "big")


def noun_surface(language_tag: str, gender: Gender, index: int) -> str:
    marker = "mnoun" if gender is Gender.MASCULINE else "fnoun"
    return f"{language_tag}{marker}{index:03d}"


def gender_from_surface(surface: str) -> Gender | None:
    """Recover the gender marker baked into synthetic noun surfaces."""
    if "mnoun" in surface:
        return Gender.MASCULINE
    if "fnoun" in surface:
        return Gender.FEMININE
    return None


def surface_forms(pivot_token: str, language_tag: str, n_variants: int) -> tuple[str, ...]:
    """Per-language surface spellings of one pivot adjective.

    Multiple variants per pivot emulate gender-inflected adjective forms that
    an English translation collapses into one token.
    """
    return tuple(f"{language_tag}{pivot_token}{string.ascii_lowercase[v]}" for v in range(n_variants))


def response_rng(seed: int, prompt_hash: str, sample_index: int) -> np.random.Generator:
    """Generator keyed by (seed, prompt, sample index); shared by backend and fixtures."""
    return np.random.default_rng(
        np.random.SeedSequence([seed, int(prompt_hash[:16], 16), sample_index])
    )


def _draw_distinct(pool: tuple[str, ...], k: int, rng: np.random.Generator) -> list[str]:
    if k > len(pool):
        raise PoolExhaustionError(
            f"need {k} distinct adjectives from a pool of {len(pool)}"
        )
    order = rng.permutation(len(pool))
    return [pool[i] for i in order[:k]]


def sample_response(
    spec: SyntheticSpec,
    gender: Gender | None,
    rng: np.random.Generator,
    language_tag: str,
) -> str:
    """One comma-separated adjective response in per-language surface forms.

    ``gender=None`` (unknown noun) degrades to gender-blind neutral sampling.
    """
    m = spec.adjectives_per_response
    if gender is None:
        n_gendered = 0
    else:
        n_gendered = int(np.sum(rng.random(m) < spec.bias_strength))
    pivots: list[str] = []
    if n_gendered:
        pivots.extend(_draw_distinct(spec.pool_for(gender), n_gendered, rng))
    pivots.extend(_draw_distinct(spec.vocab_neutral, m - n_gendered, rng))
    order = rng.permutation(len(pivots))
    surfaces = []
    for i in order:
        variants = surface_forms(pivots[i], language_tag, spec.surface_variants)
        surfaces.append(variants[int(rng.integers(len(variants)))])
    return ", ".join(surfaces)


def synthetic_lexicon(spec: SyntheticSpec, language_tag: str, seed: int) -> Lexicon:
    """Deterministically named nouns with the spec's gender balance."""
    validate_language(language_tag, source_only=True)
    n_masc = round(spec.n_nouns * spec.masculine_fraction)
    genders = [Gender.MASCULINE] * n_masc + [Gender.FEMININE] * (spec.n_nouns - n_masc)
    rng = np.random.default_rng(np.random.SeedSequence([seed, _tag_entropy(language_tag)]))
    rng.shuffle(genders)
    entries = []
    for i, gender in enumerate(genders):
        entries.append(
            Noun(
                surface=noun_surface(language_tag, gender, i),
                language=language_tag,
                gender=gender,
                pivot_gloss=f"gloss-{language_tag}-{i:03d}",
                animate=spec.animate_every > 0 and i % spec.animate_every == 0,
            )
        )
    return Lexicon(language=language_tag, entries=tuple(entries))


def write_embeddings_file(
    path: str | Path, semantic_maps: list[dict[str, tuple[float, ...]]], oov: set[str]
) -> Path:
    """Merge semantic maps into one plain-text embedding table, skipping OOV tokens."""
    merged: dict[str, tuple[float, ...]] = {}
    for semantic_map in semantic_maps:
        for token, vec in semantic_map.items():
            if token in merged and merged[token] != vec:
                raise ValidationError(f"conflicting vectors for token {token!r}")
            merged[token] = vec
    dims = {len(v) for v in merged.values()}
    if len(dims) > 1:
        raise ValidationError(f"semantic maps disagree on dimension: {sorted(dims)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for token in sorted(merged):
            if token in oov:
                continue
            fh.write(token + " " + " ".join(f"{v:.6f}" for v in merged[token]) + "\n")
    return path


def write_dictionary_file(
    path: str | Path, entries: list[tuple[str, str, str]], append: bool = False
) -> Path:
    """Write (source_language, source, target) rows as the offline-dictionary TSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "a" if append and path.exists() else "w"
    with path.open(mode, encoding="utf-8", newline="\n") as fh:
        if mode == "w":
            fh.write("source_language\tsource\ttarget\n")
        for language, source, target in entries:
            fh.write(f"{language}\t{source}\t{target}\n")
    return path


def dictionary_entries(spec: SyntheticSpec, language_tag: str) -> list[tuple[str, str, str]]:
    """All surface -> pivot translations for one synthetic language."""
    entries = []
    for pivot in sorted(set(spec.vocab_masculine + spec.vocab_feminine + spec.vocab_neutral)):
        for surface in surface_forms(pivot, language_tag, spec.surface_variants):
            entries.append((language_tag, surface, pivot))
    return entries


@dataclass(frozen=True)
class GeneratedLanguage:
    language: str
    lexicon: Lexicon
    lexicon_path: Path
    transcript_path: Path
    embedding_path: Path
    dictionary_path: Path
    model_name: str


def generate_language(
    spec: SyntheticSpec,
    language_tag: str,
    seed: int,
    out_root: str | Path,
    model_name: str = DEFAULT_MODEL_NAME,
    embedding_filename: str | None = None,
    dictionary_filename: str | None = None,
) -> GeneratedLanguage:
    """Emit lexicon TSV, transcript JSONL, embedding table and dictionary fixtures.

    The transcript records are exactly what a synthetic backend with the same
    (spec, seed) would produce, so replaying them and querying the backend
    live are interchangeable. Output is byte-identical across runs.
    """
    out_root = Path(out_root)
    lexicon = synthetic_lexicon(spec, language_tag, seed)
    lexicon_path = save_lexicon(lexicon, out_root / "lexicons" / f"{language_tag}.tsv")

    store = TranscriptStore(out_root / "transcripts")
    transcript_path = store.path_for(language_tag, model_name)
    if transcript_path.exists():
        transcript_path.unlink()  # regenerate rather than append
    template = template_for(language_tag)
    for noun in lexicon.entries:
        prompt = render_prompt(template, noun)
        h = prompt_sha256(prompt)
        for j in range(spec.n_samples):
            rng = response_rng(seed, h, j)
            text = sample_response(spec, noun.gender, rng, language_tag)
            store.put(
                language_tag,
                model_name,
                TranscriptRecord(
                    prompt_hash=h,
                    noun=noun.surface,
                    sample_index=j,
                    raw_text=text,
                    model=model_name,
                    timestamp=EPOCH_TIMESTAMP,
                ),
            )

    embedding_path = write_embeddings_file(
        out_root / "embeddings" / (embedding_filename or f"{language_tag}.txt"),
        [spec.semantic_map],
        set(spec.oov_tokens),
    )
    dictionary_path = write_dictionary_file(
        out_root / "dictionaries" / (dictionary_filename or f"{language_tag}.tsv"),
        dictionary_entries(spec, language_tag),
    )
    return GeneratedLanguage(
        language=language_tag,
        lexicon=lexicon,
        lexicon_path=lexicon_path,
        transcript_path=transcript_path,
        embedding_path=embedding_path,
        dictionary_path=dictionary_path,
        model_name=model_name,
    )


def generate_suite(
    specs: dict[str, SyntheticSpec],
    seed: int,
    out_root: str | Path,
    model_name: str = DEFAULT_MODEL_NAME,
) -> dict[str, GeneratedLanguage]:
    """Generate several languages plus one merged embedding table and dictionary.

    Languages may share a spec (same semantic map, different surfaces) or use
    disjoint specs; the merged embedding file covers the union either way.
    """
    generated: dict[str, GeneratedLanguage] = {}
    all_entries: list[tuple[str, str, str]] = []
    maps = []
    oov: set[str] = set()
    for tag in sorted(specs):
        spec = specs[tag]
        generated[tag] = generate_language(
            spec, tag, seed, out_root, model_name=model_name
        )
        all_entries.extend(dictionary_entries(spec, tag))
        maps.append(spec.semantic_map)
        oov |= set(spec.oov_tokens)
    out_root = Path(out_root)
    write_embeddings_file(out_root / "embeddings" / "pivot.txt", maps, oov)
    write_dictionary_file(out_root / "dictionaries" / "synthetic.tsv", all_entries)
    return generated
