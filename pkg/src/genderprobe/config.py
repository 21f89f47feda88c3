"""TOML configuration loading for the CLI.

One declarative file drives every stage; command-line flags override single
keys. Relative paths resolve against the config file's directory so configs
can be checked in next to their fixtures. See the README for the full key
schema and defaults.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .classify import TrainConfig
from .errors import ValidationError
from .experiments import ExperimentConfig, TranslatorConfig
from .gateway import BackendSpec
from .synthetic import spec_from_dict


def _resolve(base_dir: Path | None, value: str) -> str:
    if not value or base_dir is None:
        return value
    path = Path(value)
    return str(path if path.is_absolute() else (base_dir / path).resolve())


def backend_from_dict(data: dict, base_dir: Path | None = None) -> BackendSpec:
    synthetic_spec = data.get("synthetic_spec")
    return BackendSpec(
        kind=data.get("kind", "replay"),
        model_name=data.get("model", data.get("model_name", "unknown")),
        endpoint=data.get("endpoint", ""),
        transcript_path=_resolve(base_dir, data.get("transcript_path", "")),
        seed=int(data.get("seed", 0)),
        temperature=float(data.get("temperature", 0.7)),
        max_tokens=int(data.get("max_tokens", 128)),
        request_timeout=float(data.get("request_timeout", 30.0)),
        max_parallel=int(data.get("max_parallel", 4)),
        max_retries=int(data.get("max_retries", 3)),
        backoff_base=float(data.get("backoff_base", 1.0)),
        synthetic_spec=None if not synthetic_spec else spec_from_dict(synthetic_spec),
    )


def config_from_dict(data: dict, base_dir: Path | None = None) -> ExperimentConfig:
    backend_dicts = data.get("backends")
    if not backend_dicts:
        single = data.get("backend")
        if not single:
            raise ValidationError("config needs a [backend] table or a [[backends]] array")
        backend_dicts = [single]
    backends = tuple(backend_from_dict(b, base_dir) for b in backend_dicts)

    translator_data = data.get("translator", {})
    translator = TranslatorConfig(
        mode=translator_data.get("mode", "dictionary"),
        dictionary_path=_resolve(base_dir, translator_data.get("dictionary_path", "")),
        cache_path=_resolve(base_dir, translator_data.get("cache_path", "")),
        endpoint=translator_data.get("endpoint", ""),
        on_missing=translator_data.get("on_missing", "error"),
    )

    train_data = data.get("train", {})
    train = TrainConfig(
        learning_rate=float(train_data.get("learning_rate", 0.01)),
        epochs=int(train_data.get("epochs", 200)),
        batch_size=int(train_data.get("batch_size", 32)),
        hidden_size=int(train_data.get("hidden_size", 64)),
        seed=int(train_data.get("seed", 0)),
        l2_penalty=float(train_data.get("l2_penalty", 1e-4)),
        activation=train_data.get("activation", "relu"),
    )

    out_dir = _resolve(base_dir, data.get("out_dir", "out"))
    transcript_dir = data.get("transcript_dir", "")
    if transcript_dir:
        transcript_dir = _resolve(base_dir, transcript_dir)
    elif backends[0].kind == "replay" and backends[0].transcript_path:
        transcript_dir = backends[0].transcript_path
    else:
        transcript_dir = str(Path(out_dir) / "transcripts")

    languages = data.get("languages", [])
    return ExperimentConfig(
        languages=tuple(languages),
        backends=backends,
        lexicon_dir=_resolve(base_dir, data.get("lexicon_dir", "lexicons")),
        embeddings_path=_resolve(base_dir, data.get("embeddings_path", "")),
        out_dir=out_dir,
        transcript_dir=transcript_dir,
        translator=translator,
        train=train,
        n_samples=int(data.get("n_samples", 50)),
        top_p=int(data.get("top_p", 50)),
        seed=int(data.get("seed", 0)),
        weighting=data.get("weighting", "scaled"),
        animate_filter=bool(data.get("animate_filter", False)),
        max_parallel=int(data.get("max_parallel", 4)),
        min_support=int(data.get("min_support", 15)),
        standardize_features=bool(data.get("standardize_features", True)),
        oov_warn_ratio=float(data.get("oov_warn_ratio", 0.5)),
    )


@dataclass(frozen=True)
class SynthSettings:
    """[synthetic] section: recipe for generating fixture languages."""

    languages: tuple[str, ...] = ("aa", "bb", "cc")
    n_nouns: int = 60
    masculine_fraction: float = 0.5
    bias_strength: float = 0.8
    adjectives_per_response: int = 6
    n_samples: int = 10
    pool_sizes: tuple[int, int, int] = (20, 20, 40)
    dimension: int = 8
    surface_variants: int = 2
    n_oov: int = 2
    token_prefix: str = "trait"
    seed: int = 0
    out_root: str = "fixtures"
    model_name: str = "synth-v1"


def synth_settings_from_dict(data: dict, base_dir: Path | None = None) -> SynthSettings:
    synth = data.get("synthetic", {})
    pool_sizes = synth.get("pool_sizes", [20, 20, 40])
    if len(pool_sizes) != 3:
        raise ValidationError("synthetic.pool_sizes must have three entries")
    return SynthSettings(
        languages=tuple(synth.get("languages", ["aa", "bb", "cc"])),
        n_nouns=int(synth.get("n_nouns", 60)),
        masculine_fraction=float(synth.get("masculine_fraction", 0.5)),
        bias_strength=float(synth.get("bias_strength", 0.8)),
        adjectives_per_response=int(synth.get("adjectives_per_response", 6)),
        n_samples=int(synth.get("n_samples", 10)),
        pool_sizes=tuple(int(x) for x in pool_sizes),
        dimension=int(synth.get("dimension", 8)),
        surface_variants=int(synth.get("surface_variants", 2)),
        n_oov=int(synth.get("n_oov", 2)),
        token_prefix=synth.get("token_prefix", "trait"),
        seed=int(synth.get("seed", 0)),
        out_root=_resolve(base_dir, synth.get("out_root", "fixtures")),
        model_name=synth.get("model_name", "synth-v1"),
    )


def read_config_file(path: str | Path) -> tuple[dict, Path]:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file {path} does not exist")
    with path.open("rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ValidationError(f"bad TOML in {path}: {exc}")
    return data, path.parent.resolve()


def load_config(path: str | Path, overrides: dict | None = None) -> ExperimentConfig:
    data, base_dir = read_config_file(path)
    if overrides:
        data = apply_overrides(data, overrides)
    return config_from_dict(data, base_dir)


def apply_overrides(data: dict, overrides: dict) -> dict:
    """Shallow merge of CLI flag values over config keys (None means unset)."""
    merged = dict(data)
    for key, value in overrides.items():
        if value is None:
            continue
        merged[key] = value
    return merged
