"""Experiment runners: same-language evaluation, leave-one-out transfer,
backend comparison, and the cross-language similarity matrix.

Every runner follows the same staged pipeline per language: load lexicon,
elicit N completions per noun (resuming from the transcript store), parse and
aggregate into top-p profiles, translate to the pivot language, featurize
against the embedding table, then train/evaluate the classifier. Per-language
seeds derive from the master seed by stable hashing, so adding a language
never perturbs another language's results, and reports re-run from their own
config snapshot are byte-identical on replay or synthetic backends.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from .classify import TrainConfig, predict_labels, train
from .describe import AdjectiveProfile, aggregate, parse_completion
from .embed import EmbeddingTable, FeatureVector, featurize, load_embeddings
from .errors import ValidationError
from .gateway import BackendSpec, build_backend, elicit
from .lexicon import Gender, Lexicon, filter_animate, load_lexicon, split_lexicon
from .metrics import (
    EvalMetrics,
    classification_metrics,
    gender_ratios,
    ratios_to_csv,
    similarity_matrix,
    similarity_to_csv,
)
from .prompts import template_for
from .synthetic import spec_to_dict
from .transcripts import TranscriptStore
from .translate import (
    DictionaryTranslator,
    OnlineTranslator,
    TranslationCache,
    Translator,
    translate_profile,
)

logger = logging.getLogger(__name__)

TRANSLATOR_MODES = ("dictionary", "online")
EXPERIMENT_KINDS = ("same_language", "transfer", "model_comparison", "similarity")


@dataclass(frozen=True)
class TranslatorConfig:
    mode: str = "dictionary"
    dictionary_path: str = ""
    cache_path: str = ""
    endpoint: str = ""
    on_missing: str = "error"

    def __post_init__(self):
        if self.mode not in TRANSLATOR_MODES:
            raise ValidationError(f"unknown translator mode {self.mode!r}")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "dictionary_path": self.dictionary_path,
            "cache_path": self.cache_path,
            "endpoint": self.endpoint,
            "on_missing": self.on_missing,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    languages: tuple[str, ...]
    backends: tuple[BackendSpec, ...]
    lexicon_dir: str
    embeddings_path: str
    out_dir: str
    transcript_dir: str
    translator: TranslatorConfig = TranslatorConfig()
    train: TrainConfig = TrainConfig()
    n_samples: int = 50
    top_p: int = 50
    seed: int = 0
    weighting: str = "scaled"
    animate_filter: bool = False
    max_parallel: int = 4
    min_support: int = 15
    standardize_features: bool = True
    oov_warn_ratio: float = 0.5

    def __post_init__(self):
        if not self.languages:
            raise ValidationError("no languages configured")
        if not self.backends:
            raise ValidationError("no backends configured")
        if self.n_samples < 1 or self.top_p < 1:
            raise ValidationError("n_samples and top_p must be >= 1")

    def to_dict(self) -> dict:
        """JSON-serializable snapshot sufficient to re-run the experiment."""
        return {
            "languages": list(self.languages),
            "backends": [_backend_to_dict(b) for b in self.backends],
            "lexicon_dir": self.lexicon_dir,
            "embeddings_path": self.embeddings_path,
            "out_dir": self.out_dir,
            "transcript_dir": self.transcript_dir,
            "translator": self.translator.to_dict(),
            "train": {
                "learning_rate": self.train.learning_rate,
                "epochs": self.train.epochs,
                "batch_size": self.train.batch_size,
                "hidden_size": self.train.hidden_size,
                "seed": self.train.seed,
                "l2_penalty": self.train.l2_penalty,
                "activation": self.train.activation,
            },
            "n_samples": self.n_samples,
            "top_p": self.top_p,
            "seed": self.seed,
            "weighting": self.weighting,
            "animate_filter": self.animate_filter,
            "max_parallel": self.max_parallel,
            "min_support": self.min_support,
            "standardize_features": self.standardize_features,
            "oov_warn_ratio": self.oov_warn_ratio,
        }


def _backend_to_dict(spec: BackendSpec) -> dict:
    return {
        "kind": spec.kind,
        "model": spec.model_name,
        "endpoint": spec.endpoint,
        "transcript_path": spec.transcript_path,
        "seed": spec.seed,
        "temperature": spec.temperature,
        "max_tokens": spec.max_tokens,
        "request_timeout": spec.request_timeout,
        "max_parallel": spec.max_parallel,
        "max_retries": spec.max_retries,
        "backoff_base": spec.backoff_base,
        "synthetic_spec": None
        if spec.synthetic_spec is None
        else spec_to_dict(spec.synthetic_spec),
    }


def derive_seed(master_seed: int, *parts: object) -> int:
    """Stable 32-bit seed from the master seed and any hashable labels."""
    text = ":".join([str(master_seed), *(str(p) for p in parts)])
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:4], "big")


@dataclass
class EvalReport:
    """One experiment's results plus the config snapshot that produced them.

    ``created_at`` is wall-clock metadata for logs only; the canonical JSON
    excludes it so re-runs on deterministic backends are byte-identical.
    """

    kind: str
    body: dict
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def to_json(self) -> str:
        payload = {"kind": self.kind, **self.body}
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @property
    def stem(self) -> str:
        model = self.body.get("model", "multi")
        safe = "".join(c if c.isalnum() or c in "._-" else "_" for c in str(model))
        return f"{self.kind}__{safe}__seed{self.body.get('master_seed', 0)}"

    def write(self, out_dir: str | Path) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{self.stem}.json"
        path.write_text(self.to_json(), encoding="utf-8")
        return path


@dataclass
class LanguageBundle:
    """All per-language artifacts the evaluations consume."""

    language: str
    lexicon: Lexicon
    profiles: list[AdjectiveProfile]  # pivot language, aligned with lexicon.entries
    features: list[FeatureVector]
    labels: np.ndarray  # 1 = masculine

    def feature_matrix(self) -> np.ndarray:
        return np.stack([f.values for f in self.features])


def _build_translator(config: ExperimentConfig) -> Translator:
    tc = config.translator
    if tc.mode == "dictionary":
        if not tc.dictionary_path:
            raise ValidationError("dictionary translator mode needs a dictionary_path")
        return DictionaryTranslator(tc.dictionary_path, on_missing=tc.on_missing)
    return OnlineTranslator(tc.endpoint)


def preflight(config: ExperimentConfig, backend: BackendSpec) -> None:
    """Enumerate every missing upstream artifact before any work starts."""
    missing: list[str] = []
    for language in sorted(config.languages):
        lexicon_path = Path(config.lexicon_dir) / f"{language}.tsv"
        if not lexicon_path.exists():
            missing.append(f"{language}: lexicon file {lexicon_path}")
        if backend.kind == "replay":
            store = TranscriptStore(config.transcript_dir)
            transcript = store.path_for(language, backend.model_name)
            if not transcript.exists():
                missing.append(f"{language}: replay transcript {transcript}")
    if not Path(config.embeddings_path).exists():
        missing.append(f"embeddings file {config.embeddings_path}")
    if config.translator.mode == "dictionary" and not Path(
        config.translator.dictionary_path or ""
    ).exists():
        missing.append(f"offline dictionary {config.translator.dictionary_path!r}")
    if missing:
        raise ValidationError("missing upstream artifacts: " + "; ".join(missing))


def load_language_lexicon(config: ExperimentConfig, language: str) -> Lexicon:
    lexicon = load_lexicon(Path(config.lexicon_dir) / f"{language}.tsv", language)
    if config.animate_filter:
        lexicon = filter_animate(lexicon)
    return lexicon


def build_source_profiles(
    config: ExperimentConfig,
    backend_spec: BackendSpec,
    language: str,
    store: TranscriptStore,
    lexicon: Lexicon | None = None,
) -> list[AdjectiveProfile]:
    """Elicit, parse and aggregate source-language profiles for one lexicon."""
    if lexicon is None:
        lexicon = load_language_lexicon(config, language)
    spec = replace(backend_spec, max_parallel=config.max_parallel)
    backend = build_backend(spec, store, language)
    template = template_for(language)
    profiles = []
    for noun in lexicon.entries:
        completions = elicit(backend, noun, template, config.n_samples, store)
        sets = [parse_completion(c) for c in completions]
        profiles.append(aggregate(sets, config.n_samples, config.top_p))
    return profiles


def prepare_language(
    config: ExperimentConfig,
    backend_spec: BackendSpec,
    language: str,
    store: TranscriptStore,
    cache: TranslationCache,
    translator: Translator,
    table: EmbeddingTable,
) -> LanguageBundle:
    lexicon = load_language_lexicon(config, language)
    source_profiles = build_source_profiles(config, backend_spec, language, store, lexicon)
    pivot_profiles = [translate_profile(p, cache, translator) for p in source_profiles]
    features = [
        featurize(p, table, weighting=config.weighting, oov_warn_ratio=config.oov_warn_ratio)
        for p in pivot_profiles
    ]
    labels = np.array(
        [1.0 if n.gender is Gender.MASCULINE else 0.0 for n in lexicon.entries]
    )
    return LanguageBundle(
        language=language,
        lexicon=lexicon,
        profiles=pivot_profiles,
        features=features,
        labels=labels,
    )


def _prepare_all(
    config: ExperimentConfig, backend_spec: BackendSpec
) -> dict[str, LanguageBundle]:
    preflight(config, backend_spec)
    store = TranscriptStore(config.transcript_dir)
    cache = TranslationCache(config.translator.cache_path or None)
    translator = _build_translator(config)
    table = load_embeddings(config.embeddings_path)
    bundles = {}
    for language in sorted(config.languages):
        bundles[language] = prepare_language(
            config, backend_spec, language, store, cache, translator, table
        )
        logger.info(
            "prepared %s: %d nouns", language, bundles[language].lexicon.total_count
        )
    return bundles


def _fit_scaler(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0.0] = 1.0
    return mean, std


def _metrics_row(m: EvalMetrics) -> dict:
    return {
        "f1": m.f1_feminine,
        "f1_masculine": m.f1_masculine,
        "f1_macro": m.f1_macro,
        "overall_accuracy": m.overall_accuracy,
        "masculine_accuracy": m.masculine_accuracy,
        "feminine_accuracy": m.feminine_accuracy,
        "n_masculine": m.n_masculine,
        "n_feminine": m.n_feminine,
    }


def _labels_to_genders(labels: np.ndarray) -> list[Gender]:
    return [Gender.MASCULINE if v else Gender.FEMININE for v in labels]


def _oov_counts(bundle: LanguageBundle) -> dict:
    high = sum(1 for f in bundle.features if f.n_entries and f.oov_ratio > 0.5)
    all_oov = sum(1 for f in bundle.features if f.is_all_oov)
    return {"n_high_oov": high, "n_all_oov": all_oov}


def run_same_language(config: ExperimentConfig, backend_index: int = 0) -> EvalReport:
    """Per language: 90/10 split, train on train, evaluate on the held-out 10%."""
    backend_spec = config.backends[backend_index]
    bundles = _prepare_all(config, backend_spec)
    rows = []
    for language in sorted(bundles):
        bundle = bundles[language]
        split_seed = derive_seed(config.seed, "split", language)
        split = split_lexicon(bundle.lexicon, split_seed)
        index_of = {noun.key: i for i, noun in enumerate(bundle.lexicon.entries)}
        train_idx = [index_of[n.key] for n in split.train]
        test_idx = [index_of[n.key] for n in split.test]
        X = bundle.feature_matrix()
        X_train, y_train = X[train_idx], bundle.labels[train_idx]
        X_test, y_test = X[test_idx], bundle.labels[test_idx]
        if config.standardize_features:
            mean, std = _fit_scaler(X_train)
            X_train = (X_train - mean) / std
            X_test = (X_test - mean) / std
        train_seed = derive_seed(config.seed, "train", language)
        result = train(X_train, y_train, replace(config.train, seed=train_seed))
        predicted = _labels_to_genders(predict_labels(result.params, X_test))
        m = classification_metrics(predicted, _labels_to_genders(y_test))
        rows.append(
            {
                "language": language,
                **_metrics_row(m),
                "n_train": len(train_idx),
                "n_test": len(test_idx),
                "split_seed": split_seed,
                "train_seed": train_seed,
                "final_train_loss": result.loss_curve[-1] if result.loss_curve else None,
                **_oov_counts(bundle),
            }
        )
    body = {
        "model": backend_spec.model_name,
        "backend": _backend_to_dict(backend_spec),
        "master_seed": config.seed,
        "config": config.to_dict(),
        "rows": rows,
    }
    return EvalReport(kind="same_language", body=body)


def run_transfer(config: ExperimentConfig, backend_index: int = 0) -> EvalReport:
    """Leave-one-out: train on every other language's full data, evaluate on the rest.

    The held-out language's features never enter training, so its row is
    unchanged by anything that happens to its own data during fitting.
    """
    if len(config.languages) < 2:
        raise ValidationError("transfer evaluation needs at least 2 languages")
    backend_spec = config.backends[backend_index]
    bundles = _prepare_all(config, backend_spec)
    languages = sorted(bundles)
    rows = []
    for held_out in languages:
        train_langs = [l for l in languages if l != held_out]
        X_train = np.vstack([bundles[l].feature_matrix() for l in train_langs])
        y_train = np.concatenate([bundles[l].labels for l in train_langs])
        X_eval = bundles[held_out].feature_matrix()
        y_eval = bundles[held_out].labels
        if config.standardize_features:
            mean, std = _fit_scaler(X_train)
            X_train = (X_train - mean) / std
            X_eval = (X_eval - mean) / std
        train_seed = derive_seed(config.seed, "transfer", held_out)
        result = train(X_train, y_train, replace(config.train, seed=train_seed))
        predicted = _labels_to_genders(predict_labels(result.params, X_eval))
        m = classification_metrics(predicted, _labels_to_genders(y_eval))
        rows.append(
            {
                "language": held_out,
                **_metrics_row(m),
                "n_train": int(X_train.shape[0]),
                "n_eval": int(X_eval.shape[0]),
                "train_seed": train_seed,
                "train_languages": train_langs,
            }
        )
    body = {
        "model": backend_spec.model_name,
        "backend": _backend_to_dict(backend_spec),
        "master_seed": config.seed,
        "config": config.to_dict(),
        "rows": rows,
    }
    return EvalReport(kind="transfer", body=body)


def _mean_row(rows: Sequence[dict]) -> dict:
    keys = (
        "f1",
        "f1_masculine",
        "f1_macro",
        "overall_accuracy",
        "masculine_accuracy",
        "feminine_accuracy",
    )
    return {k: float(np.mean([row[k] for row in rows])) for k in keys}


def run_model_comparison(config: ExperimentConfig) -> EvalReport:
    """Same-language and transfer suites per backend, averaged over languages."""
    if len(config.backends) < 2:
        raise ValidationError("model comparison needs at least 2 backend specs")
    mean_rows = []
    detail: dict[str, dict] = {}
    for index, backend_spec in enumerate(config.backends):
        same = run_same_language(config, backend_index=index)
        transfer = run_transfer(config, backend_index=index)
        label = f"{index}:{backend_spec.model_name}"
        detail[label] = {
            "same_language": same.body["rows"],
            "transfer": transfer.body["rows"],
        }
        mean_rows.append(
            {"model": backend_spec.model_name, "eval": "same", **_mean_row(same.body["rows"])}
        )
        mean_rows.append(
            {
                "model": backend_spec.model_name,
                "eval": "unseen",
                **_mean_row(transfer.body["rows"]),
            }
        )
    models = "+".join(b.model_name for b in config.backends)
    body = {
        "model": models,
        "backends": [_backend_to_dict(b) for b in config.backends],
        "master_seed": config.seed,
        "config": config.to_dict(),
        "rows": mean_rows,
        "per_language": detail,
    }
    return EvalReport(kind="model_comparison", body=body)


def run_similarity(config: ExperimentConfig, backend_index: int = 0) -> EvalReport:
    """Pairwise gendered-adjective similarity over all configured languages."""
    if len(config.languages) < 2:
        raise ValidationError("similarity evaluation needs at least 2 languages")
    backend_spec = config.backends[backend_index]
    bundles = _prepare_all(config, backend_spec)
    matrix = similarity_matrix(
        {lang: bundle.profiles for lang, bundle in bundles.items()},
        min_support=config.min_support,
    )
    pairs = []
    for i, lang_p in enumerate(matrix.languages):
        for j, lang_q in enumerate(matrix.languages):
            if j <= i:
                continue
            pairs.append(
                {
                    "lang_p": lang_p,
                    "lang_q": lang_q,
                    "score": matrix.scores[i][j],
                    "shared_count": matrix.shared_counts[i][j],
                }
            )
    body = {
        "model": backend_spec.model_name,
        "backend": _backend_to_dict(backend_spec),
        "master_seed": config.seed,
        "config": config.to_dict(),
        "min_support": config.min_support,
        "languages": list(matrix.languages),
        "matrix": [list(row) for row in matrix.scores],
        "shared_counts": [list(row) for row in matrix.shared_counts],
        "pairs": pairs,
        "ratios": {
            lang: [
                {"adjective": r.adjective, "r_m": r.r_m, "support": r.support}
                for r in gender_ratios(bundles[lang].profiles)
            ]
            for lang in matrix.languages
        },
    }
    return EvalReport(kind="similarity", body=body)


def render_report_csvs(report_data: dict, out_dir: str | Path, stem: str) -> list[Path]:
    """Companion CSV tables for a stored report JSON (idempotent)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    kind = report_data.get("kind")
    written: list[Path] = []
    if kind in ("same_language", "transfer"):
        path = out_dir / f"{stem}.csv"
        headers = [
            "language",
            "f1",
            "f1_macro",
            "overall_accuracy",
            "masculine_accuracy",
            "feminine_accuracy",
        ]
        lines = [",".join(headers)]
        for row in report_data["rows"]:
            lines.append(
                ",".join(
                    [row["language"]]
                    + [f"{row[h]:.4f}" for h in headers[1:]]
                )
            )
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    elif kind == "model_comparison":
        path = out_dir / f"{stem}.csv"
        headers = ["model", "eval", "f1", "f1_macro", "overall_accuracy",
                   "masculine_accuracy", "feminine_accuracy"]
        lines = [",".join(headers)]
        for row in report_data["rows"]:
            lines.append(
                ",".join(
                    [row["model"], row["eval"]] + [f"{row[h]:.4f}" for h in headers[2:]]
                )
            )
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    elif kind == "similarity":
        from .metrics import SimilarityMatrix

        matrix = SimilarityMatrix(
            languages=tuple(report_data["languages"]),
            scores=tuple(tuple(row) for row in report_data["matrix"]),
            shared_counts=tuple(tuple(row) for row in report_data["shared_counts"]),
        )
        written.append(similarity_to_csv(out_dir / f"{stem}.csv", matrix))
        for lang, ratio_rows in sorted(report_data.get("ratios", {}).items()):
            from .metrics import GenderRatio

            ratios = [
                GenderRatio(
                    adjective=r["adjective"],
                    r_m=r["r_m"],
                    support=r["support"],
                    masculine_support=round(r["r_m"] * r["support"]),
                )
                for r in ratio_rows
            ]
            written.append(ratios_to_csv(out_dir / f"{stem}__ratios_{lang}.csv", ratios))
    return written
