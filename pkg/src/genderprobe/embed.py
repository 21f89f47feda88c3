"""Word-embedding table loading and profile featurization.

The classifier input for a noun is the sum of its pivot adjectives' embedding
vectors, each weighted by a transform of the adjective's frequency. Raw
frequencies bunch up near small values, so the default weight is
``-30 / ln(f)`` (30 at f = 1/e, 1 at f = e^-30), with f clamped to 0.98 first
because the transform blows up at f = 1. Out-of-vocabulary adjectives are
skipped and recorded rather than zero-filled, so they cannot silently distort
the sum.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .describe import AdjectiveProfile
from .errors import LexiconParseError, ValidationError
from .lexicon import PIVOT_LANGUAGE

logger = logging.getLogger(__name__)

FREQUENCY_CLAMP = 0.98
SCALE_NUMERATOR = 30.0
DEFAULT_OOV_WARN_RATIO = 0.5

WEIGHTING_MODES = ("scaled", "raw")


@dataclass(frozen=True)
class EmbeddingTable:
    """token -> D-dimensional vector, loaded from a plain-text table."""

    dimension: int
    vectors: dict[str, np.ndarray]
    source_path: str

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, token: str) -> np.ndarray | None:
        return self.vectors.get(token)


@dataclass(frozen=True)
class FeatureVector:
    """Weighted embedding sum for one noun, plus coverage diagnostics."""

    noun_id: str
    values: np.ndarray
    covered_mass: float
    oov_tokens: tuple[str, ...]
    n_entries: int

    @property
    def oov_ratio(self) -> float:
        return len(self.oov_tokens) / self.n_entries if self.n_entries else 0.0

    @property
    def is_all_oov(self) -> bool:
        return self.n_entries == len(self.oov_tokens)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Parse ``token v1 ... vD`` lines; the first line fixes D.

    Lines with a different arity or non-numeric fields abort the load with
    their line number.
    """
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    dimension: int | None = None
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            token, fields = parts[0], parts[1:]
            if dimension is None:
                if not fields:
                    raise LexiconParseError(
                        "first line has no vector components", path=str(path), line_no=line_no
                    )
                dimension = len(fields)
            elif len(fields) != dimension:
                raise LexiconParseError(
                    f"expected {dimension} components, got {len(fields)}",
                    path=str(path),
                    line_no=line_no,
                )
            try:
                vectors[token] = np.array([float(x) for x in fields], dtype=np.float64)
            except ValueError:
                raise LexiconParseError(
                    "non-numeric vector component", path=str(path), line_no=line_no
                )
    if dimension is None:
        raise ValidationError(f"embedding file {path} is empty")
    return EmbeddingTable(dimension=dimension, vectors=vectors, source_path=str(path))


def scale_frequency(f: float) -> float:
    """Weight transform -30/ln(f) on (0, 1], with f clamped at 0.98.

    Strictly increasing on (0, 0.98]; the clamp caps a single adjective's
    weight at -30/ln(0.98), about 1484.95.
    """
    if not 0.0 < f <= 1.0:
        raise ValidationError(f"frequency {f!r} outside (0, 1]")
    clamped = min(f, FREQUENCY_CLAMP)
    return -SCALE_NUMERATOR / math.log(clamped)


def featurize(
    profile: AdjectiveProfile,
    table: EmbeddingTable,
    weighting: str = "scaled",
    oov_warn_ratio: float = DEFAULT_OOV_WARN_RATIO,
) -> FeatureVector:
    """Sum of weighted embeddings over the profile's in-vocabulary adjectives.

    An all-OOV (or empty) profile yields the zero vector, flagged via
    ``is_all_oov``. A high OOV share is logged as a warning.
    """
    if weighting not in WEIGHTING_MODES:
        raise ValidationError(f"unknown weighting mode {weighting!r}")
    if profile.adjective_language != PIVOT_LANGUAGE:
        raise ValidationError(
            f"profile for {profile.noun.key} is in {profile.adjective_language!r}; "
            "translate it to the pivot language first"
        )
    values = np.zeros(table.dimension, dtype=np.float64)
    covered_mass = 0.0
    oov: list[str] = []
    for token, frequency in profile.entries.items():
        vector = table.get(token)
        if vector is None:
            oov.append(token)
            continue
        weight = scale_frequency(frequency) if weighting == "scaled" else frequency
        values += weight * vector
        covered_mass += frequency
    feature = FeatureVector(
        noun_id=profile.noun.key,
        values=values,
        covered_mass=covered_mass,
        oov_tokens=tuple(oov),
        n_entries=len(profile.entries),
    )
    if feature.n_entries and feature.oov_ratio > oov_warn_ratio:
        logger.warning(
            "%s: %.0f%% of adjectives lack embeddings (%d/%d)",
            feature.noun_id,
            100 * feature.oov_ratio,
            len(oov),
            feature.n_entries,
        )
    if not np.all(np.isfinite(feature.values)):
        raise ValidationError(f"non-finite feature values for {feature.noun_id}")
    return feature
