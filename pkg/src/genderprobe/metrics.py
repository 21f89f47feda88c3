"""Bias statistics and classification metrics.

For an adjective, ``r_m`` is the share of masculine nouns among all nouns
whose (truncated, pivot-language) profile mentions it; frequencies do not
matter, only membership. Two languages are compared by aligning the r_m
values of adjectives that describe at least ``min_support`` nouns in both,
and taking the cosine of the two score vectors. Classification quality is
reported as overall and per-gender accuracy plus feminine-positive,
masculine-positive and macro F1 (zero-denominator components count as 0).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .describe import AdjectiveProfile
from .errors import UndefinedSimilarityError, ValidationError
from .lexicon import Gender

DEFAULT_MIN_SUPPORT = 15


@dataclass(frozen=True)
class GenderRatio:
    adjective: str
    r_m: float
    support: int
    masculine_support: int


@dataclass(frozen=True)
class ScoreVector:
    language: str
    adjectives: tuple[str, ...]
    sigma: np.ndarray


@dataclass(frozen=True)
class PairSimilarity:
    """Cosine of two languages' aligned r_m vectors.

    ``score`` is None exactly when the shared adjective set is empty, which
    is a distinct outcome from a genuine similarity of 0.0.
    """

    score: float | None
    shared_adjectives: tuple[str, ...]

    @property
    def no_overlap(self) -> bool:
        return self.score is None


@dataclass(frozen=True)
class SimilarityMatrix:
    languages: tuple[str, ...]
    scores: tuple[tuple[float | None, ...], ...]
    shared_counts: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class EvalMetrics:
    overall_accuracy: float
    masculine_accuracy: float
    feminine_accuracy: float
    f1_feminine: float
    f1_masculine: float
    f1_macro: float
    n_total: int
    n_masculine: int
    n_feminine: int


def adjective_supports(profiles: Iterable[AdjectiveProfile]) -> dict[str, tuple[int, int]]:
    """adjective -> (support, masculine support) over one language's profiles."""
    supports: dict[str, tuple[int, int]] = {}
    for profile in profiles:
        is_masc = profile.noun.gender is Gender.MASCULINE
        for token in profile.entries:
            total, masc = supports.get(token, (0, 0))
            supports[token] = (total + 1, masc + (1 if is_masc else 0))
    return supports


def masculine_ratio(profiles: Sequence[AdjectiveProfile], adjective: str) -> GenderRatio:
    """Share of masculine nouns among those described by ``adjective``."""
    support = 0
    masculine = 0
    for profile in profiles:
        if adjective in profile.entries:
            support += 1
            if profile.noun.gender is Gender.MASCULINE:
                masculine += 1
    if support == 0:
        raise ValidationError(
            f"adjective {adjective!r} appears in no profile; its ratio is undefined"
        )
    return GenderRatio(
        adjective=adjective, r_m=masculine / support, support=support, masculine_support=masculine
    )


def gender_ratios(profiles: Sequence[AdjectiveProfile]) -> list[GenderRatio]:
    """Ratios for every adjective with support >= 1, in token order."""
    supports = adjective_supports(profiles)
    return [
        GenderRatio(adjective=token, r_m=masc / total, support=total, masculine_support=masc)
        for token, (total, masc) in sorted(supports.items())
    ]


def similarity(
    profiles_p: Sequence[AdjectiveProfile],
    profiles_q: Sequence[AdjectiveProfile],
    min_support: int = DEFAULT_MIN_SUPPORT,
) -> PairSimilarity:
    """Cosine similarity of aligned r_m vectors over well-supported shared adjectives.

    The shared set is sorted lexicographically so the alignment (and hence the
    score) is deterministic. A zero score vector makes the cosine undefined
    and raises; an empty shared set returns a no-overlap result instead.
    """
    supports_p = adjective_supports(profiles_p)
    supports_q = adjective_supports(profiles_q)
    shared = sorted(
        token
        for token, (total, _) in supports_p.items()
        if total >= min_support and supports_q.get(token, (0, 0))[0] >= min_support
    )
    if not shared:
        return PairSimilarity(score=None, shared_adjectives=())
    sigma_p = np.array([supports_p[t][1] / supports_p[t][0] for t in shared])
    sigma_q = np.array([supports_q[t][1] / supports_q[t][0] for t in shared])
    norm_p = float(np.linalg.norm(sigma_p))
    norm_q = float(np.linalg.norm(sigma_q))
    if norm_p == 0.0 or norm_q == 0.0:
        raise UndefinedSimilarityError(
            f"zero gendered-adjective score vector over {len(shared)} shared adjectives"
        )
    score = float(np.dot(sigma_p, sigma_q) / (norm_p * norm_q))
    return PairSimilarity(score=score, shared_adjectives=tuple(shared))


def similarity_matrix(
    profiles_by_language: dict[str, Sequence[AdjectiveProfile]],
    min_support: int = DEFAULT_MIN_SUPPORT,
) -> SimilarityMatrix:
    """Symmetric pairwise matrix; each unordered pair is computed once."""
    languages = tuple(sorted(profiles_by_language))
    n = len(languages)
    scores: list[list[float | None]] = [[None] * n for _ in range(n)]
    counts = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            pair = similarity(
                profiles_by_language[languages[i]],
                profiles_by_language[languages[j]],
                min_support=min_support,
            )
            scores[i][j] = scores[j][i] = pair.score
            counts[i][j] = counts[j][i] = len(pair.shared_adjectives)
    return SimilarityMatrix(
        languages=languages,
        scores=tuple(tuple(row) for row in scores),
        shared_counts=tuple(tuple(row) for row in counts),
    )


def _f1(tp: int, fp: int, fn: int) -> float:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return 2 * precision * recall / (precision + recall) if precision + recall else 0.0


def classification_metrics(
    predicted: Sequence[Gender], truths: Sequence[Gender]
) -> EvalMetrics:
    """Accuracy and F1 summary of a batch of gender predictions."""
    if len(predicted) != len(truths):
        raise ValidationError(
            f"{len(predicted)} predictions vs {len(truths)} ground-truth labels"
        )
    if not truths:
        raise ValidationError("cannot score an empty prediction set")
    masc_correct = fem_correct = n_masc = n_fem = 0
    for pred, truth in zip(predicted, truths):
        if truth is Gender.MASCULINE:
            n_masc += 1
            masc_correct += pred is Gender.MASCULINE
        else:
            n_fem += 1
            fem_correct += pred is Gender.FEMININE
    total = n_masc + n_fem
    # feminine as positive class: true positives are correct feminine calls
    tp_f = fem_correct
    fp_f = n_masc - masc_correct
    fn_f = n_fem - fem_correct
    tp_m = masc_correct
    fp_m = n_fem - fem_correct
    fn_m = n_masc - masc_correct
    f1_fem = _f1(tp_f, fp_f, fn_f)
    f1_masc = _f1(tp_m, fp_m, fn_m)
    return EvalMetrics(
        overall_accuracy=(masc_correct + fem_correct) / total,
        masculine_accuracy=masc_correct / n_masc if n_masc else 0.0,
        feminine_accuracy=fem_correct / n_fem if n_fem else 0.0,
        f1_feminine=f1_fem,
        f1_masculine=f1_masc,
        f1_macro=(f1_fem + f1_masc) / 2,
        n_total=total,
        n_masculine=n_masc,
        n_feminine=n_fem,
    )


def ratios_to_csv(path: str | Path, ratios: Sequence[GenderRatio]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["adjective", "r_m", "support"])
        for ratio in ratios:
            writer.writerow([ratio.adjective, f"{ratio.r_m:.6f}", ratio.support])
    return path


def similarity_to_csv(path: str | Path, matrix: SimilarityMatrix) -> Path:
    """Long-form (lang_p, lang_q, score, shared_count); empty score = no overlap."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lang_p", "lang_q", "score", "shared_count"])
        for i, lang_p in enumerate(matrix.languages):
            for j, lang_q in enumerate(matrix.languages):
                score = matrix.scores[i][j]
                writer.writerow(
                    [
                        lang_p,
                        lang_q,
                        "" if score is None else f"{score:.6f}",
                        matrix.shared_counts[i][j],
                    ]
                )
    return path
