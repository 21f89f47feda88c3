"""genderprobe: measure grammatical-gender bias in multilingual LLMs.

The pipeline elicits adjective descriptions of gendered nouns from a pluggable
model backend, aggregates them into frequency profiles, translates everything
to English, and trains a small classifier to test whether the adjectives
predict grammatical gender, within and across languages.
"""

__version__ = "0.1.0"

from .errors import (
    GenderProbeError,
    LexiconParseError,
    PoolExhaustionError,
    ReplayMissError,
    TrainingError,
    TranslationError,
    TransportError,
    UndefinedSimilarityError,
    ValidationError,
)
from .lexicon import Gender, Lexicon, Noun, Split, filter_animate, load_lexicon, split_lexicon

__all__ = [
    "__version__",
    "Gender",
    "GenderProbeError",
    "Lexicon",
    "LexiconParseError",
    "Noun",
    "PoolExhaustionError",
    "ReplayMissError",
    "Split",
    "TrainingError",
    "TranslationError",
    "TransportError",
    "UndefinedSimilarityError",
    "ValidationError",
    "filter_animate",
    "load_lexicon",
    "split_lexicon",
]
