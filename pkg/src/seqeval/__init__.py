"""seqeval: evaluation toolkit for conditional text generation systems."""

from .corpus import EvalSet, Modality, TagOrigin, TagSet, references_for, validate
from .scoring import (
    ScoreReport,
    Scorer,
    calculate_all,
    calculate_score,
    list_scorers,
    register_scorer,
)
from .text import TokenizerConfig

__version__ = "0.1.0"
