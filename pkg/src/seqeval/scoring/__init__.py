"""Metric registry, built-in scorers and the parallel scoring engine."""

from .base import MeanScorer, ScoreReport, Scorer
from .edit import EditSummary, TerScorer, WerScorer, levenshtein, ter, wer
from .engine import (
    DetailedResult,
    calculate_all,
    calculate_score,
    calculate_score_detailed,
    get_scorer,
    list_scorers,
    normalize_references,
    reduce_subset,
    register_scorer,
    scorer_scale,
    unregister_scorer,
)
from .ngram import (
    BleuScorer,
    ChrfScorer,
    GleuScorer,
    NistScorer,
    RibesScorer,
    ribes_sentence_score,
)
from .overlap import (
    CiderScorer,
    IdfTable,
    RougeLScorer,
    RougeNScorer,
    build_idf,
    cider,
    lcs_length,
    rouge_l,
    rouge_n,
)

BUILTIN_SCORERS = (
    BleuScorer(),
    ChrfScorer(),
    GleuScorer(),
    NistScorer(),
    RibesScorer(),
    WerScorer(),
    TerScorer(),
    RougeNScorer(1),
    RougeNScorer(2),
    RougeLScorer(),
    CiderScorer(),
)

for _scorer in BUILTIN_SCORERS:
    register_scorer(_scorer.name, _scorer)
del _scorer
