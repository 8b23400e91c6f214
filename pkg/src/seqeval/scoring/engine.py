"""Scorer registry and parallel corpus scoring.

The corpus is split into contiguous chunks, one per worker; workers emit
per-sentence scores and statistics, and a single in-order reduction in the
parent produces the corpus score. Results are therefore identical for every
worker count.
"""

import logging
import multiprocessing
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from ..errors import DuplicateScorerError, ScoringInputError, UnknownScorerError
from ..text import DEFAULT_TOKENIZER, TokenizerConfig
from .base import ScoreReport, Scorer, Stats

log = logging.getLogger("seqeval.scoring")

# A user-registered metric may be a plain function:
#   fn(hypotheses, references, workers, verbose) -> (corpus_score, sentence_scores)
ScorerFunction = Callable[..., Tuple[float, List[float]]]

_REGISTRY: Dict[str, Union[Scorer, ScorerFunction]] = {}


def register_scorer(name: str, scorer: Union[Scorer, ScorerFunction, None] = None):
    """Register a metric under a lowercase id; usable as a decorator.

    Raises DuplicateScorerError when the id is already taken.
    """
    if name != name.lower():
        raise ValueError(f"scorer ids must be lowercase, got {name!r}")

    def _register(obj):
        if name in _REGISTRY:
            raise DuplicateScorerError(f"scorer {name!r} is already registered")
        if isinstance(obj, Scorer):
            obj.name = name
        _REGISTRY[name] = obj
        return obj

    if scorer is None:
        return _register
    return _register(scorer)


def unregister_scorer(name: str) -> None:
    _REGISTRY.pop(name, None)


def get_scorer(name: str) -> Union[Scorer, ScorerFunction]:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownScorerError(
            f"unknown scorer {name!r}; available: {', '.join(list_scorers())}"
        ) from None


def list_scorers() -> List[str]:
    return sorted(_REGISTRY)


def scorer_scale(name: str) -> Tuple[float, Optional[float]]:
    """(min, max) of the metric's reported scale; max None means unbounded."""
    scorer = get_scorer(name)
    if isinstance(scorer, Scorer):
        return scorer.scale
    return (0.0, None)


def normalize_references(hypotheses: Sequence[str],
                         references,
                         ref_format: str = "auto") -> List[List[str]]:
    """Normalize either reference shape into per-example reference lists.

    ``streams``: one list per reference stream, each aligned to the corpus;
    ``per_example``: one list per example. ``auto`` decides by outer length
    (a single flat list of strings is one stream) and prefers the per-example
    reading when both fit; pass an explicit format to override. Absent
    entries (None or empty strings in stream shape, None in per-example
    shape) are dropped.
    """
    n = len(hypotheses)
    if ref_format not in ("auto", "streams", "per_example"):
        raise ValueError(f"unknown reference format {ref_format!r}")
    refs = list(references)
    if not refs:
        raise ScoringInputError("references must not be empty")

    flat = all(isinstance(r, str) for r in refs)
    if flat:
        refs = [refs]
        ref_format = "streams"
    if ref_format == "auto":
        ref_format = "per_example" if len(refs) == n else "streams"

    if ref_format == "streams":
        per_example: List[List[str]] = [[] for _ in range(n)]
        for stream in refs:
            if len(stream) != n:
                raise ScoringInputError(
                    f"reference stream has {len(stream)} entries, expected {n}")
            for i, entry in enumerate(stream):
                if entry is not None and entry != "":
                    per_example[i].append(entry)
    else:
        if len(refs) != n:
            raise ScoringInputError(
                f"got {len(refs)} per-example reference lists for {n} hypotheses")
        per_example = [[r for r in entry if r is not None] for entry in refs]

    empty = [i for i, entry in enumerate(per_example) if not entry]
    if empty:
        raise ScoringInputError(
            f"examples with no reference: {empty[:5]}"
            + ("..." if len(empty) > 5 else ""))
    return per_example


def _chunk_bounds(n: int, workers: int) -> List[Tuple[int, int]]:
    """Contiguous chunk index ranges covering [0, n)."""
    workers = max(1, min(workers, n))
    base, extra = divmod(n, workers)
    bounds = []
    start = 0
    for k in range(workers):
        size = base + (1 if k < extra else 0)
        bounds.append((start, start + size))
        start += size
    return bounds


def _score_chunk(args):
    scorer, hypotheses, references, tokenizer, ctx = args
    return [scorer.sentence(h, r, tokenizer, ctx)
            for h, r in zip(hypotheses, references)]


@dataclass
class DetailedResult:
    """ScoreReport plus per-sentence statistics, for subset re-aggregation."""

    report: ScoreReport
    stats: Optional[List[Stats]]  # None for function scorers


def _run_chunks(scorer: Scorer, hypotheses, per_example_refs, tokenizer, ctx,
                workers: int, verbose: bool) -> List[Tuple[Stats, float]]:
    n = len(hypotheses)
    bounds = _chunk_bounds(n, workers)
    if len(bounds) == 1:
        return _score_chunk((scorer, hypotheses, per_example_refs, tokenizer, ctx))
    tasks = [
        (scorer, hypotheses[lo:hi], per_example_refs[lo:hi], tokenizer, ctx)
        for lo, hi in bounds
    ]
    results: List[List[Tuple[Stats, float]]] = []
    with multiprocessing.get_context("fork").Pool(len(bounds)) as pool:
        for k, chunk in enumerate(pool.imap(_score_chunk, tasks)):
            results.append(chunk)
            if verbose:
                log.info("%s: chunk %d/%d scored (%d sentences)",
                         scorer.name, k + 1, len(bounds), len(chunk))
    return [pair for chunk in results for pair in chunk]


def calculate_score_detailed(name: str,
                             hypotheses: Sequence[str],
                             references,
                             workers: int = 1,
                             verbose: bool = False,
                             tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
                             ref_format: str = "auto") -> DetailedResult:
    """Score a corpus, keeping per-sentence statistics."""
    scorer = get_scorer(name)
    hypotheses = list(hypotheses)
    if not hypotheses:
        raise ScoringInputError("hypotheses must not be empty")
    if workers < 1:
        raise ScoringInputError(f"workers must be >= 1, got {workers}")
    per_example = normalize_references(hypotheses, references, ref_format)

    if not isinstance(scorer, Scorer):
        corpus_score, sentence_scores = scorer(
            hypotheses, per_example, workers, verbose)
        if len(sentence_scores) != len(hypotheses):
            raise ScoringInputError(
                f"scorer {name!r} returned {len(sentence_scores)} sentence scores "
                f"for {len(hypotheses)} hypotheses")
        report = ScoreReport(name, float(corpus_score),
                             [float(s) for s in sentence_scores])
        return DetailedResult(report=report, stats=None)

    ctx = scorer.prepare(hypotheses, per_example, tokenizer)
    pairs = _run_chunks(scorer, hypotheses, per_example, tokenizer, ctx,
                        workers, verbose)
    acc = None
    for stats, _ in pairs:
        acc = scorer.fold(acc, stats)
    corpus_score = scorer.finalize(acc, len(pairs))
    report = ScoreReport(name, corpus_score, [score for _, score in pairs])
    return DetailedResult(report=report, stats=[stats for stats, _ in pairs])


def calculate_score(name: str,
                    hypotheses: Sequence[str],
                    references,
                    workers: int = 1,
                    verbose: bool = False,
                    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
                    ref_format: str = "auto") -> ScoreReport:
    """Score a corpus with one metric; identical results for any worker count."""
    return calculate_score_detailed(
        name, hypotheses, references, workers, verbose, tokenizer, ref_format
    ).report


def calculate_all(names: Sequence[str],
                  hypotheses: Sequence[str],
                  references,
                  workers: int = 1,
                  verbose: bool = False,
                  tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
                  ref_format: str = "auto") -> Dict[str, ScoreReport]:
    """Score with several metrics; fails atomically on any unknown id."""
    for name in names:
        get_scorer(name)
    return {
        name: calculate_score(name, hypotheses, references, workers,
                              verbose, tokenizer, ref_format)
        for name in names
    }


def reduce_subset(name: str, stats: Sequence[Stats],
                  indices: Sequence[int]) -> float:
    """Corpus score over a subset of examples, re-aggregating statistics."""
    scorer = get_scorer(name)
    if not isinstance(scorer, Scorer):
        raise ScoringInputError(
            f"scorer {name!r} has no mergeable statistics; rescore the subset")
    acc = None
    count = 0
    for i in indices:
        acc = scorer.fold(acc, stats[i])
        count += 1
    return scorer.finalize(acc, count)
