"""Scorer protocol: per-sentence sufficient statistics plus a corpus reduce."""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ..text import TokenizerConfig

# Flat numeric tuple; folding is associative so corpus scores are independent
# of how the corpus was chunked across workers.
Stats = Tuple

Scale = Tuple[float, Optional[float]]


@dataclass
class ScoreReport:
    """Corpus score plus per-sentence scores for one (metric, corpus) run."""

    scorer: str
    corpus_score: float
    sentence_scores: List[float]

    def __post_init__(self):
        if not math.isfinite(self.corpus_score):
            raise ValueError(f"{self.scorer}: corpus score is not finite")
        bad = [i for i, s in enumerate(self.sentence_scores) if not math.isfinite(s)]
        if bad:
            raise ValueError(f"{self.scorer}: non-finite sentence scores at {bad[:5]}")

    def to_dict(self) -> dict:
        return {
            "scorer": self.scorer,
            "corpus_score": self.corpus_score,
            "sentence_scores": list(self.sentence_scores),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreReport":
        return cls(d["scorer"], d["corpus_score"], list(d["sentence_scores"]))


class Scorer:
    """A metric with mergeable per-sentence statistics.

    ``sentence`` must be a pure function; the engine may evaluate it in
    parallel worker processes. ``fold`` must be associative so that the
    corpus score does not depend on chunk boundaries; the engine always
    folds in corpus order, one sentence at a time.
    """

    name: str = ""
    scale: Scale = (0.0, 100.0)

    def prepare(self, hypotheses: Sequence[str], references: Sequence[Sequence[str]],
                tokenizer: TokenizerConfig):
        """Optional corpus-level pass (e.g. document frequencies); returns context."""
        return None

    def sentence(self, hypothesis: str, references: Sequence[str],
                 tokenizer: TokenizerConfig, ctx) -> Tuple[Stats, float]:
        raise NotImplementedError

    def fold(self, acc: Optional[Stats], stats: Stats) -> Stats:
        if acc is None:
            return stats
        return tuple(a + b for a, b in zip(acc, stats))

    def finalize(self, acc: Optional[Stats], count: int) -> float:
        """Corpus score from folded statistics."""
        raise NotImplementedError


class MeanScorer(Scorer):
    """Base for metrics whose corpus score is the mean of sentence scores."""

    def sentence_score(self, hypothesis: str, references: Sequence[str],
                       tokenizer: TokenizerConfig, ctx) -> float:
        raise NotImplementedError

    def sentence(self, hypothesis, references, tokenizer, ctx):
        score = self.sentence_score(hypothesis, references, tokenizer, ctx)
        return (score,), score

    def finalize(self, acc, count):
        if acc is None or count == 0:
            return 0.0
        return acc[0] / count
