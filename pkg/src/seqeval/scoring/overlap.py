"""Recall/consensus-oriented metrics: ROUGE-1/2/L and CIDEr-D."""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from ..errors import ScoringInputError
from ..text import token_texts, word_ngrams
from .base import MeanScorer

CIDER_ORDER = 4
CIDER_SIGMA = 6.0
ROUGE_L_BETA = 1.2


# ---------------------------------------------------------------------------
# ROUGE


def rouge_n(hyp_tokens: Sequence[str],
            refs_tokens: Sequence[Sequence[str]], n: int) -> float:
    """F1 of n-gram overlap, maximized over references."""
    hyp_counts = word_ngrams(hyp_tokens, n).counts
    hyp_total = sum(hyp_counts.values())
    best = 0.0
    for ref in refs_tokens:
        ref_counts = word_ngrams(ref, n).counts
        ref_total = sum(ref_counts.values())
        if hyp_total == 0 or ref_total == 0:
            continue
        matched = sum((hyp_counts & ref_counts).values())
        precision = matched / hyp_total
        recall = matched / ref_total
        if precision + recall > 0:
            best = max(best, 100.0 * 2 * precision * recall / (precision + recall))
    return best


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence."""
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for tok_a in a:
        current = [0] * (len(b) + 1)
        for j, tok_b in enumerate(b, start=1):
            if tok_a == tok_b:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[-1]


def rouge_l(hyp_tokens: Sequence[str],
            refs_tokens: Sequence[Sequence[str]],
            beta: float = ROUGE_L_BETA) -> float:
    """LCS-based F-measure with recall weight beta, maximized over references."""
    if not hyp_tokens:
        return 0.0
    best = 0.0
    beta_sq = beta * beta
    for ref in refs_tokens:
        if not ref:
            continue
        lcs = lcs_length(hyp_tokens, ref)
        precision = lcs / len(hyp_tokens)
        recall = lcs / len(ref)
        denom = recall + beta_sq * precision
        if denom > 0:
            best = max(best, 100.0 * (1 + beta_sq) * precision * recall / denom)
    return best


class RougeNScorer(MeanScorer):
    scale = (0.0, 100.0)

    def __init__(self, n: int):
        self.n = n
        self.name = f"rouge_{n}"

    def sentence_score(self, hypothesis, references, tokenizer, ctx):
        return rouge_n(
            token_texts(hypothesis, tokenizer),
            [token_texts(r, tokenizer) for r in references], self.n)


class RougeLScorer(MeanScorer):
    name = "rouge_l"
    scale = (0.0, 100.0)

    def sentence_score(self, hypothesis, references, tokenizer, ctx):
        return rouge_l(
            token_texts(hypothesis, tokenizer),
            [token_texts(r, tokenizer) for r in references])


# ---------------------------------------------------------------------------
# CIDEr-D


@dataclass
class IdfTable:
    """Reference-side document frequencies; documents are examples."""

    document_count: int
    df: Dict[tuple, int] = field(default_factory=dict)

    def idf(self, gram: tuple) -> float:
        """ln(documents / df); n-grams unseen in references get the maximum."""
        if self.document_count == 0:
            return 0.0
        return math.log(self.document_count / max(1, self.df.get(gram, 0)))

    def to_dict(self) -> dict:
        return {
            "document_count": self.document_count,
            "df": {"\x1f".join(gram): count for gram, count in self.df.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IdfTable":
        df = {tuple(key.split("\x1f")): count for key, count in d["df"].items()}
        return cls(document_count=d["document_count"], df=df)


def _pooled_counts(tokens: Sequence[str]) -> Counter:
    pooled: Counter = Counter()
    for n in range(1, CIDER_ORDER + 1):
        pooled.update(word_ngrams(tokens, n).counts)
    return pooled


def build_idf(refs_tokens_per_example: Sequence[Sequence[Sequence[str]]]) -> IdfTable:
    """Document frequencies over examples; an n-gram counts once per example."""
    table = IdfTable(document_count=len(refs_tokens_per_example))
    for refs in refs_tokens_per_example:
        grams = set()
        for ref in refs:
            grams.update(_pooled_counts(ref))
        for gram in grams:
            table.df[gram] = table.df.get(gram, 0) + 1
    return table


def _tfidf_vectors(counts: Counter, idf: IdfTable):
    """Per-order tf-idf vectors and their norms."""
    vectors: List[Dict[tuple, float]] = [{} for _ in range(CIDER_ORDER)]
    norms = [0.0] * CIDER_ORDER
    for gram, count in counts.items():
        weight = count * idf.idf(gram)
        order = len(gram) - 1
        vectors[order][gram] = weight
        norms[order] += weight * weight
    return vectors, [math.sqrt(x) for x in norms]


def cider(hyp_tokens: Sequence[str],
          refs_tokens: Sequence[Sequence[str]],
          idf: IdfTable) -> float:
    """CIDEr-D: clipped tf-idf cosine per order with a Gaussian length penalty.

    Cosine against a zero vector is 0 by convention, never NaN.
    """
    if idf is None:
        raise ScoringInputError("cider requires an IdfTable built from the corpus references")
    hyp_vecs, hyp_norms = _tfidf_vectors(_pooled_counts(hyp_tokens), idf)
    order_sums = [0.0] * CIDER_ORDER
    for ref in refs_tokens:
        ref_vecs, ref_norms = _tfidf_vectors(_pooled_counts(ref), idf)
        delta = float(len(hyp_tokens) - len(ref))
        penalty = math.exp(-(delta * delta) / (2.0 * CIDER_SIGMA * CIDER_SIGMA))
        for order in range(CIDER_ORDER):
            value = 0.0
            for gram, weight in hyp_vecs[order].items():
                ref_weight = ref_vecs[order].get(gram, 0.0)
                value += min(weight, ref_weight) * ref_weight
            if hyp_norms[order] > 0 and ref_norms[order] > 0:
                value /= hyp_norms[order] * ref_norms[order]
            else:
                value = 0.0
            order_sums[order] += value * penalty
    if not refs_tokens:
        return 0.0
    mean_over_orders = sum(s / len(refs_tokens) for s in order_sums) / CIDER_ORDER
    return 10.0 * mean_over_orders


class CiderScorer(MeanScorer):
    name = "cider"
    scale = (0.0, 10.0)

    def prepare(self, hypotheses, references, tokenizer):
        tokenized = [[token_texts(r, tokenizer) for r in refs] for refs in references]
        return build_idf(tokenized)

    def sentence_score(self, hypothesis, references, tokenizer, ctx):
        return cider(
            token_texts(hypothesis, tokenizer),
            [token_texts(r, tokenizer) for r in references],
            ctx)
