"""Precision-oriented n-gram metrics: BLEU, GLEU, NIST, chrF and RIBES."""

import math
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

from ..text import TokenizerConfig, char_ngrams, token_texts, word_ngrams
from .base import MeanScorer, Scorer, Stats

BLEU_ORDER = 4
GLEU_ORDER = 4
NIST_ORDER = 5
CHRF_ORDER = 6
CHRF_BETA = 2.0
RIBES_ALPHA = 0.25
RIBES_BETA = 0.10


# ---------------------------------------------------------------------------
# BLEU


def closest_ref_length(hyp_len: int, ref_lens: Sequence[int]) -> int:
    """Reference length closest to the hypothesis; ties go to the shorter."""
    return min(ref_lens, key=lambda r: (abs(r - hyp_len), r))


def bleu_sentence_stats(hyp_tokens: Sequence[str],
                        refs_tokens: Sequence[Sequence[str]]) -> Stats:
    """Per-order clipped matches and totals, plus both length terms.

    Layout: (m1..m4, t1..t4, hyp_len, ref_len).
    """
    matches = [0] * BLEU_ORDER
    totals = [0] * BLEU_ORDER
    for n in range(1, BLEU_ORDER + 1):
        hyp_profile = word_ngrams(hyp_tokens, n)
        ceilings: Counter = Counter()
        for ref in refs_tokens:
            for gram, count in word_ngrams(ref, n).counts.items():
                if count > ceilings[gram]:
                    ceilings[gram] = count
        matches[n - 1] = sum(min(c, ceilings[g]) for g, c in hyp_profile.counts.items())
        totals[n - 1] = hyp_profile.total()
    hyp_len = len(hyp_tokens)
    ref_len = closest_ref_length(hyp_len, [len(r) for r in refs_tokens])
    return (*matches, *totals, hyp_len, ref_len)


def brevity_penalty(hyp_len: int, ref_len: int) -> float:
    if hyp_len == 0:
        return 0.0
    if hyp_len > ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / hyp_len)


def bleu_corpus_score(stats: Stats) -> float:
    """Corpus BLEU from folded statistics; zero matches at any order give 0."""
    matches = stats[:BLEU_ORDER]
    totals = stats[BLEU_ORDER:2 * BLEU_ORDER]
    hyp_len, ref_len = stats[-2], stats[-1]
    if hyp_len == 0 or any(m == 0 for m in matches) or any(t == 0 for t in totals):
        return 0.0
    log_precision = sum(math.log(m / t) for m, t in zip(matches, totals)) / BLEU_ORDER
    return brevity_penalty(hyp_len, ref_len) * math.exp(log_precision) * 100.0


def bleu_sentence_score(stats: Stats) -> float:
    """Sentence BLEU with add-one smoothing on orders >= 2."""
    matches = stats[:BLEU_ORDER]
    totals = stats[BLEU_ORDER:2 * BLEU_ORDER]
    hyp_len, ref_len = stats[-2], stats[-1]
    if hyp_len == 0 or matches[0] == 0 or totals[0] == 0:
        return 0.0
    log_sum = math.log(matches[0] / totals[0])
    for n in range(2, BLEU_ORDER + 1):
        log_sum += math.log((matches[n - 1] + 1) / (totals[n - 1] + 1))
    return brevity_penalty(hyp_len, ref_len) * math.exp(log_sum / BLEU_ORDER) * 100.0


class BleuScorer(Scorer):
    name = "bleu"
    scale = (0.0, 100.0)

    def sentence(self, hypothesis, references, tokenizer, ctx):
        stats = bleu_sentence_stats(
            token_texts(hypothesis, tokenizer),
            [token_texts(r, tokenizer) for r in references])
        return stats, bleu_sentence_score(stats)

    def finalize(self, acc, count):
        return 0.0 if acc is None else bleu_corpus_score(acc)


# ---------------------------------------------------------------------------
# GLEU


def _pooled_ngrams(tokens: Sequence[str], max_order: int) -> Counter:
    pooled: Counter = Counter()
    for n in range(1, max_order + 1):
        pooled.update(word_ngrams(tokens, n).counts)
    return pooled


def gleu_sentence_stats(hyp_tokens: Sequence[str],
                        refs_tokens: Sequence[Sequence[str]]) -> Stats:
    """(matches, hyp_total, ref_total) against the best-scoring reference."""
    hyp_pool = _pooled_ngrams(hyp_tokens, GLEU_ORDER)
    hyp_total = sum(hyp_pool.values())
    best: Optional[Tuple[float, Stats]] = None
    for ref in refs_tokens:
        ref_pool = _pooled_ngrams(ref, GLEU_ORDER)
        ref_total = sum(ref_pool.values())
        matched = sum((hyp_pool & ref_pool).values())
        score = _gleu_value(matched, hyp_total, ref_total)
        if best is None or score > best[0]:
            best = (score, (matched, hyp_total, ref_total))
    assert best is not None
    return best[1]


def _gleu_value(matched: int, hyp_total: int, ref_total: int) -> float:
    if hyp_total == 0 or ref_total == 0:
        return 0.0
    return min(matched / hyp_total, matched / ref_total)


class GleuScorer(Scorer):
    name = "gleu"
    scale = (0.0, 100.0)

    def sentence(self, hypothesis, references, tokenizer, ctx):
        stats = gleu_sentence_stats(
            token_texts(hypothesis, tokenizer),
            [token_texts(r, tokenizer) for r in references])
        return stats, _gleu_value(*stats) * 100.0

    def finalize(self, acc, count):
        return 0.0 if acc is None else _gleu_value(*acc) * 100.0


# ---------------------------------------------------------------------------
# NIST


def nist_info_weights(references: Sequence[Sequence[Sequence[str]]]) -> Dict[tuple, float]:
    """Information weights from the reference side of the corpus.

    info(g) = log2(count(prefix(g)) / count(g)); for unigrams the numerator is
    the total reference word count.
    """
    counts: Counter = Counter()
    total_words = 0
    for refs in references:
        for ref in refs:
            total_words += len(ref)
            for n in range(1, NIST_ORDER + 1):
                counts.update(word_ngrams(ref, n).counts)
    info: Dict[tuple, float] = {}
    for gram, count in counts.items():
        prefix = gram[:-1]
        numerator = counts[prefix] if prefix else total_words
        info[gram] = math.log2(numerator / count) if numerator > 0 else 0.0
    return info


def nist_sentence_stats(hyp_tokens: Sequence[str],
                        refs_tokens: Sequence[Sequence[str]],
                        info: Dict[tuple, float]) -> Stats:
    """(w1..w5, t1..t5, hyp_len, mean_ref_len): info-weighted clipped matches."""
    weighted = [0.0] * NIST_ORDER
    totals = [0] * NIST_ORDER
    for n in range(1, NIST_ORDER + 1):
        hyp_profile = word_ngrams(hyp_tokens, n)
        ceilings: Counter = Counter()
        for ref in refs_tokens:
            for gram, count in word_ngrams(ref, n).counts.items():
                if count > ceilings[gram]:
                    ceilings[gram] = count
        weighted[n - 1] = sum(
            min(c, ceilings[g]) * info.get(g, 0.0)
            for g, c in hyp_profile.counts.items())
        totals[n - 1] = hyp_profile.total()
    mean_ref_len = sum(len(r) for r in refs_tokens) / len(refs_tokens)
    return (*weighted, *totals, len(hyp_tokens), mean_ref_len)


def nist_length_factor(hyp_len: float, ref_len: float) -> float:
    """exp(beta * ln^2(min(ratio, 1))) with the factor pinned to 0.5 at ratio 2/3."""
    if hyp_len <= 0 or ref_len <= 0:
        return 0.0
    ratio = hyp_len / ref_len
    if ratio >= 1.0:
        return 1.0
    beta = math.log(0.5) / math.log(2.0 / 3.0) ** 2
    return math.exp(beta * math.log(ratio) ** 2)


def nist_score_from_stats(stats: Stats) -> float:
    weighted = stats[:NIST_ORDER]
    totals = stats[NIST_ORDER:2 * NIST_ORDER]
    hyp_len, ref_len = stats[-2], stats[-1]
    precision = sum(w / t for w, t in zip(weighted, totals) if t > 0)
    return precision * nist_length_factor(hyp_len, ref_len)


class NistScorer(Scorer):
    name = "nist"
    scale = (0.0, None)

    def prepare(self, hypotheses, references, tokenizer):
        tokenized = [[token_texts(r, tokenizer) for r in refs] for refs in references]
        return nist_info_weights(tokenized)

    def sentence(self, hypothesis, references, tokenizer, ctx):
        stats = nist_sentence_stats(
            token_texts(hypothesis, tokenizer),
            [token_texts(r, tokenizer) for r in references],
            ctx)
        return stats, nist_score_from_stats(stats)

    def finalize(self, acc, count):
        return 0.0 if acc is None else nist_score_from_stats(acc)


# ---------------------------------------------------------------------------
# chrF


def chrf_pair_stats(hypothesis: str, reference: str,
                    strip_whitespace: bool = True) -> Stats:
    """(h1, r1, m1, ..., h6, r6, m6) character n-gram statistics."""
    out: List[int] = []
    for n in range(1, CHRF_ORDER + 1):
        hyp_profile = char_ngrams(hypothesis, n, strip_whitespace)
        ref_profile = char_ngrams(reference, n, strip_whitespace)
        matched = sum((hyp_profile.counts & ref_profile.counts).values())
        out.extend((hyp_profile.total(), ref_profile.total(), matched))
    return tuple(out)


def chrf_score_from_stats(stats: Stats, beta: float = CHRF_BETA) -> float:
    """F-score of precision and recall uniformly averaged over valid orders.

    Orders where either side has no n-grams are skipped; with no valid order
    the score is 0.
    """
    precision_sum = recall_sum = 0.0
    valid_orders = 0
    for i in range(CHRF_ORDER):
        hyp_total, ref_total, matched = stats[3 * i], stats[3 * i + 1], stats[3 * i + 2]
        if hyp_total > 0 and ref_total > 0:
            precision_sum += matched / hyp_total
            recall_sum += matched / ref_total
            valid_orders += 1
    if valid_orders == 0:
        return 0.0
    precision = precision_sum / valid_orders
    recall = recall_sum / valid_orders
    if precision + recall == 0.0:
        return 0.0
    beta_sq = beta * beta
    return 100.0 * (1 + beta_sq) * precision * recall / (beta_sq * precision + recall)


def chrf_sentence_stats(hypothesis: str, references: Sequence[str],
                        strip_whitespace: bool = True) -> Stats:
    """Statistics against the best-scoring reference (ties to the first)."""
    best: Optional[Tuple[float, Stats]] = None
    for ref in references:
        stats = chrf_pair_stats(hypothesis, ref, strip_whitespace)
        score = chrf_score_from_stats(stats)
        if best is None or score > best[0]:
            best = (score, stats)
    assert best is not None
    return best[1]


class ChrfScorer(Scorer):
    name = "chrf"
    scale = (0.0, 100.0)

    def __init__(self, strip_whitespace: bool = True):
        self.strip_whitespace = strip_whitespace

    def sentence(self, hypothesis, references, tokenizer, ctx):
        if tokenizer.lowercase:
            hypothesis = hypothesis.lower()
            references = [r.lower() for r in references]
        stats = chrf_sentence_stats(hypothesis, references, self.strip_whitespace)
        return stats, chrf_score_from_stats(stats)

    def finalize(self, acc, count):
        return 0.0 if acc is None else chrf_score_from_stats(acc)


# ---------------------------------------------------------------------------
# RIBES


def _all_order_ngrams(tokens: Sequence[str]) -> Counter:
    pooled: Counter = Counter()
    for n in range(1, len(tokens) + 1):
        pooled.update(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))
    return pooled


def _first_position(gram: tuple, tokens: Sequence[str]) -> int:
    n = len(gram)
    for i in range(len(tokens) - n + 1):
        if tuple(tokens[i:i + n]) == gram:
            return i
    raise ValueError("n-gram not found")  # callers guarantee presence


def word_rank_alignment(ref_tokens: Sequence[str],
                        hyp_tokens: Sequence[str]) -> List[int]:
    """One-to-one alignment of hypothesis words to reference positions.

    Tokens unique in both sides align directly; ambiguous tokens are resolved
    by growing a context window right then left until the windowed n-gram is
    unique in both sentences. Unalignable tokens are dropped.
    """
    ref_counts = Counter(ref_tokens)
    hyp_counts = Counter(hyp_tokens)
    ref_ngrams = _all_order_ngrams(ref_tokens)
    hyp_ngrams = _all_order_ngrams(hyp_tokens)
    hyp_len = len(hyp_tokens)
    positions: List[int] = []
    for i, word in enumerate(hyp_tokens):
        if ref_counts[word] == 0:
            continue
        if ref_counts[word] == 1 and hyp_counts[word] == 1:
            positions.append(ref_tokens.index(word))
            continue
        max_window = max(i, hyp_len - i + 1)
        for window in range(1, max_window):
            if i + window < hyp_len:
                right = tuple(hyp_tokens[i:i + window + 1])
                if ref_ngrams[right] == 1 and hyp_ngrams[right] == 1:
                    positions.append(_first_position(right, ref_tokens))
                    break
            if window <= i:
                left = tuple(hyp_tokens[i - window:i + 1])
                if ref_ngrams[left] == 1 and hyp_ngrams[left] == 1:
                    positions.append(_first_position(left, ref_tokens) + window)
                    break
    return positions


def normalized_kendall_tau(positions: Sequence[int]) -> float:
    """(tau + 1) / 2 over the aligned positions; fewer than 2 gives 0."""
    n = len(positions)
    if n < 2:
        return 0.0
    concordant = sum(
        1
        for i in range(n)
        for j in range(i + 1, n)
        if positions[i] < positions[j])
    tau = 2.0 * concordant / (n * (n - 1) / 2) - 1.0
    return (tau + 1.0) / 2.0


def ribes_sentence_score(hyp_tokens: Sequence[str],
                         refs_tokens: Sequence[Sequence[str]],
                         alpha: float = RIBES_ALPHA,
                         beta: float = RIBES_BETA) -> float:
    """100 * NKT * p1^alpha * bp^beta, maximized over references."""
    if not hyp_tokens:
        return 0.0
    best = 0.0
    for ref in refs_tokens:
        positions = word_rank_alignment(list(ref), list(hyp_tokens))
        nkt = normalized_kendall_tau(positions)
        p1 = len(positions) / len(hyp_tokens)
        bp = min(1.0, math.exp(1.0 - len(ref) / len(hyp_tokens)))
        score = 100.0 * nkt * (p1 ** alpha) * (bp ** beta)
        if score > best:
            best = score
    return best


class RibesScorer(MeanScorer):
    name = "ribes"
    scale = (0.0, 100.0)

    def sentence_score(self, hypothesis, references, tokenizer, ctx):
        return ribes_sentence_score(
            token_texts(hypothesis, tokenizer),
            [token_texts(r, tokenizer) for r in references])
