import math
import random

import pytest

from seqeval.scoring import calculate_score
from seqeval.scoring.ngram import (
    bleu_corpus_score,
    bleu_sentence_score,
    bleu_sentence_stats,
    brevity_penalty,
    chrf_pair_stats,
    chrf_score_from_stats,
    closest_ref_length,
    gleu_sentence_stats,
    nist_length_factor,
    normalized_kendall_tau,
    ribes_sentence_score,
    word_rank_alignment,
)

EPSILON = 1e-9

from conftest import make_corpus


# ---------------------------------------------------------------------------
# BLEU


def test_bleu_identity_sentence_and_corpus():
    sentence = "the cat sat on the mat"
    report = calculate_score("bleu", [sentence], [[sentence]])
    assert report.corpus_score == pytest.approx(100.0, abs=EPSILON)
    assert report.sentence_scores[0] == pytest.approx(100.0, abs=EPSILON)


def test_bleu_clipped_unigram_precision():
    # hyp "the the the the" against a reference holding "the" twice: 2/4
    stats = bleu_sentence_stats(["the"] * 4, [["the", "cat", "the"]])
    assert stats[0] == 2 and stats[4] == 4


def test_bleu_sentence_smoothing_hand_case():
    # hyp "the cat sat on mat" (5 tokens) vs ref "the cat sat on the mat" (6):
    # p1 = 5/5 raw; add-one gives p2 = (3+1)/(4+1), p3 = (2+1)/(3+1),
    # p4 = (1+1)/(2+1); BP = exp(1 - 6/5).
    stats = bleu_sentence_stats(
        "the cat sat on mat".split(), ["the cat sat on the mat".split()])
    assert stats[:8] == (5, 3, 2, 1, 5, 4, 3, 2)
    expected = 100.0 * math.exp(1 - 6 / 5) * (1.0 * 0.8 * 0.75 * (2 / 3)) ** 0.25
    assert bleu_sentence_score(stats) == pytest.approx(expected, abs=EPSILON)


def test_bleu_corpus_from_hand_merged_counts():
    # Two sentences merged by summation, then the corpus formula applied once.
    first = bleu_sentence_stats("a b c d".split(), ["a b c d".split()])
    second = bleu_sentence_stats("a b x d".split(), ["a b c d".split()])
    merged = tuple(x + y for x, y in zip(first, second))
    # matches: unigrams 4+3, bigrams 3+1, trigrams 2+0, 4-grams 1+0
    assert merged[:4] == (7, 4, 2, 1)
    expected = 100.0 * math.exp(
        (math.log(7 / 8) + math.log(4 / 6) + math.log(2 / 4) + math.log(1 / 2)) / 4)
    assert bleu_corpus_score(merged) == pytest.approx(expected, abs=EPSILON)


def test_bleu_empty_hypothesis_scores_zero():
    report = calculate_score("bleu", [""], [["a b c d"]])
    assert report.sentence_scores == [0.0]
    assert report.corpus_score == 0.0


def test_bleu_zero_matches_at_an_order_gives_zero_corpus():
    # 3-token corpus: no 4-grams exist, so the corpus score collapses to 0.
    report = calculate_score("bleu", ["a b c"], [["a b c"]])
    assert report.corpus_score == 0.0
    assert report.sentence_scores[0] > 0.0  # smoothing keeps the sentence score


def test_brevity_penalty():
    assert brevity_penalty(10, 5) == 1.0
    assert brevity_penalty(5, 5) == 1.0
    assert brevity_penalty(5, 10) == pytest.approx(math.exp(-1.0))
    assert brevity_penalty(0, 5) == 0.0


def test_closest_ref_length_ties_prefer_shorter():
    assert closest_ref_length(4, [3, 5]) == 3
    assert closest_ref_length(4, [5, 3]) == 3
    assert closest_ref_length(4, [2, 4, 9]) == 4


def test_bleu_corpus_permutation_invariance():
    hyps, refs = make_corpus(30, seed=2)
    report = calculate_score("bleu", hyps, refs, ref_format="per_example")
    order = list(range(len(hyps)))
    random.Random(0).shuffle(order)
    shuffled = calculate_score(
        "bleu", [hyps[i] for i in order], [refs[i] for i in order],
        ref_format="per_example")
    assert shuffled.corpus_score == pytest.approx(report.corpus_score, abs=1e-12)
    assert shuffled.sentence_scores == [report.sentence_scores[i] for i in order]


# ---------------------------------------------------------------------------
# GLEU


def test_gleu_identity_and_disjoint():
    assert calculate_score("gleu", ["a b c d"], [["a b c d"]]).corpus_score == 100.0
    assert calculate_score("gleu", ["a b c d"], [["x y z w"]]).corpus_score == 0.0


def test_gleu_hand_case():
    # hyp "a b c d" vs ref "a b x d": pooled n=1..4 counts are 10 vs 10 with
    # 3 shared unigrams + 1 shared bigram -> min(4/10, 4/10) = 0.4
    stats = gleu_sentence_stats("a b c d".split(), ["a b x d".split()])
    assert stats == (4, 10, 10)
    report = calculate_score("gleu", ["a b c d"], [["a b x d"]])
    assert report.corpus_score == pytest.approx(40.0, abs=EPSILON)


def test_gleu_picks_best_reference():
    report = calculate_score("gleu", ["a b c d"], [["x y z w", "a b c d"]])
    assert report.corpus_score == 100.0


# ---------------------------------------------------------------------------
# NIST


def test_nist_identity_is_self_consistent_maximum():
    hyps, refs = make_corpus(8, seed=9)
    identity = calculate_score("nist", [r[0] for r in refs], refs,
                               ref_format="per_example")
    noisy = calculate_score("nist", hyps, refs, ref_format="per_example")
    assert identity.corpus_score >= noisy.corpus_score
    assert identity.corpus_score > 0.0


def test_nist_empty_hypothesis_zero():
    report = calculate_score("nist", [""], [["a b c"]])
    assert report.sentence_scores == [0.0]


def test_nist_length_factor_pinned_at_two_thirds():
    assert nist_length_factor(2, 3) == pytest.approx(0.5, abs=1e-12)
    assert nist_length_factor(5, 5) == 1.0
    assert nist_length_factor(7, 5) == 1.0
    assert nist_length_factor(0, 5) == 0.0


def test_nist_toy_corpus_matches_offline_oracle(oracle_fixture):
    toy = oracle_fixture["expected"]["nist_toy"]
    report = calculate_score("nist", toy["hypotheses"], toy["references"],
                             ref_format="per_example")
    assert report.corpus_score == pytest.approx(toy["corpus_score"], abs=1e-6)
    # single-sentence corpora match the reference tool's sentence scores
    for hyp, refs, expected in zip(toy["hypotheses"], toy["references"],
                                   toy["sentence_scores"]):
        single = calculate_score("nist", [hyp], [refs], ref_format="per_example")
        assert single.corpus_score == pytest.approx(expected, abs=1e-6)


# ---------------------------------------------------------------------------
# chrF


def test_chrf_identity_and_disjoint():
    assert calculate_score("chrf", ["a b c d"], [["a b c d"]]).corpus_score == \
        pytest.approx(100.0, abs=EPSILON)
    assert calculate_score("chrf", ["aaaa"], [["bbbb"]]).corpus_score == 0.0


def test_chrf_hand_case():
    # "abc" vs "abd": order 1 P=R=2/3, order 2 P=R=1/2, order 3 P=R=0,
    # orders 4..6 skipped (no n-grams) -> averaged P=R=7/18; F equals P.
    stats = chrf_pair_stats("abc", "abd")
    score = chrf_score_from_stats(stats)
    assert score == pytest.approx(100.0 * 7 / 18, abs=EPSILON)


def test_chrf_whitespace_invariance():
    spaced = calculate_score("chrf", ["a b"], [["ab ba"]])
    joined = calculate_score("chrf", ["ab"], [["a bb a"]])
    assert spaced.corpus_score == pytest.approx(joined.corpus_score, abs=EPSILON)


def test_chrf_empty_cases():
    assert calculate_score("chrf", [""], [["reference"]]).corpus_score == 0.0
    assert calculate_score("chrf", ["source"], [["x"]]).sentence_scores[0] == 0.0


def test_chrf_multi_reference_takes_best():
    single = calculate_score("chrf", ["abcdef"], [["abcdef"]])
    multi = calculate_score("chrf", ["abcdef"], [["zzzzzz", "abcdef"]])
    assert multi.corpus_score == pytest.approx(single.corpus_score, abs=EPSILON)


# ---------------------------------------------------------------------------
# RIBES


def test_ribes_identity():
    report = calculate_score("ribes", ["a b c d e"], [["a b c d e"]])
    assert report.corpus_score == pytest.approx(100.0, abs=EPSILON)


def test_ribes_full_reversal_zero():
    report = calculate_score("ribes", ["c b a"], [["a b c"]])
    assert report.corpus_score == 0.0


def test_ribes_hand_case():
    # hyp "c a b" vs ref "a b c": alignment has one concordant pair of three,
    # tau = -1/3, NKT = 1/3; p1 = 1 and bp = 1.
    score = ribes_sentence_score("c a b".split(), ["a b c".split()])
    assert score == pytest.approx(100.0 / 3.0, abs=EPSILON)


def test_ribes_alignment_and_tau():
    assert word_rank_alignment("a b c".split(), "c a b".split()) == [2, 0, 1]
    assert normalized_kendall_tau([2, 0, 1]) == pytest.approx(1 / 3)
    assert normalized_kendall_tau([0]) == 0.0
    assert normalized_kendall_tau([]) == 0.0


def test_ribes_ambiguous_token_context_alignment():
    # "the" repeats; context windows disambiguate both occurrences.
    ref = "the cat saw the dog".split()
    hyp = "the cat saw the dog".split()
    assert word_rank_alignment(ref, hyp) == [0, 1, 2, 3, 4]


def test_ribes_empty_hypothesis():
    assert calculate_score("ribes", [""], [["a b"]]).sentence_scores == [0.0]


# ---------------------------------------------------------------------------
# shared invariants


@pytest.mark.parametrize("metric", ["bleu", "gleu", "chrf", "ribes"])
def test_adding_hypothesis_as_reference_maximizes(metric):
    hyps, refs = make_corpus(12, seed=21, min_len=4)
    augmented = [entry + [hyp] for entry, hyp in zip(refs, hyps)]
    report = calculate_score(metric, hyps, augmented, ref_format="per_example")
    assert report.corpus_score == pytest.approx(100.0, abs=EPSILON)
    for score in report.sentence_scores:
        assert score == pytest.approx(100.0, abs=EPSILON)


@pytest.mark.parametrize("metric", ["bleu", "gleu", "chrf", "ribes"])
def test_scores_within_scale(metric):
    hyps, refs = make_corpus(25, seed=33)
    report = calculate_score(metric, hyps, refs, ref_format="per_example")
    assert 0.0 <= report.corpus_score <= 100.0
    assert all(0.0 <= s <= 100.0 for s in report.sentence_scores)


def test_nist_nonnegative():
    hyps, refs = make_corpus(25, seed=34)
    report = calculate_score("nist", hyps, refs, ref_format="per_example")
    assert report.corpus_score >= 0.0
    assert all(s >= 0.0 for s in report.sentence_scores)
