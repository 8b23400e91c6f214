#!/usr/bin/env python3
"""Generate the frozen external-oracle fixture for the test suite.

Produces tests/fixtures/oracle/: a deterministic 1,000-sentence synthetic
corpus with two reference streams, plus expected.json holding corpus scores
computed by independent reference implementations:

  * BLEU and chrF: sacrebleu 1.4.5 (github.com/mjpost/sacrebleu), loaded from
    a local copy of its single-file distribution (pass --sacrebleu-path).
    BLEU uses corpus_bleu(tokenize='none', smooth_method='exp'); since the
    corpus has matches at every order, smoothing never fires. chrF uses
    sacrebleu's per-sentence statistics and F computation; with two reference
    streams, each sentence keeps the statistics of the reference with the
    higher sentence chrF (ties to the first stream), following the toolkit's
    documented multi-reference convention, and the corpus score applies
    sacrebleu's _avg_precision_and_recall/_chrf to the summed statistics.
  * WER: an independent full-matrix Levenshtein (numpy, Wagner-Fischer),
    structurally unrelated to the package's two-row implementation. Per
    sentence the rate-minimizing reference is kept (ties to the first
    stream); the corpus score is 100 * total edits / total reference length.
  * NIST toy corpus: NLTK's nist_score.py (www.nltk.org), loaded from a local
    copy (pass --nltk-nist-path); single-reference examples so that
    multi-reference conventions cannot diverge.
  * CIDEr-D toy corpus: an independent dense-vector implementation below
    (full-vocabulary numpy vectors, cosine via np.dot), following Vedantam
    et al. 2015 with count clipping and the Gaussian length penalty.

Run once; the resulting values are committed. The test suite never imports
the reference tools.
"""

import argparse
import importlib.util
import json
import math
import random
import sys
import types
from collections import Counter
from pathlib import Path

import numpy as np

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "oracle"

VOCAB_SEED = 7
CORPUS_SEED = 20240817
CORPUS_SIZE = 1000

TOY_NIST = {
    "hypotheses": [
        "the cat sat on the mat",
        "a dog runs in the park",
        "birds sing in the morning",
    ],
    "references": [
        ["the cat sat on the mat"],
        ["the dog ran in the park"],
        ["birds sing early in the morning"],
    ],
}

TOY_CIDER = {
    "hypotheses": [
        "a man rides a brown horse",
        "two dogs play in the sand",
        "a child eats a red apple",
    ],
    "references": [
        ["a man rides a horse", "a person rides a brown horse"],
        ["two dogs play on the beach", "dogs are playing in the sand"],
        ["a child eats an apple", "a young child eats a red apple"],
    ],
}


def load_module(path: Path, name: str):
    spec = importlib.util.spec_from_file_location(name, path)
    module = importlib.util.module_from_spec(spec)
    sys.modules[name] = module
    spec.loader.exec_module(module)
    return module


def load_sacrebleu(path: Path):
    # sacrebleu 1.4.5 imports portalocker (dataset downloads) and MeCab (the
    # ja-mecab tokenizer) at module scope; this script touches neither, so
    # stubs keep the metric code importable offline.
    if "portalocker" not in sys.modules:
        stub = types.ModuleType("portalocker")
        stub.Lock = object
        sys.modules["portalocker"] = stub
    if "MeCab" not in sys.modules:
        class _Dict:
            size = 392126
            next = None

        class _Tagger:
            def __init__(self, *args):
                pass

            def dictionary_info(self):
                return _Dict()

            def parse(self, line):
                return line

        mecab = types.ModuleType("MeCab")
        mecab.Tagger = _Tagger
        sys.modules["MeCab"] = mecab
    return load_module(path, "sacrebleu_oracle")


def load_nltk_nist(path: Path):
    # nist_score.py only needs nltk.util.ngrams; provide it standalone.
    nltk = types.ModuleType("nltk")
    util = types.ModuleType("nltk.util")

    def ngrams(sequence, n):
        sequence = list(sequence)
        return (tuple(sequence[i:i + n]) for i in range(len(sequence) - n + 1))

    util.ngrams = ngrams
    nltk.util = util
    sys.modules["nltk"] = nltk
    sys.modules["nltk.util"] = util
    return load_module(path, "nltk_nist_oracle")


# ---------------------------------------------------------------------------
# Synthetic corpus


def build_corpus():
    rng = random.Random(VOCAB_SEED)
    vocab = sorted({
        "".join(rng.choice("abcdefghijklmnopqrstuvwxyz") for _ in range(rng.randint(3, 9)))
        for _ in range(260)
    })
    rng = random.Random(CORPUS_SEED)
    references_0, references_1, hypotheses = [], [], []
    for _ in range(CORPUS_SIZE):
        length = rng.randint(8, 14)
        base = [rng.choice(vocab) for _ in range(length)]
        ref1 = list(base)
        if rng.random() < 0.5:
            ref1[rng.randrange(length)] = rng.choice(vocab)
        hyp = list(base)
        noise = rng.random()
        if noise < 0.55:
            hyp[rng.randrange(length)] = rng.choice(vocab)
        elif noise < 0.75:
            del hyp[rng.randrange(length)]
        elif noise < 0.9:
            i = rng.randrange(length - 1)
            hyp[i], hyp[i + 1] = hyp[i + 1], hyp[i]
        references_0.append(" ".join(base))
        references_1.append(" ".join(ref1))
        hypotheses.append(" ".join(hyp))
    return hypotheses, references_0, references_1


# ---------------------------------------------------------------------------
# Independent WER


def levenshtein_matrix(hyp, ref) -> int:
    costs = np.zeros((len(hyp) + 1, len(ref) + 1), dtype=np.int64)
    costs[:, 0] = np.arange(len(hyp) + 1)
    costs[0, :] = np.arange(len(ref) + 1)
    for i in range(1, len(hyp) + 1):
        for j in range(1, len(ref) + 1):
            costs[i, j] = min(
                costs[i - 1, j] + 1,
                costs[i, j - 1] + 1,
                costs[i - 1, j - 1] + (hyp[i - 1] != ref[j - 1]),
            )
    return int(costs[-1, -1])


def oracle_wer(hypotheses, reference_streams) -> float:
    total_edits = 0
    total_ref = 0
    for i, hyp in enumerate(hypotheses):
        hyp_tokens = hyp.split()
        best = None
        for stream in reference_streams:
            ref_tokens = stream[i].split()
            if not ref_tokens:
                continue
            edits = levenshtein_matrix(hyp_tokens, ref_tokens)
            rate = edits / len(ref_tokens)
            if best is None or rate < best[0]:
                best = (rate, edits, len(ref_tokens))
        total_edits += best[1]
        total_ref += best[2]
    return 100.0 * total_edits / total_ref


# ---------------------------------------------------------------------------
# chrF via sacrebleu kernels


def oracle_chrf(sacrebleu, hypotheses, reference_streams) -> float:
    order = 6
    totals = [0.0] * (order * 3)
    for i, hyp in enumerate(hypotheses):
        best = None
        for stream in reference_streams:
            stats = sacrebleu.get_sentence_statistics(hyp, stream[i], order=order)
            prec, rec = sacrebleu._avg_precision_and_recall(stats, order)
            score = sacrebleu._chrf(prec, rec)
            if best is None or score > best[0]:
                best = (score, stats)
        for j, value in enumerate(best[1]):
            totals[j] += value
    prec, rec = sacrebleu._avg_precision_and_recall(totals, order)
    return 100.0 * sacrebleu._chrf(prec, rec)


# ---------------------------------------------------------------------------
# CIDEr-D via dense vocabulary vectors


def dense_cider_d(hypotheses, references, max_order=4, sigma=6.0):
    def grams_of(sentence, order):
        tokens = sentence.split()
        return [tuple(tokens[k:k + order]) for k in range(len(tokens) - order + 1)]

    n_docs = len(references)
    max_idf = math.log(n_docs)
    vocab, index, idf = {}, {}, {}
    for order in range(1, max_order + 1):
        df = Counter()
        for refs in references:
            seen = set()
            for ref in refs:
                seen.update(grams_of(ref, order))
            df.update(seen)
        vocab[order] = sorted(df)
        index[order] = {gram: k for k, gram in enumerate(vocab[order])}
        idf[order] = np.array([math.log(n_docs / df[gram]) for gram in vocab[order]])

    def vector(sentence, order):
        # Dense tf-idf vector over the reference vocabulary; n-grams unseen in
        # every reference take the maximum idf and only widen the norm (they
        # cannot match any reference n-gram).
        vec = np.zeros(len(vocab[order]))
        unseen = Counter()
        for gram in grams_of(sentence, order):
            if gram in index[order]:
                vec[index[order][gram]] += 1.0
            else:
                unseen[gram] += 1
        vec = vec * idf[order]
        norm_sq = float(np.dot(vec, vec))
        norm_sq += sum((count * max_idf) ** 2 for count in unseen.values())
        return vec, math.sqrt(norm_sq), len(sentence.split())

    scores = []
    for hyp, refs in zip(hypotheses, references):
        per_order = np.zeros(max_order)
        for order in range(1, max_order + 1):
            hyp_vec, hyp_norm, hyp_len = vector(hyp, order)
            for ref in refs:
                ref_vec, ref_norm, ref_len = vector(ref, order)
                value = float(np.dot(np.minimum(hyp_vec, ref_vec), ref_vec))
                if hyp_norm > 0 and ref_norm > 0:
                    value /= hyp_norm * ref_norm
                else:
                    value = 0.0
                delta = float(hyp_len - ref_len)
                value *= math.exp(-(delta ** 2) / (2 * sigma ** 2))
                per_order[order - 1] += value
        scores.append(10.0 * float(np.mean(per_order / len(refs))))
    return float(np.mean(scores)), scores


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sacrebleu-path", required=True, type=Path,
                        help="path to the sacrebleu 1.4.5 single-file source")
    parser.add_argument("--nltk-nist-path", required=True, type=Path,
                        help="path to NLTK's nist_score.py")
    args = parser.parse_args()

    sacrebleu = load_sacrebleu(args.sacrebleu_path)
    nltk_nist = load_nltk_nist(args.nltk_nist_path)

    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    hypotheses, refs_0, refs_1 = build_corpus()
    (FIXTURE_DIR / "hypotheses.txt").write_text("\n".join(hypotheses) + "\n")
    (FIXTURE_DIR / "reference_0.txt").write_text("\n".join(refs_0) + "\n")
    (FIXTURE_DIR / "reference_1.txt").write_text("\n".join(refs_1) + "\n")

    bleu = sacrebleu.corpus_bleu(
        hypotheses, [refs_0, refs_1], tokenize="none", smooth_method="exp")
    chrf = oracle_chrf(sacrebleu, hypotheses, [refs_0, refs_1])
    wer = oracle_wer(hypotheses, [refs_0, refs_1])

    nist_refs = [[r.split() for r in refs] for refs in TOY_NIST["references"]]
    nist_hyps = [h.split() for h in TOY_NIST["hypotheses"]]
    nist_corpus = nltk_nist.corpus_nist(nist_refs, nist_hyps, n=5)
    nist_sentences = [
        nltk_nist.sentence_nist(refs, hyp, n=5)
        for refs, hyp in zip(nist_refs, nist_hyps)
    ]

    cider_corpus, cider_sentences = dense_cider_d(
        TOY_CIDER["hypotheses"], TOY_CIDER["references"])

    expected = {
        "provenance": {
            "bleu": "sacrebleu 1.4.5 corpus_bleu, tokenize='none', smooth_method='exp' "
                    "(smoothing inert: all orders have matches), two reference streams",
            "chrf": "sacrebleu 1.4.5 chrF kernels (order=6, beta=2, whitespace removed); "
                    "per-sentence best reference by sentence chrF, corpus F over summed stats",
            "wer": "independent full-matrix Wagner-Fischer Levenshtein (numpy); "
                   "per-sentence rate-minimizing reference; corpus = 100*edits/ref_len",
            "nist_toy": "NLTK nist_score.py corpus_nist/sentence_nist, n=5, "
                        "single-reference examples",
            "cider_toy": "independent dense-vocabulary CIDEr-D (numpy dot products), "
                         "n=1..4, sigma=6, count clipping, Gaussian length penalty",
            "generator": "scripts/generate_oracle_fixture.py (seeds 7/20240817)",
        },
        "corpus": {
            "size": CORPUS_SIZE,
            "bleu": bleu.score,
            "chrf": chrf,
            "wer": wer,
        },
        "nist_toy": {
            "hypotheses": TOY_NIST["hypotheses"],
            "references": TOY_NIST["references"],
            "corpus_score": nist_corpus,
            "sentence_scores": nist_sentences,
        },
        "cider_toy": {
            "hypotheses": TOY_CIDER["hypotheses"],
            "references": TOY_CIDER["references"],
            "corpus_score": cider_corpus,
            "sentence_scores": cider_sentences,
        },
    }
    (FIXTURE_DIR / "expected.json").write_text(json.dumps(expected, indent=2) + "\n")
    print(f"BLEU  {bleu.score:.4f}")
    print(f"chrF  {chrf:.4f}")
    print(f"WER   {wer:.4f}")
    print(f"NIST  {nist_corpus:.4f}  sentences {['%.4f' % s for s in nist_sentences]}")
    print(f"CIDEr {cider_corpus:.4f}  sentences {['%.4f' % s for s in cider_sentences]}")
    print(f"written to {FIXTURE_DIR}")


if __name__ == "__main__":
    main()
