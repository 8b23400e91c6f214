import random

import pytest

from seqeval.errors import ScoringInputError
from seqeval.text import (
    TokenizerConfig,
    char_ngrams,
    clipped_matches,
    token_texts,
    tokenize,
    word_ngrams,
)


@pytest.mark.parametrize("sentence, expected", [
    ("the cat sat", ["the", "cat", "sat"]),
    ("  a \t b ", ["a", "b"]),
    ("", []),
])
def test_tokenize_whitespace(sentence, expected):
    assert token_texts(sentence) == expected


def test_tokenize_spans_cover_tokens():
    tokens = tokenize("  the cat  sat ")
    assert [t.text for t in tokens] == ["the", "cat", "sat"]
    normalized = "  the cat  sat "
    for token in tokens:
        start, end = token.span
        assert normalized[start:end] == token.text
    spans = [t.span for t in tokens]
    assert spans == sorted(spans)
    assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))


def test_tokenize_rejoin_reproduces_normalized_sentence():
    rng = random.Random(3)
    for _ in range(50):
        words = ["w%d" % rng.randint(0, 30) for _ in range(rng.randint(0, 8))]
        sentence = "  ".join(words) + " "
        assert " ".join(token_texts(sentence)) == " ".join(words)


def test_tokenize_punct_split():
    cfg = TokenizerConfig(scheme="whitespace_punct")
    assert token_texts("hello, world!", cfg) == ["hello", ",", "world", "!"]
    assert token_texts("a.b", cfg) == ["a", ".", "b"]


def test_tokenize_char_scheme():
    cfg = TokenizerConfig(scheme="char")
    assert token_texts("ab c", cfg) == ["a", "b", "c"]


def test_tokenize_lowercase():
    cfg = TokenizerConfig(lowercase=True)
    assert token_texts("The CAT", cfg) == ["the", "cat"]


def test_tokenizer_config_parse_and_key():
    cfg = TokenizerConfig.parse("whitespace_punct+lower")
    assert cfg == TokenizerConfig("whitespace_punct", lowercase=True)
    assert TokenizerConfig.parse(cfg.key()) == cfg
    with pytest.raises(ValueError):
        TokenizerConfig.parse("whitespace+bogus")
    with pytest.raises(ValueError):
        TokenizerConfig(scheme="bogus")


def test_tokenize_nfc_normalization():
    # e + combining acute composes to a single character
    decomposed = "café"
    tokens = tokenize(decomposed)
    assert tokens[0].text == "café"


@pytest.mark.parametrize("tokens, n, expected", [
    (["a", "b", "a"], 1, {("a",): 2, ("b",): 1}),
    (["a", "b", "a"], 2, {("a", "b"): 1, ("b", "a"): 1}),
    (["a"], 2, {}),
])
def test_word_ngrams(tokens, n, expected):
    assert dict(word_ngrams(tokens, n).counts) == expected


def test_word_ngram_total_invariant():
    rng = random.Random(11)
    for _ in range(50):
        tokens = ["t%d" % rng.randint(0, 5) for _ in range(rng.randint(0, 10))]
        for n in range(1, 5):
            assert word_ngrams(tokens, n).total() == max(0, len(tokens) - n + 1)


@pytest.mark.parametrize("sentence, n, strip, expected", [
    ("ab a", 2, True, {"ab": 1, "ba": 1}),
    ("aaa", 1, True, {"a": 3}),
    ("", 3, True, {}),
    ("a b", 2, False, {"a ": 1, " b": 1}),
])
def test_char_ngrams(sentence, n, strip, expected):
    assert dict(char_ngrams(sentence, n, strip).counts) == expected


def test_clipped_matches_hand_case():
    hyp = word_ngrams(["the"] * 4, 1)
    ref = word_ngrams(["the", "cat", "the"], 1)
    assert clipped_matches(hyp, [ref]) == 2


def test_clipped_matches_identity_and_disjoint():
    hyp = word_ngrams(["a", "b", "a"], 1)
    assert clipped_matches(hyp, [hyp]) == hyp.total()
    other = word_ngrams(["x", "y"], 1)
    assert clipped_matches(hyp, [other]) == 0


def test_clipped_matches_order_mismatch():
    with pytest.raises(ScoringInputError):
        clipped_matches(word_ngrams(["a"], 1), [word_ngrams(["a", "b"], 2)])


def test_clipped_matches_monotone_in_references():
    rng = random.Random(4)
    for _ in range(30):
        hyp = word_ngrams([rng.choice("abc") for _ in range(6)], 1)
        refs = [word_ngrams([rng.choice("abc") for _ in range(5)], 1)
                for _ in range(3)]
        previous = 0
        for k in range(1, 4):
            current = clipped_matches(hyp, refs[:k])
            assert current >= previous
            previous = current
