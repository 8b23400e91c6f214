"""Tokenization and n-gram extraction, the shared substrate of all metrics."""

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple, Union

from .errors import ScoringInputError

TOKENIZER_SCHEMES = ("whitespace", "whitespace_punct", "char")


@dataclass(frozen=True)
class TokenizerConfig:
    """How sentences are split into tokens before word-level scoring.

    ``scheme`` is one of ``whitespace`` (Unicode-whitespace split after NFC
    normalization), ``whitespace_punct`` (additionally separates Unicode
    punctuation into standalone tokens) or ``char`` (one token per
    non-whitespace character). ``lowercase`` folds case before splitting.
    """

    scheme: str = "whitespace"
    lowercase: bool = False

    def __post_init__(self):
        if self.scheme not in TOKENIZER_SCHEMES:
            raise ValueError(f"unknown tokenizer scheme: {self.scheme!r}")

    def key(self) -> str:
        """Canonical string form, used in cache keys and config files."""
        return self.scheme + ("+lower" if self.lowercase else "")

    @classmethod
    def parse(cls, spec: str) -> "TokenizerConfig":
        """Parse the compact form, e.g. ``whitespace_punct+lower``."""
        parts = spec.strip().split("+")
        scheme = parts[0] or "whitespace"
        flags = set(parts[1:])
        lowercase = "lower" in flags
        flags.discard("lower")
        if flags:
            raise ValueError(f"unknown tokenizer flags: {sorted(flags)}")
        return cls(scheme=scheme, lowercase=lowercase)

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "lowercase": self.lowercase}

    @classmethod
    def from_dict(cls, d: dict) -> "TokenizerConfig":
        return cls(scheme=d.get("scheme", "whitespace"), lowercase=bool(d.get("lowercase", False)))


DEFAULT_TOKENIZER = TokenizerConfig()


@dataclass(frozen=True)
class Token:
    """One token plus its character span in the normalized sentence."""

    text: str
    span: Tuple[int, int]


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(sentence: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> List[Token]:
    """Split a sentence into tokens with spans, deterministically.

    The sentence is NFC-normalized (and optionally lowercased) first; spans
    index into that normalized string. Joining token texts with single spaces
    under the default scheme reproduces the whitespace-normalized sentence.
    """
    normalized = unicodedata.normalize("NFC", sentence)
    if config.lowercase:
        normalized = normalized.lower()
    tokens: List[Token] = []
    if config.scheme == "char":
        for i, ch in enumerate(normalized):
            if not ch.isspace():
                tokens.append(Token(ch, (i, i + 1)))
        return tokens

    split_punct = config.scheme == "whitespace_punct"
    start = None
    for i, ch in enumerate(normalized):
        if ch.isspace():
            if start is not None:
                tokens.append(Token(normalized[start:i], (start, i)))
                start = None
        elif split_punct and _is_punct(ch):
            if start is not None:
                tokens.append(Token(normalized[start:i], (start, i)))
                start = None
            tokens.append(Token(ch, (i, i + 1)))
        else:
            if start is None:
                start = i
    if start is not None:
        tokens.append(Token(normalized[start:], (start, len(normalized))))
    return tokens


def token_texts(sentence: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> List[str]:
    """Tokenize and keep only the token strings."""
    return [t.text for t in tokenize(sentence, config)]


NGram = Union[Tuple[str, ...], str]


@dataclass
class NGramProfile:
    """Multiset of n-grams of one order.

    Word n-grams are keyed by token tuples, character n-grams by substrings.
    """

    order: int
    counts: Counter = field(default_factory=Counter)

    def total(self) -> int:
        return sum(self.counts.values())


def _texts(tokens: Sequence[Union[Token, str]]) -> List[str]:
    return [t.text if isinstance(t, Token) else t for t in tokens]


def word_ngrams(tokens: Sequence[Union[Token, str]], n: int) -> NGramProfile:
    """Count all contiguous n-token windows."""
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    texts = _texts(tokens)
    counts = Counter(tuple(texts[i:i + n]) for i in range(len(texts) - n + 1))
    return NGramProfile(order=n, counts=counts)


def char_ngrams(sentence: str, n: int, strip_whitespace: bool = True) -> NGramProfile:
    """Count all character n-grams, optionally after removing whitespace."""
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    if strip_whitespace:
        sentence = "".join(ch for ch in sentence if not ch.isspace())
    counts = Counter(sentence[i:i + n] for i in range(len(sentence) - n + 1))
    return NGramProfile(order=n, counts=counts)


def clipped_matches(hyp: NGramProfile, refs: Iterable[NGramProfile]) -> int:
    """Clipped match count: sum over n-grams of min(hyp count, max ref count).

    Each hypothesis n-gram is credited at most the largest number of times it
    occurs in any single reference.
    """
    ceilings: Counter = Counter()
    for ref in refs:
        if ref.order != hyp.order:
            raise ScoringInputError(
                f"n-gram order mismatch: hypothesis order {hyp.order}, reference order {ref.order}"
            )
        for gram, count in ref.counts.items():
            if count > ceilings[gram]:
                ceilings[gram] = count
    return sum(min(count, ceilings[gram]) for gram, count in hyp.counts.items())
