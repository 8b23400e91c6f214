"""Machine-generated sentence tags: length, rare words, scripts, code-switching."""

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional

import numpy as np

from .corpus import EvalSet, TagOrigin, TagSet
from .text import DEFAULT_TOKENIZER, TokenizerConfig, token_texts

ALL_TAGGERS = frozenset({"length", "rare_words", "script"})


@dataclass(frozen=True)
class TaggerConfig:
    long_sentence_percentile: float = 90.0
    rare_word_max_count: int = 1
    script_min_fraction: float = 0.8
    enabled_taggers: frozenset = ALL_TAGGERS

    def __post_init__(self):
        if not 50.0 < self.long_sentence_percentile < 100.0:
            raise ValueError("long_sentence_percentile must lie in (50, 100)")
        if self.rare_word_max_count < 1:
            raise ValueError("rare_word_max_count must be >= 1")
        unknown = set(self.enabled_taggers) - ALL_TAGGERS
        if unknown:
            raise ValueError(f"unknown taggers: {sorted(unknown)}")

    def to_dict(self) -> dict:
        return {
            "long_sentence_percentile": self.long_sentence_percentile,
            "rare_word_max_count": self.rare_word_max_count,
            "script_min_fraction": self.script_min_fraction,
            "enabled_taggers": sorted(self.enabled_taggers),
        }


def _source_tokens(eval_set: EvalSet, tokenizer: TokenizerConfig) -> Optional[List[List[str]]]:
    stream = eval_set.primary_text_source()
    if stream is None:
        return None
    return [token_texts(text, tokenizer) for text in stream.items]


def tag_long_sentences(eval_set: EvalSet, cfg: TaggerConfig,
                       tokenizer: TokenizerConfig = DEFAULT_TOKENIZER) -> TagSet:
    """Examples whose source length exceeds the configured percentile."""
    tokens = _source_tokens(eval_set, tokenizer)
    members = frozenset()
    if tokens:
        lengths = [len(t) for t in tokens]
        threshold = float(np.percentile(lengths, cfg.long_sentence_percentile))
        members = frozenset(i for i, n in enumerate(lengths) if n > threshold)
    return TagSet("long", TagOrigin.MACHINE, members)


def tag_rare_words(eval_set: EvalSet, cfg: TaggerConfig,
                   tokenizer: TokenizerConfig = DEFAULT_TOKENIZER) -> TagSet:
    """Examples containing a token whose corpus frequency is at most the cutoff."""
    tokens = _source_tokens(eval_set, tokenizer)
    members = frozenset()
    if tokens:
        frequency = Counter(tok for sent in tokens for tok in sent)
        members = frozenset(
            i for i, sent in enumerate(tokens)
            if any(frequency[tok] <= cfg.rare_word_max_count for tok in sent))
    return TagSet("rare_words", TagOrigin.MACHINE, members)


@lru_cache(maxsize=8192)
def letter_script(ch: str) -> Optional[str]:
    """Writing-script label of a letter, from its Unicode name."""
    if not ch.isalpha():
        return None
    try:
        name = unicodedata.name(ch)
    except ValueError:
        return None
    first = name.split(" ", 1)[0]
    if first == "CJK":
        return "han"
    return first.lower()


def _script_labels(text: str, min_fraction: float) -> List[str]:
    histogram: Counter = Counter()
    for ch in text:
        script = letter_script(ch)
        if script:
            histogram[script] += 1
    total = sum(histogram.values())
    if total == 0:
        return []
    labels = []
    top_script, top_count = max(histogram.items(), key=lambda kv: (kv[1], kv[0]))
    if top_count / total >= min_fraction:
        labels.append(f"lang:{top_script}")
    mixed = sum(1 for count in histogram.values() if count / total > 1.0 - min_fraction)
    if mixed >= 2:
        labels.append("code_switching")
    return labels


def tag_scripts(eval_set: EvalSet, cfg: TaggerConfig,
                tokenizer: TokenizerConfig = DEFAULT_TOKENIZER) -> List[TagSet]:
    """Per-example script identification plus a code-switching tag."""
    stream = eval_set.primary_text_source()
    if stream is None:
        return []
    members: Dict[str, set] = {}
    for i, text in enumerate(stream.items):
        for label in _script_labels(text, cfg.script_min_fraction):
            members.setdefault(label, set()).add(i)
    return [
        TagSet(name, TagOrigin.MACHINE, frozenset(indices))
        for name, indices in sorted(members.items())
    ]


def run_taggers(eval_set: EvalSet, cfg: TaggerConfig = TaggerConfig(),
                tokenizer: TokenizerConfig = DEFAULT_TOKENIZER) -> Dict[str, List[TagSet]]:
    """All enabled machine taggers, keyed by tag-file group name.

    Deterministic and idempotent; media-only sets produce no machine tags.
    """
    if eval_set.primary_text_source() is None:
        return {}
    out: Dict[str, List[TagSet]] = {}
    if "length" in cfg.enabled_taggers:
        out["length"] = [tag_long_sentences(eval_set, cfg, tokenizer)]
    if "rare_words" in cfg.enabled_taggers:
        out["rare_words"] = [tag_rare_words(eval_set, cfg, tokenizer)]
    if "script" in cfg.enabled_taggers:
        out["script"] = tag_scripts(eval_set, cfg, tokenizer)
    return out
