"""Edit-distance metrics: word error rate and translation edit rate."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ..errors import UndefinedReferenceError
from ..text import token_texts
from .base import Scorer, Stats

TER_MAX_SHIFT_SPAN = 10
TER_MAX_SHIFTS = 50


@dataclass(frozen=True)
class EditSummary:
    substitutions: int
    insertions: int
    deletions: int
    shifts: int
    ref_len: int

    @property
    def edits(self) -> int:
        return self.substitutions + self.insertions + self.deletions + self.shifts


def levenshtein(a: Sequence[str], b: Sequence[str]) -> int:
    """Unit-cost edit distance between two token sequences."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, tok_b in enumerate(b, start=1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (tok_a != tok_b),
            )
        previous = current
    return previous[-1]


def align_edits(hyp: Sequence[str], ref: Sequence[str]) -> Tuple[int, int, int]:
    """(substitutions, insertions, deletions) from one optimal alignment.

    Insertions are hypothesis tokens with no reference counterpart, deletions
    are reference tokens missing from the hypothesis. Backtrace prefers
    diagonal moves, then deletion, for a deterministic decomposition.
    """
    rows = len(hyp) + 1
    cols = len(ref) + 1
    dp = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        dp[i][0] = i
    for j in range(cols):
        dp[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            dp[i][j] = min(
                dp[i - 1][j] + 1,
                dp[i][j - 1] + 1,
                dp[i - 1][j - 1] + (hyp[i - 1] != ref[j - 1]),
            )
    subs = ins = dels = 0
    i, j = len(hyp), len(ref)
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + (hyp[i - 1] != ref[j - 1]):
            if hyp[i - 1] != ref[j - 1]:
                subs += 1
            i -= 1
            j -= 1
        elif j > 0 and dp[i][j] == dp[i][j - 1] + 1:
            dels += 1
            j -= 1
        else:
            ins += 1
            i -= 1
    return subs, ins, dels


def _usable_refs(refs_tokens: Sequence[Sequence[str]], metric: str) -> List[Sequence[str]]:
    usable = [r for r in refs_tokens if len(r) > 0]
    if not usable:
        raise UndefinedReferenceError(
            f"{metric}: every reference is empty after tokenization")
    return usable


def wer(hyp_tokens: Sequence[str],
        refs_tokens: Sequence[Sequence[str]]) -> Tuple[float, EditSummary]:
    """100 * edits / |ref| against the rate-minimizing reference."""
    best: Optional[Tuple[float, EditSummary]] = None
    for ref in _usable_refs(refs_tokens, "wer"):
        subs, ins, dels = align_edits(hyp_tokens, ref)
        summary = EditSummary(subs, ins, dels, 0, len(ref))
        rate = 100.0 * summary.edits / summary.ref_len
        if best is None or rate < best[0]:
            best = (rate, summary)
    assert best is not None
    return best


def _matching_shift_candidates(hyp: List[str], ref: Sequence[str]):
    """(src, dst, length) triples where hyp[src:src+length] == ref[dst:dst+length]."""
    ref_len = len(ref)
    for src in range(len(hyp)):
        for dst in range(ref_len):
            if src == dst or hyp[src] != ref[dst]:
                continue
            max_len = min(TER_MAX_SHIFT_SPAN, len(hyp) - src, ref_len - dst)
            for length in range(1, max_len + 1):
                if hyp[src + length - 1] != ref[dst + length - 1]:
                    break
                yield src, dst, length


def _apply_shift(hyp: List[str], src: int, dst: int, length: int) -> List[str]:
    span = hyp[src:src + length]
    remainder = hyp[:src] + hyp[src + length:]
    return remainder[:dst] + span + remainder[dst:]


def ter_against(hyp_tokens: Sequence[str],
                ref_tokens: Sequence[str]) -> Tuple[int, int, List[str]]:
    """(shifts, remaining edit distance, shifted hypothesis) after greedy shifts.

    Each round applies the block move that most reduces the edit distance,
    provided it more than pays for its own unit cost; candidate spans are
    capped at TER_MAX_SHIFT_SPAN tokens and must match the reference at the
    landing position.
    """
    current = list(hyp_tokens)
    distance = levenshtein(current, ref_tokens)
    shifts = 0
    while shifts < TER_MAX_SHIFTS and distance > 1:
        best = None  # (gain, src, dst, length, shifted, new_distance)
        for src, dst, length in _matching_shift_candidates(current, ref_tokens):
            shifted = _apply_shift(current, src, dst, length)
            new_distance = levenshtein(shifted, ref_tokens)
            gain = distance - new_distance
            if gain >= 2:
                key = (-gain, src, dst, -length)
                if best is None or key < best[0]:
                    best = (key, shifted, new_distance)
        if best is None:
            break
        current = best[1]
        distance = best[2]
        shifts += 1
    return shifts, distance, current


def ter(hyp_tokens: Sequence[str],
        refs_tokens: Sequence[Sequence[str]]) -> Tuple[float, EditSummary]:
    """100 * (edits + shifts) / |ref| against the rate-minimizing reference."""
    best: Optional[Tuple[float, EditSummary]] = None
    for ref in _usable_refs(refs_tokens, "ter"):
        shifts, _, shifted = ter_against(hyp_tokens, ref)
        subs, ins, dels = align_edits(shifted, ref)
        summary = EditSummary(subs, ins, dels, shifts, len(ref))
        rate = 100.0 * summary.edits / summary.ref_len
        if best is None or rate < best[0]:
            best = (rate, summary)
    assert best is not None
    return best


class _EditScorer(Scorer):
    scale = (0.0, None)

    def _summarize(self, hyp_tokens, refs_tokens) -> Tuple[float, EditSummary]:
        raise NotImplementedError

    def sentence(self, hypothesis, references, tokenizer, ctx):
        score, summary = self._summarize(
            token_texts(hypothesis, tokenizer),
            [token_texts(r, tokenizer) for r in references])
        return (summary.edits, summary.ref_len), score

    def finalize(self, acc, count):
        if acc is None or acc[1] == 0:
            return 0.0
        return 100.0 * acc[0] / acc[1]


class WerScorer(_EditScorer):
    name = "wer"

    def _summarize(self, hyp_tokens, refs_tokens):
        return wer(hyp_tokens, refs_tokens)


class TerScorer(_EditScorer):
    name = "ter"

    def _summarize(self, hyp_tokens, refs_tokens):
        return ter(hyp_tokens, refs_tokens)
