"""Corpus statistics, n-gram tables, highlighting, group scores and exports."""

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .corpus import EvalSet, all_references
from .scoring import (
    ScoreReport,
    calculate_score_detailed,
    get_scorer,
    reduce_subset,
    scorer_scale,
)
from .scoring.base import Scorer
from .text import DEFAULT_TOKENIZER, TokenizerConfig, token_texts, word_ngrams

MIN_HISTOGRAM_BINS = 10
MAX_HISTOGRAM_BINS = 50


# ---------------------------------------------------------------------------
# Dataset statistics


@dataclass
class Histogram:
    bin_edges: List[float]
    counts: List[int]

    def to_dict(self) -> dict:
        return {"bin_edges": self.bin_edges, "counts": self.counts}


@dataclass
class StreamStats:
    stream: str
    kind: str  # "source" | "reference"
    sentence_count: int
    token_count: int
    char_count: int
    length_histogram: Histogram
    token_frequency: List[Tuple[str, int]]

    def to_dict(self) -> dict:
        return {
            "stream": self.stream,
            "kind": self.kind,
            "sentence_count": self.sentence_count,
            "token_count": self.token_count,
            "char_count": self.char_count,
            "length_histogram": self.length_histogram.to_dict(),
            "token_frequency": [list(t) for t in self.token_frequency],
        }


@dataclass
class DatasetStats:
    streams: List[StreamStats]

    def to_dict(self) -> dict:
        return {"streams": [s.to_dict() for s in self.streams]}


def sturges_bins(n: int) -> int:
    """Bin count by Sturges' rule, clamped to a usable range."""
    if n <= 0:
        return MIN_HISTOGRAM_BINS
    bins = math.ceil(math.log2(n)) + 1
    return max(MIN_HISTOGRAM_BINS, min(MAX_HISTOGRAM_BINS, bins))


def build_histogram(values: Sequence[float], bins: Optional[int] = None) -> Histogram:
    """Equal-width histogram; the last bin includes its upper edge."""
    values = list(values)
    if not values:
        return Histogram(bin_edges=[], counts=[])
    if bins is None:
        bins = sturges_bins(len(values))
    lo, hi = min(values), max(values)
    if hi == lo:
        return Histogram(bin_edges=[float(lo), float(hi)], counts=[len(values)])
    width = (hi - lo) / bins
    edges = [lo + i * width for i in range(bins + 1)]
    counts = [0] * bins
    for v in values:
        idx = min(int((v - lo) / width), bins - 1)
        counts[idx] += 1
    return Histogram(bin_edges=[float(e) for e in edges], counts=counts)


def _text_stream_stats(name: str, kind: str, items: Sequence[Optional[str]],
                       tokenizer: TokenizerConfig) -> StreamStats:
    texts = [t for t in items if t is not None]
    token_lists = [token_texts(t, tokenizer) for t in texts]
    frequency = Counter(tok for toks in token_lists for tok in toks)
    ranked = sorted(frequency.items(), key=lambda kv: (-kv[1], kv[0]))
    return StreamStats(
        stream=name,
        kind=kind,
        sentence_count=len(texts),
        token_count=sum(len(t) for t in token_lists),
        char_count=sum(sum(1 for ch in t if not ch.isspace()) for t in texts),
        length_histogram=build_histogram([len(t) for t in token_lists]),
        token_frequency=ranked,
    )


def compute_stats(eval_set: EvalSet,
                  tokenizer: TokenizerConfig = DEFAULT_TOKENIZER) -> DatasetStats:
    """Sentence/token/character counts per text stream; media streams are skipped."""
    streams: List[StreamStats] = []
    for source in eval_set.sources:
        if source.is_text():
            streams.append(_text_stream_stats(source.name, "source", source.items, tokenizer))
    for ref in eval_set.references:
        streams.append(_text_stream_stats(ref.name, "reference", ref.items, tokenizer))
    return DatasetStats(streams=streams)


# ---------------------------------------------------------------------------
# Frequent n-grams


@dataclass
class NGramEntry:
    ngram: str
    count: int
    examples: List[int]

    def to_dict(self) -> dict:
        return {"ngram": self.ngram, "count": self.count, "examples": self.examples}


@dataclass
class NGramTable:
    orders: Dict[int, List[NGramEntry]]

    def to_dict(self) -> dict:
        return {str(n): [e.to_dict() for e in entries]
                for n, entries in self.orders.items()}


def _analysis_texts(eval_set: EvalSet) -> Sequence[str]:
    """First text source, falling back to the first reference stream."""
    stream = eval_set.primary_text_source()
    if stream is not None:
        return stream.items
    if eval_set.references:
        return [item or "" for item in eval_set.references[0].items]
    return []


def top_ngrams(eval_set: EvalSet, n: int, k: int,
               tokenizer: TokenizerConfig = DEFAULT_TOKENIZER) -> List[NGramEntry]:
    """Most frequent order-n n-grams with their example indices.

    Ordered by count descending, ties broken lexicographically.
    """
    if not 1 <= n <= 4:
        raise ValueError(f"n must lie in 1..4, got {n}")
    counts: Counter = Counter()
    examples: Dict[tuple, set] = {}
    for index, text in enumerate(_analysis_texts(eval_set)):
        profile = word_ngrams(token_texts(text, tokenizer), n)
        counts.update(profile.counts)
        for gram in profile.counts:
            examples.setdefault(gram, set()).add(index)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return [
        NGramEntry(" ".join(gram), count, sorted(examples[gram]))
        for gram, count in ranked
    ]


def ngram_table(eval_set: EvalSet, k: int,
                tokenizer: TokenizerConfig = DEFAULT_TOKENIZER) -> NGramTable:
    return NGramTable(orders={
        n: top_ngrams(eval_set, n, k, tokenizer) for n in (1, 2, 3, 4)
    })


# ---------------------------------------------------------------------------
# Match highlighting


@dataclass(frozen=True)
class HighlightSpan:
    start: int
    end: int
    matched: bool

    def to_dict(self) -> dict:
        return {"start": self.start, "end": self.end, "matched": self.matched}


def highlight(prediction_tokens: Sequence[str],
              refs_tokens: Sequence[Sequence[str]],
              max_n: int = 4) -> List[HighlightSpan]:
    """Greedy left-to-right longest-match span segmentation of a prediction.

    At each position the longest prediction n-gram (up to ``max_n``) present
    in any reference is taken as matched; runs with the same flag coalesce.
    The spans partition the prediction's token range exactly.
    """
    ref_grams = set()
    for ref in refs_tokens:
        for n in range(1, max_n + 1):
            ref_grams.update(word_ngrams(ref, n).counts)
    flags: List[bool] = []
    i = 0
    total = len(prediction_tokens)
    while i < total:
        taken = 0
        for n in range(min(max_n, total - i), 0, -1):
            if tuple(prediction_tokens[i:i + n]) in ref_grams:
                taken = n
                break
        if taken:
            flags.extend([True] * taken)
            i += taken
        else:
            flags.append(False)
            i += 1
    spans: List[HighlightSpan] = []
    for pos, flag in enumerate(flags):
        if spans and spans[-1].matched == flag:
            spans[-1] = HighlightSpan(spans[-1].start, pos + 1, flag)
        else:
            spans.append(HighlightSpan(pos, pos + 1, flag))
    return spans


# ---------------------------------------------------------------------------
# Score distributions


def score_distribution(report: ScoreReport, bins: int = 20) -> Histogram:
    """Sentence-score histogram over the metric's reported scale."""
    lo, hi = scorer_scale(report.scorer)
    observed_max = max(report.sentence_scores) if report.sentence_scores else 0.0
    hi = observed_max if hi is None else max(hi, observed_max)
    if hi <= lo:
        hi = lo + 1.0
    width = (hi - lo) / bins
    counts = [0] * bins
    for score in report.sentence_scores:
        idx = min(int((score - lo) / width), bins - 1)
        counts[idx] += 1
    edges = [lo + i * width for i in range(bins + 1)]
    return Histogram(bin_edges=edges, counts=counts)


# ---------------------------------------------------------------------------
# Group-level scores


@dataclass
class GroupCell:
    model: str
    score: float
    best: bool = False
    worst: bool = False

    def to_dict(self) -> dict:
        return {"model": self.model, "score": self.score,
                "best": self.best, "worst": self.worst}


@dataclass
class GroupRow:
    group: str
    metric: str
    example_count: int
    cells: List[GroupCell]

    def to_dict(self) -> dict:
        return {"group": self.group, "metric": self.metric,
                "example_count": self.example_count,
                "cells": [c.to_dict() for c in self.cells]}


@dataclass
class GroupScores:
    metrics: List[str]
    models: List[str]
    rows: List[GroupRow]
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"metrics": self.metrics, "models": self.models,
                "rows": [r.to_dict() for r in self.rows], "notes": self.notes}


def _mark_best_worst(cells: List[GroupCell]) -> None:
    if not cells:
        return
    best = max(c.score for c in cells)
    worst = min(c.score for c in cells)
    for cell in cells:
        cell.best = cell.score == best
        cell.worst = cell.score == worst


def group_scores(eval_set: EvalSet,
                 metrics: Sequence[str],
                 models: Optional[Sequence[str]] = None,
                 tags: Optional[Sequence[str]] = None,
                 workers: int = 1,
                 tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
                 detailed_results: Optional[Dict[Tuple[str, str], "object"]] = None,
                 ) -> GroupScores:
    """Corpus-level scores for ALL plus each requested tag group.

    Group scores re-aggregate each metric's sufficient statistics over the
    subset rather than averaging sentence scores. Empty tag groups are
    omitted, with a note. ``detailed_results`` optionally supplies
    precomputed DetailedResult values keyed by (metric, model).
    """
    model_names = list(models) if models is not None else eval_set.model_names()
    references = all_references(eval_set)
    notes: List[str] = []

    details = {}
    for metric in metrics:
        for model in model_names:
            key = (metric, model)
            if detailed_results is not None and key in detailed_results:
                details[key] = detailed_results[key]
            else:
                details[key] = calculate_score_detailed(
                    metric, list(eval_set.model(model).items), references,
                    workers=workers, tokenizer=tokenizer,
                    ref_format="per_example")

    groups: List[Tuple[str, Optional[List[int]]]] = [("ALL", None)]
    for tag_name in tags or []:
        members = sorted(eval_set.tag_members(tag_name))
        if not members:
            notes.append(f"tag {tag_name!r} has no examples; omitted")
            continue
        groups.append((tag_name, members))

    rows: List[GroupRow] = []
    for group_name, indices in groups:
        count = eval_set.example_count if indices is None else len(indices)
        for metric in metrics:
            cells = []
            for model in model_names:
                detail = details[(metric, model)]
                if indices is None:
                    score = detail.report.corpus_score
                elif detail.stats is not None:
                    score = reduce_subset(metric, detail.stats, indices)
                else:
                    subset_hyps = [eval_set.model(model).items[i] for i in indices]
                    subset_refs = [references[i] for i in indices]
                    score = calculate_score_detailed(
                        metric, subset_hyps, subset_refs, workers=workers,
                        tokenizer=tokenizer, ref_format="per_example",
                    ).report.corpus_score
                cells.append(GroupCell(model=model, score=score))
            _mark_best_worst(cells)
            rows.append(GroupRow(group=group_name, metric=metric,
                                 example_count=count, cells=cells))
    return GroupScores(metrics=list(metrics), models=model_names,
                       rows=rows, notes=notes)


# ---------------------------------------------------------------------------
# Tag distribution


def tag_distribution(eval_set: EvalSet) -> List[Tuple[str, int]]:
    """(tag, member count) pairs, counts descending then name ascending."""
    pairs = [(tag.name, len(tag.members)) for tag in eval_set.tags]
    return sorted(pairs, key=lambda kv: (-kv[1], kv[0]))


# ---------------------------------------------------------------------------
# Table export


_LATEX_REPLACEMENTS = [
    ("\\", r"\textbackslash{}"),
    ("&", r"\&"), ("%", r"\%"), ("$", r"\$"), ("#", r"\#"),
    ("_", r"\_"), ("{", r"\{"), ("}", r"\}"),
    ("~", r"\textasciitilde{}"), ("^", r"\textasciicircum{}"),
]


def latex_escape(text: str) -> str:
    for raw, escaped in _LATEX_REPLACEMENTS:
        text = text.replace(raw, escaped)
    return text


def _format_number(value: float) -> str:
    return f"{value:.3f}"


def _group_table(table: GroupScores) -> Tuple[List[str], List[List], List[List[str]]]:
    """(header, value rows, style rows); styles are '', 'best' or 'worst'."""
    with_groups = any(row.group != "ALL" for row in table.rows)
    header = (["group", "metric"] if with_groups else ["metric"]) + table.models
    rows: List[List] = []
    styles: List[List[str]] = []
    for row in table.rows:
        cells: List = ([row.group, row.metric] if with_groups else [row.metric])
        style: List[str] = [""] * (2 if with_groups else 1)
        for cell in row.cells:
            cells.append(cell.score)
            style.append("best" if cell.best else ("worst" if cell.worst else ""))
        rows.append(cells)
        styles.append(style)
    return header, rows, styles


def _stats_table(stats: DatasetStats) -> Tuple[List[str], List[List], List[List[str]]]:
    header = ["stream", "kind", "sentences", "tokens", "chars"]
    rows = [[s.stream, s.kind, s.sentence_count, s.token_count, s.char_count]
            for s in stats.streams]
    styles = [[""] * len(header) for _ in rows]
    return header, rows, styles


def export_table(table, fmt: str) -> str:
    """Render a GroupScores or DatasetStats table as CSV or a LaTeX body.

    Numbers use three decimals. CSV follows RFC 4180; best/worst markers
    appear only in LaTeX (bold/italic).
    """
    if isinstance(table, GroupScores):
        header, rows, styles = _group_table(table)
    elif isinstance(table, DatasetStats):
        header, rows, styles = _stats_table(table)
    else:
        raise TypeError(f"cannot export {type(table).__name__}")

    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                _format_number(v) if isinstance(v, float) else v for v in row])
        return buffer.getvalue()

    if fmt == "latex":
        lines = [" & ".join(latex_escape(h) for h in header) + r" \\"]
        for row, style in zip(rows, styles):
            cells = []
            for value, mark in zip(row, style):
                text = _format_number(value) if isinstance(value, float) else latex_escape(str(value))
                if mark == "best":
                    text = r"\textbf{" + text + "}"
                elif mark == "worst":
                    text = r"\textit{" + text + "}"
                cells.append(text)
            lines.append(" & ".join(cells) + r" \\")
        return "\n".join(lines) + "\n"

    raise ValueError(f"unknown export format {fmt!r}; expected csv or latex")
