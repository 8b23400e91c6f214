import csv
import io
import random
from collections import Counter

import pytest

from seqeval.analytics import (
    DatasetStats,
    GroupCell,
    GroupRow,
    GroupScores,
    HighlightSpan,
    build_histogram,
    compute_stats,
    export_table,
    group_scores,
    highlight,
    latex_escape,
    score_distribution,
    sturges_bins,
    tag_distribution,
    top_ngrams,
)
from seqeval.corpus import (
    EvalSet,
    Modality,
    ReferenceStream,
    SourceStream,
    TagOrigin,
    TagSet,
)
from seqeval.scoring import ScoreReport, calculate_score
from seqeval.text import token_texts

from conftest import build_demo_eval_set, make_corpus, random_sentence


def corpus_set(sentences, tags=()):
    return EvalSet.build(
        task="t", name="s",
        sources=[SourceStream("source_0", Modality.TEXT, tuple(sentences))],
        references=[ReferenceStream(
            "reference_0", tuple("ref %d" % i for i in range(len(sentences))))],
        models=[],
        tags=tags,
    )


# ---------------------------------------------------------------------------
# dataset statistics


def test_compute_stats_hand_counts():
    stats = compute_stats(corpus_set(["a b", "a"]))
    source = stats.streams[0]
    assert source.sentence_count == 2
    assert source.token_count == 3
    assert source.char_count == 3  # whitespace excluded
    assert source.token_frequency[0] == ("a", 2)
    assert sum(source.length_histogram.counts) == source.sentence_count


def test_compute_stats_empty_stream():
    stats = compute_stats(corpus_set([]))
    source = stats.streams[0]
    assert (source.sentence_count, source.token_count, source.char_count) == (0, 0, 0)
    assert source.length_histogram.counts == []


def test_compute_stats_brute_force_equality():
    rng = random.Random(19)
    sentences = [random_sentence(rng) for _ in range(60)]
    stats = compute_stats(corpus_set(sentences))
    source = stats.streams[0]
    tokens = [token_texts(s) for s in sentences]
    assert source.token_count == sum(len(t) for t in tokens)
    assert source.char_count == sum(
        len(s.replace(" ", "")) for s in sentences)
    expected_freq = Counter(t for toks in tokens for t in toks)
    assert dict(source.token_frequency) == dict(expected_freq)
    assert [c for _, c in source.token_frequency] == \
        sorted((c for c in expected_freq.values()), reverse=True)


def test_stats_cover_all_text_streams():
    eval_set = build_demo_eval_set()
    stats = compute_stats(eval_set)
    names = [(s.stream, s.kind) for s in stats.streams]
    assert ("source_0", "source") in names
    assert ("reference_0", "reference") in names
    assert ("reference_1", "reference") in names


def test_sturges_and_histogram():
    assert sturges_bins(1) == 10
    assert sturges_bins(1000) == 11
    assert sturges_bins(2 ** 60) == 50
    hist = build_histogram([5.0] * 7)
    assert hist.counts == [7]
    hist = build_histogram(list(range(100)), bins=10)
    assert sum(hist.counts) == 100
    assert all(c == 10 for c in hist.counts)


# ---------------------------------------------------------------------------
# top n-grams


def test_top_ngrams_hand_case():
    entries = top_ngrams(corpus_set(["a b", "a c"]), n=1, k=2)
    assert [(e.ngram, e.count, e.examples) for e in entries] == \
        [("a", 2, [0, 1]), ("b", 1, [0])]


def test_top_ngrams_k_larger_than_distinct():
    entries = top_ngrams(corpus_set(["a b"]), n=1, k=99)
    assert len(entries) == 2


def test_top_ngrams_order_beyond_length_empty():
    assert top_ngrams(corpus_set(["a b c"]), n=4, k=5) == []


def test_top_ngrams_brute_force_equality():
    rng = random.Random(29)
    sentences = [random_sentence(rng) for _ in range(50)]
    eval_set = corpus_set(sentences)
    for n in (1, 2, 3, 4):
        entries = top_ngrams(eval_set, n=n, k=10 ** 6)
        brute = Counter()
        where = {}
        for idx, sentence in enumerate(sentences):
            toks = token_texts(sentence)
            for i in range(len(toks) - n + 1):
                gram = " ".join(toks[i:i + n])
                brute[gram] += 1
                where.setdefault(gram, set()).add(idx)
        assert {e.ngram: e.count for e in entries} == dict(brute)
        for entry in entries:
            assert entry.examples == sorted(where[entry.ngram])


def test_top_ngrams_falls_back_to_references():
    eval_set = EvalSet.build(
        task="t", name="s",
        sources=[SourceStream("source_0", Modality.IMAGE, ("source_0/0.jpg",))],
        references=[ReferenceStream("reference_0", ("w w w",))],
        models=[],
    )
    entries = top_ngrams(eval_set, n=1, k=5)
    assert entries[0].ngram == "w" and entries[0].count == 3


# ---------------------------------------------------------------------------
# highlighting


def test_highlight_identity_single_span():
    spans = highlight("a b c".split(), ["a b c".split()])
    assert spans == [HighlightSpan(0, 3, True)]


def test_highlight_disjoint_single_span():
    spans = highlight("a b c".split(), ["x y".split()])
    assert spans == [HighlightSpan(0, 3, False)]


def test_highlight_hand_case():
    spans = highlight("a b x c".split(), ["a b c".split()])
    assert spans == [
        HighlightSpan(0, 2, True),
        HighlightSpan(2, 3, False),
        HighlightSpan(3, 4, True),
    ]


def test_highlight_partition_property():
    rng = random.Random(31)
    for _ in range(80):
        pred = [rng.choice("abcde") for _ in range(rng.randint(0, 9))]
        refs = [[rng.choice("abcde") for _ in range(rng.randint(1, 9))]]
        spans = highlight(pred, refs)
        position = 0
        for span in spans:
            assert span.start == position
            position = span.end
        assert position == len(pred)
        for a, b in zip(spans, spans[1:]):
            assert a.matched != b.matched


def test_highlight_no_shared_unigram_means_no_matched_span():
    spans = highlight("p q r".split(), ["x y z a b".split()])
    assert all(not s.matched for s in spans)


# ---------------------------------------------------------------------------
# score distribution


def test_score_distribution_identity_single_bin():
    report = ScoreReport("bleu", 100.0, [100.0, 100.0, 100.0])
    hist = score_distribution(report, bins=10)
    assert sum(hist.counts) == 3
    assert hist.counts[-1] == 3


def test_score_distribution_uniform_is_flat():
    scores = [float(i) for i in range(100)]
    report = ScoreReport("bleu", 50.0, scores)
    hist = score_distribution(report, bins=10)
    assert sum(hist.counts) == 100
    assert all(abs(c - 10) <= 1 for c in hist.counts)


def test_score_distribution_unbounded_metric_uses_observed_max():
    report = ScoreReport("wer", 150.0, [0.0, 150.0])
    hist = score_distribution(report, bins=5)
    assert sum(hist.counts) == 2
    assert hist.bin_edges[-1] == 150.0


# ---------------------------------------------------------------------------
# group scores


def test_group_scores_all_row_matches_direct_scoring(demo_eval_set):
    table = group_scores(demo_eval_set, ["bleu", "wer"], tags=["animals"])
    refs = [[r for r in (s.items[i] for s in demo_eval_set.references)
             if r is not None] for i in range(demo_eval_set.example_count)]
    for row in table.rows:
        if row.group != "ALL":
            continue
        for cell in row.cells:
            direct = calculate_score(
                row.metric, list(demo_eval_set.model(cell.model).items),
                refs, ref_format="per_example")
            assert cell.score == pytest.approx(direct.corpus_score, abs=1e-12)


def test_group_scores_full_tag_equals_all(demo_eval_set):
    full = TagSet("everything", TagOrigin.USER,
                  frozenset(range(demo_eval_set.example_count)))
    eval_set = EvalSet.build(
        task=demo_eval_set.task, name=demo_eval_set.name,
        sources=demo_eval_set.sources, references=demo_eval_set.references,
        models=demo_eval_set.models, tags=(full,))
    table = group_scores(eval_set, ["bleu"], tags=["everything"])
    by_group = {row.group: row for row in table.rows}
    for all_cell, tag_cell in zip(by_group["ALL"].cells,
                                  by_group["everything"].cells):
        assert all_cell.score == pytest.approx(tag_cell.score, abs=1e-12)


def test_group_scores_empty_tag_omitted_with_note(demo_eval_set):
    empty = TagSet("nothing", TagOrigin.USER, frozenset())
    eval_set = EvalSet.build(
        task=demo_eval_set.task, name=demo_eval_set.name,
        sources=demo_eval_set.sources, references=demo_eval_set.references,
        models=demo_eval_set.models, tags=(empty,))
    table = group_scores(eval_set, ["bleu"], tags=["nothing"])
    assert [row.group for row in table.rows] == ["ALL"]
    assert any("nothing" in note for note in table.notes)


def test_group_scores_reference_copy_marked_best(demo_eval_set):
    table = group_scores(demo_eval_set, ["bleu"])
    row = table.rows[0]
    by_model = {c.model: c for c in row.cells}
    assert by_model["copy"].score == pytest.approx(100.0)
    assert by_model["copy"].best and not by_model["copy"].worst
    assert by_model["noisy"].worst


# ---------------------------------------------------------------------------
# tag distribution


def test_tag_distribution_cases():
    n = 4
    one_tag = corpus_set(["s"] * n, tags=(
        TagSet("g", TagOrigin.USER, frozenset(range(n))),))
    assert tag_distribution(one_tag) == [("g", n)]
    overlapping = corpus_set(["s"] * n, tags=(
        TagSet("a", TagOrigin.USER, frozenset({0, 1})),
        TagSet("b", TagOrigin.USER, frozenset({1})),
    ))
    assert tag_distribution(overlapping) == [("a", 2), ("b", 1)]
    assert tag_distribution(corpus_set(["s"]))== []


# ---------------------------------------------------------------------------
# export


def one_by_one_table(value=10.0):
    cell = GroupCell(model="model", score=value, best=False, worst=False)
    row = GroupRow(group="ALL", metric="bleu", example_count=1, cells=[cell])
    return GroupScores(metrics=["bleu"], models=["model"], rows=[row])


def test_export_csv_shape():
    assert export_table(one_by_one_table(), "csv") == "metric,model\nbleu,10.000\n"


def test_export_csv_quotes_commas():
    table = one_by_one_table()
    table.rows[0].cells[0].model = "m,1"
    table.models = ["m,1"]
    text = export_table(table, "csv")
    assert '"m,1"' in text
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[0] == ["metric", "m,1"]


def test_export_csv_round_trip():
    hyps, refs = make_corpus(6, seed=44)
    eval_set = build_demo_eval_set()
    table = group_scores(eval_set, ["bleu", "chrf"], tags=["animals", "nature"])
    text = export_table(table, "csv")
    parsed = list(csv.reader(io.StringIO(text)))
    header, rows = parsed[0], parsed[1:]
    assert header[:2] == ["group", "metric"]
    expected = {(r.group, r.metric): r for r in table.rows}
    assert len(rows) == len(expected)
    for parsed_row in rows:
        row = expected[(parsed_row[0], parsed_row[1])]
        for text_value, cell in zip(parsed_row[2:], row.cells):
            assert float(text_value) == pytest.approx(cell.score, abs=5e-4)


def test_export_latex_escapes_and_marks():
    table = one_by_one_table()
    table.rows[0].metric = "a_b"
    table.rows[0].cells[0].best = True
    text = export_table(table, "latex")
    assert r"a\_b" in text
    assert r"\textbf{10.000}" in text
    assert text.endswith("\\\\\n")


def test_export_latex_worst_italic():
    table = one_by_one_table()
    table.rows[0].cells[0].worst = True
    assert r"\textit{10.000}" in export_table(table, "latex")


def test_export_stats_table():
    stats = compute_stats(corpus_set(["a b", "a"]))
    text = export_table(stats, "csv")
    lines = text.splitlines()
    assert lines[0] == "stream,kind,sentences,tokens,chars"
    assert "source_0,source,2,3,3" in lines


def test_export_unknown_format_rejected():
    with pytest.raises(ValueError):
        export_table(one_by_one_table(), "pdf")


def test_latex_escape():
    assert latex_escape("a_b & c%") == r"a\_b \& c\%"
