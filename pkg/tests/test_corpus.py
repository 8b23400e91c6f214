import pytest

from seqeval.corpus import (
    EvalSet,
    Modality,
    ModelPredictions,
    ReferenceStream,
    SourceStream,
    TagOrigin,
    TagSet,
    references_for,
    validate,
)


def test_modality_parse():
    assert Modality.parse("Image") is Modality.IMAGE
    with pytest.raises(ValueError):
        Modality.parse("hologram")


def _two_stream_set():
    return EvalSet.build(
        task="t", name="s",
        sources=[SourceStream("source_0", Modality.TEXT, ("s1", "s2"))],
        references=[
            ReferenceStream("reference_0", ("a", "b")),
            ReferenceStream("reference_1", ("x", None)),
        ],
        models=[ModelPredictions("m", ("p1", "p2"))],
    )


def test_references_for():
    eval_set = _two_stream_set()
    assert references_for(eval_set, 0) == ["a", "x"]
    assert references_for(eval_set, 1) == ["b"]
    with pytest.raises(IndexError):
        references_for(eval_set, 2)


def test_references_for_three_streams():
    eval_set = EvalSet.build(
        task="t", name="s",
        sources=[],
        references=[
            ReferenceStream("reference_0", ("a",)),
            ReferenceStream("reference_1", ("b",)),
            ReferenceStream("reference_2", ("c",)),
        ],
        models=[],
    )
    assert len(references_for(eval_set, 0)) == 3


def test_validate_consistent_set():
    assert validate(_two_stream_set()) == []


def test_validate_length_mismatch_names_model():
    eval_set = EvalSet.build(
        task="t", name="s",
        sources=[],
        references=[ReferenceStream("reference_0", tuple("ab"))],
        models=[ModelPredictions("m99", ("only-one",))],
        example_count=2,
    )
    violations = validate(eval_set)
    assert any("m99" in v.subject and "found 1" in v.detail for v in violations)


def test_validate_all_absent_reference_names_index():
    eval_set = EvalSet.build(
        task="t", name="s",
        sources=[],
        references=[
            ReferenceStream("reference_0", ("a", None)),
            ReferenceStream("reference_1", ("b", None)),
        ],
        models=[],
    )
    violations = validate(eval_set)
    assert any(v.subject == "example 1" for v in violations)


def test_validate_path_safety():
    eval_set = EvalSet.build(task="a/b", name="..", sources=[],
                             references=[ReferenceStream("reference_0", ("r",))],
                             models=[])
    subjects = {v.subject for v in validate(eval_set)}
    assert "task" in subjects and "eval set name" in subjects


def test_validate_duplicate_model_and_tag():
    eval_set = EvalSet.build(
        task="t", name="s",
        sources=[],
        references=[ReferenceStream("reference_0", ("a",))],
        models=[ModelPredictions("m", ("p",)), ModelPredictions("m", ("q",))],
        tags=[TagSet("g", TagOrigin.USER, frozenset({0})),
              TagSet("g", TagOrigin.USER, frozenset())],
    )
    details = [v.detail for v in validate(eval_set)]
    assert any("duplicate model" in d for d in details)
    assert any("duplicate user tag" in d for d in details)


def test_tag_members_unions_origins():
    eval_set = EvalSet.build(
        task="t", name="s",
        sources=[],
        references=[ReferenceStream("reference_0", ("a", "b"))],
        models=[],
        tags=[TagSet("g", TagOrigin.USER, frozenset({0})),
              TagSet("g", TagOrigin.MACHINE, frozenset({1}))],
    )
    assert eval_set.tag_members("g") == frozenset({0, 1})
    with pytest.raises(KeyError):
        eval_set.tag_members("missing")
