"""Domain types for evaluation data: sources, references, predictions and tags."""

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

_FORBIDDEN_NAME_PARTS = ("/", "\\", "\x00")


class Modality(enum.Enum):
    TEXT = "text"
    IMAGE = "image"
    AUDIO = "audio"
    VIDEO = "video"

    @classmethod
    def parse(cls, value: str) -> "Modality":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown modality {value!r}; expected one of "
                f"{[m.value for m in cls]}"
            ) from None


class TagOrigin(enum.Enum):
    USER = "user"
    MACHINE = "machine"


def is_path_safe(name: str) -> bool:
    """True for names usable as single path components."""
    if not name or name in (".", ".."):
        return False
    return not any(part in name for part in _FORBIDDEN_NAME_PARTS)


@dataclass(frozen=True)
class SourceStream:
    """One aligned source column; text items or relative media paths."""

    name: str
    modality: Modality
    items: Tuple[str, ...]

    def is_text(self) -> bool:
        return self.modality is Modality.TEXT


@dataclass(frozen=True)
class ReferenceStream:
    """One aligned reference column; ``None`` marks an absent reference."""

    name: str
    items: Tuple[Optional[str], ...]


@dataclass(frozen=True)
class ModelPredictions:
    model_name: str
    items: Tuple[str, ...]


@dataclass(frozen=True)
class TagSet:
    """A named, possibly overlapping subset of example indices."""

    name: str
    origin: TagOrigin
    members: frozenset


@dataclass(frozen=True)
class Violation:
    """One integrity finding; data, not a failure."""

    subject: str
    detail: str

    def to_dict(self) -> dict:
        return {"subject": self.subject, "detail": self.detail}


@dataclass(frozen=True)
class EvalSet:
    """One evaluation dataset: aligned sources, references, predictions, tags.

    Immutable after construction; safe to share across threads and workers.
    """

    task: str
    name: str
    sources: Tuple[SourceStream, ...]
    references: Tuple[ReferenceStream, ...]
    models: Tuple[ModelPredictions, ...]
    tags: Tuple[TagSet, ...] = ()
    example_count: int = 0

    @classmethod
    def build(cls, task, name, sources, references, models, tags=(), example_count=None):
        """Normalize sequences to tuples and infer the example count."""
        sources = tuple(sources)
        references = tuple(references)
        models = tuple(models)
        tags = tuple(tags)
        if example_count is None:
            for stream in (*sources, *references, *models):
                example_count = len(stream.items)
                break
            else:
                example_count = 0
        return cls(task, name, sources, references, models, tags, example_count)

    def model(self, model_name: str) -> ModelPredictions:
        for m in self.models:
            if m.model_name == model_name:
                return m
        raise KeyError(f"unknown model: {model_name!r}")

    def model_names(self) -> List[str]:
        return [m.model_name for m in self.models]

    def tag_members(self, tag_name: str) -> frozenset:
        """Union of members over tags with this name across both origins."""
        members = frozenset()
        found = False
        for tag in self.tags:
            if tag.name == tag_name:
                members = members | tag.members
                found = True
        if not found:
            raise KeyError(f"unknown tag: {tag_name!r}")
        return members

    def primary_text_source(self) -> Optional[SourceStream]:
        for stream in self.sources:
            if stream.is_text():
                return stream
        return None


def references_for(eval_set: EvalSet, index: int) -> List[str]:
    """All present references at one example index, in stream order."""
    if not 0 <= index < eval_set.example_count:
        raise IndexError(
            f"example index {index} out of range for {eval_set.example_count} examples"
        )
    refs = [s.items[index] for s in eval_set.references if s.items[index] is not None]
    return refs


def all_references(eval_set: EvalSet) -> List[List[str]]:
    """Per-example reference lists for the whole set."""
    return [references_for(eval_set, i) for i in range(eval_set.example_count)]


def validate(eval_set: EvalSet) -> List[Violation]:
    """Check every invariant; an empty list means the set is consistent."""
    violations: List[Violation] = []
    n = eval_set.example_count

    for label, value in (("task", eval_set.task), ("eval set name", eval_set.name)):
        if not is_path_safe(value):
            violations.append(Violation(label, f"{value!r} is not a path-safe name"))

    for stream in eval_set.sources:
        if len(stream.items) != n:
            violations.append(Violation(
                f"source {stream.name!r}",
                f"expected {n} items, found {len(stream.items)}",
            ))
    for stream in eval_set.references:
        if len(stream.items) != n:
            violations.append(Violation(
                f"reference {stream.name!r}",
                f"expected {n} items, found {len(stream.items)}",
            ))
    for model in eval_set.models:
        if len(model.items) != n:
            violations.append(Violation(
                f"model {model.model_name!r}",
                f"expected {n} predictions, found {len(model.items)}",
            ))

    if not eval_set.references:
        violations.append(Violation("references", "at least one reference stream is required"))
    else:
        full_streams = [s for s in eval_set.references if len(s.items) == n]
        if full_streams:
            for i in range(n):
                if all(s.items[i] is None for s in full_streams):
                    violations.append(Violation(
                        f"example {i}",
                        "no reference present in any stream",
                    ))

    seen_models = set()
    for model in eval_set.models:
        if model.model_name in seen_models:
            violations.append(Violation(
                f"model {model.model_name!r}", "duplicate model name"))
        seen_models.add(model.model_name)

    seen_tags = set()
    for tag in eval_set.tags:
        key = (tag.name, tag.origin)
        if key in seen_tags:
            violations.append(Violation(
                f"tag {tag.name!r}", f"duplicate {tag.origin.value} tag name"))
        seen_tags.add(key)
        out_of_range = [i for i in tag.members if not 0 <= i < n]
        if out_of_range:
            violations.append(Violation(
                f"tag {tag.name!r}",
                f"members out of range: {sorted(out_of_range)[:5]}",
            ))

    return violations
