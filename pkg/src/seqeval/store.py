"""On-disk data layout, zip ingestion, fingerprints and the result cache.

Layout per eval set::

    <root>/<task>/<eval set>/source_*.{txt,zip}
    <root>/<task>/<eval set>/reference_*.txt
    <root>/<task>/<eval set>/tag_*.txt
    <root>/<task>/<eval set>/<model>/prediction.txt
    <root>/<task>/<eval set>/__cfg__.json

Text files are UTF-8, one entry per line (LF or CRLF accepted, written back
as LF). An empty reference line means "absent in this stream". Tag lines
hold semicolon-separated labels; ``tag_machine_*.txt`` files carry
machine-generated tags. Cached computations live in ``__cache__/`` next to
the data, one versioned JSON document per entry.
"""

import hashlib
import json
import logging
import os
import shutil
import time
import uuid
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from filelock import FileLock

from .corpus import (
    EvalSet,
    Modality,
    ModelPredictions,
    ReferenceStream,
    SourceStream,
    TagOrigin,
    TagSet,
    Violation,
    is_path_safe,
    validate,
)
from .errors import DataLayoutError, IngestError, UnsafeArchiveError
from .text import TokenizerConfig

log = logging.getLogger("seqeval.store")

CACHE_DIR_NAME = "__cache__"
CONFIG_FILE_NAME = "__cfg__.json"
CACHE_SCHEMA_VERSION = 1
MACHINE_TAG_PREFIX = "machine_"


# ---------------------------------------------------------------------------
# Fingerprints


@dataclass(frozen=True)
class Fingerprint:
    """File identity snapshot; ``fast`` compares size+mtime, ``strict`` size+digest."""

    size: int
    mtime_ns: int
    digest: Optional[str]
    mode: str = "fast"

    def matches(self, other: "Fingerprint", mode: Optional[str] = None) -> bool:
        mode = mode or self.mode
        if self.size != other.size:
            return False
        if mode == "strict":
            return self.digest is not None and self.digest == other.digest
        return self.mtime_ns == other.mtime_ns

    def to_dict(self) -> dict:
        return {"size": self.size, "mtime_ns": self.mtime_ns,
                "digest": self.digest, "mode": self.mode}

    @classmethod
    def from_dict(cls, d: dict) -> "Fingerprint":
        return cls(d["size"], d["mtime_ns"], d.get("digest"), d.get("mode", "fast"))


def _sha256(path: Path) -> str:
    hasher = hashlib.sha256()
    with open(path, "rb") as handle:
        while chunk := handle.read(65536):
            hasher.update(chunk)
    return hasher.hexdigest()


def fingerprint(path: Path, mode: str = "fast") -> Fingerprint:
    """Snapshot a file's identity; strict mode reads the content once."""
    if mode not in ("fast", "strict"):
        raise ValueError(f"unknown fingerprint mode {mode!r}")
    stat = os.stat(path)
    digest = _sha256(path) if mode == "strict" else None
    return Fingerprint(stat.st_size, stat.st_mtime_ns, digest, mode)


# ---------------------------------------------------------------------------
# Line-oriented file helpers


def read_lines(path: Path) -> List[str]:
    """UTF-8 lines with LF/CRLF endings; a trailing newline is optional."""
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataLayoutError(
            f"{path.name}: not valid UTF-8 at byte offset {exc.start}") from None
    if text.endswith("\n"):
        text = text[:-1]
    if text == "":
        return []
    return [line[:-1] if line.endswith("\r") else line for line in text.split("\n")]


def write_lines(path: Path, lines: Sequence[str]) -> None:
    for line in lines:
        if "\n" in line or "\r" in line:
            raise ValueError(f"{path.name}: entries must not contain newlines")
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def _atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + f".tmp-{uuid.uuid4().hex[:8]}")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Eval set configuration


@dataclass
class EvalSetConfig:
    """Contents of ``__cfg__.json``; unknown keys survive a rewrite."""

    description: str = ""
    source_modalities: Dict[str, str] = field(default_factory=dict)
    default_metrics: List[str] = field(default_factory=lambda: ["bleu"])
    tokenizer: TokenizerConfig = TokenizerConfig()
    extra: Dict[str, object] = field(default_factory=dict)

    _KNOWN = ("description", "source_modalities", "default_metrics", "tokenizer")

    @classmethod
    def load(cls, set_dir: Path) -> "EvalSetConfig":
        path = set_dir / CONFIG_FILE_NAME
        if not path.exists():
            return cls()
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise DataLayoutError(f"{CONFIG_FILE_NAME}: {exc}") from None
        return cls(
            description=raw.get("description", ""),
            source_modalities=dict(raw.get("source_modalities", {})),
            default_metrics=list(raw.get("default_metrics", ["bleu"])),
            tokenizer=TokenizerConfig.from_dict(raw.get("tokenizer", {})),
            extra={k: v for k, v in raw.items() if k not in cls._KNOWN},
        )

    def save(self, set_dir: Path) -> None:
        payload = dict(self.extra)
        payload.update({
            "description": self.description,
            "source_modalities": self.source_modalities,
            "default_metrics": self.default_metrics,
            "tokenizer": self.tokenizer.to_dict(),
        })
        _atomic_write(set_dir / CONFIG_FILE_NAME, json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Parsing one eval set


def _numeric_stem_order(name: str) -> Tuple:
    stem = Path(name).stem
    return (0, int(stem)) if stem.isdigit() else (1, stem)


def _load_zip_source(path: Path, declared: Optional[str],
                     violations: List[Violation]) -> Optional[SourceStream]:
    name = path.stem
    if declared is None:
        violations.append(Violation(
            f"source {name!r}",
            "zip sources need a declared modality in __cfg__.json"))
        return None
    try:
        modality = Modality.parse(declared)
    except ValueError as exc:
        violations.append(Violation(f"source {name!r}", str(exc)))
        return None
    if modality is Modality.TEXT:
        violations.append(Violation(
            f"source {name!r}", "zip sources must declare a non-text modality"))
        return None
    try:
        with zipfile.ZipFile(path) as archive:
            members = [m for m in archive.namelist() if not m.endswith("/")]
    except zipfile.BadZipFile:
        violations.append(Violation(f"source {name!r}", "not a valid zip archive"))
        return None
    indexed: Dict[int, str] = {}
    for member in members:
        stem = Path(member).stem
        if not stem.isdigit():
            violations.append(Violation(
                f"source {name!r}",
                f"member {member!r} is not indexed by a numeric stem"))
            return None
        indexed[int(stem)] = member
    expected = set(range(len(indexed)))
    if set(indexed) != expected or len(indexed) != len(members):
        violations.append(Violation(
            f"source {name!r}",
            f"member indices must be exactly 0..{len(members) - 1}"))
        return None
    items = tuple(f"{name}/{indexed[i]}" for i in range(len(indexed)))
    return SourceStream(name=name, modality=modality, items=items)


def _parse_tag_lines(lines: Sequence[str], origin: TagOrigin,
                     members: Dict[Tuple[str, TagOrigin], set]) -> None:
    for index, line in enumerate(lines):
        line = line.strip()
        if not line:
            continue
        for label in line.split(";"):
            label = label.strip()
            if label:
                members.setdefault((label, origin), set()).add(index)


def load_eval_set(root: Path, task: str, name: str) -> EvalSet:
    """Parse one eval set directory; raises DataLayoutError on any violation."""
    root = Path(root)
    for part in (task, name):
        if not is_path_safe(part):
            raise DataLayoutError(f"unsafe path component: {part!r}")
    set_dir = root / task / name
    if not set_dir.is_dir():
        raise DataLayoutError(f"no such eval set: {task}/{name}")

    config = EvalSetConfig.load(set_dir)
    violations: List[Violation] = []
    lengths: Dict[str, int] = {}

    sources: List[SourceStream] = []
    for path in sorted(set_dir.glob("source_*.txt"), key=lambda p: _numeric_stem_order(p.name)):
        items = read_lines(path)
        sources.append(SourceStream(path.stem, Modality.TEXT, tuple(items)))
        lengths[path.name] = len(items)
    for path in sorted(set_dir.glob("source_*.zip"), key=lambda p: _numeric_stem_order(p.name)):
        stream = _load_zip_source(path, config.source_modalities.get(path.stem), violations)
        if stream is not None:
            sources.append(stream)
            lengths[path.name] = len(stream.items)

    references: List[ReferenceStream] = []
    for path in sorted(set_dir.glob("reference_*.txt"), key=lambda p: _numeric_stem_order(p.name)):
        items = read_lines(path)
        references.append(ReferenceStream(
            path.stem, tuple(line if line != "" else None for line in items)))
        lengths[path.name] = len(items)
    if not references:
        violations.append(Violation("references", "no reference_*.txt files found"))

    models: List[ModelPredictions] = []
    for model_dir in sorted(p for p in set_dir.iterdir() if p.is_dir()):
        if model_dir.name.startswith(("__", ".")):
            continue
        prediction = model_dir / "prediction.txt"
        if not prediction.is_file():
            log.warning("ignoring %s: no prediction.txt", model_dir)
            continue
        items = read_lines(prediction)
        models.append(ModelPredictions(model_dir.name, tuple(items)))
        lengths[f"{model_dir.name}/prediction.txt"] = len(items)

    tag_members: Dict[Tuple[str, TagOrigin], set] = {}
    for path in sorted(set_dir.glob("tag_*.txt")):
        stem = path.stem[len("tag_"):]
        origin = TagOrigin.MACHINE if stem.startswith(MACHINE_TAG_PREFIX) else TagOrigin.USER
        lines = read_lines(path)
        lengths[path.name] = len(lines)
        _parse_tag_lines(lines, origin, tag_members)

    counts = set(lengths.values())
    if len(counts) > 1:
        expected = max(counts, key=lambda c: sum(1 for v in lengths.values() if v == c))
        for file_name, count in sorted(lengths.items()):
            if count != expected:
                violations.append(Violation(
                    file_name, f"expected {expected} lines, found {count}"))
    example_count = lengths[next(iter(lengths))] if lengths else 0

    tags = tuple(
        TagSet(label, origin, frozenset(indices))
        for (label, origin), indices in sorted(
            tag_members.items(), key=lambda kv: (kv[0][1].value, kv[0][0]))
    )

    eval_set = EvalSet.build(
        task=task, name=name, sources=sources, references=references,
        models=models, tags=tags, example_count=example_count)
    violations.extend(validate(eval_set))
    if violations:
        details = "; ".join(f"{v.subject}: {v.detail}" for v in violations[:10])
        raise DataLayoutError(
            f"{task}/{name} failed integrity checks: {details}", violations)
    return eval_set


def write_eval_set(eval_set: EvalSet, root: Path,
                   config: Optional[EvalSetConfig] = None) -> Path:
    """Serialize a text-only eval set into the on-disk layout."""
    set_dir = Path(root) / eval_set.task / eval_set.name
    set_dir.mkdir(parents=True, exist_ok=True)
    for source in eval_set.sources:
        if not source.is_text():
            raise ValueError("write_eval_set only handles text sources")
        write_lines(set_dir / f"{source.name}.txt", list(source.items))
    for ref in eval_set.references:
        write_lines(set_dir / f"{ref.name}.txt",
                    [item if item is not None else "" for item in ref.items])
    for model in eval_set.models:
        model_dir = set_dir / model.model_name
        model_dir.mkdir(exist_ok=True)
        write_lines(model_dir / "prediction.txt", list(model.items))
    user_tags = [t for t in eval_set.tags if t.origin is TagOrigin.USER]
    machine_tags = [t for t in eval_set.tags if t.origin is TagOrigin.MACHINE]
    if user_tags:
        write_tag_file(set_dir / "tag_tags.txt", user_tags, eval_set.example_count)
    if machine_tags:
        write_tag_file(set_dir / f"tag_{MACHINE_TAG_PREFIX}auto.txt",
                       machine_tags, eval_set.example_count)
    if config is not None:
        config.save(set_dir)
    return set_dir


def write_tag_file(path: Path, tags: Sequence[TagSet], example_count: int) -> None:
    """One line per example, semicolon-separated labels, empty line = no tags."""
    lines = []
    for i in range(example_count):
        labels = [t.name for t in tags if i in t.members]
        lines.append(";".join(labels))
    write_lines(path, lines)


# ---------------------------------------------------------------------------
# Scanning a data root


@dataclass
class SetEntry:
    task: str
    name: str
    models: List[str] = field(default_factory=list)
    example_count: int = 0
    valid: bool = True
    violations: List[Violation] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "task": self.task, "name": self.name, "models": self.models,
            "example_count": self.example_count, "valid": self.valid,
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass
class DataRoot:
    root: Path
    sets: List[SetEntry] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def tasks(self) -> List[str]:
        return sorted({entry.task for entry in self.sets})

    def sets_for(self, task: str) -> List[SetEntry]:
        return [e for e in self.sets if e.task == task]

    def entry(self, task: str, name: str) -> Optional[SetEntry]:
        for e in self.sets:
            if e.task == task and e.name == name:
                return e
        return None


def scan(root: Path) -> DataRoot:
    """Discover tasks and eval sets; malformed sets are listed, not fatal."""
    root = Path(root)
    result = DataRoot(root=root)
    if not root.is_dir():
        return result
    for task_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        if task_dir.name.startswith(("__", ".")):
            result.warnings.append(f"ignoring {task_dir.name}: reserved name")
            continue
        for set_dir in sorted(p for p in task_dir.iterdir() if p.is_dir()):
            if set_dir.name.startswith(("__", ".")):
                result.warnings.append(
                    f"ignoring {task_dir.name}/{set_dir.name}: reserved name")
                continue
            entry = SetEntry(task=task_dir.name, name=set_dir.name)
            try:
                eval_set = load_eval_set(root, task_dir.name, set_dir.name)
                entry.models = eval_set.model_names()
                entry.example_count = eval_set.example_count
            except DataLayoutError as exc:
                entry.valid = False
                entry.violations = exc.violations or [Violation("eval set", str(exc))]
            result.sets.append(entry)
    return result


# ---------------------------------------------------------------------------
# Zip ingestion


@dataclass
class IngestReport:
    ok: bool
    task: str = ""
    eval_set: str = ""
    files: List[str] = field(default_factory=list)
    example_count: int = 0
    models: List[str] = field(default_factory=list)
    violations: List[Violation] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok, "task": self.task, "eval_set": self.eval_set,
            "files": self.files, "example_count": self.example_count,
            "models": self.models,
            "violations": [v.to_dict() for v in self.violations],
        }


def _validate_member_path(member: str) -> List[str]:
    """Return clean path parts or raise UnsafeArchiveError."""
    if member.startswith("/") or "\\" in member or ":" in member:
        raise UnsafeArchiveError(f"unsafe archive member: {member!r}")
    parts = [p for p in member.split("/") if p not in ("", ".")]
    if any(p == ".." for p in parts):
        raise UnsafeArchiveError(f"unsafe archive member: {member!r}")
    return parts


def _set_lock(task_dir: Path) -> FileLock:
    task_dir.mkdir(parents=True, exist_ok=True)
    return FileLock(str(task_dir / ".ingest.lock"))


def ingest_zip(archive_path: Path, root: Path) -> IngestReport:
    """Unpack an uploaded archive atomically after integrity checks.

    The archive must contain exactly one ``<task>/<eval set>/`` tree. When the
    eval set already exists, archive files overlay the current ones; the merged
    set must still pass validation. On any failure the data root is unchanged.
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(archive_path) as archive:
        members = [m for m in archive.namelist() if not m.endswith("/")]
        if not members:
            raise IngestError("archive contains no files")
        prefixes = set()
        cleaned: List[Tuple[str, List[str]]] = []
        for member in members:
            parts = _validate_member_path(member)
            if len(parts) < 3:
                raise IngestError(
                    f"member {member!r} is not under a <task>/<eval set>/ tree")
            prefixes.add((parts[0], parts[1]))
            cleaned.append((member, parts))
        if len(prefixes) != 1:
            raise IngestError(
                "archive must contain exactly one <task>/<eval set> tree, "
                f"found {sorted(prefixes)}")
        task, set_name = next(iter(prefixes))
        if not (is_path_safe(task) and is_path_safe(set_name)):
            raise UnsafeArchiveError(f"unsafe task/set names: {task}/{set_name}")

        staging = root / f".staging-{uuid.uuid4().hex[:12]}"
        target = root / task / set_name
        try:
            staged_set = staging / task / set_name
            if target.is_dir():
                shutil.copytree(target, staged_set,
                                ignore=shutil.ignore_patterns(CACHE_DIR_NAME, "*.lock"))
            else:
                staged_set.mkdir(parents=True)
            for member, parts in cleaned:
                dest = staging.joinpath(*parts)
                dest.parent.mkdir(parents=True, exist_ok=True)
                with archive.open(member) as src, open(dest, "wb") as out:
                    shutil.copyfileobj(src, out)
            try:
                eval_set = load_eval_set(staging, task, set_name)
            except DataLayoutError as exc:
                raise IngestError(str(exc), exc.violations) from None

            with _set_lock(root / task):
                if target.is_dir():
                    trash = root / f".trash-{uuid.uuid4().hex[:12]}"
                    os.replace(target, trash)
                    os.replace(staged_set, target)
                    shutil.rmtree(trash)
                else:
                    target.parent.mkdir(parents=True, exist_ok=True)
                    os.replace(staged_set, target)
        finally:
            shutil.rmtree(staging, ignore_errors=True)

    return IngestReport(
        ok=True, task=task, eval_set=set_name, files=sorted(members),
        example_count=eval_set.example_count, models=eval_set.model_names())


# ---------------------------------------------------------------------------
# Result cache


def _canonical_key(kind: str, key: dict) -> str:
    return json.dumps({"kind": kind, **key}, sort_keys=True, separators=(",", ":"))


class CacheStore:
    """Fingerprint-keyed JSON cache colocated with one eval set.

    The entry filename digests (kind, key, input fingerprints), so any input
    change addresses a different entry and reverting a file's content in
    strict mode hits the original entry again. Fast mode keys on size+mtime;
    strict mode keys on size+content digest.
    """

    def __init__(self, set_dir: Path, mode: str = "fast"):
        if mode not in ("fast", "strict"):
            raise ValueError(f"unknown fingerprint mode {mode!r}")
        self.set_dir = Path(set_dir)
        self.cache_dir = self.set_dir / CACHE_DIR_NAME
        self.mode = mode
        self.hits = 0
        self.misses = 0

    def _fingerprint_key(self, fp: Fingerprint) -> list:
        if self.mode == "strict":
            return [fp.size, fp.digest]
        return [fp.size, fp.mtime_ns]

    def _entry_path(self, kind: str, key: dict,
                    fingerprints: Dict[str, Fingerprint]) -> Path:
        material = _canonical_key(kind, key) + json.dumps(
            {rel: self._fingerprint_key(fp) for rel, fp in sorted(fingerprints.items())},
            sort_keys=True, separators=(",", ":"))
        digest = hashlib.sha256(material.encode("utf-8")).hexdigest()
        return self.cache_dir / f"{digest}.json"

    def _current_fingerprints(self, files: Sequence[Path]) -> Dict[str, Fingerprint]:
        out = {}
        for path in files:
            rel = os.path.relpath(path, self.set_dir)
            out[rel] = fingerprint(path, self.mode)
        return out

    def get_or_compute(self, kind: str, key: dict, files: Sequence[Path], compute):
        """Return the cached payload when all input fingerprints match, else
        recompute, persist and return. Corrupt entries count as misses and
        are replaced."""
        files = [Path(f) for f in files]
        fingerprints = self._current_fingerprints(files)
        path = self._entry_path(kind, key, fingerprints)
        if path.exists():
            try:
                entry = json.loads(path.read_text(encoding="utf-8"))
                if entry.get("schema_version") == CACHE_SCHEMA_VERSION:
                    self.hits += 1
                    return entry["payload"]
            except (json.JSONDecodeError, UnicodeDecodeError, KeyError, TypeError):
                log.warning("corrupt cache entry %s; recomputing", path.name)
        self.misses += 1
        payload = compute()
        entry = {
            "schema_version": CACHE_SCHEMA_VERSION,
            "kind": kind,
            "key": key,
            "fingerprints": {rel: fp.to_dict() for rel, fp in fingerprints.items()},
            "created_at": time.time(),
            "payload": payload,
        }
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        with FileLock(str(self.cache_dir / ".lock")):
            _atomic_write(path, json.dumps(entry))
        return payload
