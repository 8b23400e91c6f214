"""High-level data service: cached scoring and analytics over a data root.

Both the HTTP API and the CLI go through this layer, so their outputs come
from the same code paths and the same cache.
"""

import logging
import threading
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import analytics
from .analytics import DatasetStats, GroupScores, NGramTable
from .corpus import EvalSet, TagOrigin, all_references
from .errors import DataLayoutError
from .scoring import ScoreReport, calculate_score_detailed, get_scorer
from .scoring.engine import DetailedResult
from .store import (
    CACHE_DIR_NAME,
    CONFIG_FILE_NAME,
    MACHINE_TAG_PREFIX,
    CacheStore,
    DataRoot,
    EvalSetConfig,
    load_eval_set,
    scan,
    write_tag_file,
)
from .tagging import TaggerConfig, run_taggers

log = logging.getLogger("seqeval.service")


class DataService:
    """Serves eval sets, scores and analytics with fingerprint-based caching."""

    def __init__(self, root: Path, fingerprint_mode: str = "fast",
                 workers: int = 1, tagger_config: TaggerConfig = TaggerConfig()):
        self.root = Path(root)
        self.fingerprint_mode = fingerprint_mode
        self.workers = workers
        self.tagger_config = tagger_config
        self.metric_computations = 0  # incremented per uncached metric run
        self._scan_lock = threading.Lock()
        self._data_root: Optional[DataRoot] = None

    # -- discovery ---------------------------------------------------------

    def refresh(self) -> DataRoot:
        data_root = scan(self.root)
        with self._scan_lock:
            self._data_root = data_root
        return data_root

    def data_root(self) -> DataRoot:
        with self._scan_lock:
            if self._data_root is not None:
                return self._data_root
        return self.refresh()

    def set_dir(self, task: str, name: str) -> Path:
        return self.root / task / name

    # -- eval sets ----------------------------------------------------------

    def config(self, task: str, name: str) -> EvalSetConfig:
        return EvalSetConfig.load(self.set_dir(task, name))

    def eval_set(self, task: str, name: str, with_machine_tags: bool = True) -> EvalSet:
        if with_machine_tags:
            self.ensure_machine_tags(task, name)
        return load_eval_set(self.root, task, name)

    def cache(self, task: str, name: str) -> CacheStore:
        return CacheStore(self.set_dir(task, name), mode=self.fingerprint_mode)

    def _tag_input_files(self, task: str, name: str) -> List[Path]:
        set_dir = self.set_dir(task, name)
        files = sorted(set_dir.glob("source_*.txt"))
        cfg = set_dir / CONFIG_FILE_NAME
        if cfg.exists():
            files.append(cfg)
        return files

    def ensure_machine_tags(self, task: str, name: str) -> None:
        """Compute and persist machine tags, reusing the cache when inputs match."""
        set_dir = self.set_dir(task, name)
        files = self._tag_input_files(task, name)
        if not files:
            return

        def compute():
            eval_set = load_eval_set(self.root, task, name)
            config = self.config(task, name)
            groups = run_taggers(eval_set, self.tagger_config, config.tokenizer)
            return {
                group: [{"name": t.name, "members": sorted(t.members)}
                        for t in tags]
                for group, tags in groups.items()
            }

        try:
            payload = self.cache(task, name).get_or_compute(
                "machine_tags",
                {"tagger": self.tagger_config.to_dict()},
                files, compute)
        except DataLayoutError:
            return  # invalid sets keep their current tag files

        eval_set = load_eval_set(self.root, task, name)
        from .corpus import TagSet  # local import to avoid cycle at module load
        for group, tags in sorted(payload.items()):
            tag_sets = [
                TagSet(t["name"], TagOrigin.MACHINE, frozenset(t["members"]))
                for t in tags
            ]
            path = set_dir / f"tag_{MACHINE_TAG_PREFIX}{group}.txt"
            write_tag_file(path, tag_sets, eval_set.example_count)

    # -- scoring ------------------------------------------------------------

    def _score_input_files(self, task: str, name: str, model: str) -> List[Path]:
        set_dir = self.set_dir(task, name)
        files = sorted(set_dir.glob("reference_*.txt"))
        files.append(set_dir / model / "prediction.txt")
        cfg = set_dir / CONFIG_FILE_NAME
        if cfg.exists():
            files.append(cfg)
        return files

    def score_detail(self, task: str, name: str, model: str,
                     metric: str) -> DetailedResult:
        """Cached detailed scoring of one (model, metric) pair."""
        get_scorer(metric)  # fail fast on unknown ids
        config = self.config(task, name)

        def compute():
            eval_set = load_eval_set(self.root, task, name)
            hypotheses = list(eval_set.model(model).items)
            references = all_references(eval_set)
            self.metric_computations += 1
            detail = calculate_score_detailed(
                metric, hypotheses, references, workers=self.workers,
                tokenizer=config.tokenizer, ref_format="per_example")
            return {
                "corpus_score": detail.report.corpus_score,
                "sentence_scores": detail.report.sentence_scores,
                "stats": [list(s) for s in detail.stats] if detail.stats is not None else None,
            }

        payload = self.cache(task, name).get_or_compute(
            "score_detail",
            {"task": task, "set": name, "model": model, "metric": metric,
             "tokenizer": config.tokenizer.key()},
            self._score_input_files(task, name, model),
            compute)
        report = ScoreReport(metric, payload["corpus_score"],
                             list(payload["sentence_scores"]))
        stats = payload.get("stats")
        return DetailedResult(
            report=report,
            stats=[tuple(s) for s in stats] if stats is not None else None)

    def score_report(self, task: str, name: str, model: str,
                     metric: str) -> ScoreReport:
        return self.score_detail(task, name, model, metric).report

    def group_scores(self, task: str, name: str, metrics: Sequence[str],
                     models: Optional[Sequence[str]] = None,
                     tags: Optional[Sequence[str]] = None) -> GroupScores:
        eval_set = self.eval_set(task, name)
        model_names = list(models) if models is not None else eval_set.model_names()
        details: Dict[Tuple[str, str], DetailedResult] = {}
        for metric in metrics:
            for model in model_names:
                details[(metric, model)] = self.score_detail(task, name, model, metric)
        config = self.config(task, name)
        return analytics.group_scores(
            eval_set, metrics, model_names, tags, workers=self.workers,
            tokenizer=config.tokenizer, detailed_results=details)

    # -- analytics ----------------------------------------------------------

    def _text_input_files(self, task: str, name: str) -> List[Path]:
        set_dir = self.set_dir(task, name)
        files = sorted(set_dir.glob("source_*.txt")) + sorted(set_dir.glob("reference_*.txt"))
        cfg = set_dir / CONFIG_FILE_NAME
        if cfg.exists():
            files.append(cfg)
        return files

    def dataset_stats(self, task: str, name: str) -> DatasetStats:
        eval_set = self.eval_set(task, name, with_machine_tags=False)
        return analytics.compute_stats(eval_set, self.config(task, name).tokenizer)

    def ngrams(self, task: str, name: str, k: int,
               orders: Sequence[int] = (1, 2, 3, 4)) -> NGramTable:
        config = self.config(task, name)

        def compute():
            eval_set = load_eval_set(self.root, task, name)
            table = analytics.ngram_table(eval_set, k, config.tokenizer)
            return table.to_dict()

        payload = self.cache(task, name).get_or_compute(
            "ngrams", {"k": k, "tokenizer": config.tokenizer.key()},
            self._text_input_files(task, name), compute)
        return NGramTable(orders={
            int(n): [analytics.NGramEntry(e["ngram"], e["count"], list(e["examples"]))
                     for e in entries]
            for n, entries in payload.items() if int(n) in set(orders)
        })

    def tag_distribution(self, task: str, name: str) -> List[Tuple[str, int]]:
        return analytics.tag_distribution(self.eval_set(task, name))

    def export(self, task: str, name: str, table: str, fmt: str,
               metrics: Optional[Sequence[str]] = None,
               models: Optional[Sequence[str]] = None,
               tags: Optional[Sequence[str]] = None) -> str:
        if table == "scores":
            metrics = list(metrics) if metrics else self.config(task, name).default_metrics
            data = self.group_scores(task, name, metrics, models, tags)
        elif table == "stats":
            data = self.dataset_stats(task, name)
        else:
            raise ValueError(f"unknown table {table!r}; expected scores or stats")
        return analytics.export_table(data, fmt)
