"""HTTP service: browsing, example exploration, analytics, upload and export."""

import logging
import mimetypes
import tempfile
import threading
import zipfile
from concurrent.futures import ThreadPoolExecutor, TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from fastapi import FastAPI, Request, Response, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import analytics
from .corpus import EvalSet, Modality, TagOrigin, references_for
from .errors import (
    DataLayoutError,
    IngestError,
    ScoringInputError,
    UnknownScorerError,
    UnsafeArchiveError,
)
from .scoring import get_scorer, list_scorers
from .service import DataService
from .store import ingest_zip
from .text import token_texts

log = logging.getLogger("seqeval.server")

PAGE_SIZES = (10, 25, 50, 100)
DEFAULT_UPLOAD_LIMIT = 1 << 30  # 1 GiB


class RequestError(Exception):
    """Maps to a 400 response naming the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExampleQuery:
    page: int = 1
    page_size: int = 25
    sort_by: str = "index"
    sort_order: str = "asc"
    keyword: Optional[str] = None
    tags: List[str] = field(default_factory=list)
    models: Optional[List[str]] = None
    metrics: Optional[List[str]] = None

    @classmethod
    def from_params(cls, params) -> "ExampleQuery":
        query = cls()
        if "page" in params:
            query.page = _int_param(params, "page", minimum=1)
        if "page_size" in params:
            query.page_size = _int_param(params, "page_size")
            if query.page_size not in PAGE_SIZES:
                raise RequestError("page_size", f"must be one of {PAGE_SIZES}")
        query.sort_by = params.get("sort_by", "index")
        query.sort_order = params.get("sort_order", "asc")
        if query.sort_order not in ("asc", "desc"):
            raise RequestError("sort_order", "must be asc or desc")
        keyword = params.get("keyword")
        query.keyword = keyword if keyword else None
        query.tags = _list_param(params, "tags")
        models = _list_param(params, "models")
        query.models = models or None
        metrics = _list_param(params, "metrics")
        query.metrics = metrics or None
        return query


def _int_param(params, nm: str, minimum: Optional[int] = None) -> int:
    raw = params.get(nm)
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise RequestError(nm, f"not an integer: {raw!r}")
    if minimum is not None and value < minimum:
        raise RequestError(nm, f"must be >= {minimum}")
    return value


def _list_param(params, nm: str) -> List[str]:
    raw = params.get(nm)
    if not raw:
        return []
    return [part for part in raw.split(",") if part]


def _media_url(task: str, name: str, item: str) -> str:
    return f"/media/{task}/{name}/{item}"


def _known_tag_names(eval_set: EvalSet) -> set:
    return {t.name for t in eval_set.tags}


def _filtered_indices(eval_set: EvalSet, query: ExampleQuery,
                      models: List[str]) -> List[int]:
    indices = list(range(eval_set.example_count))
    if query.tags:
        known = _known_tag_names(eval_set)
        selected = set(indices)
        for tag_name in query.tags:
            if tag_name not in known:
                raise RequestError("tags", f"unknown tag {tag_name!r}")
            selected &= eval_set.tag_members(tag_name)
        indices = [i for i in indices if i in selected]
    if query.keyword:
        needle = query.keyword.lower()
        text_sources = [s for s in eval_set.sources if s.is_text()]
        predictions = [eval_set.model(m).items for m in models]

        def matches(i: int) -> bool:
            for stream in text_sources:
                if needle in stream.items[i].lower():
                    return True
            for ref in references_for(eval_set, i):
                if needle in ref.lower():
                    return True
            for items in predictions:
                if needle in items[i].lower():
                    return True
            return False

        indices = [i for i in indices if matches(i)]
    return indices


def create_app(data_root: Path,
               fingerprint_mode: str = "fast",
               workers: int = 1,
               watch_interval: float = 5.0,
               request_timeout: float = 120.0,
               upload_limit: int = DEFAULT_UPLOAD_LIMIT,
               frontend_dir: Optional[Path] = None) -> FastAPI:
    """Build the API application over one data root directory."""
    service = DataService(Path(data_root), fingerprint_mode=fingerprint_mode,
                          workers=workers)
    app = FastAPI(title="seqeval", version="0.1.0")
    app.state.service = service
    compute_pool = ThreadPoolExecutor(max_workers=max(2, workers))
    jobs: Dict[tuple, object] = {}
    jobs_lock = threading.Lock()

    @app.exception_handler(RequestError)
    async def _bad_request(request: Request, exc: RequestError):
        return JSONResponse(status_code=400, content={"error": str(exc), "field": exc.field})

    @app.exception_handler(UnknownScorerError)
    async def _unknown_scorer(request: Request, exc: UnknownScorerError):
        return JSONResponse(status_code=400, content={"error": str(exc), "field": "metrics"})

    @app.exception_handler(ScoringInputError)
    async def _scoring_input(request: Request, exc: ScoringInputError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(DataLayoutError)
    async def _layout_error(request: Request, exc: DataLayoutError):
        return JSONResponse(status_code=422, content={
            "error": str(exc),
            "violations": [v.to_dict() for v in exc.violations],
        })

    def not_found(detail: str) -> Response:
        return JSONResponse(status_code=404, content={"error": detail})

    def _resolve_set(task: str, name: str):
        entry = service.data_root().entry(task, name)
        if entry is None or not entry.valid:
            return None
        return entry

    # -- browsing -----------------------------------------------------------

    @app.get("/api/tasks")
    def tasks():
        return {"tasks": service.data_root().tasks()}

    @app.get("/api/tasks/{task}/sets")
    def sets(task: str):
        root = service.data_root()
        if task not in root.tasks():
            return not_found(f"unknown task {task!r}")
        return {"sets": [e.to_dict() for e in root.sets_for(task)]}

    @app.get("/api/tasks/{task}/sets/{name}/models")
    def models(task: str, name: str):
        entry = _resolve_set(task, name)
        if entry is None:
            return not_found(f"unknown eval set {task}/{name}")
        return {"models": entry.models}

    @app.get("/api/metrics")
    def metrics():
        return {"metrics": list_scorers()}

    # -- examples -----------------------------------------------------------

    @app.get("/api/tasks/{task}/sets/{name}/examples")
    def examples(task: str, name: str, request: Request):
        entry = _resolve_set(task, name)
        if entry is None:
            return not_found(f"unknown eval set {task}/{name}")
        query = ExampleQuery.from_params(request.query_params)
        eval_set = service.eval_set(task, name)
        config = service.config(task, name)

        selected_models = query.models if query.models is not None else eval_set.model_names()
        for model in selected_models:
            if model not in eval_set.model_names():
                raise RequestError("models", f"unknown model {model!r}")

        metric_ids = list(query.metrics) if query.metrics is not None \
            else list(config.default_metrics)
        sort_metric = None
        if query.sort_by not in ("index", "source_length"):
            get_scorer(query.sort_by)  # 400 on unknown ids
            sort_metric = query.sort_by
            if sort_metric not in metric_ids:
                metric_ids.append(sort_metric)
        for metric in metric_ids:
            get_scorer(metric)

        reports = {
            (metric, model): service.score_report(task, name, model, metric)
            for metric in metric_ids for model in selected_models
        }

        indices = _filtered_indices(eval_set, query, selected_models)

        if query.sort_by == "index":
            keyed = [(i, i) for i in indices]
        elif query.sort_by == "source_length":
            source = eval_set.primary_text_source()
            lengths = {
                i: len(token_texts(source.items[i], config.tokenizer)) if source else 0
                for i in indices
            }
            keyed = [(lengths[i], i) for i in indices]
        else:
            if not selected_models:
                raise RequestError("sort_by", "metric sort needs at least one model")
            primary = selected_models[0]
            scores = reports[(sort_metric, primary)].sentence_scores
            keyed = [(scores[i], i) for i in indices]
        reverse = query.sort_order == "desc"
        keyed.sort(key=lambda pair: ((-pair[0] if reverse else pair[0]), pair[1]))
        ordered = [i for _, i in keyed]

        start = (query.page - 1) * query.page_size
        page_indices = ordered[start:start + query.page_size]

        tags_by_example: Dict[int, List[dict]] = {}
        for tag in eval_set.tags:
            for i in tag.members:
                tags_by_example.setdefault(i, []).append(
                    {"name": tag.name, "origin": tag.origin.value})

        tokenizer = config.tokenizer
        items = []
        for i in page_indices:
            refs = references_for(eval_set, i)
            refs_tokens = [token_texts(r, tokenizer) for r in refs]
            sources = []
            for stream in eval_set.sources:
                if stream.is_text():
                    sources.append({"name": stream.name, "modality": "text",
                                    "text": stream.items[i]})
                else:
                    sources.append({"name": stream.name,
                                    "modality": stream.modality.value,
                                    "url": _media_url(task, name, stream.items[i])})
            model_entries = []
            for model in selected_models:
                prediction = eval_set.model(model).items[i]
                spans = analytics.highlight(token_texts(prediction, tokenizer), refs_tokens)
                pred_tokens = token_texts(prediction, tokenizer)
                scores = []
                for metric in metric_ids:
                    value = reports[(metric, model)].sentence_scores[i]
                    peers = [reports[(metric, m)].sentence_scores[i] for m in selected_models]
                    scores.append({
                        "metric": metric,
                        "score": value,
                        "best": value == max(peers),
                        "worst": value == min(peers),
                    })
                model_entries.append({
                    "model": model,
                    "prediction": prediction,
                    "tokens": pred_tokens,
                    "highlights": [s.to_dict() for s in spans],
                    "scores": scores,
                })
            items.append({
                "index": i,
                "tags": sorted(tags_by_example.get(i, []),
                               key=lambda t: (t["origin"], t["name"])),
                "sources": sources,
                "references": [
                    {"name": stream.name, "text": stream.items[i]}
                    for stream in eval_set.references
                ],
                "models": model_entries,
            })
        return {
            "total": len(ordered),
            "page": query.page,
            "page_size": query.page_size,
            "items": items,
        }

    # -- scores and analytics ------------------------------------------------

    def _run_with_timeout(key: tuple, fn):
        """Run a computation on the bounded pool; 202 when it outlives the budget."""
        with jobs_lock:
            future = jobs.get(key)
            if future is None:
                future = compute_pool.submit(fn)
                jobs[key] = future
        try:
            result = future.result(timeout=request_timeout)
        except FutureTimeout:
            return None
        finally:
            if future.done():
                with jobs_lock:
                    jobs.pop(key, None)
        return result

    @app.get("/api/tasks/{task}/sets/{name}/scores")
    def scores(task: str, name: str, request: Request):
        entry = _resolve_set(task, name)
        if entry is None:
            return not_found(f"unknown eval set {task}/{name}")
        params = request.query_params
        metric_ids = _list_param(params, "metrics") or service.config(task, name).default_metrics
        for metric in metric_ids:
            get_scorer(metric)
        model_names = _list_param(params, "models") or None
        if model_names:
            for model in model_names:
                if model not in entry.models:
                    raise RequestError("models", f"unknown model {model!r}")
        group_by = params.get("group_by")
        if group_by not in (None, "", "tags"):
            raise RequestError("group_by", "only 'tags' is supported")
        tags: Optional[List[str]] = None
        if group_by == "tags":
            eval_set = service.eval_set(task, name)
            tags = sorted(_known_tag_names(eval_set))

        key = ("scores", task, name, tuple(metric_ids),
               tuple(model_names or ()), tuple(tags or ()))
        result = _run_with_timeout(
            key, lambda: service.group_scores(task, name, metric_ids, model_names, tags))
        if result is None:
            return JSONResponse(status_code=202, content={
                "status": "pending", "retry_after_seconds": 2})
        return result.to_dict()

    @app.get("/api/tasks/{task}/sets/{name}/stats")
    def stats(task: str, name: str):
        entry = _resolve_set(task, name)
        if entry is None:
            return not_found(f"unknown eval set {task}/{name}")
        return service.dataset_stats(task, name).to_dict()

    @app.get("/api/tasks/{task}/sets/{name}/ngrams")
    def ngrams(task: str, name: str, request: Request):
        entry = _resolve_set(task, name)
        if entry is None:
            return not_found(f"unknown eval set {task}/{name}")
        params = request.query_params
        k = _int_param(params, "k", minimum=1) if "k" in params else 20
        if "n" in params:
            n = _int_param(params, "n")
            if not 1 <= n <= 4:
                raise RequestError("n", "must lie in 1..4")
            orders: Sequence[int] = (n,)
        else:
            orders = (1, 2, 3, 4)
        table = service.ngrams(task, name, k, orders)
        return table.to_dict()

    @app.get("/api/tasks/{task}/sets/{name}/score_dist")
    def score_dist(task: str, name: str, request: Request):
        entry = _resolve_set(task, name)
        if entry is None:
            return not_found(f"unknown eval set {task}/{name}")
        params = request.query_params
        metric = params.get("metric")
        if not metric:
            raise RequestError("metric", "required")
        get_scorer(metric)
        bins = _int_param(params, "bins", minimum=1) if "bins" in params else 20
        model_names = _list_param(params, "models") or entry.models
        out = {}
        for model in model_names:
            if model not in entry.models:
                raise RequestError("models", f"unknown model {model!r}")
            report = service.score_report(task, name, model, metric)
            out[model] = analytics.score_distribution(report, bins).to_dict()
        return {"metric": metric, "bins": bins, "models": out}

    @app.get("/api/tasks/{task}/sets/{name}/tags")
    def tags(task: str, name: str):
        entry = _resolve_set(task, name)
        if entry is None:
            return not_found(f"unknown eval set {task}/{name}")
        distribution = service.tag_distribution(task, name)
        return {"tags": [{"name": t, "count": c} for t, c in distribution]}

    @app.get("/api/tasks/{task}/sets/{name}/export")
    def export(task: str, name: str, request: Request):
        entry = _resolve_set(task, name)
        if entry is None:
            return not_found(f"unknown eval set {task}/{name}")
        params = request.query_params
        table = params.get("table", "scores")
        if table not in ("scores", "stats"):
            raise RequestError("table", "must be scores or stats")
        fmt = params.get("format", "csv")
        if fmt not in ("csv", "latex"):
            raise RequestError("format", "must be csv or latex")
        metric_ids = _list_param(params, "metrics") or None
        if metric_ids:
            for metric in metric_ids:
                get_scorer(metric)
        model_names = _list_param(params, "models") or None
        group_by = params.get("group_by")
        tag_names: Optional[List[str]] = None
        if group_by == "tags":
            tag_names = sorted(_known_tag_names(service.eval_set(task, name)))
        body = service.export(task, name, table, fmt,
                              metrics=metric_ids, models=model_names, tags=tag_names)
        ext = "csv" if fmt == "csv" else "tex"
        filename = f"{task}_{name}_{table}.{ext}"
        return PlainTextResponse(body, headers={
            "Content-Disposition": f'attachment; filename="{filename}"'})

    # -- upload ---------------------------------------------------------------

    @app.post("/api/upload")
    async def upload(file: UploadFile):
        with tempfile.NamedTemporaryFile(suffix=".zip") as tmp:
            size = 0
            while chunk := await file.read(1 << 20):
                size += len(chunk)
                if size > upload_limit:
                    return JSONResponse(status_code=413, content={
                        "error": f"archive exceeds the {upload_limit} byte limit"})
                tmp.write(chunk)
            tmp.flush()
            try:
                report = ingest_zip(Path(tmp.name), service.root)
            except UnsafeArchiveError as exc:
                return JSONResponse(status_code=400, content={"error": str(exc)})
            except IngestError as exc:
                return JSONResponse(status_code=422, content={
                    "error": str(exc),
                    "violations": [v.to_dict() for v in exc.violations],
                })
            except zipfile.BadZipFile:
                return JSONResponse(status_code=400, content={"error": "not a zip archive"})
        service.refresh()
        service.ensure_machine_tags(report.task, report.eval_set)
        return JSONResponse(status_code=201, content=report.to_dict())

    # -- media ----------------------------------------------------------------

    @app.get("/media/{task}/{name}/{item:path}")
    def media(task: str, name: str, item: str, request: Request):
        if ".." in item or item.startswith("/"):
            return JSONResponse(status_code=400, content={"error": "unsafe media path"})
        entry = _resolve_set(task, name)
        if entry is None:
            return not_found(f"unknown eval set {task}/{name}")
        eval_set = service.eval_set(task, name, with_machine_tags=False)
        stream = None
        for candidate in eval_set.sources:
            if not candidate.is_text() and item in candidate.items:
                stream = candidate
                break
        if stream is None:
            return not_found("media item not registered")
        archive_path = service.set_dir(task, name) / f"{stream.name}.zip"
        member = item.split("/", 1)[1]
        with zipfile.ZipFile(archive_path) as archive:
            data = archive.read(member)
        content_type = mimetypes.guess_type(member)[0] or "application/octet-stream"
        headers = {"Accept-Ranges": "bytes"}
        range_header = request.headers.get("range")
        if range_header and range_header.startswith("bytes="):
            raw = range_header[len("bytes="):].split("-", 1)
            try:
                start = int(raw[0]) if raw[0] else 0
                end = int(raw[1]) if len(raw) > 1 and raw[1] else len(data) - 1
            except ValueError:
                return JSONResponse(status_code=416, content={"error": "bad range"})
            if start >= len(data) or start > end:
                return JSONResponse(status_code=416, content={"error": "bad range"})
            end = min(end, len(data) - 1)
            headers["Content-Range"] = f"bytes {start}-{end}/{len(data)}"
            return Response(content=data[start:end + 1], status_code=206,
                            media_type=content_type, headers=headers)
        return Response(content=data, media_type=content_type, headers=headers)

    # -- background watch ------------------------------------------------------

    if watch_interval > 0:
        stop_event = threading.Event()

        def watch_loop():
            while not stop_event.wait(watch_interval):
                try:
                    service.refresh()
                except Exception:  # keep polling through transient errors
                    log.exception("data root refresh failed")

        @app.on_event("startup")
        def start_watcher():
            thread = threading.Thread(target=watch_loop, daemon=True,
                                      name="seqeval-watch")
            thread.start()

        @app.on_event("shutdown")
        def stop_watcher():
            stop_event.set()

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="frontend")

    service.refresh()
    return app
