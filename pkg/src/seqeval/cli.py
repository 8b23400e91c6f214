"""Command-line entry points: score, ingest, stats, export, serve."""

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import (
    DataLayoutError,
    IngestError,
    ScoringInputError,
    SeqevalError,
    UnknownScorerError,
    UnsafeArchiveError,
)
from .scoring import calculate_all, list_scorers
from .service import DataService
from .store import ingest_zip, read_lines
from .text import TokenizerConfig

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2


def _data_root(args) -> Path:
    root = args.data_root or os.environ.get("SEQEVAL_DATA_ROOT")
    if not root:
        raise SystemExit("--data-root or SEQEVAL_DATA_ROOT is required")
    return Path(root)


def cmd_score(args) -> int:
    hypothesis_path = Path(args.hypothesis)
    hypotheses = read_lines(hypothesis_path)
    streams = [read_lines(Path(p)) for p in args.references]
    for path, stream in zip(args.references, streams):
        if len(stream) != len(hypotheses):
            print(f"error: {path}: {len(stream)} lines, expected {len(hypotheses)}",
                  file=sys.stderr)
            return EXIT_USAGE
    metrics = [m for m in args.metrics.split(",") if m]
    tokenizer = TokenizerConfig.parse(args.tokenizer)
    try:
        reports = calculate_all(metrics, hypotheses, streams,
                                workers=args.workers, verbose=args.verbose,
                                tokenizer=tokenizer, ref_format="streams")
    except UnknownScorerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScoringInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.sentence_level:
        for metric in metrics:
            out_path = hypothesis_path.with_name(
                hypothesis_path.name + f".{metric}.scores")
            out_path.write_text(
                "".join(f"{s:.3f}\n" for s in reports[metric].sentence_scores),
                encoding="utf-8")

    if args.json:
        document = {
            "metrics": {
                metric: {
                    "corpus_score": reports[metric].corpus_score,
                    **({"sentence_scores": reports[metric].sentence_scores}
                       if args.sentence_level else {}),
                }
                for metric in metrics
            }
        }
        print(json.dumps(document, indent=2))
    else:
        for metric in metrics:
            print(f"{metric}\t{reports[metric].corpus_score:.3f}")
    return EXIT_OK


def cmd_ingest(args) -> int:
    root = _data_root(args)
    try:
        report = ingest_zip(Path(args.archive), root)
    except (UnsafeArchiveError, IngestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        for violation in getattr(exc, "violations", []):
            print(f"  - {violation.subject}: {violation.detail}", file=sys.stderr)
        return EXIT_USAGE
    service = DataService(root)
    service.ensure_machine_tags(report.task, report.eval_set)
    print(f"installed {report.task}/{report.eval_set} "
          f"({report.example_count} examples, models: {', '.join(report.models) or 'none'})")
    return EXIT_OK


def cmd_stats(args) -> int:
    service = DataService(_data_root(args))
    try:
        stats = service.dataset_stats(args.task, args.set)
    except DataLayoutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        print(json.dumps(stats.to_dict(), indent=2))
    else:
        from .analytics import export_table
        sys.stdout.write(export_table(stats, "csv"))
    return EXIT_OK


def cmd_export(args) -> int:
    service = DataService(_data_root(args))
    metrics = [m for m in args.metrics.split(",") if m] if args.metrics else None
    try:
        body = service.export(args.task, args.set, args.table, args.format,
                              metrics=metrics)
    except (DataLayoutError, UnknownScorerError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(body)
    return EXIT_OK


def _find_frontend(explicit: str | None) -> Path | None:
    if explicit:
        return Path(explicit)
    candidates = (
        Path("frontend/dist"),                            # repo root as CWD
        Path(__file__).parents[2] / "frontend" / "dist",  # editable install
    )
    for candidate in candidates:
        if (candidate / "index.html").is_file():
            return candidate
    return None


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    frontend = _find_frontend(args.frontend)
    app = create_app(
        _data_root(args),
        fingerprint_mode=args.fingerprint,
        workers=args.workers,
        watch_interval=args.watch_interval,
        frontend_dir=frontend,
    )
    if frontend:
        print(f"serving frontend from {frontend}")
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqeval",
        description="Text generation evaluation: parallel metrics, dataset "
                    "analytics and benchmark hosting.")
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", help="score a hypothesis file against references")
    score.add_argument("--hypothesis", required=True)
    score.add_argument("--references", required=True, nargs="+",
                       help="one or more reference stream files")
    score.add_argument("--metrics", required=True,
                       help=f"comma-separated ids; available: {', '.join(list_scorers())}")
    score.add_argument("--workers", type=int, default=1)
    score.add_argument("--sentence-level", action="store_true",
                       help="also write <hypothesis>.<metric>.scores files")
    score.add_argument("--tokenizer", default="whitespace",
                       help="whitespace | whitespace_punct | char, optionally +lower")
    score.add_argument("--json", action="store_true")
    score.add_argument("--verbose", action="store_true")
    score.set_defaults(fn=cmd_score)

    ingest = sub.add_parser("ingest", help="install an uploaded archive into the data root")
    ingest.add_argument("archive")
    ingest.add_argument("--data-root")
    ingest.set_defaults(fn=cmd_ingest)

    stats = sub.add_parser("stats", help="dataset statistics for one eval set")
    stats.add_argument("--data-root")
    stats.add_argument("--task", required=True)
    stats.add_argument("--set", required=True)
    stats.add_argument("--json", action="store_true")
    stats.set_defaults(fn=cmd_stats)

    export = sub.add_parser("export", help="export score or stats tables")
    export.add_argument("--data-root")
    export.add_argument("--task", required=True)
    export.add_argument("--set", required=True)
    export.add_argument("--table", choices=("scores", "stats"), default="scores")
    export.add_argument("--format", choices=("csv", "latex"), default="csv")
    export.add_argument("--metrics", default=None)
    export.set_defaults(fn=cmd_export)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--data-root")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--watch-interval", type=float, default=5.0)
    serve.add_argument("--fingerprint", choices=("fast", "strict"), default="fast")
    serve.add_argument("--workers", type=int, default=1)
    serve.add_argument("--frontend", default=None,
                       help="directory with the built web UI (default: autodetect frontend/dist)")
    serve.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FileNotFoundError, DataLayoutError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SeqevalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
