"""Command-line driver for unattended (nightly) quality runs.

Exit codes: 0 success, 1 configuration error, 2 execution failure,
3 a blocking quality verdict is RED.
"""

from __future__ import annotations

import argparse
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from .engine import ExecutionContext, build_graph, execute, expand_blocks, load_config
from .errors import ConfigError
from .history import CorruptStore, DuplicateRun, HistoryStore, StoreLocked, format_timestamp, parse_timestamp, to_utc
from .processors import default_registry
from .report import OutputDirUnwritable, collect_report_data, render_report, views_from_config
from .results import GateVerdict

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EXECUTION = 2
EXIT_VERDICT = 3

log = logging.getLogger("conquard")


def _timestamp(text: str) -> datetime:
    try:
        return parse_timestamp(text)
    except ValueError:
        pass
    try:
        return to_utc(datetime.fromisoformat(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid timestamp {text!r} (use YYYY-MM-DDTHH:MM:SSZ)") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conquard", description="Continuous code quality dashboards.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more diagnostics (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a pipeline and write the report")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--project", required=True, type=Path, help="root of the analyzed system")
    run.add_argument("--out", required=True, type=Path, help="report directory")
    run.add_argument("--history-file", type=Path, help="trend history store")
    run.add_argument("--run-id", help="defaults to the run timestamp")
    run.add_argument("--timestamp", type=_timestamp, help="pin the run time (YYYY-MM-DDTHH:MM:SSZ)")
    run.add_argument("--dry-run", action="store_true", help="validate only")

    validate = sub.add_parser("validate", help="check a pipeline without running it")
    validate.add_argument("--config", required=True, type=Path)

    sub.add_parser("list-processors", help="print the processor catalog")
    return parser


def load_pipeline(path: Path, registry):
    """Parse, expand and validate; returns (graph, views). Raises ConfigError."""
    config = expand_blocks(load_config(path))
    graph = build_graph(config, registry)
    views = views_from_config(config.views)
    return graph, views


def _error(message: str) -> None:
    print(f"conquard: error: {message}", file=sys.stderr)


def _summary(graph, views) -> str:
    return f"OK: {len(graph.nodes)} nodes, {len(graph.edges)} edges, {len(views)} views"


def cmd_validate(args, registry) -> int:
    try:
        graph, views = load_pipeline(args.config, registry)
    except ConfigError as exc:
        _error(str(exc))
        return EXIT_CONFIG
    print(_summary(graph, views))
    return EXIT_OK


def cmd_list_processors(args, registry) -> int:
    sys.stdout.write(registry.catalog())
    return EXIT_OK


def cmd_run(args, registry) -> int:
    try:
        graph, views = load_pipeline(args.config, registry)
    except ConfigError as exc:
        _error(str(exc))
        return EXIT_CONFIG
    if args.dry_run:
        print(_summary(graph, views))
        return EXIT_OK

    timestamp = args.timestamp or datetime.now(timezone.utc).replace(microsecond=0)
    run_id = args.run_id or format_timestamp(timestamp)
    store = HistoryStore(args.history_file) if args.history_file else None
    ctx = ExecutionContext(project_root=args.project, config_dir=args.config.parent, history=store,
                           timestamp=timestamp, run_id=run_id)
    try:
        if store is not None:
            with store.lock():
                result = execute(graph, ctx)
                _persist(result, graph, store, run_id, timestamp)
        else:
            result = execute(graph, ctx)
            if _snapshot(result, graph):
                log.warning("no --history-file given; snapshot records are not persisted")
        data = collect_report_data(graph, result, title=f"Quality report: {args.config.stem}")
        render_report(data, views, args.out, timestamp)
    except (StoreLocked, DuplicateRun, CorruptStore, OutputDirUnwritable) as exc:
        _error(str(exc))
        return EXIT_EXECUTION

    for node_id in result.failed():
        error = result.errors.get(node_id)
        _error(str(error) if error else f"processor {node_id!r} skipped: {result.status[node_id].value}")
    if not result.ok:
        return EXIT_EXECUTION
    blocking = [v for v in data.verdicts if isinstance(v, GateVerdict) and v.blocks]
    for verdict in blocking:
        _error(f"blocking verdict RED from {verdict.source} on {verdict.metric}: {verdict.assessment.message}")
    return EXIT_VERDICT if blocking else EXIT_OK


def _snapshot(result, graph) -> list:
    records = []
    for node_id in graph.order:
        node = graph.nodes[node_id]
        for port, kind in node.descriptor.outputs:
            if kind == "snapshot" and node_id in result.outputs:
                records.extend(result.outputs[node_id][port])
    return records


def _persist(result, graph, store: HistoryStore, run_id: str, timestamp: datetime) -> None:
    records = _snapshot(result, graph)
    if not records:
        return
    if not result.ok:
        log.warning("run had failures; snapshot records are not persisted")
        return
    merged = {}
    for entity, metric, value in records:
        merged.setdefault((entity, metric), value)
    store.append(run_id, timestamp, [(e, m, v) for (e, m), v in merged.items()])


def main(argv=None, registry=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.ERROR if args.quiet else (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)
    registry = registry or default_registry()
    handlers = {"run": cmd_run, "validate": cmd_validate, "list-processors": cmd_list_processors}
    return handlers[args.command](args, registry)


if __name__ == "__main__":
    sys.exit(main())
