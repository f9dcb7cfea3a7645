"""Sequential, fail-soft execution of a validated graph."""

from __future__ import annotations

import dataclasses
import enum
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from ..errors import ProcessorError
from ..textformat import Reference
from .graph import ExecutionGraph

log = logging.getLogger(__name__)


class NodeStatus(enum.Enum):
    OK = "OK"
    FAILED = "FAILED"
    FAILED_UPSTREAM = "FAILED_UPSTREAM"


@dataclass(frozen=True)
class ExecutionContext:
    project_root: Path = Path(".")
    config_dir: Path = Path(".")
    history: Any = None
    timestamp: datetime = datetime(1970, 1, 1, tzinfo=timezone.utc)
    run_id: str = ""
    node_id: str = ""

    def project_path(self, value: str) -> Path:
        path = Path(value)
        return path if path.is_absolute() else Path(self.project_root) / path

    def config_path(self, value: str) -> Path:
        path = Path(value)
        return path if path.is_absolute() else Path(self.config_dir) / path


@dataclass
class RunResult:
    outputs: dict[str, dict[str, Any]] = field(default_factory=dict)
    status: dict[str, NodeStatus] = field(default_factory=dict)
    errors: dict[str, ProcessorError] = field(default_factory=dict)
    order: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return all(s is NodeStatus.OK for s in self.status.values())

    def failed(self) -> list[str]:
        return [n for n in self.order if self.status.get(n) is not NodeStatus.OK]


def _resolve(value, outputs):
    if isinstance(value, Reference):
        return outputs[value.target][value.port]
    if isinstance(value, tuple):
        return tuple(_resolve(v, outputs) for v in value)
    return value


def execute(graph: ExecutionGraph, ctx: ExecutionContext | None = None) -> RunResult:
    """Run every node once in topological order.

    A failing node is recorded as FAILED; everything downstream of it is
    FAILED_UPSTREAM and skipped, while independent nodes still run.
    """
    ctx = ctx or ExecutionContext()
    result = RunResult(order=graph.order)
    for node_id in graph.order:
        node = graph.nodes[node_id]
        upstream = [p for p in graph.producers(node_id) if result.status[p] is not NodeStatus.OK]
        if upstream:
            result.status[node_id] = NodeStatus.FAILED_UPSTREAM
            log.warning("skipping %s: upstream %s failed", node_id, ", ".join(upstream))
            continue
        params = {k: _resolve(v, result.outputs) for k, v in node.params.items()}
        try:
            produced = node.descriptor.run(dataclasses.replace(ctx, node_id=node_id), params)
            missing = [p for p, _ in node.descriptor.outputs if p not in (produced or {})]
            if missing:
                raise RuntimeError(f"did not produce output port(s) {', '.join(missing)}")
        except Exception as exc:  # fail-soft: record and keep going
            error = ProcessorError(node_id, exc)
            result.status[node_id] = NodeStatus.FAILED
            result.errors[node_id] = error
            log.error("%s", error)
            continue
        result.outputs[node_id] = {p: produced[p] for p, _ in node.descriptor.outputs}
        result.status[node_id] = NodeStatus.OK
    return result
