"""Processor registry, parameter validation and the execution graph."""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from ..errors import (
    ConfigError, CycleDetected, DanglingReference, DuplicateId, DuplicateKind, MissingRequiredParam,
    ParamTypeMismatch, UnknownParam, UnknownProcessorKind,
)
from ..textformat import Reference, format_value
from .config import PipelineConfig, ProcessorDecl

ANY = "any"


class ParamType(enum.Enum):
    STRING = "string"
    INTEGER = "integer"
    FLOAT = "float"
    BOOLEAN = "boolean"
    STRING_LIST = "string-list"
    REFERENCE = "reference"


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: ParamType
    required: bool = False
    default: Any = None
    port_type: str = ANY
    choices: tuple = ()
    doc: str = ""

    def describe(self) -> str:
        kind = self.type.value
        if self.type is ParamType.REFERENCE and self.port_type != ANY:
            kind += f"<{self.port_type}>"
        if self.required:
            return f"{self.name}:{kind}"
        default = "none" if self.default is None else format_value(self.default)
        return f"{self.name}:{kind}={default}"


@dataclass(frozen=True)
class ProcessorDescriptor:
    kind: str
    params: tuple[ParamSpec, ...]
    outputs: tuple[tuple[str, str], ...]
    run: Callable[..., dict]
    doc: str = ""
    # static check of resolved params; raises ValueError on inconsistent values
    check: Callable[[dict], None] | None = None

    def param(self, name: str) -> ParamSpec | None:
        for spec in self.params:
            if spec.name == name:
                return spec
        return None

    @property
    def output_types(self) -> dict[str, str]:
        return dict(self.outputs)

    def describe(self) -> str:
        params = ", ".join(p.describe() for p in self.params)
        ports = ", ".join(f"{name}:{kind}" for name, kind in self.outputs)
        return f"{self.kind}({params}) -> {ports}"


class Registry:
    """Processor kinds by name."""

    def __init__(self, descriptors: Iterable[ProcessorDescriptor] = ()):
        self._kinds: dict[str, ProcessorDescriptor] = {}
        for d in descriptors:
            self.register(d)

    def register(self, descriptor: ProcessorDescriptor) -> Registry:
        if descriptor.kind in self._kinds:
            raise DuplicateKind(descriptor.kind)
        self._kinds[descriptor.kind] = descriptor
        return self

    def get(self, kind: str) -> ProcessorDescriptor | None:
        return self._kinds.get(kind)

    def kinds(self) -> list[str]:
        return sorted(self._kinds)

    def copy(self) -> Registry:
        return Registry(self._kinds[k] for k in self.kinds())

    def __contains__(self, kind: str) -> bool:
        return kind in self._kinds

    def __len__(self) -> int:
        return len(self._kinds)

    def __iter__(self):
        return (self._kinds[k] for k in self.kinds())

    def catalog(self) -> str:
        return "".join(d.describe() + "\n" for d in self)


def register_processor(registry: Registry, descriptor: ProcessorDescriptor) -> Registry:
    return registry.register(descriptor)


@dataclass(frozen=True, order=True)
class Edge:
    source: str
    target: str
    param: str
    port: str


@dataclass
class GraphNode:
    decl: ProcessorDecl
    descriptor: ProcessorDescriptor
    params: dict[str, Any]

    @property
    def id(self) -> str:
        return self.decl.id


@dataclass
class ExecutionGraph:
    nodes: dict[str, GraphNode] = field(default_factory=dict)
    edges: tuple[Edge, ...] = ()
    order: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    views: tuple = ()

    def producers(self, node_id: str) -> list[str]:
        return sorted({e.source for e in self.edges if e.target == node_id})


def _type_ok(value: Any, spec: ParamSpec) -> bool:
    t = spec.type
    if t is ParamType.REFERENCE:
        return isinstance(value, Reference)
    if isinstance(value, Reference):
        return False
    if t is ParamType.STRING:
        return isinstance(value, str)
    if t is ParamType.INTEGER:
        return isinstance(value, int) and not isinstance(value, bool)
    if t is ParamType.FLOAT:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if t is ParamType.BOOLEAN:
        return isinstance(value, bool)
    return isinstance(value, tuple) and all(isinstance(v, str) for v in value)


def _validate_params(decl: ProcessorDecl, descriptor: ProcessorDescriptor) -> dict[str, Any]:
    params: dict[str, Any] = {}
    for name in sorted(decl.params):
        value = decl.params[name]
        spec = descriptor.param(name)
        if spec is None:
            known = ", ".join(p.name for p in descriptor.params) or "none"
            raise UnknownParam(f"processor {decl.id!r} ({decl.kind}): unknown parameter {name!r} "
                               f"(known: {known})", decl.line)
        if not _type_ok(value, spec):
            raise ParamTypeMismatch(f"processor {decl.id!r}: parameter {name!r} expects {spec.type.value}, "
                                    f"got {format_value(value) if not isinstance(value, Reference) else value}",
                                    decl.line)
        if spec.choices and value not in spec.choices:
            raise ParamTypeMismatch(f"processor {decl.id!r}: parameter {name!r} must be one of "
                                    f"{', '.join(map(str, spec.choices))}, got {value!r}", decl.line)
        params[name] = float(value) if spec.type is ParamType.FLOAT else value
    for spec in descriptor.params:
        if spec.name in params:
            continue
        if spec.required:
            raise MissingRequiredParam(decl.id, spec.name, decl.line)
        params[spec.name] = spec.default
    return params


def build_graph(config: PipelineConfig, registry: Registry) -> ExecutionGraph:
    """Validate a flat config against ``registry`` and order it topologically.

    Ties between ready nodes are broken by lexicographic node id.
    """
    if not config.is_flat:
        raise ConfigError("configuration still contains block instances; expand it first")
    nodes: dict[str, GraphNode] = {}
    for decl in config.declarations:
        if decl.id in nodes:
            raise DuplicateId(decl.id, nodes[decl.id].decl.line, decl.line)
        descriptor = registry.get(decl.kind)
        if descriptor is None:
            raise UnknownProcessorKind(decl.kind, decl.id, decl.line)
        params = _validate_params(decl, descriptor)
        if descriptor.check is not None:
            try:
                descriptor.check(params)
            except ValueError as exc:
                raise ParamTypeMismatch(f"processor {decl.id!r}: {exc}", decl.line) from None
        outputs = tuple(name for name, _ in descriptor.outputs)
        flat = ProcessorDecl(decl.id, decl.kind, dict(decl.params), decl.line, outputs)
        nodes[decl.id] = GraphNode(flat, descriptor, params)

    edges = []
    for node_id in sorted(nodes):
        node = nodes[node_id]
        for param, ref in node.decl.references():
            producer = nodes.get(ref.target)
            if producer is None:
                raise DanglingReference(ref.target, node_id, "is not declared", node.decl.line)
            ports = producer.descriptor.output_types
            if ref.port not in ports:
                raise DanglingReference(f"{ref.target}.{ref.port}", node_id,
                                        f"is not an output port of {producer.decl.kind} "
                                        f"(ports: {', '.join(sorted(ports))})", node.decl.line)
            wanted = node.descriptor.param(param).port_type
            if wanted != ANY and ports[ref.port] not in (wanted, ANY):
                raise ParamTypeMismatch(f"processor {node_id!r}: parameter {param!r} expects a {wanted} "
                                        f"input, {ref} provides {ports[ref.port]}", node.decl.line)
            edges.append(Edge(ref.target, node_id, param, ref.port))
    edges.sort()

    for name in config.outputs:
        if name not in nodes:
            raise DanglingReference(name, "output", "is not declared")

    order = _topological_order(sorted(nodes), edges)
    return ExecutionGraph(nodes, tuple(edges), tuple(order), tuple(config.outputs), tuple(config.views))


def _topological_order(ids: list[str], edges: list[Edge]) -> list[str]:
    succ: dict[str, set[str]] = {i: set() for i in ids}
    indeg = {i: 0 for i in ids}
    for e in edges:
        if e.target not in succ[e.source]:
            succ[e.source].add(e.target)
            indeg[e.target] += 1
    heap = [i for i in ids if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        node = heapq.heappop(heap)
        order.append(node)
        for nxt in sorted(succ[node]):
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(heap, nxt)
    if len(order) < len(ids):
        remaining = sorted(i for i in ids if indeg[i] > 0)
        raise CycleDetected(_find_cycle(remaining, succ))
    return order


def _find_cycle(remaining: list[str], succ: dict[str, set[str]]) -> list[str]:
    """One cycle among nodes Kahn's algorithm could not place, as [v0, ..., v0]."""
    alive = set(remaining)
    for start in remaining:
        path: list[str] = []
        on_path: dict[str, int] = {}
        done: set[str] = set()
        stack = [(start, iter(sorted(s for s in succ[start] if s in alive)))]
        path.append(start)
        on_path[start] = 0
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                del on_path[node]
                done.add(node)
                continue
            if nxt in on_path:
                return path[on_path[nxt]:] + [nxt]
            if nxt in done:
                continue
            on_path[nxt] = len(path)
            path.append(nxt)
            stack.append((nxt, iter(sorted(s for s in succ[nxt] if s in alive))))
    raise AssertionError("no cycle among remaining nodes")
