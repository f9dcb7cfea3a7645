"""Exception types shared across the toolkit.

Configuration problems derive from :class:`ConfigError` so the CLI can map all of
them to a single exit status; execution problems are :class:`ProcessorError`.
"""

from __future__ import annotations


class ConfigError(Exception):
    """A problem with a pipeline, profile or architecture file."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(self._format())

    def _format(self) -> str:
        where = []
        if self.source:
            where.append(self.source)
        if self.line is not None:
            where.append(f"line {self.line}")
            if self.column is not None:
                where.append(f"column {self.column}")
        if where:
            return f"{', '.join(where)}: {self.message}"
        return self.message


class ConfigSyntaxError(ConfigError):
    pass


class DuplicateId(ConfigError):
    def __init__(self, ident: str, first_line: int | None, second_line: int | None, source=None):
        self.ident = ident
        self.lines = (first_line, second_line)
        super().__init__(
            f"duplicate id {ident!r} (first declared on line {first_line}, again on line {second_line})",
            second_line, source=source,
        )


class UnknownBlock(ConfigError):
    def __init__(self, name: str, line: int | None = None, source=None):
        self.name = name
        super().__init__(f"unknown block {name!r}", line, source=source)


class RecursiveBlock(ConfigError):
    def __init__(self, chain: list[str], line: int | None = None):
        self.chain = list(chain)
        super().__init__(f"recursive block instantiation: {' -> '.join(chain)}", line)


class BlockArityError(ConfigError):
    pass


class UnknownProcessorKind(ConfigError):
    def __init__(self, kind: str, node_id: str, line: int | None = None):
        self.kind = kind
        self.node_id = node_id
        super().__init__(f"processor {node_id!r}: unknown processor kind {kind!r}", line)


class DanglingReference(ConfigError):
    def __init__(self, target: str, referrer: str, detail: str = "is not declared",
                 line: int | None = None):
        self.target = target
        self.referrer = referrer
        super().__init__(f"{referrer!r} references {target!r}, which {detail}", line)


class CycleDetected(ConfigError):
    def __init__(self, path: list[str]):
        self.path = list(path)
        super().__init__(f"dependency cycle: {' -> '.join(path)}")


class ParamTypeMismatch(ConfigError):
    pass


class UnknownParam(ConfigError):
    pass


class MissingRequiredParam(ConfigError):
    def __init__(self, node_id: str, param: str, line: int | None = None):
        self.node_id = node_id
        self.param = param
        super().__init__(f"processor {node_id!r}: missing required parameter {param!r}", line)


class DuplicateKind(ValueError):
    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(f"processor kind {kind!r} is already registered")


class ProcessorError(Exception):
    """A processor raised while executing; wraps the node id and the cause."""

    def __init__(self, node_id: str, cause: BaseException):
        self.node_id = node_id
        self.cause = cause
        super().__init__(f"processor {node_id!r} failed: {type(cause).__name__}: {cause}")
