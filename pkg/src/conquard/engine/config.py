"""Textual pipeline configuration: processors, blocks, outputs and views.

Example::

    processor scan : scanner
      include = ["**/*.py"]

    block Sizes(tree)
      processor loc : loc-analyzer
        input = $tree
      export loc
    end

    use s1 : Sizes(@scan.tree)
    output s1.loc

    view manager
      audience = "management"
      detail = "OVERVIEW"
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..errors import ConfigError, ConfigSyntaxError, DanglingReference, DuplicateId, UnknownBlock
from ..textformat import (
    NAME_RE, Formal, Line, LineScanner, Reference, Value, format_value, iter_lines, parse_assignment,
)

VIEW_KEYS = ("audience", "scope", "detail", "metrics")


@dataclass
class ProcessorDecl:
    id: str
    kind: str
    params: dict[str, Value] = field(default_factory=dict)
    line: int | None = field(default=None, compare=False)
    outputs: tuple[str, ...] = field(default=(), compare=False)

    def references(self) -> list[tuple[str, Reference]]:
        """(param name, reference) pairs, including references inside lists."""
        found = []
        for name in sorted(self.params):
            value = self.params[name]
            items = value if isinstance(value, tuple) else (value,)
            found.extend((name, v) for v in items if isinstance(v, Reference))
        return found


@dataclass
class BlockInstance:
    id: str
    block: str
    args: tuple[Value, ...] = ()
    line: int | None = field(default=None, compare=False)


Declaration = Union[ProcessorDecl, BlockInstance]


@dataclass
class BlockDef:
    name: str
    formals: tuple[str, ...]
    body: list[Declaration] = field(default_factory=list)
    exports: tuple[str, ...] = ()
    line: int | None = field(default=None, compare=False)


@dataclass
class ViewDecl:
    id: str
    params: dict[str, Value] = field(default_factory=dict)
    line: int | None = field(default=None, compare=False)


@dataclass
class PipelineConfig:
    declarations: list[Declaration] = field(default_factory=list)
    blocks: dict[str, BlockDef] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    views: list[ViewDecl] = field(default_factory=list)
    source: str | None = field(default=None, compare=False)

    @property
    def processors(self) -> list[ProcessorDecl]:
        return [d for d in self.declarations if isinstance(d, ProcessorDecl)]

    @property
    def is_flat(self) -> bool:
        return all(isinstance(d, ProcessorDecl) for d in self.declarations)


def _is_assignment(line: Line) -> bool:
    m = NAME_RE.match(line.text, line.indent)
    return bool(m) and line.text[m.end():].lstrip(" \t").startswith("=")


class _Parser:
    def __init__(self, source: str | None):
        self.source = source
        self.config = PipelineConfig(source=source)
        self.top_ids: dict[str, int] = {}
        self.block: BlockDef | None = None
        self.block_ids: dict[str, int] = {}
        self.section: dict | None = None
        self.section_indent = 0
        self.view_lines: dict[str, int] = {}
        self.block_lines: dict[str, int] = {}

    def error(self, message: str, line: int | None) -> ConfigSyntaxError:
        return ConfigSyntaxError(message, line, source=self.source)

    def parse(self, text: str) -> PipelineConfig:
        for line in iter_lines(text):
            scanner = LineScanner(line, self.source)
            if _is_assignment(line):
                self.assignment(line, scanner)
                continue
            self.section = None
            word = scanner.name("keyword")
            handler = getattr(self, "kw_" + word, None)
            if handler is None:
                raise scanner.error(f"unknown keyword {word!r}")
            handler(line, scanner)
        if self.block is not None:
            raise self.error(f"block {self.block.name!r} is missing 'end'", self.block.line)
        self.check_blocks()
        return self.config

    def assignment(self, line: Line, scanner: LineScanner) -> None:
        if self.section is None or line.indent <= self.section_indent:
            raise scanner.error("parameter line outside a processor or view section")
        key, value = parse_assignment(scanner, allow_formal=self.block is not None)
        if self.block is not None:
            for v in value if isinstance(value, tuple) else (value,):
                if isinstance(v, Formal) and v.name not in self.block.formals:
                    raise scanner.error(f"unknown formal parameter ${v.name} in block {self.block.name!r}")
        if key in self.section:
            raise scanner.error(f"duplicate parameter {key!r}")
        self.section[key] = value

    def declare(self, ident: str, line: int) -> None:
        ids = self.block_ids if self.block is not None else self.top_ids
        if ident in ids:
            raise DuplicateId(ident, ids[ident], line, source=self.source)
        ids[ident] = line

    def target(self) -> list:
        return self.block.body if self.block is not None else self.config.declarations

    def kw_processor(self, line: Line, scanner: LineScanner) -> None:
        ident = scanner.name("processor id")
        scanner.expect(":")
        kind = scanner.name("processor kind")
        scanner.expect_end()
        self.declare(ident, line.number)
        decl = ProcessorDecl(ident, kind, {}, line.number)
        self.target().append(decl)
        self.section, self.section_indent = decl.params, line.indent

    def kw_use(self, line: Line, scanner: LineScanner) -> None:
        ident = scanner.name("instance id")
        scanner.expect(":")
        block = scanner.name("block name")
        scanner.expect("(")
        args = []
        if not scanner.accept(")"):
            while True:
                arg = scanner.value(allow_formal=self.block is not None)
                if isinstance(arg, Formal) and arg.name not in self.block.formals:
                    raise scanner.error(f"unknown formal parameter ${arg.name}")
                args.append(arg)
                if scanner.accept(")"):
                    break
                scanner.expect(",")
        scanner.expect_end()
        self.declare(ident, line.number)
        self.target().append(BlockInstance(ident, block, tuple(args), line.number))

    def kw_block(self, line: Line, scanner: LineScanner) -> None:
        if self.block is not None:
            raise scanner.error("block definitions cannot be nested")
        name = scanner.name("block name")
        scanner.expect("(")
        formals = []
        if not scanner.accept(")"):
            while True:
                formals.append(scanner.name("formal parameter"))
                if scanner.accept(")"):
                    break
                scanner.expect(",")
        scanner.expect_end()
        if len(set(formals)) != len(formals):
            raise self.error(f"block {name!r} repeats a formal parameter", line.number)
        if name in self.block_lines:
            raise DuplicateId(name, self.block_lines[name], line.number, source=self.source)
        self.block_lines[name] = line.number
        self.block = BlockDef(name, tuple(formals), [], (), line.number)
        self.block_ids = {}

    def kw_export(self, line: Line, scanner: LineScanner) -> None:
        if self.block is None:
            raise scanner.error("'export' outside a block")
        names = [scanner.name("exported id")]
        while scanner.accept(","):
            names.append(scanner.name("exported id"))
        scanner.expect_end()
        self.block.exports += tuple(n for n in names if n not in self.block.exports)

    def kw_end(self, line: Line, scanner: LineScanner) -> None:
        if self.block is None:
            raise scanner.error("'end' without a block")
        scanner.expect_end()
        block = self.block
        for name in block.exports:
            if name not in self.block_ids:
                raise self.error(f"block {block.name!r} exports undeclared id {name!r}", line.number)
        self.check_body_references(block)
        self.config.blocks[block.name] = block
        self.block = None

    def kw_output(self, line: Line, scanner: LineScanner) -> None:
        if self.block is not None:
            raise scanner.error("'output' inside a block")
        names = [scanner.dotted("output id")]
        while scanner.accept(","):
            names.append(scanner.dotted("output id"))
        scanner.expect_end()
        for name in names:
            if name not in self.config.outputs:
                self.config.outputs.append(name)

    def kw_view(self, line: Line, scanner: LineScanner) -> None:
        if self.block is not None:
            raise scanner.error("'view' inside a block")
        ident = scanner.name("view id")
        scanner.expect_end()
        if ident in self.view_lines:
            raise DuplicateId(ident, self.view_lines[ident], line.number, source=self.source)
        self.view_lines[ident] = line.number
        view = ViewDecl(ident, {}, line.number)
        self.config.views.append(view)
        self.section, self.section_indent = view.params, line.indent

    def check_body_references(self, block: BlockDef) -> None:
        for item in block.body:
            values = list(item.params.values()) if isinstance(item, ProcessorDecl) else list(item.args)
            for value in values:
                for v in value if isinstance(value, tuple) else (value,):
                    if isinstance(v, Reference) and v.target.split(".")[0] not in self.block_ids:
                        raise DanglingReference(v.target, f"{block.name}.{item.id}",
                                                "is not declared in the block body (pass it as a formal)",
                                                item.line)

    def check_blocks(self) -> None:
        def check(items):
            for item in items:
                if isinstance(item, BlockInstance) and item.block not in self.config.blocks:
                    raise UnknownBlock(item.block, item.line, source=self.source)

        check(self.config.declarations)
        for block in self.config.blocks.values():
            check(block.body)
        for view in self.config.views:
            for key in view.params:
                if key not in VIEW_KEYS:
                    raise self.error(f"view {view.id!r}: unknown key {key!r}", view.line)


def parse_config(text: str, source: str | None = None) -> PipelineConfig:
    """Parse pipeline text. Block instances are kept unexpanded."""
    return _Parser(source).parse(text)


def format_config(config: PipelineConfig) -> str:
    """Render ``config`` back into pipeline text."""
    out: list[str] = []

    def emit(items, indent: str) -> None:
        for item in items:
            if isinstance(item, ProcessorDecl):
                out.append(f"{indent}processor {item.id} : {item.kind}")
                for key, value in item.params.items():
                    out.append(f"{indent}  {key} = {format_value(value)}")
            else:
                args = ", ".join(format_value(a) for a in item.args)
                out.append(f"{indent}use {item.id} : {item.block}({args})")

    for block in config.blocks.values():
        out.append(f"block {block.name}({', '.join(block.formals)})")
        emit(block.body, "  ")
        if block.exports:
            out.append(f"  export {', '.join(block.exports)}")
        out.append("end")
    emit(config.declarations, "")
    for name in config.outputs:
        out.append(f"output {name}")
    for view in config.views:
        out.append(f"view {view.id}")
        for key, value in view.params.items():
            out.append(f"  {key} = {format_value(value)}")
    return "\n".join(out) + ("\n" if out else "")


def load_config(path) -> PipelineConfig:
    from pathlib import Path

    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc}", source=str(path)) from None
    return parse_config(text, source=str(path))
