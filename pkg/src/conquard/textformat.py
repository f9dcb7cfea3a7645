"""Lexical layer of the line-oriented key-value format.

Pipeline configurations, language profiles and architecture files all
share these rules: UTF-8 text, ``#`` comments, indentation-sensitive ``key =
value`` lines, double-quoted strings, ``[a, b]`` lists, ``@id.port`` references
and ``$name`` block formals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import ConfigSyntaxError


@dataclass(frozen=True)
class Reference:
    """``@<producer-id>.<port>``; the port is the segment after the last dot."""

    target: str
    port: str

    def __str__(self) -> str:
        return f"@{self.target}.{self.port}"


@dataclass(frozen=True)
class Formal:
    """A block formal parameter used as a value inside a block body (``$name``)."""

    name: str

    def __str__(self) -> str:
        return f"${self.name}"


Value = Union[str, int, float, bool, tuple, Reference, Formal]

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")
DOTTED_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*(?:\.[A-Za-z_][A-Za-z0-9_-]*)*")
NUMBER_RE = re.compile(r"[-+]?(?:\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+|\d+)")
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass
class Line:
    number: int
    indent: int
    text: str


def iter_lines(text: str) -> Iterator[Line]:
    """Yield non-blank lines that are not pure comments, keeping indentation."""
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.lstrip(" \t")
        if not stripped or stripped.startswith("#"):
            continue
        yield Line(number, len(raw) - len(stripped), raw.rstrip())


class LineScanner:
    """Cursor over one line. Columns reported 1-based."""

    def __init__(self, line: Line, source: str | None = None):
        self.text = line.text
        self.number = line.number
        self.pos = line.indent
        self.source = source

    def error(self, message: str) -> ConfigSyntaxError:
        return ConfigSyntaxError(message, self.number, self.pos + 1, source=self.source)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text) or self.text[self.pos] == "#"

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str) -> None:
        if not self.accept(literal):
            raise self.error(f"expected {literal!r}")

    def match(self, pattern: re.Pattern, what: str) -> str:
        self.skip_ws()
        m = pattern.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected {what}")
        self.pos = m.end()
        return m.group(0)

    def name(self, what: str = "name") -> str:
        return self.match(NAME_RE, what)

    def dotted(self, what: str = "id") -> str:
        return self.match(DOTTED_RE, what)

    def expect_end(self) -> None:
        if not self.at_end():
            raise self.error(f"unexpected text {self.text[self.pos:]!r}")

    def value(self, allow_formal: bool = True) -> Value:
        ch = self.peek()
        if ch == '"':
            return self._string()
        if ch == "[":
            return self._list(allow_formal)
        if ch == "@":
            self.pos += 1
            dotted = self.match(DOTTED_RE, "reference target")
            if "." not in dotted:
                raise self.error("reference must have the form @<id>.<port>")
            target, port = dotted.rsplit(".", 1)
            return Reference(target, port)
        if ch == "$":
            if not allow_formal:
                raise self.error("formal parameters are only allowed inside block bodies")
            self.pos += 1
            return Formal(self.name("formal parameter name"))
        m = NUMBER_RE.match(self.text, self.pos)
        if m and not _continues_word(self.text, m.end()):
            self.pos = m.end()
            token = m.group(0)
            if re.fullmatch(r"[-+]?\d+", token):
                return int(token)
            return float(token)
        m = NAME_RE.match(self.text, self.pos)
        if m and m.group(0) in ("true", "false"):
            self.pos = m.end()
            return m.group(0) == "true"
        raise self.error("expected a value (string, number, boolean, list, @reference)")

    def _string(self) -> str:
        start = self.pos
        self.pos += 1
        out = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\":
                nxt = self.text[self.pos + 1:self.pos + 2]
                if nxt not in _ESCAPES:
                    raise self.error(f"invalid escape \\{nxt}")
                out.append(_ESCAPES[nxt])
                self.pos += 2
                continue
            if ch == '"':
                self.pos += 1
                return "".join(out)
            out.append(ch)
            self.pos += 1
        self.pos = start
        raise self.error("unterminated string literal")

    def _list(self, allow_formal: bool) -> tuple:
        self.expect("[")
        items = []
        if self.accept("]"):
            return ()
        while True:
            item = self.value(allow_formal)
            if isinstance(item, tuple):
                raise self.error("nested lists are not supported")
            items.append(item)
            if self.accept("]"):
                return tuple(items)
            self.expect(",")


def _continues_word(text: str, pos: int) -> bool:
    return pos < len(text) and (text[pos].isalnum() or text[pos] in "_.")


def format_value(value: Value) -> str:
    """Inverse of :meth:`LineScanner.value`."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
        return f'"{escaped}"'
    if isinstance(value, tuple):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_assignment(scanner: LineScanner, allow_formal: bool = True) -> tuple[str, Value]:
    key = scanner.name("parameter name")
    scanner.expect("=")
    value = scanner.value(allow_formal)
    scanner.expect_end()
    return key, value


def parse_sections(text: str, keyword: str, source: str | None = None) -> list[tuple[str, int, dict]]:
    """Parse ``<keyword> <name>`` sections each followed by indented assignments.

    Lines that start with other keywords are returned to the caller through
    :func:`iter_lines`; this helper is for files made only of one section kind.
    """
    sections: list[tuple[str, int, dict]] = []
    for line in iter_lines(text):
        scanner = LineScanner(line, source)
        if line.indent == 0:
            word = scanner.name("keyword")
            if word != keyword:
                raise scanner.error(f"expected {keyword!r}")
            name = scanner.dotted(f"{keyword} name")
            scanner.expect_end()
            sections.append((name, line.number, {}))
            continue
        if not sections:
            raise scanner.error(f"assignment outside a {keyword} section")
        key, value = parse_assignment(scanner, allow_formal=False)
        params = sections[-1][2]
        if key in params:
            raise scanner.error(f"duplicate key {key!r}")
        params[key] = value
    return sections
