"""Profile-driven tokenizer producing normalized token streams.

The tokenizer never fails: unterminated strings and comments are closed at end of
input and reported as warnings.
"""

from __future__ import annotations

import enum
import logging
import re
from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache

from .profiles import LanguageProfile

log = logging.getLogger(__name__)

PUNCTUATION = frozenset("()[]{};,")
_NEWLINE = re.compile("\n")


class TokenKind(enum.Enum):
    IDENTIFIER = "ID"
    KEYWORD = "KW"
    LITERAL = "LIT"
    OPERATOR = "OP"
    PUNCTUATION = "PUNCT"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    normalized: str
    path: str
    line: int
    column: int = 0
    end_line: int = 0
    offset: int = 0


class TokenStream(list):
    """A list of tokens plus the comment lines and warnings of its source."""

    def __init__(self, tokens=(), comment_lines=(), warnings=()):
        super().__init__(tokens)
        self.comment_lines: set[int] = set(comment_lines)
        self.warnings: list[str] = list(warnings)


@lru_cache(maxsize=64)
def _master_pattern(profile: LanguageProfile) -> tuple[re.Pattern, dict[str, str]]:
    alts = [r"(?P<ws>\s+)"]
    closers: dict[str, str] = {}
    for i, (open_, close) in enumerate(profile.block_comments):
        alts.append(rf"(?P<bc{i}>{re.escape(open_)}.*?(?:(?P<bce{i}>{re.escape(close)})|\Z))")
        closers[f"bc{i}"] = f"bce{i}"
    for i, prefix in enumerate(profile.line_comments):
        alts.append(rf"(?P<lc{i}>{re.escape(prefix)}[^\n]*)")
    delimiters = sorted(profile.string_delimiters, key=len, reverse=True)
    for i, delim in enumerate(delimiters):
        d = re.escape(delim)
        body = rf"(?:{re.escape(profile.escape)}.|.)*?" if profile.escape else r".*?"
        alts.append(rf"(?P<s{i}>{d}{body}(?:(?P<se{i}>{d})|\Z))")
        closers[f"s{i}"] = f"se{i}"
    alts.append(r"(?P<id>(?:[^\W\d]|\$)(?:\w|\$)*)")
    alts.append(r"(?P<num>\.?\d(?:[eE][-+]\d|[\w.])*)")
    ops = sorted(profile.operators, key=len, reverse=True)
    if ops:
        alts.append("(?P<op>" + "|".join(re.escape(o) for o in ops) + ")")
    alts.append(r"(?P<ch>\S)")
    return re.compile("|".join(alts), re.DOTALL), closers


def tokenize(content: str, profile: LanguageProfile, path: str = "") -> TokenStream:
    """Split ``content`` into tokens; comments and whitespace are dropped.

    Identifiers normalize to ``ID`` and literals to ``LIT``; keywords, operators and
    punctuation keep their text.
    """
    pattern, closers = _master_pattern(profile)
    newlines = [m.start() for m in _NEWLINE.finditer(content)]
    keywords = profile.all_keywords
    fold = profile.fold
    tokens: list[Token] = []
    comment_lines: set[int] = set()
    warnings: list[str] = []
    line_of = lambda pos: bisect_right(newlines, pos) + 1  # noqa: E731

    for m in pattern.finditer(content):
        group = m.lastgroup
        if group == "ws":
            continue
        start, end = m.span()
        first = line_of(start)
        last = line_of(end - 1)
        if group.startswith(("bc", "lc")):
            comment_lines.update(range(first, last + 1))
            if group in closers and m.group(closers[group]) is None:
                warnings.append(f"{path}:{first}: unterminated comment closed at end of file")
            continue
        text = m.group(0)
        if group.startswith("s"):
            kind = TokenKind.LITERAL
            if m.group(closers[group]) is None:
                warnings.append(f"{path}:{first}: unterminated string closed at end of file")
        elif group == "id":
            kind = TokenKind.KEYWORD if fold(text) in keywords else TokenKind.IDENTIFIER
        elif group == "num":
            kind = TokenKind.LITERAL
        elif text in PUNCTUATION:
            kind = TokenKind.PUNCTUATION
        else:
            kind = TokenKind.OPERATOR
        if kind is TokenKind.IDENTIFIER:
            normalized = "ID"
        elif kind is TokenKind.LITERAL:
            normalized = "LIT"
        else:
            normalized = text
        column = start - (newlines[first - 2] + 1 if first > 1 else 0)
        tokens.append(Token(kind, text, normalized, path, first, column, last, start))

    for warning in warnings:
        log.warning(warning)
    return TokenStream(tokens, comment_lines, warnings)
