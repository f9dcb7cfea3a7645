"""Size and structure sensors computed per file from its token stream.

Structure measures are keyword-counting approximations on the token level:
cyclomatic complexity is ``1 + branch keywords`` and procedures are found with a
profile-driven heuristic, not by parsing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .scope.lexer import TokenKind, TokenStream
from .scope.profiles import LanguageProfile

log = logging.getLogger(__name__)

METRIC_IDS = (
    "loc", "sloc", "comment.ratio", "proc.count", "proc.avg_length",
    "nesting.max", "condition.ratio", "cyclomatic",
)

_OPENERS = {"(": ")", "[": "]", "{": "}"}


@dataclass(frozen=True)
class SizeMetrics:
    loc: int
    sloc: int
    comment_lines: int
    comment_ratio: float


@dataclass(frozen=True)
class StructureMetrics:
    procedure_count: int
    average_procedure_length: float
    max_nesting: int
    condition_ratio: float
    cyclomatic: int
    branch_count: int = 0
    procedure_lines: int = 0
    sloc: int = 0


def count_physical_lines(content: str) -> int:
    if not content:
        return 0
    return content.count("\n") + (0 if content.endswith("\n") else 1)


def code_lines(tokens) -> set[int]:
    lines: set[int] = set()
    for tok in tokens:
        if tok.end_line > tok.line:
            lines.update(range(tok.line, tok.end_line + 1))
        else:
            lines.add(tok.line)
    return lines


def compute_size_metrics(content: str, tokens: TokenStream) -> SizeMetrics:
    loc = count_physical_lines(content)
    covered = code_lines(tokens)
    # a comment left open at a trailing newline would otherwise claim line loc + 1
    comment_only = sum(1 for n in getattr(tokens, "comment_lines", set()) - covered if n <= loc)
    return SizeMetrics(loc, len(covered), comment_only, comment_only / max(loc, 1))


def compute_structure_metrics(tokens, profile: LanguageProfile) -> StructureMetrics:
    tokens = list(tokens)
    sloc = len(code_lines(tokens))
    fold = profile.fold
    branch_words = profile.branch_keywords_folded
    branches = sum(1 for t in tokens if t.kind is TokenKind.KEYWORD and fold(t.text) in branch_words)
    if profile.block_style == "indent":
        nesting = _indent_nesting(tokens, profile)
    else:
        nesting = _brace_nesting(tokens, profile)
    spans = _procedure_spans(tokens, profile)
    proc_lines = sum(len(code_lines(tokens[a:b + 1])) for a, b in spans)
    count = len(spans)
    return StructureMetrics(
        procedure_count=count,
        average_procedure_length=proc_lines / count if count else 0.0,
        max_nesting=nesting,
        condition_ratio=branches / max(sloc, 1),
        cyclomatic=1 + branches,
        branch_count=branches,
        procedure_lines=proc_lines,
        sloc=sloc,
    )


def _is_loop(tok, profile: LanguageProfile) -> bool:
    return tok.kind is TokenKind.KEYWORD and profile.fold(tok.text) in profile.loop_keywords_folded


def _brace_nesting(tokens, profile: LanguageProfile) -> int:
    # frames: loop weight of each open brace; pending: paren depths of loop
    # keywords still waiting for their body
    frames: list[int] = []
    pending: list[int] = []
    depth = 0
    parens = 0
    best = 0
    unmatched = 0
    for tok in tokens:
        text = tok.text
        if tok.kind is TokenKind.PUNCTUATION:
            if text in "([":
                parens += 1
            elif text in ")]":
                parens = max(parens - 1, 0)
            elif text == "{":
                weight = sum(1 for p in pending if p == parens)
                pending = [p for p in pending if p != parens]
                frames.append(weight)
                depth += weight
                best = max(best, depth)
            elif text == "}":
                if frames:
                    depth -= frames.pop()
                else:
                    unmatched += 1
            elif text == ";":
                waiting = sum(1 for p in pending if p == parens)
                if waiting:
                    best = max(best, depth + waiting)
                    pending = [p for p in pending if p != parens]
        elif _is_loop(tok, profile):
            pending.append(parens)
    if unmatched:
        log.warning("%s: %d unmatched closing brace(s), depth clamped at 0",
                    tokens[0].path if tokens else "", unmatched)
    return best


def _line_starts(tokens):
    """Yield (index, token, paren depth before it, starts_line) for every token."""
    parens = 0
    prev_line = 0
    for i, tok in enumerate(tokens):
        starts = tok.line != prev_line
        yield i, tok, parens, starts
        prev_line = tok.end_line or tok.line
        if tok.kind is TokenKind.PUNCTUATION:
            if tok.text in _OPENERS:
                parens += 1
            elif tok.text in ")]}":
                parens = max(parens - 1, 0)


def _indent_nesting(tokens, profile: LanguageProfile) -> int:
    frames: list[int] = []
    best = 0
    for _, tok, parens, starts in _line_starts(tokens):
        if not starts or parens:
            continue
        while frames and frames[-1] >= tok.column:
            frames.pop()
        if _is_loop(tok, profile):
            frames.append(tok.column)
            best = max(best, len(frames))
    return best


def _procedure_spans(tokens, profile: LanguageProfile) -> list[tuple[int, int]]:
    if profile.procedure_keywords:
        if profile.block_style == "indent":
            return _keyword_procs_indent(tokens, profile)
        return _keyword_procs_braces(tokens, profile)
    return _c_style_procs(tokens)


def _matching(tokens, start: int, open_: str, close: str) -> int:
    """Index of the token closing the bracket at ``start`` (or the last index)."""
    depth = 0
    for j in range(start, len(tokens)):
        tok = tokens[j]
        if tok.kind is TokenKind.PUNCTUATION:
            if tok.text == open_:
                depth += 1
            elif tok.text == close:
                depth -= 1
                if depth == 0:
                    return j
    return len(tokens) - 1


def _c_style_procs(tokens) -> list[tuple[int, int]]:
    spans = []
    i = 0
    n = len(tokens)
    while i < n - 1:
        tok = tokens[i]
        if (tok.kind is TokenKind.IDENTIFIER and tokens[i + 1].text == "("
                and not (i > 0 and tokens[i - 1].text in ("new", ".", "->", "="))):
            close = _matching(tokens, i + 1, "(", ")")
            j = close + 1
            # trailing qualifiers such as throws clauses, const, override
            while j < n and (tokens[j].kind in (TokenKind.IDENTIFIER, TokenKind.KEYWORD)
                             or tokens[j].text in (",", ".", "::")):
                j += 1
            if j < n and tokens[j].text == "{":
                end = _matching(tokens, j, "{", "}")
                spans.append((i, end))
                i = end + 1
                continue
        i += 1
    return spans


def _keyword_procs_braces(tokens, profile) -> list[tuple[int, int]]:
    spans = []
    n = len(tokens)
    for i, tok in enumerate(tokens[:-1]):
        if not _is_proc_keyword(tok, profile) or tokens[i + 1].kind is not TokenKind.IDENTIFIER:
            continue
        end = n - 1
        for j in range(i + 2, n):
            if tokens[j].text == ";":
                end = j
                break
            if tokens[j].text == "{":
                end = _matching(tokens, j, "{", "}")
                break
        spans.append((i, end))
    return spans


def _keyword_procs_indent(tokens, profile) -> list[tuple[int, int]]:
    spans = []
    starts = [(i, tok.column) for i, tok, parens, first in _line_starts(tokens) if first and not parens]
    for k, (i, column) in enumerate(starts):
        j = i
        if tokens[j].text == "async" and j + 1 < len(tokens):
            j += 1
        if j + 1 >= len(tokens) or not _is_proc_keyword(tokens[j], profile) \
                or tokens[j + 1].kind is not TokenKind.IDENTIFIER:
            continue
        end = len(tokens) - 1
        for nxt, col in starts[k + 1:]:
            if col <= column:
                end = nxt - 1
                break
        spans.append((i, end))
    return spans


def _is_proc_keyword(tok, profile) -> bool:
    return tok.kind is TokenKind.KEYWORD and profile.fold(tok.text) in profile.procedure_keywords_folded
