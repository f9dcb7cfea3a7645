"""Type-2 clone detection as maximal repeats over normalized token streams.

All files are concatenated into one integer sequence with a unique sentinel after
each file, so no repeat crosses a file boundary. The lcp-intervals of the suffix
array are the right-maximal repeats; an interval is reported when its
occurrences are also preceded by at least two different tokens (left-maximal).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..metrics import code_lines
from .suffix import lcp_array, suffix_array

log = logging.getLogger(__name__)

DEFAULT_MIN_LENGTH = 25


class InvalidMinLength(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CloneOccurrence:
    path: str
    start: int
    end: int
    start_line: int
    end_line: int


@dataclass(frozen=True)
class CloneClass:
    length: int
    occurrences: tuple[CloneOccurrence, ...]


@dataclass
class CloneReport:
    classes: list[CloneClass]
    cloned_lines: dict[str, set[int]] = field(default_factory=dict)
    ratio: float = 0.0
    min_length: int = DEFAULT_MIN_LENGTH
    listing: bool = False


_DIVERSE = object()


def maximal_repeats(sequences: Sequence[Sequence], min_length: int) -> list[tuple[int, list[tuple[int, int]]]]:
    """Maximal repeats of length >= ``min_length`` across ``sequences``.

    Returns ``(length, [(sequence index, offset), ...])`` per repeat, occurrences
    sorted, repeats in no particular order.
    """
    if min_length < 2:
        raise InvalidMinLength(f"min_length must be >= 2, got {min_length}")
    vocab: dict = {}
    parts: list[np.ndarray] = []
    starts: list[int] = []
    pos = 0
    for seq in sequences:
        starts.append(pos)
        ids = [vocab.setdefault(tok, len(vocab)) for tok in seq]
        parts.append(np.asarray(ids, dtype=np.int64))
        pos += len(ids) + 1
    if not vocab:
        return []
    sentinel_base = len(vocab)
    text = np.empty(pos, dtype=np.int64)
    for i, (start, part) in enumerate(zip(starts, parts)):
        text[start:start + len(part)] = part
        text[start + len(part)] = sentinel_base + i

    sa = suffix_array(text)
    lcp = lcp_array(text, sa)
    order = sa.tolist()
    values = text.tolist()
    n = len(order)

    def left_of(p: int):
        # text start has no predecessor: give it a value no token or sentinel uses
        return values[p - 1] if p else -1

    found = []
    # stack entries: [lcp, left bound, left-char state]
    stack: list[list] = [[0, 0, None]]
    for i in range(1, n + 1):
        cur = lcp[i] if i < n else 0
        carry = left_of(order[i - 1])
        lb = i - 1
        while cur < stack[-1][0]:
            top = stack.pop()
            top[2] = _merge(top[2], carry)
            if top[0] >= min_length and top[2] is _DIVERSE:
                found.append((top[0], top[1], i - 1))
            carry = top[2]
            lb = top[1]
        if cur > stack[-1][0]:
            stack.append([cur, lb, carry])
        else:
            stack[-1][2] = _merge(stack[-1][2], carry)

    file_starts = np.asarray(starts, dtype=np.int64)
    result = []
    for length, lb, rb in found:
        positions = np.asarray(order[lb:rb + 1], dtype=np.int64)
        owners = np.searchsorted(file_starts, positions, side="right") - 1
        occ = sorted(zip(owners.tolist(), (positions - file_starts[owners]).tolist()))
        result.append((length, occ))
    return result


def _merge(state, value):
    if state is None:
        return value
    if state is _DIVERSE or value is _DIVERSE or state != value:
        return _DIVERSE
    return state


def detect_clones(corpus: Mapping[str, Sequence], min_length: int = DEFAULT_MIN_LENGTH) -> list[CloneClass]:
    """Clone classes over ``corpus`` (path -> token sequence), deterministically ordered.

    Classes are sorted by length descending, then by their first occurrence.
    """
    paths = sorted(corpus)
    streams = [list(corpus[p]) for p in paths]
    repeats = maximal_repeats([[t.normalized for t in s] for s in streams], min_length)
    classes = []
    for length, occ in repeats:
        occurrences = []
        for file_index, start in occ:
            toks = streams[file_index]
            end = start + length
            occurrences.append(CloneOccurrence(paths[file_index], start, end, toks[start].line,
                                               toks[end - 1].end_line or toks[end - 1].line))
        occurrences.sort(key=lambda o: (o.path, o.start))
        classes.append(CloneClass(length, tuple(occurrences)))
    classes.sort(key=lambda c: (-c.length, c.occurrences[0].path, c.occurrences[0].start))
    return classes


def cloned_line_sets(classes, corpus: Mapping[str, Sequence]) -> dict[str, set[int]]:
    lines: dict[str, set[int]] = {}
    for cls in classes:
        for occ in cls.occurrences:
            lines.setdefault(occ.path, set()).update(code_lines(corpus[occ.path][occ.start:occ.end]))
    return lines


def cloning_ratio(classes, corpus: Mapping[str, Sequence]) -> float:
    """Fraction of source lines covered by at least one clone occurrence."""
    total = sum(len(code_lines(tokens)) for tokens in corpus.values())
    if total == 0:
        log.warning("cloning ratio of an empty corpus is reported as 0")
        return 0.0
    cloned = sum(len(s) for s in cloned_line_sets(classes, corpus).values())
    return cloned / total


def build_report(corpus: Mapping[str, Sequence], min_length: int = DEFAULT_MIN_LENGTH,
                 listing: bool = False) -> CloneReport:
    classes = detect_clones(corpus, min_length)
    return CloneReport(classes, cloned_line_sets(classes, corpus), cloning_ratio(classes, corpus),
                       min_length, listing)


def format_listing(classes) -> str:
    """One occurrence per line: path, start line, end line, class id (tab-separated)."""
    rows = []
    for class_id, cls in enumerate(classes, start=1):
        for occ in cls.occurrences:
            rows.append(f"{occ.path}\t{occ.start_line}\t{occ.end_line}\t{class_id}\n")
    return "".join(rows)
