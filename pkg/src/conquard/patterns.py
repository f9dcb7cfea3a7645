"""Path globs: ``*`` within a segment, ``**`` across segments, ``?`` one char.

Paths are relative and ``/``-separated. ``a/**`` also matches ``a`` itself, and a
bare ``**`` matches every path including the root (``""``).
"""

from __future__ import annotations

import re
from functools import lru_cache


@lru_cache(maxsize=1024)
def compile_glob(pattern: str) -> re.Pattern:
    if not pattern:
        raise ValueError("empty glob pattern")
    segments = pattern.strip("/").split("/")
    out = []
    last = len(segments) - 1
    for i, seg in enumerate(segments):
        if seg == "**":
            if len(segments) == 1:
                out.append(".*")
            elif i == 0:
                out.append("(?:.*/)?")
            elif i == last:
                # swallow the separator emitted before this segment
                out[-1] = out[-1][:-1]
                out.append("(?:/.*)?")
            else:
                out.append("(?:[^/]+/)*")
            continue
        out.append(_segment(seg))
        if i != last:
            out.append("/")
    return re.compile("".join(out) + r"\Z", re.DOTALL)


def _segment(seg: str) -> str:
    parts = []
    for ch in seg:
        if ch == "*":
            if not parts or parts[-1] != "[^/]*":
                parts.append("[^/]*")
        elif ch == "?":
            parts.append("[^/]")
        else:
            parts.append(re.escape(ch))
    return "".join(parts)


def glob_match(pattern: str, path: str) -> bool:
    return compile_glob(pattern).match(path) is not None


def match_any(patterns, path: str) -> bool:
    return any(glob_match(p, path) for p in patterns)
