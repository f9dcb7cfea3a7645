"""Suffix array (prefix doubling) and LCP array (Kasai) over integer sequences."""

from __future__ import annotations

import numpy as np


def suffix_array(seq) -> np.ndarray:
    """Start positions of all suffixes of ``seq`` in lexicographic order.

    A suffix that is a proper prefix of another sorts first.
    """
    seq = np.asarray(seq)
    n = len(seq)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    _, rank = np.unique(seq, return_inverse=True)
    rank = rank.astype(np.int64).reshape(-1)
    sa = np.argsort(rank, kind="stable")
    if n == 1:
        return sa.astype(np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        r1 = rank[sa]
        r2 = second[sa]
        boundary = np.empty(n, dtype=bool)
        boundary[0] = True
        boundary[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[sa] = np.cumsum(boundary) - 1
        rank = new_rank
        if rank[sa[-1]] == n - 1 or k >= n:
            return sa.astype(np.int64)
        k *= 2


def lcp_array(seq, sa) -> list[int]:
    """``lcp[i]`` is the common prefix length of suffixes ``sa[i-1]`` and ``sa[i]``; ``lcp[0] = 0``."""
    s = list(seq.tolist() if isinstance(seq, np.ndarray) else seq)
    order = sa.tolist() if isinstance(sa, np.ndarray) else list(sa)
    n = len(s)
    rank = [0] * n
    for i, p in enumerate(order):
        rank[p] = i
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            h = 0
            continue
        j = order[r - 1]
        while i + h < n and j + h < n and s[i + h] == s[j + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return lcp
