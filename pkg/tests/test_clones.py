from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conquard.clones import (
    InvalidMinLength, build_report, cloned_line_sets, cloning_ratio, detect_clones, format_listing,
    maximal_repeats,
)
from conquard.clones.suffix import lcp_array, suffix_array
from conquard.scope import C_LIKE, tokenize
from conftest import fake_tokens, planted_corpus
from oracles import brute_force_cloned_lines, brute_force_clones


def as_oracle_form(classes):
    return {(c.length, tuple((o.path, o.start) for o in c.occurrences)) for c in classes}


def token_corpus(files):
    return {p: fake_tokens(syms, p) for p, syms in files.items()}


@given(st.lists(st.integers(0, 3), max_size=60))
def test_suffix_array_matches_sorting(seq):
    sa = suffix_array(np.asarray(seq, dtype=np.int64)).tolist()
    assert sa == sorted(range(len(seq)), key=lambda i: seq[i:])
    lcp = lcp_array(seq, sa)
    for i in range(1, len(seq)):
        a, b = seq[sa[i - 1]:], seq[sa[i]:]
        k = 0
        while k < min(len(a), len(b)) and a[k] == b[k]:
            k += 1
        assert lcp[i] == k


def test_unique_tokens_have_no_clones():
    assert detect_clones(token_corpus({"a": [f"u{i}" for i in range(200)]}), 2) == []


def test_identical_files():
    syms = [f"u{i}" for i in range(100)]
    classes = detect_clones(token_corpus({"a": syms, "b": list(syms)}), 25)
    assert len(classes) == 1
    assert classes[0].length == 100
    assert [(o.path, o.start, o.end) for o in classes[0].occurrences] == [("a", 0, 100), ("b", 0, 100)]


def test_invalid_min_length():
    with pytest.raises(InvalidMinLength):
        detect_clones(token_corpus({"a": ["x"] * 5}), 1)
    with pytest.raises(InvalidMinLength):
        maximal_repeats([[1, 2]], 0)


def test_empty_corpus_ratio_warns(caplog):
    assert cloning_ratio([], {}) == 0.0
    assert "empty" in caplog.text


def test_periodic_sequence():
    # "ab" repeated: the maximal repeat is the self-overlapping run minus one period
    corpus = token_corpus({"a": ["a", "b"] * 10})
    assert as_oracle_form(detect_clones(corpus, 3)) == brute_force_clones({"a": ["a", "b"] * 10}, 3)


@pytest.mark.parametrize("seed", range(25))
def test_matches_brute_force_oracle(seed):
    rng = random.Random(seed)
    files = planted_corpus(rng, max_tokens=1500)
    min_length = rng.choice([2, 3, 5, 8, 12, 25])
    assert as_oracle_form(detect_clones(token_corpus(files), min_length)) == brute_force_clones(files, min_length)


@given(st.dictionaries(st.sampled_from(["a", "b", "c"]), st.lists(st.sampled_from("xyz"), max_size=40), max_size=3),
       st.integers(2, 6))
def test_matches_oracle_on_tiny_corpora(files, min_length):
    assert as_oracle_form(detect_clones(token_corpus(files), min_length)) == brute_force_clones(files, min_length)


@given(st.lists(st.sampled_from("xyz"), max_size=60), st.integers(2, 8), st.integers(0, 6))
def test_larger_min_length_never_adds_cloned_lines(seq, k, extra):
    corpus = token_corpus({"a": seq, "b": seq[::2]})
    small = cloned_line_sets(detect_clones(corpus, k), corpus)
    large = cloned_line_sets(detect_clones(corpus, k + extra), corpus)
    for path, lines in large.items():
        assert lines <= small.get(path, set())


@given(st.lists(st.sampled_from("xyz"), max_size=60), st.integers(2, 8))
def test_every_class_has_identical_occurrences(seq, k):
    corpus = token_corpus({"a": seq, "b": seq[3:]})
    for cls in detect_clones(corpus, k):
        assert len(cls.occurrences) >= 2 and cls.length >= k
        texts = {tuple(t.normalized for t in corpus[o.path][o.start:o.end]) for o in cls.occurrences}
        assert len(texts) == 1


def _c_unit(rng, names):
    out = []
    for _ in range(rng.randint(3, 12)):
        a, b, c = (rng.choice(names) for _ in range(3))
        out.append(rng.choice([f"{a} = {b} + {c};", f"if ({a} > 1) {{ {b}({c}); }}", f"return {a};",
                               f"while ({a}) {{ {b} = {c} * 2; }}", f"{a}[{b}] = \"s\";"]))
    return "\n".join(out) + "\n"


@pytest.mark.parametrize("seed", range(5))
def test_normalization_invariance(seed):
    # renaming identifiers and changing literal values leaves clone positions unchanged
    rng = random.Random(seed)
    texts = {f"f{i}.c": _c_unit(rng, ["a", "b", "c"]) for i in range(4)}
    texts["f4.c"] = texts["f0.c"]
    renamed = {p: t.replace("a", "alpha").replace("b", "beta").replace("1", "42") for p, t in texts.items()}
    one = {p: tokenize(t, C_LIKE, p) for p, t in texts.items()}
    two = {p: tokenize(t, C_LIKE, p) for p, t in renamed.items()}
    assert as_oracle_form(detect_clones(one, 10)) == as_oracle_form(detect_clones(two, 10))


def ratio_corpus():
    # 100 source lines of 4 unique tokens each; lines 21-50 of a.x reappear as lines 1-30 of b.x
    counter = iter(range(10**6))
    line = lambda: [f"u{next(counter)}" for _ in range(4)]  # noqa: E731
    block = [tok for _ in range(30) for tok in line()]
    a = [tok for _ in range(20) for tok in line()] + block
    b = list(block) + [tok for _ in range(20) for tok in line()]
    return {"a.x": a, "b.x": b}


def test_ratio_sixty_percent():
    files = ratio_corpus()
    corpus = token_corpus(files)
    assert sum(len({t.line for t in ts}) for ts in corpus.values()) == 100
    report = build_report(corpus, 25)
    assert report.ratio == 0.6
    oracle = brute_force_cloned_lines(corpus, 25)
    assert sum(len(v) for v in oracle.values()) == 60
    assert report.cloned_lines == oracle


def test_ratio_whole_corpus_duplicated():
    files = ratio_corpus()
    files.update({"c.x": list(files["a.x"]), "d.x": list(files["b.x"])})
    assert build_report(token_corpus(files), 25).ratio == 1.0


def test_no_clones_ratio_zero():
    corpus = token_corpus({"a": [f"u{i}" for i in range(40)]})
    assert cloning_ratio(detect_clones(corpus, 5), corpus) == 0.0


def test_listing_and_order():
    syms = [f"u{i}" for i in range(30)]
    corpus = token_corpus({"b": syms + ["v"] * 3 + syms[:10], "a": syms[:10]}, )
    classes = detect_clones(corpus, 5)
    lengths = [c.length for c in classes]
    assert lengths == sorted(lengths, reverse=True)
    listing = format_listing(classes).splitlines()
    assert [row.split("\t") for row in listing] == [["a", "1", "3", "1"], ["b", "1", "3", "1"], ["b", "9", "11", "1"]]
    assert detect_clones(corpus, 5) == classes
