from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conquard.errors import ConfigSyntaxError
from conquard.patterns import glob_match
from conquard.textformat import Formal, Line, LineScanner, Reference, format_value, parse_sections


def scan_value(text, allow_formal=True):
    return LineScanner(Line(1, 0, text)).value(allow_formal)


@pytest.mark.parametrize("text, expected", [
    ('"abc"', "abc"),
    ('"a\\"b\\n"', 'a"b\n'),
    ("42", 42),
    ("-7", -7),
    ("2.5", 2.5),
    ("1e3", 1000.0),
    ("true", True),
    ("false", False),
    ("[]", ()),
    ('["a", 1, @x.y]', ("a", 1, Reference("x", "y"))),
    ("@scan.tree", Reference("scan", "tree")),
    ("@b1.inner.out", Reference("b1.inner", "out")),
    ("$tree", Formal("tree")),
])
def test_values(text, expected):
    assert scan_value(text) == expected


@pytest.mark.parametrize("text", ['"open', "[1, [2]]", "@noport", "maybe", '"bad \\q"'])
def test_bad_values(text):
    with pytest.raises(ConfigSyntaxError):
        scan_value(text)


def test_formal_rejected_outside_blocks():
    with pytest.raises(ConfigSyntaxError):
        scan_value("$x", allow_formal=False)


def test_error_carries_line_and_column():
    with pytest.raises(ConfigSyntaxError) as info:
        LineScanner(Line(7, 2, "  x = ?")).value()
    assert info.value.line == 7 and info.value.column == 3


scalars = st.one_of(
    st.text(alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\r"), max_size=12),
    st.integers(-10**6, 10**6),
    st.floats(allow_nan=False, allow_infinity=False, width=64),
    st.booleans(),
)


@given(st.one_of(scalars, st.lists(scalars, max_size=5).map(tuple)))
def test_format_value_round_trips(value):
    text = format_value(value)
    assert scan_value(text) == value


def test_parse_sections():
    text = "# c\nprofile a\n  extensions = [\".x\"]\n\nprofile b\n  extensions = [\".y\"]\n"
    sections = parse_sections(text, "profile")
    assert [(n, p) for n, _, p in sections] == [("a", {"extensions": (".x",)}), ("b", {"extensions": (".y",)})]


@pytest.mark.parametrize("pattern, path, expected", [
    ("**/*.x", "a.x", True),
    ("**/*.x", "gen/b.x", True),
    ("gen/**", "gen/b.x", True),
    ("gen/**", "gen", True),
    ("gen/**", "generated/b.x", False),
    ("*.x", "gen/b.x", False),
    ("a/?.c", "a/b.c", True),
    ("a/?.c", "a/bb.c", False),
    ("**", "", True),
    ("a/**/z", "a/z", True),
    ("a/**/z", "a/b/c/z", True),
])
def test_glob_dialect(pattern, path, expected):
    assert glob_match(pattern, path) is expected
