"""Language profiles: the per-language lexical and structural vocabulary."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from ..errors import ConfigError
from ..textformat import parse_sections


@dataclass(frozen=True)
class LanguageProfile:
    name: str
    extensions: tuple[str, ...]
    line_comments: tuple[str, ...] = ()
    block_comments: tuple[tuple[str, str], ...] = ()
    string_delimiters: tuple[str, ...] = ('"', "'")
    escape: str | None = "\\"
    keywords: frozenset[str] = frozenset()
    branch_keywords: frozenset[str] = frozenset()
    loop_keywords: frozenset[str] = frozenset()
    # empty: C-style heuristic, identifier ( ... ) { at procedure level
    procedure_keywords: frozenset[str] = frozenset()
    import_patterns: tuple[str, ...] = ()
    block_style: str = "braces"
    operators: tuple[str, ...] = ()
    case_sensitive: bool = True

    def __post_init__(self):
        if self.block_style not in ("braces", "indent"):
            raise ConfigError(f"profile {self.name!r}: block_style must be 'braces' or 'indent'")
        for open_, close in self.block_comments:
            if not open_ or not close:
                raise ConfigError(f"profile {self.name!r}: empty block comment delimiter")
        if any(not p for p in self.line_comments) or any(not d for d in self.string_delimiters):
            raise ConfigError(f"profile {self.name!r}: empty comment or string delimiter")
        for pattern in self.import_patterns:
            try:
                compiled = re.compile(pattern)
            except re.error as exc:
                raise ConfigError(f"profile {self.name!r}: bad import pattern {pattern!r}: {exc}") from None
            if compiled.groups < 1:
                raise ConfigError(f"profile {self.name!r}: import pattern needs a capture group")

    @cached_property
    def all_keywords(self) -> frozenset[str]:
        words = self.keywords | self.branch_keywords | self.loop_keywords | self.procedure_keywords
        return words if self.case_sensitive else frozenset(w.lower() for w in words)

    @cached_property
    def branch_keywords_folded(self) -> frozenset[str]:
        return frozenset(self.fold(w) for w in self.branch_keywords)

    @cached_property
    def loop_keywords_folded(self) -> frozenset[str]:
        return frozenset(self.fold(w) for w in self.loop_keywords)

    @cached_property
    def procedure_keywords_folded(self) -> frozenset[str]:
        return frozenset(self.fold(w) for w in self.procedure_keywords)

    @cached_property
    def compiled_imports(self) -> tuple[re.Pattern, ...]:
        return tuple(re.compile(p) for p in self.import_patterns)

    def fold(self, word: str) -> str:
        return word if self.case_sensitive else word.lower()

    def matches(self, path: str) -> bool:
        return any(path.endswith(ext) for ext in self.extensions)


_C_KEYWORDS = """
abstract auto bool boolean break byte case catch char class const continue default delete do
double else enum explicit extends extern false final finally float for foreach friend goto if
implements import in inline instanceof int interface internal long namespace native new null
operator out override package private protected public readonly ref register return sealed short
signed sizeof static struct super switch synchronized template this throw throws true try typedef
typename union unsigned using var virtual void volatile while
""".split()

_C_OPERATORS = (
    ">>>=", "<<=", ">>=", ">>>", "...", "->*", "::", "->", "++", "--", "<<", ">>", "<=", ">=",
    "==", "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "=>", "??",
)

C_LIKE = LanguageProfile(
    name="c-like",
    extensions=(".java", ".cs", ".c", ".h", ".cc", ".cpp", ".cxx", ".hh", ".hpp", ".hxx"),
    line_comments=("//",),
    block_comments=(("/*", "*/"),),
    string_delimiters=('"', "'"),
    keywords=frozenset(_C_KEYWORDS),
    branch_keywords=frozenset({"if", "while", "for", "foreach", "case", "catch"}),
    loop_keywords=frozenset({"while", "for", "foreach", "do"}),
    import_patterns=(
        r"^\s*import\s+(?:static\s+)?([\w.]+)\s*;",
        r"^\s*using\s+([\w.]+)\s*;",
        r'^\s*#\s*include\s*"([^"]+)"',
    ),
    block_style="braces",
    operators=_C_OPERATORS,
)

_SCRIPT_KEYWORDS = """
and as assert async await break class continue def del elif else except False finally for from
global if import in is lambda None nonlocal not or pass raise return True try while with yield
""".split()

SCRIPT = LanguageProfile(
    name="script",
    extensions=(".py", ".pyi"),
    line_comments=("#",),
    block_comments=(),
    string_delimiters=('"""', "'''", '"', "'"),
    keywords=frozenset(_SCRIPT_KEYWORDS),
    branch_keywords=frozenset({"if", "elif", "while", "for", "except", "case"}),
    loop_keywords=frozenset({"while", "for"}),
    procedure_keywords=frozenset({"def"}),
    import_patterns=(
        r"^\s*import\s+([\w.]+)",
        r"^\s*from\s+([\w.]+)\s+import\b",
    ),
    block_style="indent",
    operators=("**=", "//=", ">>=", "<<=", "**", "//", "==", "!=", "<=", ">=", "->", "+=", "-=",
               "*=", "/=", "%=", "&=", "|=", "^=", ">>", "<<", ":="),
)

BUILTIN_PROFILES: tuple[LanguageProfile, ...] = (C_LIKE, SCRIPT)


def check_profiles(profiles) -> None:
    """Extension lists must be disjoint across the profiles used in one run."""
    owner: dict[str, str] = {}
    for profile in profiles:
        for ext in profile.extensions:
            if ext in owner and owner[ext] != profile.name:
                raise ConfigError(
                    f"extension {ext!r} claimed by profiles {owner[ext]!r} and {profile.name!r}")
            owner[ext] = profile.name


def profile_for(path: str, profiles) -> LanguageProfile | None:
    best = None
    for profile in profiles:
        for ext in profile.extensions:
            if path.endswith(ext) and (best is None or len(ext) > best[0]):
                best = (len(ext), profile)
    return best[1] if best else None


_LIST_KEYS = {"extensions", "line_comment", "strings", "keywords", "branch_keywords",
              "loop_keywords", "procedure_keywords", "import_patterns", "operators",
              "block_comment"}
_SCALAR_KEYS = {"block_style": str, "escape": str, "case_sensitive": bool}


def parse_profiles(text: str, source: str | None = None) -> list[LanguageProfile]:
    """Parse a profile file made of ``profile <name>`` sections."""
    profiles = []
    for name, line, params in parse_sections(text, "profile", source):
        unknown = set(params) - _LIST_KEYS - set(_SCALAR_KEYS)
        if unknown:
            raise ConfigError(f"profile {name!r}: unknown keys {sorted(unknown)}", line, source=source)
        for key, value in params.items():
            if key in _LIST_KEYS and not (isinstance(value, tuple) and all(isinstance(v, str) for v in value)):
                raise ConfigError(f"profile {name!r}: {key} must be a list of strings", line, source=source)
            if key in _SCALAR_KEYS and not isinstance(value, _SCALAR_KEYS[key]):
                raise ConfigError(f"profile {name!r}: {key} has the wrong type", line, source=source)
        if not params.get("extensions"):
            raise ConfigError(f"profile {name!r}: extensions are required", line, source=source)
        block_comments = []
        for spec in params.get("block_comment", ()):
            parts = spec.split()
            if len(parts) != 2:
                raise ConfigError(f"profile {name!r}: block_comment entries are 'open close'", line,
                                  source=source)
            block_comments.append((parts[0], parts[1]))
        escape = params.get("escape", "\\")
        profiles.append(LanguageProfile(
            name=name,
            extensions=params["extensions"],
            line_comments=params.get("line_comment", ()),
            block_comments=tuple(block_comments),
            string_delimiters=params.get("strings", ('"', "'")),
            escape=escape or None,
            keywords=frozenset(params.get("keywords", ())),
            branch_keywords=frozenset(params.get("branch_keywords", ())),
            loop_keywords=frozenset(params.get("loop_keywords", ())),
            procedure_keywords=frozenset(params.get("procedure_keywords", ())),
            import_patterns=params.get("import_patterns", ()),
            block_style=params.get("block_style", "braces"),
            operators=params.get("operators", ()),
            case_sensitive=params.get("case_sensitive", True),
        ))
    return profiles


def load_profiles(path: str | Path) -> list[LanguageProfile]:
    path = Path(path)
    return parse_profiles(path.read_text(encoding="utf-8"), source=str(path))
