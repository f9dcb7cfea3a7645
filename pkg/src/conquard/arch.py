"""File-level dependency extraction and architecture conformance checking.

The policy is deny-by-default: dependencies inside one component are always
allowed; dependencies between components need an explicit ``allow`` edge.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .patterns import glob_match
from .scope.lexer import TokenKind
from .scope.profiles import profile_for
from .textformat import LineScanner, iter_lines, parse_assignment


class SpecError(ConfigError):
    pass


@dataclass(frozen=True)
class Component:
    name: str
    patterns: tuple[str, ...]

    def matches(self, path: str) -> bool:
        return any(glob_match(p, path) for p in self.patterns)


@dataclass(frozen=True)
class ArchitectureSpec:
    components: tuple[Component, ...]
    allowed: frozenset[tuple[str, str]]

    def __post_init__(self):
        names = [c.name for c in self.components]
        dupes = sorted(n for n, k in Counter(names).items() if k > 1)
        if dupes:
            raise SpecError(f"duplicate component names: {', '.join(dupes)}")
        for a, b in sorted(self.allowed):
            for end in (a, b):
                if end not in names:
                    raise SpecError(f"allowed edge {a} -> {b} names unknown component {end!r}")

    def component_of(self, path: str) -> str | None:
        owners = [c.name for c in self.components if c.matches(path)]
        if len(owners) > 1:
            raise SpecError(f"{path} matches several components: {', '.join(owners)}")
        return owners[0] if owners else None


@dataclass(frozen=True, order=True)
class Dependency:
    source: str
    line: int
    target: str
    internal: bool = True


class Reason(enum.Enum):
    FORBIDDEN_EDGE = "FORBIDDEN_EDGE"
    UNMAPPED_FILE = "UNMAPPED_FILE"


@dataclass(frozen=True)
class Violation:
    reason: Reason
    path: str
    dependency: Dependency | None = None
    from_component: str | None = None
    to_component: str | None = None


@dataclass
class ConformanceResult:
    violations: list[Violation]
    edges: dict[tuple[str, str], int] = field(default_factory=dict)
    components: tuple[str, ...] = ()
    allowed: frozenset = frozenset()
    external_count: int = 0

    def per_file(self) -> Counter:
        return Counter(v.path for v in self.violations)


def parse_arch_spec(text: str, source: str | None = None) -> ArchitectureSpec:
    """Parse ``component <name>`` sections (with ``match = [globs]``) and ``allow a -> b`` lines."""
    components: list[tuple[str, int, dict]] = []
    allowed: set[tuple[str, str]] = set()
    current: dict | None = None
    for line in iter_lines(text):
        scanner = LineScanner(line, source)
        if line.indent:
            if current is None:
                raise scanner.error("assignment outside a component section")
            key, value = parse_assignment(scanner, allow_formal=False)
            if key != "match":
                raise scanner.error(f"unknown component key {key!r}")
            if not (isinstance(value, tuple) and value and all(isinstance(v, str) for v in value)):
                raise scanner.error("match must be a non-empty list of glob strings")
            current[key] = value
            continue
        word = scanner.name("keyword")
        if word == "component":
            name = scanner.name("component name")
            scanner.expect_end()
            current = {}
            components.append((name, line.number, current))
        elif word == "allow":
            a = scanner.name("component name")
            scanner.expect("->")
            b = scanner.name("component name")
            scanner.expect_end()
            allowed.add((a, b))
            current = None
        else:
            raise scanner.error(f"expected 'component' or 'allow', got {word!r}")
    built = []
    for name, number, params in components:
        if "match" not in params:
            raise SpecError(f"component {name!r} has no match patterns", number, source=source)
        built.append(Component(name, params["match"]))
    return ArchitectureSpec(tuple(built), frozenset(allowed))


def load_arch_spec(path: str | Path) -> ArchitectureSpec:
    path = Path(path)
    return parse_arch_spec(path.read_text(encoding="utf-8"), source=str(path))


class _Resolver:
    """Maps module paths (``a.b``, ``a/b.h``, ``.sibling``) to corpus files.

    A module matches a file when its slash form equals the file's extension-less
    path or a ``/``-aligned suffix of it; the shortest such path wins.
    """

    def __init__(self, files: list[str]):
        self.by_stem: dict[str, set[str]] = {}
        self.by_path: dict[str, set[str]] = {}
        for path in files:
            last = path.rsplit("/", 1)[-1]
            stem = path.rsplit(".", 1)[0] if "." in last else path
            keys = [stem]
            if stem.endswith("/__init__") or stem == "__init__":
                keys.append(stem[: -len("__init__")].rstrip("/"))
            for key in keys:
                for suffix in _suffixes(key):
                    self.by_stem.setdefault(suffix, set()).add(path)
            for suffix in _suffixes(path):
                self.by_path.setdefault(suffix, set()).add(path)

    def resolve(self, module: str, importer: str) -> str | None:
        if not module:
            return None
        if module.startswith("."):
            dots = len(module) - len(module.lstrip("."))
            base = importer.split("/")[:-1]
            if dots - 1 > len(base):
                return None
            base = base[: len(base) - (dots - 1)]
            rest = module[dots:].replace(".", "/")
            key = "/".join(base + ([rest] if rest else []))
            hits = {p for p in self.by_stem.get(key, ()) if _stem_equals(p, key)}
            return _pick(hits)
        if "/" in module or module.endswith((".h", ".hpp", ".hh")):
            sibling = "/".join(importer.split("/")[:-1] + [module])
            if sibling in self.by_path.get(sibling, ()):
                return sibling
            return _pick(self.by_path.get(module, set()))
        return _pick(self.by_stem.get(module.strip(".").replace(".", "/"), set()))


def _suffixes(path: str):
    parts = path.split("/")
    return ["/".join(parts[i:]) for i in range(len(parts))] if path else [""]


def _stem_equals(path: str, key: str) -> bool:
    stem = path.rsplit(".", 1)[0] if "." in path.rsplit("/", 1)[-1] else path
    return stem == key or stem == (key + "/__init__" if key else "__init__")


def _pick(candidates) -> str | None:
    if not candidates:
        return None
    return sorted(candidates, key=lambda p: (len(p), p))[0]


def extract_dependencies(tree, profiles) -> list[Dependency]:
    """One dependency per import statement; unresolvable targets are kept as external."""
    profiles = list(profiles)
    files = [n for n in tree.files() if n.tokens is not None]
    resolver = _Resolver(sorted(n.path for n in tree.files()))
    deps = []
    for node in files:
        profile = profile_for(node.path, profiles)
        if profile is None or not profile.compiled_imports:
            continue
        starters = {}
        for tok in node.tokens:
            if tok.line not in starters:
                starters[tok.line] = tok
        lines = node.text.split("\n")
        for number, tok in sorted(starters.items()):
            if tok.kind is TokenKind.LITERAL or number > len(lines):
                continue
            raw = lines[number - 1]
            if tok.column != len(raw) - len(raw.lstrip()):
                continue
            for pattern in profile.compiled_imports:
                m = pattern.match(raw)
                if not m:
                    continue
                module = m.group(1).rstrip(".*") if not m.group(1).startswith(".") else m.group(1)
                target = resolver.resolve(module, node.path)
                if target == node.path:
                    break
                if target is None:
                    deps.append(Dependency(node.path, number, module, internal=False))
                else:
                    deps.append(Dependency(node.path, number, target, internal=True))
                break
    return sorted(deps)


def check_conformance(deps, spec: ArchitectureSpec, files=()) -> ConformanceResult:
    """Check internal dependencies against ``spec``.

    ``files`` adds files that must be mapped even if they take part in no
    dependency. Violations are ordered by path, then line.
    """
    internal = [d for d in deps if d.internal]
    cache: dict[str, str | None] = {}

    def owner(path: str) -> str | None:
        if path not in cache:
            cache[path] = spec.component_of(path)
        return cache[path]

    violations = []
    edges: Counter = Counter()
    unmapped = set()
    for path in files:
        if owner(path) is None:
            unmapped.add(path)
    for dep in internal:
        a, b = owner(dep.source), owner(dep.target)
        if a is None:
            unmapped.add(dep.source)
        if b is None:
            unmapped.add(dep.target)
        if a is None or b is None:
            continue
        edges[(a, b)] += 1
        if a != b and (a, b) not in spec.allowed:
            violations.append(Violation(Reason.FORBIDDEN_EDGE, dep.source, dep, a, b))
    violations.extend(Violation(Reason.UNMAPPED_FILE, path) for path in unmapped)
    violations.sort(key=lambda v: (v.path, v.dependency.line if v.dependency else 0,
                                   v.reason.value, v.dependency.target if v.dependency else ""))
    return ConformanceResult(
        violations=violations,
        edges=dict(sorted(edges.items())),
        components=tuple(c.name for c in spec.components),
        allowed=spec.allowed,
        external_count=sum(1 for d in deps if not d.internal),
    )
