from __future__ import annotations

import random

import pytest

from conquard.arch import (
    ArchitectureSpec, Component, Dependency, Reason, SpecError, check_conformance, extract_dependencies,
    parse_arch_spec,
)
from conquard.patterns import glob_match
from conquard.scope import C_LIKE, SCRIPT, scan, tokenize_tree
from conftest import DATA, write_tree
from oracles import brute_force_conformance


def deps_of(tmp_path, files):
    write_tree(tmp_path, files)
    return extract_dependencies(tokenize_tree(scan(tmp_path), [C_LIKE, SCRIPT]), [C_LIKE, SCRIPT])


def test_no_imports(tmp_path):
    assert deps_of(tmp_path, {"a.java": "class A {}"}) == []


def test_internal_and_external_imports(tmp_path):
    deps = deps_of(tmp_path, {"a/b.java": "class B {}", "m.java": "import a.b;\nimport java.util;\nclass M {}"})
    assert deps == [Dependency("m.java", 1, "a/b.java", True), Dependency("m.java", 2, "java.util", False)]


def test_python_imports(tmp_path):
    deps = deps_of(tmp_path, {
        "pkg/__init__.py": "", "pkg/a.py": "from . import b\nfrom .b import x\nimport os\n", "pkg/b.py": "x = 1\n",
        "main.py": "import pkg.a\nfrom pkg import b\n",
    })
    internal = sorted((d.source, d.line, d.target) for d in deps if d.internal)
    assert internal == [("main.py", 1, "pkg/a.py"), ("main.py", 2, "pkg/__init__.py"),
                        ("pkg/a.py", 1, "pkg/__init__.py"), ("pkg/a.py", 2, "pkg/b.py")]
    assert [d.target for d in deps if not d.internal] == ["os"]


def test_imports_inside_strings_or_comments_ignored(tmp_path):
    deps = deps_of(tmp_path, {"a.py": 'x = """\nimport b\n"""\n# import b\n', "b.py": ""})
    assert deps == []


SPEC = """
component ui
  match = ["ui/**"]
component core
  match = ["core/**"]
allow ui -> core
"""


def test_forbidden_edge_reverse_direction():
    spec = parse_arch_spec(SPEC)
    deps = [Dependency("core/x.c", 3, "ui/y.c"), Dependency("ui/y.c", 1, "core/x.c")]
    result = check_conformance(deps, spec)
    assert [(v.reason, v.path, v.from_component, v.to_component) for v in result.violations] == [
        (Reason.FORBIDDEN_EDGE, "core/x.c", "core", "ui")]
    assert result.edges == {("core", "ui"): 1, ("ui", "core"): 1}


def test_intra_component_and_external_are_fine():
    spec = parse_arch_spec(SPEC)
    deps = [Dependency("ui/a.c", 1, "ui/b.c"), Dependency("core/a.c", 2, "stdio.h", internal=False)]
    result = check_conformance(deps, spec)
    assert result.violations == [] and result.external_count == 1


def test_unmapped_reported_once_per_file():
    spec = parse_arch_spec(SPEC)
    deps = [Dependency("lib/z.c", 1, "ui/a.c"), Dependency("lib/z.c", 2, "core/a.c")]
    result = check_conformance(deps, spec, files=["lib/z.c", "other.c"])
    assert [(v.reason, v.path) for v in result.violations] == [
        (Reason.UNMAPPED_FILE, "lib/z.c"), (Reason.UNMAPPED_FILE, "other.c")]


def test_spec_errors():
    with pytest.raises(SpecError):
        parse_arch_spec("component a\n  match = [\"x/**\"]\nallow a -> b\n")
    with pytest.raises(SpecError):
        parse_arch_spec("component a\n")
    overlapping = parse_arch_spec('component a\n  match = ["x/**"]\ncomponent b\n  match = ["**/*.c"]\n')
    with pytest.raises(SpecError):
        check_conformance([Dependency("x/y.c", 1, "x/z.c")], overlapping)
    with pytest.raises(SpecError):
        ArchitectureSpec((Component("a", ("x",)), Component("a", ("y",))), frozenset())


def test_shipped_self_spec_parses():
    spec = parse_arch_spec((DATA / "self.arch").read_text())
    assert len(spec.components) == 6


def random_case(rng: random.Random):
    names = [f"c{i}" for i in range(rng.randint(1, 6))]
    dirs = [f"d{i}" for i in range(rng.randint(1, 8))]
    files = [f"{rng.choice(dirs)}/f{i}.{rng.choice('ch')}" for i in range(rng.randint(1, 40))]
    components = {}
    for d in dirs:
        if rng.random() < 0.85:
            globs = [f"{d}/**"] if rng.random() < 0.7 else [f"{d}/*.c", f"{d}/*.h"]
            components.setdefault(rng.choice(names), []).extend(globs)
    allowed = {(a, b) for a in components for b in components if a != b and rng.random() < 0.4}
    deps = [Dependency(rng.choice(files), rng.randint(1, 50), rng.choice(files), rng.random() < 0.9)
            for _ in range(rng.randint(0, 80))]
    return deps, components, allowed, files


@pytest.mark.parametrize("seed", range(40))
def test_conformance_matches_brute_force(seed):
    deps, components, allowed, files = random_case(random.Random(seed))
    spec = ArchitectureSpec(tuple(Component(n, tuple(g)) for n, g in components.items()), frozenset(allowed))
    result = check_conformance(deps, spec, files)
    forbidden, unmapped = brute_force_conformance(deps, components, allowed, files, glob_match)
    got_forbidden = {(v.dependency.source, v.dependency.line, v.dependency.target, v.from_component, v.to_component)
                     for v in result.violations if v.reason is Reason.FORBIDDEN_EDGE}
    got_unmapped = [v.path for v in result.violations if v.reason is Reason.UNMAPPED_FILE]
    assert got_forbidden == forbidden
    assert sorted(got_unmapped) == sorted(unmapped) and len(got_unmapped) == len(set(got_unmapped))
