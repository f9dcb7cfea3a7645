from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from conquard.assess import Assessment, Color  # noqa: E402
from conquard.scope.lexer import Token, TokenKind  # noqa: E402
from conquard.scope.tree import NodeKind, ResourceNode  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).resolve().parents[1] / "src" / "conquard" / "data"


def fake_tokens(symbols, path: str = "f", per_line: int = 4) -> list[Token]:
    """Tokens carrying ``symbols`` as their normalized text, ``per_line`` to a line."""
    return [Token(TokenKind.IDENTIFIER, str(s), str(s), path, i // per_line + 1, 0, i // per_line + 1, i)
            for i, s in enumerate(symbols)]


def random_tree(rng: random.Random, max_leaves: int = 60, metric: str = "m", missing: float = 0.1,
                integers: bool = True) -> ResourceNode:
    """Random directory tree whose leaves carry ``metric`` (sometimes missing)."""
    root = ResourceNode("", NodeKind.DIRECTORY)
    dirs = [root]
    leaves = rng.randint(1, max_leaves)
    counter = 0
    for _ in range(leaves):
        parent = rng.choice(dirs)
        counter += 1
        if rng.random() < 0.3:
            path = f"{parent.path}/d{counter}" if parent.path else f"d{counter}"
            node = ResourceNode(path, NodeKind.DIRECTORY)
            parent.children.append(node)
            dirs.append(node)
            parent = node
            counter += 1
        path = f"{parent.path}/f{counter}" if parent.path else f"f{counter}"
        leaf = ResourceNode(path, NodeKind.FILE)
        if rng.random() >= missing:
            leaf.values[metric] = rng.randint(-50, 500) if integers else rng.uniform(-5, 50)
        parent.children.append(leaf)
    for d in dirs:
        d.children.sort(key=lambda c: c.name)
    return root


def color_tree(rng: random.Random, max_leaves: int = 60, metric: str = "m") -> ResourceNode:
    tree = random_tree(rng, max_leaves, metric, missing=0.0)
    for node in tree.walk():
        if not node.children and node.kind is NodeKind.FILE:
            if rng.random() < 0.85:
                node.assessments[metric] = Assessment(Color(rng.randint(0, 2)))
    return tree


@pytest.fixture
def rng():
    return random.Random(20240611)


def write_tree(root: Path, files: dict[str, str]) -> Path:
    for rel, text in files.items():
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    return root


def planted_corpus(rng: random.Random, max_tokens: int = 5000) -> dict[str, list[str]]:
    """Random symbol files (small alphabets) with duplicated snippets planted across them."""
    alphabet = [f"t{i}" for i in range(rng.choice([2, 3, 4, 8, 20, 60]))]
    budget = rng.randint(50, max_tokens)
    n_files = rng.randint(1, 5)
    sizes = [max(1, budget // n_files + rng.randint(-20, 20)) for _ in range(n_files)]
    while sum(sizes) > max_tokens:
        sizes[sizes.index(max(sizes))] -= 1
    files = {f"f{i}.x": [rng.choice(alphabet) for _ in range(size)] for i, size in enumerate(sizes)}
    paths = sorted(files)
    for _ in range(rng.randint(0, 6)):
        src = files[rng.choice(paths)]
        if len(src) < 2:
            continue
        length = rng.randint(2, min(80, len(src)))
        start = rng.randint(0, len(src) - length)
        snippet = src[start:start + length]
        for _ in range(rng.randint(1, 3)):
            dst = files[rng.choice(paths)]
            if len(dst) < length:
                continue
            at = rng.randint(0, len(dst) - length)
            dst[at:at + length] = snippet
    return files


SHARED = "\n".join(f"int helper{i}(int v) {{\n  while (v > {i}) {{ v = v - 1; }}\n  return v * {i};\n}}"
                   for i in range(8)) + "\n"

SMALL_PROJECT = {
    "src/moduleA/a1.c": '#include "b1.h"\n// entry point\n' + SHARED + "int main() { if (x) { y(); } return 0; }\n",
    "src/moduleA/a2.c": '#include "a1.h"\nint a2(int q) {\n  for (;;) { if (q) { break; } }\n  return q;\n}\n',
    "src/moduleB/b1.c": '#include "a1.h"\n/* shared code below */\n' + SHARED,
    "src/moduleB/deep/b2.c": "int b2() { return 2; }\n",
    "src/moduleA/a1.h": "int main();\n",
    "src/moduleB/b1.h": "int helper0(int v);\n",
    "gen/skip.c": "int generated;\n",
}

SMALL_ARCH = """component a
  match = ["src/moduleA/**"]
component b
  match = ["src/moduleB/**"]
allow a -> b
"""

FULL_PIPELINE = """processor scan : scanner
  include = ["src/**"]
processor tokens : tokenizer
  input = @scan.tree
processor size : loc-analyzer
  input = @tokens.tree
processor structure : structure-analyzer
  input = @size.tree
processor clones : clone-detector
  input = @structure.tree
  min_length = 20
  listing = true
processor deps : dependency-extractor
  input = @tokens.tree
processor layers : arch-checker
  input = @clones.tree
  deps = @deps.deps
  spec = "small.arch"
processor complexity : threshold-assessor
  input = @layers.tree
  metric = "cyclomatic"
  yellow = 5
  red = 10
processor snapshot : history-recorder
  input = @complexity.tree
  metrics = ["clone.ratio", "sloc"]
processor trend : trend-assessor
  input = @complexity.tree
  metric = "clone.ratio"
  blocking = {blocking}
processor sizes : treemap-renderer
  input = @complexity.tree
  weight = "sloc"
  color = "cyclomatic"
output complexity, clones, layers, trend, sizes
view manager
  audience = "management"
  detail = "OVERVIEW"
view moda
  scope = "src/moduleA/**"
"""


def make_project(root: Path, blocking: bool = False) -> tuple[Path, Path]:
    """Write the small project plus its pipeline; returns (project dir, config path)."""
    project = write_tree(root / "project", SMALL_PROJECT)
    conf = root / "conf"
    conf.mkdir(exist_ok=True)
    (conf / "small.arch").write_text(SMALL_ARCH)
    config = conf / "small.pipeline"
    config.write_text(FULL_PIPELINE.replace("{blocking}", "true" if blocking else "false"))
    return project, config


# ---------------------------------------------------------------- acceptance bookkeeping

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}

OPS = ["+", "-", "*", "/", "%", "&", "|", "^"]


def op_line(i: int) -> str:
    """A C statement whose normalized token sequence is unique for each i < 512."""
    a, b, c = OPS[i // 64 % 8], OPS[i // 8 % 8], OPS[i % 8]
    return f"v = w {a} x {b} y {c} z;"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")
