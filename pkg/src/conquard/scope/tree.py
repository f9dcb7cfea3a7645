"""Resource tree of the analyzed system and the directory scanner."""

from __future__ import annotations

import enum
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

from ..assess import Assessment
from ..patterns import glob_match, match_any
from .lexer import TokenStream, tokenize
from .profiles import LanguageProfile, check_profiles, profile_for

log = logging.getLogger(__name__)

BINARY_PROBE = 4096


class NodeKind(enum.Enum):
    DIRECTORY = "dir"
    FILE = "file"


class _Missing:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "MISSING"

    def __bool__(self) -> bool:
        return False


MISSING = _Missing()


class RootNotFound(FileNotFoundError):
    pass


@dataclass(eq=False)
class ResourceNode:
    path: str
    kind: NodeKind
    children: list[ResourceNode] = field(default_factory=list)
    language: str | None = None
    values: dict[str, Any] = field(default_factory=dict)
    assessments: dict[str, Assessment] = field(default_factory=dict)
    text: str | None = field(default=None, repr=False)
    tokens: TokenStream | None = field(default=None, repr=False)
    # profiles the tree was tokenized with (root only)
    profiles: tuple | None = field(default=None, repr=False)

    @property
    def name(self) -> str:
        return self.path.rsplit("/", 1)[-1]

    @property
    def is_file(self) -> bool:
        return self.kind is NodeKind.FILE

    def walk(self) -> Iterator[ResourceNode]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def files(self) -> Iterator[ResourceNode]:
        return (n for n in self.walk() if n.is_file)

    def find(self, path: str) -> ResourceNode | None:
        for node in self.walk():
            if node.path == path:
                return node
        return None

    def attach(self, metric: str, value: Any) -> None:
        """Attach a metric value or an :class:`Assessment`; re-attachment warns."""
        if not metric:
            raise ValueError("metric id must be non-empty")
        target = self.assessments if isinstance(value, Assessment) else self.values
        if metric in target:
            log.warning("%s: overwriting %s for %r", self.path or "<root>",
                        "assessment" if target is self.assessments else "value", metric)
        target[metric] = value

    def value(self, metric: str) -> Any:
        return self.values.get(metric, MISSING)

    def assessment(self, metric: str) -> Assessment | _Missing:
        return self.assessments.get(metric, MISSING)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"path": self.path, "kind": self.kind.value}
        if self.language:
            out["language"] = self.language
        if self.values:
            out["values"] = {k: self.values[k] for k in sorted(self.values)}
        if self.assessments:
            out["assessments"] = {k: self.assessments[k].color.name for k in sorted(self.assessments)}
        if self.kind is NodeKind.DIRECTORY:
            out["children"] = [c.to_dict() for c in self.children]
        return out

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=str)

    def copy_structure(self, keep=None) -> ResourceNode | None:
        """Copy the node hierarchy; ``keep(file_node)`` filters files, empty dirs are pruned.

        Text and tokens are shared, values and assessments are copied.
        """
        if self.is_file:
            if keep is not None and not keep(self):
                return None
            return ResourceNode(self.path, self.kind, [], self.language, dict(self.values),
                                dict(self.assessments), self.text, self.tokens)
        children = [c for c in (child.copy_structure(keep) for child in self.children) if c is not None]
        if not children and self.path:
            return None
        return ResourceNode(self.path, self.kind, children, self.language, dict(self.values),
                            dict(self.assessments), profiles=self.profiles)


def attach_value(node: ResourceNode, metric: str, value: Any) -> ResourceNode:
    node.attach(metric, value)
    return node


def read_value(node: ResourceNode, metric: str) -> Any:
    return node.value(metric)


def _child_path(parent: str, name: str) -> str:
    return f"{parent}/{name}" if parent else name


def scan(root: str | os.PathLike, include=None, exclude=()) -> ResourceNode:
    """Build the resource tree of ``root``.

    A file is kept iff it matches some include glob and no exclude glob. Empty
    directories are pruned; binary files (NUL in the first 4 KiB) are skipped.
    """
    root = Path(root)
    if not root.is_dir():
        raise RootNotFound(f"project root not found: {root}")
    include = tuple(include) if include else ("**/*",)
    exclude = tuple(exclude)
    prunable = tuple(p[:-3] for p in exclude if p.endswith("/**") and len(p) > 3)

    def visit(directory: Path, rel: str) -> ResourceNode | None:
        try:
            entries = sorted(os.scandir(directory), key=lambda e: e.name)
        except OSError as exc:
            log.warning("unreadable directory %s: %s", rel or ".", exc)
            return None
        children = []
        for entry in entries:
            path = _child_path(rel, entry.name)
            try:
                is_dir = entry.is_dir(follow_symlinks=False)
                is_file = entry.is_file()
            except OSError as exc:
                log.warning("unreadable entry %s: %s", path, exc)
                continue
            if is_dir:
                if any(glob_match(p, path) for p in prunable):
                    continue
                child = visit(Path(entry.path), path)
                if child is not None and child.children:
                    children.append(child)
            elif is_file:
                if not match_any(include, path) or match_any(exclude, path):
                    continue
                node = _load_file(Path(entry.path), path)
                if node is not None:
                    children.append(node)
        return ResourceNode(rel, NodeKind.DIRECTORY, children)

    tree = visit(root, "")
    return tree if tree is not None else ResourceNode("", NodeKind.DIRECTORY)


def _load_file(path: Path, rel: str) -> ResourceNode | None:
    try:
        data = path.read_bytes()
    except OSError as exc:
        log.warning("unreadable file %s: %s", rel, exc)
        return None
    if b"\0" in data[:BINARY_PROBE]:
        log.warning("skipping binary file %s", rel)
        return None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        log.warning("%s: invalid UTF-8 replaced", rel)
        text = data.decode("utf-8", errors="replace")
    return ResourceNode(rel, NodeKind.FILE, text=text)


def tokenize_tree(tree: ResourceNode, profiles) -> ResourceNode:
    """Assign a language and a token stream to every file a profile claims."""
    profiles = list(profiles)
    check_profiles(profiles)
    for node in tree.files():
        profile = profile_for(node.path, profiles)
        if profile is None or node.text is None:
            continue
        node.language = profile.name
        node.tokens = tokenize(node.text, profile, node.path)
    tree.profiles = tuple(profiles)
    return tree


def profiles_by_name(profiles) -> dict[str, LanguageProfile]:
    return {p.name: p for p in profiles}
