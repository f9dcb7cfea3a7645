"""Stakeholder views: which entities and metrics one report page shows."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from ..errors import ConfigError, DuplicateId
from ..patterns import compile_glob, glob_match
from ..textformat import NAME_RE


class Detail(enum.Enum):
    OVERVIEW = "OVERVIEW"
    FULL = "FULL"


@dataclass(frozen=True)
class ViewSpec:
    id: str
    audience: str = ""
    scope: str = "**"
    detail: Detail = Detail.FULL
    metrics: tuple[str, ...] = ()

    def __post_init__(self):
        if not NAME_RE.fullmatch(self.id):
            raise ConfigError(f"invalid view id {self.id!r}")
        try:
            compile_glob(self.scope)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"view {self.id!r}: invalid scope glob {self.scope!r}: {exc}") from None

    def in_scope(self, path: str) -> bool:
        return glob_match(self.scope, path)


DEFAULT_VIEW = ViewSpec("full", audience="developers")


def views_from_config(decls) -> list[ViewSpec]:
    """Typed views from ``view`` sections; a config without views gets one FULL view."""
    views = []
    seen: dict[str, int | None] = {}
    for decl in decls:
        if decl.id in seen:
            raise DuplicateId(decl.id, seen[decl.id], decl.line)
        seen[decl.id] = decl.line
        p = decl.params

        def get(key, kind, default):
            value = p.get(key, default)
            if not isinstance(value, kind) or (kind is tuple and not all(isinstance(v, str) for v in value)):
                raise ConfigError(f"view {decl.id!r}: {key} has the wrong type", decl.line)
            return value

        detail = get("detail", str, "FULL").upper()
        if detail not in Detail.__members__:
            raise ConfigError(f"view {decl.id!r}: detail must be OVERVIEW or FULL, got {detail!r}", decl.line)
        try:
            views.append(ViewSpec(decl.id, get("audience", str, ""), get("scope", str, "**"), Detail[detail],
                                  get("metrics", tuple, ())))
        except ConfigError as exc:
            raise ConfigError(exc.message, decl.line) from None
    return views or [DEFAULT_VIEW]


def depth_of(path: str) -> int:
    return 0 if not path else path.count("/") + 1


def view_entities(tree, view: ViewSpec) -> list:
    """Nodes shown by ``view``, in pre-order.

    FULL shows every node in scope; OVERVIEW shows the shallowest in-scope
    nodes and their direct children.
    """
    matched = [n for n in tree.walk() if view.in_scope(n.path)]
    if view.detail is Detail.FULL or not matched:
        return matched
    top = min(depth_of(n.path) for n in matched)
    return [n for n in matched if depth_of(n.path) <= top + 1]


def view_root(tree, view: ViewSpec):
    """The smallest subtree holding every in-scope file, restricted to them."""
    sub = tree.copy_structure(keep=lambda f: view.in_scope(f.path))
    while sub is not None and len(sub.children) == 1 and not sub.children[0].is_file:
        sub = sub.children[0]
    return sub
