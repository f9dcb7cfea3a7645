"""Squarified tree-map layout over a weighted resource tree."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..assess import Color


class ZeroTotalWeight(ValueError):
    pass


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class TreeMapTile:
    path: str
    rect: Rect
    weight: float
    depth: int
    leaf: bool
    color: Color | None = None


@dataclass
class TreeMapLayout:
    tiles: list[TreeMapTile]
    bounds: Rect
    weight_metric: str

    def by_path(self) -> dict[str, TreeMapTile]:
        return {t.path: t for t in self.tiles}

    def leaves(self) -> list[TreeMapTile]:
        return [t for t in self.tiles if t.leaf]


def node_weights(tree, metric: str) -> dict[str, float]:
    """Leaf weights from ``metric`` (missing counts as 0); inner nodes sum their children."""
    weights: dict[str, float] = {}
    stack = [(tree, False)]
    while stack:
        node, expanded = stack.pop()
        if node.children and not expanded:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
            continue
        if node.children:
            weights[node.path] = math.fsum(weights[c.path] for c in node.children)
            continue
        value = node.values.get(metric, 0)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            value = 0
        if value < 0 or not math.isfinite(value):
            raise ValueError(f"{node.path}: weight {metric}={value} must be finite and non-negative")
        weights[node.path] = float(value)
    return weights


def _worst(row: list[float], side: float) -> float:
    total = sum(row)
    s2 = side * side
    t2 = total * total
    return max(s2 * max(row) / t2, t2 / (s2 * min(row)))


def squarify(weights: list[float], rect: Rect) -> list[Rect]:
    """Split ``rect`` into one rectangle per weight (positive, in the given order).

    Rows are closed when adding the next item would worsen the row's worst
    aspect ratio. The last item of each row and the last row snap to the
    remaining edge, so the pieces tile ``rect`` with no gaps.
    """
    total = math.fsum(weights)
    if not weights:
        return []
    scale = rect.area / total
    areas = [w * scale for w in weights]
    out: list[Rect] = []
    x, y, w, h = rect.x, rect.y, rect.w, rect.h
    i = 0
    n = len(areas)
    while i < n:
        side = min(w, h)
        row = [areas[i]]
        i += 1
        if side > 0:
            while i < n and _worst(row + [areas[i]], side) < _worst(row, side):
                row.append(areas[i])
                i += 1
        last_row = i == n
        row_sum = math.fsum(row)
        if w >= h:
            # column on the left, stacked top to bottom
            thick = w if last_row else (row_sum / h if h else 0.0)
            cursor = y
            for k, a in enumerate(row):
                extent = (y + h - cursor) if k == len(row) - 1 else (a / thick if thick else 0.0)
                out.append(Rect(x, cursor, thick, extent))
                cursor += extent
            x, w = x + thick, (0.0 if last_row else w - thick)
        else:
            thick = h if last_row else (row_sum / w if w else 0.0)
            cursor = x
            for k, a in enumerate(row):
                extent = (x + w - cursor) if k == len(row) - 1 else (a / thick if thick else 0.0)
                out.append(Rect(cursor, y, extent, thick))
                cursor += extent
            y, h = y + thick, (0.0 if last_row else h - thick)
    return out


def layout_treemap(tree, weight_metric: str, bounds=(0.0, 0.0, 1.0, 1.0), max_depth: int | None = None,
                   color_metric: str | None = None) -> TreeMapLayout:
    """Tile ``bounds`` by ``weight_metric``, recursively.

    Zero-weight nodes are omitted. Siblings are laid out in descending weight,
    ties broken by name. ``max_depth`` stops subdivision below that depth.
    """
    bounds = bounds if isinstance(bounds, Rect) else Rect(*map(float, bounds))
    weights = node_weights(tree, weight_metric)
    if weights[tree.path] <= 0:
        raise ZeroTotalWeight(f"total {weight_metric} weight of {tree.path or '<root>'} is zero")

    def color_of(node) -> Color | None:
        if not color_metric:
            return None
        a = node.assessments.get(color_metric)
        return a.color if a is not None else None

    tiles: list[TreeMapTile] = []
    stack = [(tree, bounds, 0)]
    while stack:
        node, rect, depth = stack.pop()
        kids = [c for c in node.children if weights[c.path] > 0]
        subdivide = bool(kids) and (max_depth is None or depth < max_depth)
        tiles.append(TreeMapTile(node.path, rect, weights[node.path], depth, not subdivide, color_of(node)))
        if not subdivide:
            continue
        kids.sort(key=lambda c: (-weights[c.path], c.name))
        rects = squarify([weights[c.path] for c in kids], rect)
        stack.extend(reversed([(c, r, depth + 1) for c, r in zip(kids, rects)]))
    return TreeMapLayout(tiles, bounds, weight_metric)
