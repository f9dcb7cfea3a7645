"""Traffic-light assessment and aggregation along the resource tree."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .scope.tree import ResourceNode


class Color(enum.IntEnum):
    GREEN = 0
    YELLOW = 1
    RED = 2


@dataclass(frozen=True)
class Assessment:
    color: Color
    message: str = ""
    # (green, yellow, red) leaf histogram below an inner node
    counts: tuple[int, int, int] | None = None


class Direction(enum.Enum):
    HIGHER_IS_WORSE = "HIGHER_IS_WORSE"
    LOWER_IS_WORSE = "LOWER_IS_WORSE"


class AggregationOp(enum.Enum):
    SUM = "SUM"
    MAX = "MAX"
    MIN = "MIN"
    AVG = "AVG"
    MEDIAN = "MEDIAN"
    AVG_LEAVES = "AVG_LEAVES"


@dataclass(frozen=True)
class ThresholdRule:
    metric: str
    direction: Direction
    yellow: float
    red: float

    def __post_init__(self):
        if self.direction is Direction.HIGHER_IS_WORSE and self.yellow > self.red:
            raise ValueError(f"{self.metric}: yellow bound {self.yellow} exceeds red bound {self.red}")
        if self.direction is Direction.LOWER_IS_WORSE and self.yellow < self.red:
            raise ValueError(f"{self.metric}: yellow bound {self.yellow} below red bound {self.red}")


def assess(value: float, rule: ThresholdRule) -> Assessment:
    """Classify ``value``; a value on a bound gets the worse color."""
    if rule.direction is Direction.HIGHER_IS_WORSE:
        if value >= rule.red:
            color = Color.RED
        elif value >= rule.yellow:
            color = Color.YELLOW
        else:
            color = Color.GREEN
    else:
        if value <= rule.red:
            color = Color.RED
        elif value <= rule.yellow:
            color = Color.YELLOW
        else:
            color = Color.GREEN
    return Assessment(color, f"{rule.metric}={value:g}")


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float, Fraction)) and not isinstance(value, bool)


def _lower_median(values: list) -> Any:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _finish(exact: Fraction, all_int: bool):
    if all_int and exact.denominator == 1:
        return int(exact)
    return float(exact)


def aggregate_values(tree: ResourceNode, metric: str, op: AggregationOp | str) -> ResourceNode:
    """Attach ``op`` over children's values to every inner node, bottom-up.

    Children without a value are skipped; a node with no valued descendant stays
    MISSING. SUM and the averages are computed exactly, so a tree SUM equals the
    flat sum over all leaves.
    """
    op = AggregationOp(op)

    averaging = op in (AggregationOp.AVG, AggregationOp.AVG_LEAVES)

    def visit(node) -> tuple[Fraction, bool, list] | None:
        # (exact value, all leaves integral, leaf values for AVG_LEAVES) or None
        if not node.children:
            value = node.values.get(metric)
            if not _is_number(value):
                return None
            return Fraction(value), isinstance(value, int), [value]
        results = [r for r in (visit(c) for c in node.children) if r is not None]
        if not results:
            return None
        exacts = [r[0] for r in results]
        integral = all(r[1] for r in results)
        leaves = [v for r in results for v in r[2]] if op is AggregationOp.AVG_LEAVES else []
        if op is AggregationOp.SUM:
            exact = sum(exacts, Fraction(0))
        elif op is AggregationOp.MAX:
            exact = max(exacts)
        elif op is AggregationOp.MIN:
            exact = min(exacts)
        elif op is AggregationOp.AVG:
            exact = sum(exacts, Fraction(0)) / len(exacts)
        elif op is AggregationOp.MEDIAN:
            exact = _lower_median(exacts)
        else:
            exact = sum((Fraction(v) for v in leaves), Fraction(0)) / len(leaves)
        node.attach(metric, _finish(exact, integral and not averaging))
        return exact, integral, leaves

    if tree.children:
        visit(tree)
    return tree


def aggregate_assessments(tree: ResourceNode, metric: str) -> ResourceNode:
    """Worst-wins color for inner nodes, with the leaf color histogram attached."""

    def visit(node) -> tuple[Color, list[int]] | None:
        if not node.children:
            assessment = node.assessments.get(metric)
            if assessment is None:
                return None
            counts = [0, 0, 0]
            counts[assessment.color] += 1
            return assessment.color, counts
        results = [r for r in (visit(c) for c in node.children) if r is not None]
        if not results:
            return None
        color = max(r[0] for r in results)
        counts = [sum(r[1][i] for r in results) for i in range(3)]
        node.attach(metric, Assessment(Color(color), f"worst of {sum(counts)} assessed", tuple(counts)))
        return Color(color), counts

    if tree.children:
        visit(tree)
    return tree
