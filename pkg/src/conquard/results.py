"""Value types that processors emit and the report and CLI consume."""

from __future__ import annotations

from dataclasses import dataclass

from .assess import Assessment, Color
from .history import TrendRule, TrendSeries, TrendVerdict


@dataclass(frozen=True)
class GateVerdict:
    """A quality verdict; RED verdicts with ``blocking`` set fail the run."""

    source: str
    metric: str
    assessment: Assessment
    blocking: bool = False

    @property
    def blocks(self) -> bool:
        return self.blocking and self.assessment.color is Color.RED


@dataclass(frozen=True)
class TrendResult:
    series: TrendSeries
    rule: TrendRule
    verdict: TrendVerdict


@dataclass(frozen=True)
class TreemapRequest:
    tree: object
    weight: str
    color: str = ""
    title: str = ""
