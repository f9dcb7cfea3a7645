"""Append-only trend history and last-vs-previous trend assessment.

Store format: one UTF-8 line per record, tab-separated
``run-id, timestamp (YYYY-MM-DDTHH:MM:SSZ), entity, metric-id, value``.
The project root is entity ``""``.
"""

from __future__ import annotations

import enum
import fcntl
import logging
import math
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from .assess import Assessment, Color

log = logging.getLogger(__name__)

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


class DuplicateRun(ValueError):
    pass


class CorruptStore(ValueError):
    def __init__(self, path, line_number: int, reason: str):
        self.line_number = line_number
        super().__init__(f"{path}: corrupt record on line {line_number}: {reason}")


class StoreLocked(RuntimeError):
    pass


def format_timestamp(ts: datetime) -> str:
    return to_utc(ts).strftime(TIMESTAMP_FORMAT)


def parse_timestamp(text: str) -> datetime:
    return datetime.strptime(text, TIMESTAMP_FORMAT).replace(tzinfo=timezone.utc)


def to_utc(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def _format_value(value) -> str:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"history values must be numeric, got {value!r}")
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"history values must be finite, got {value!r}")
    return str(value) if isinstance(value, int) else repr(value)


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not math.isfinite(value):
            raise ValueError(text) from None
        return value


@dataclass(frozen=True)
class SnapshotRecord:
    run_id: str
    timestamp: datetime
    entity: str
    metric: str
    value: float

    def to_line(self) -> str:
        for name in ("run_id", "entity", "metric"):
            text = getattr(self, name)
            if "\t" in text or "\n" in text or "\r" in text:
                raise ValueError(f"{name} may not contain tabs or newlines: {text!r}")
        return "\t".join((self.run_id, format_timestamp(self.timestamp), self.entity, self.metric,
                          _format_value(self.value))) + "\n"


@dataclass(frozen=True)
class TrendPoint:
    timestamp: datetime
    run_id: str
    value: float


@dataclass
class TrendSeries:
    metric: str
    entity: str
    points: list[TrendPoint] = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        return [p.value for p in self.points]

    def with_point(self, point: TrendPoint) -> TrendSeries:
        points = sorted(self.points + [point], key=lambda p: (p.timestamp, p.run_id))
        return TrendSeries(self.metric, self.entity, points)


class TrendKind(enum.Enum):
    MUST_NOT_INCREASE = "MUST_NOT_INCREASE"
    MUST_NOT_DECREASE = "MUST_NOT_DECREASE"


@dataclass(frozen=True)
class TrendRule:
    metric: str
    kind: TrendKind = TrendKind.MUST_NOT_INCREASE
    tolerance: float = 0.0

    def __post_init__(self):
        if self.tolerance < 0:
            raise ValueError("trend tolerance must be >= 0")


@dataclass(frozen=True)
class TrendVerdict:
    assessment: Assessment
    delta: float


class HistoryStore:
    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)

    @contextmanager
    def lock(self):
        """Exclusive writer lock for one run; a second holder fails immediately."""
        lock_path = self.path.with_name(self.path.name + ".lock")
        lock_path.parent.mkdir(parents=True, exist_ok=True)
        fd = os.open(lock_path, os.O_RDWR | os.O_CREAT, 0o644)
        try:
            try:
                fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
            except BlockingIOError:
                raise StoreLocked(f"history store {self.path} is locked by another run") from None
            try:
                yield self
            finally:
                fcntl.flock(fd, fcntl.LOCK_UN)
        finally:
            os.close(fd)

    def load(self, strict: bool = False) -> list[SnapshotRecord]:
        """All intact records in file order.

        On the first bad or truncated line, the intact prefix is returned with a
        warning, or :class:`CorruptStore` is raised when ``strict``.
        """
        if not self.path.exists():
            return []
        data = self.path.read_bytes()
        records = []
        lines = data.split(b"\n")
        complete = lines[:-1]
        tail = lines[-1]
        for number, raw in enumerate(complete, start=1):
            try:
                records.append(_parse_line(raw))
            except ValueError as exc:
                return self._salvage(records, number, str(exc), strict)
        if tail:
            return self._salvage(records, len(complete) + 1, "truncated final line", strict)
        return records

    def _salvage(self, records, number: int, reason: str, strict: bool):
        error = CorruptStore(self.path, number, reason)
        if strict:
            raise error
        log.warning("%s; keeping the %d records before it", error, len(records))
        return records

    def run_ids(self) -> set[str]:
        return {r.run_id for r in self.load()}

    def append(self, run_id: str, timestamp: datetime, records: Iterable) -> None:
        """Append one run. ``records`` holds SnapshotRecords or (entity, metric, value) triples."""
        timestamp = to_utc(timestamp)
        rows = []
        seen = set()
        for rec in records:
            if isinstance(rec, SnapshotRecord):
                entity, metric, value = rec.entity, rec.metric, rec.value
            else:
                entity, metric, value = rec
            if (entity, metric) in seen:
                raise ValueError(f"duplicate record for entity {entity!r}, metric {metric!r}")
            seen.add((entity, metric))
            rows.append(SnapshotRecord(run_id, timestamp, entity, metric, value))
        rows.sort(key=lambda r: (r.entity, r.metric))
        payload = "".join(r.to_line() for r in rows).encode("utf-8")

        existing = self.load(strict=True) if self.path.exists() else []
        if any(r.run_id == run_id for r in existing):
            raise DuplicateRun(f"run {run_id!r} is already stored in {self.path}")
        if existing and timestamp < max(r.timestamp for r in existing):
            log.warning("run %s timestamp %s precedes stored runs; it will be reordered on read",
                        run_id, format_timestamp(timestamp))
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "ab") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())

    def series(self, metric: str, entity: str = "") -> TrendSeries:
        points = [TrendPoint(r.timestamp, r.run_id, r.value) for r in self.load()
                  if r.metric == metric and r.entity == entity]
        points.sort(key=lambda p: (p.timestamp, p.run_id))
        return TrendSeries(metric, entity, points)


def _parse_line(raw: bytes) -> SnapshotRecord:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ValueError("invalid UTF-8") from None
    fields = text.split("\t")
    if len(fields) != 5:
        raise ValueError(f"expected 5 fields, found {len(fields)}")
    run_id, stamp, entity, metric, value = fields
    if not run_id or not metric:
        raise ValueError("empty run id or metric id")
    return SnapshotRecord(run_id, parse_timestamp(stamp), entity, metric, _parse_value(value))


def append_snapshot(store: HistoryStore, run_id: str, timestamp: datetime, records) -> HistoryStore:
    store.append(run_id, timestamp, records)
    return store


def load_series(store: HistoryStore, metric: str, entity: str = "") -> TrendSeries:
    return store.series(metric, entity)


def assess_trend(series: TrendSeries, rule: TrendRule) -> TrendVerdict:
    """Compare the last point with the previous one."""
    if len(series.points) < 2:
        return TrendVerdict(Assessment(Color.GREEN, "insufficient history"), 0.0)
    delta = series.points[-1].value - series.points[-2].value
    worsening = delta if rule.kind is TrendKind.MUST_NOT_INCREASE else -delta
    if worsening <= rule.tolerance:
        return TrendVerdict(Assessment(Color.GREEN, f"{rule.metric} delta {delta:+g}"), delta)
    verb = "increased" if delta > 0 else "decreased"
    return TrendVerdict(Assessment(Color.RED, f"{rule.metric} {verb} by {abs(delta):g}"), delta)
