from __future__ import annotations

import logging
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conquard.assess import Color
from conquard.history import (
    CorruptStore, DuplicateRun, HistoryStore, SnapshotRecord, StoreLocked, TrendKind, TrendPoint, TrendRule,
    TrendSeries, append_snapshot, assess_trend, format_timestamp, load_series, parse_timestamp,
)

T0 = datetime(2026, 1, 1, tzinfo=timezone.utc)


def day(n):
    return T0 + timedelta(days=n)


def series_of(*values):
    return TrendSeries("clone.ratio", "", [TrendPoint(day(i), f"r{i}", v) for i, v in enumerate(values)])


def test_append_then_load_round_trips(tmp_path):
    store = HistoryStore(tmp_path / "h.tsv")
    append_snapshot(store, "r1", T0, [("", "clone.ratio", 0.16), ("src", "loc", 1200)])
    assert store.load() == [SnapshotRecord("r1", T0, "", "clone.ratio", 0.16),
                            SnapshotRecord("r1", T0, "src", "loc", 1200)]
    line = (tmp_path / "h.tsv").read_text().splitlines()[0]
    assert line == "r1\t2026-01-01T00:00:00Z\t\tclone.ratio\t0.16"


def test_duplicate_run(tmp_path):
    store = HistoryStore(tmp_path / "h.tsv")
    store.append("r1", T0, [("", "m", 1)])
    with pytest.raises(DuplicateRun):
        store.append("r1", day(1), [("", "m", 2)])
    assert len(store.load()) == 1


def test_series_is_ordered_by_timestamp(tmp_path, caplog):
    store = HistoryStore(tmp_path / "h.tsv")
    store.append("late", day(2), [("", "m", 2)])
    with caplog.at_level(logging.WARNING):
        store.append("early", day(1), [("", "m", 1)])
    assert "precedes" in caplog.text
    s = load_series(store, "m")
    assert [p.run_id for p in s.points] == ["early", "late"] and s.values == [1, 2]


def test_empty_store(tmp_path):
    assert load_series(HistoryStore(tmp_path / "none.tsv"), "m").points == []


def test_three_runs(tmp_path):
    store = HistoryStore(tmp_path / "h.tsv")
    for i, v in enumerate([0.1, 0.12, 0.11]):
        store.append(f"r{i}", day(i), [("", "clone.ratio", v), ("x", "clone.ratio", 9)])
    assert load_series(store, "clone.ratio").values == [0.1, 0.12, 0.11]
    assert load_series(store, "clone.ratio", "x").values == [9, 9, 9]


def test_truncated_final_line_salvages_prefix(tmp_path, caplog):
    path = tmp_path / "h.tsv"
    store = HistoryStore(path)
    store.append("r1", T0, [("", "m", 1)])
    store.append("r2", day(1), [("", "m", 2)])
    with open(path, "ab") as fh:
        fh.write(b"r3\t2026-01-03T00:00:00Z\t\tm")
    with caplog.at_level(logging.WARNING):
        assert load_series(store, "m").values == [1, 2]
    assert "line 3" in caplog.text
    with pytest.raises(CorruptStore) as info:
        store.load(strict=True)
    assert info.value.line_number == 3
    with pytest.raises(CorruptStore):
        store.append("r4", day(4), [("", "m", 4)])


def test_corrupt_middle_line_stops_salvage(tmp_path):
    path = tmp_path / "h.tsv"
    path.write_text("r1\t2026-01-01T00:00:00Z\t\tm\t1\ngarbage\nr2\t2026-01-02T00:00:00Z\t\tm\t2\n")
    assert [r.run_id for r in HistoryStore(path).load()] == ["r1"]


def test_second_writer_is_locked_out(tmp_path):
    store = HistoryStore(tmp_path / "h.tsv")
    other = HistoryStore(tmp_path / "h.tsv")
    with store.lock():
        with pytest.raises(StoreLocked):
            with other.lock():
                pass
    with other.lock():
        pass


def test_invalid_records_rejected(tmp_path):
    store = HistoryStore(tmp_path / "h.tsv")
    with pytest.raises(ValueError):
        store.append("r", T0, [("a\tb", "m", 1)])
    with pytest.raises(ValueError):
        store.append("r", T0, [("", "m", float("nan"))])
    with pytest.raises(ValueError):
        store.append("r", T0, [("", "m", 1), ("", "m", 2)])
    assert store.load() == []


def test_timestamps():
    assert format_timestamp(datetime(2026, 3, 4, 5, 6, 7, 999)) == "2026-03-04T05:06:07Z"
    local = datetime(2026, 3, 4, 7, 6, 7, tzinfo=timezone(timedelta(hours=2)))
    assert format_timestamp(local) == "2026-03-04T05:06:07Z"
    assert parse_timestamp("2026-03-04T05:06:07Z") == datetime(2026, 3, 4, 5, 6, 7, tzinfo=timezone.utc)


@pytest.mark.parametrize("values, color, delta", [
    ([0.16, 0.16], Color.GREEN, 0.0),
    ([0.16, 0.18], Color.RED, 0.02),
    ([0.16], Color.GREEN, 0.0),
    ([0.2, 0.1], Color.GREEN, -0.1),
])
def test_assess_trend_examples(values, color, delta):
    verdict = assess_trend(series_of(*values), TrendRule("clone.ratio", TrendKind.MUST_NOT_INCREASE))
    assert verdict.assessment.color is color
    assert verdict.delta == pytest.approx(delta)
    if len(values) < 2:
        assert verdict.assessment.message == "insufficient history"


def test_tolerance():
    rule = TrendRule("m", TrendKind.MUST_NOT_INCREASE, tolerance=0.05)
    assert assess_trend(series_of(0.1, 0.15), rule).assessment.color is Color.GREEN
    assert assess_trend(series_of(0.1, 0.2), rule).assessment.color is Color.RED
    with pytest.raises(ValueError):
        TrendRule("m", tolerance=-1)


values = st.floats(-1e6, 1e6, allow_nan=False)


@given(values, values)
def test_trend_kinds_are_antisymmetric(a, b):
    up = assess_trend(series_of(a, b), TrendRule("m", TrendKind.MUST_NOT_INCREASE)).assessment.color
    down = assess_trend(series_of(a, b), TrendRule("m", TrendKind.MUST_NOT_DECREASE)).assessment.color
    if a == b:
        assert up is down is Color.GREEN
    else:
        assert {up, down} == {Color.GREEN, Color.RED}


@given(st.lists(st.tuples(st.integers(0, 10**6), values), min_size=1, max_size=8, unique_by=lambda t: t[0]))
def test_store_round_trip_property(tmp_path_factory, runs):
    store = HistoryStore(tmp_path_factory.mktemp("h") / "h.tsv")
    for i, (offset, value) in enumerate(runs):
        store.append(f"run{i}", T0 + timedelta(seconds=offset), [("", "m", value)])
    s = store.series("m")
    assert [p.timestamp for p in s.points] == sorted(T0 + timedelta(seconds=o) for o, _ in runs)
    assert sorted(s.values) == sorted(v for _, v in runs)
