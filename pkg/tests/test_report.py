from __future__ import annotations

import os
import random
import re
import xml.etree.ElementTree as ET
from datetime import datetime, timedelta, timezone

import pytest

from conquard.assess import Assessment, Color
from conquard.cli import main
from conquard.engine import ViewDecl
from conquard.errors import ConfigError, DuplicateId
from conquard.history import TrendKind, TrendPoint, TrendRule, TrendSeries
from conquard.report import (
    EmptySeries, OutputDirUnwritable, Rect, ReportData, ViewSpec, ZeroTotalWeight, layout_treemap, merge_trees,
    render_report, render_treemap, render_trend_chart, squarify, view_entities, view_root, views_from_config,
)
from conquard.report.views import Detail
from conquard.scope import NodeKind, ResourceNode
from conftest import make_project, random_tree
from oracles import check_tiling

SVG = "{http://www.w3.org/2000/svg}"
XHTML = "{http://www.w3.org/1999/xhtml}"
T0 = datetime(2026, 1, 1, tzinfo=timezone.utc)


def leaf(path, **values):
    node = ResourceNode(path, NodeKind.FILE)
    node.values.update(values)
    return node


def tree_of(paths_values):
    return merge_trees([_flat(paths_values)])


def _flat(paths_values):
    root = ResourceNode("", NodeKind.DIRECTORY)
    root.children = [leaf(p, **v) for p, v in paths_values.items()]
    return root


# ---------------------------------------------------------------- tree maps

def test_single_leaf_fills_bounds():
    layout = layout_treemap(tree_of({"a": {"w": 3}}), "w")
    assert layout.by_path()["a"].rect == Rect(0, 0, 1, 1)


def test_two_equal_leaves():
    layout = layout_treemap(tree_of({"a": {"w": 1}, "b": {"w": 1}}), "w")
    rects = sorted((t.rect.w, t.rect.h) for t in layout.leaves())
    assert rects == [(0.5, 1.0), (0.5, 1.0)]


def test_zero_weight():
    with pytest.raises(ZeroTotalWeight):
        layout_treemap(tree_of({"a": {"w": 0}, "b": {}}), "w")
    with pytest.raises(ValueError):
        layout_treemap(tree_of({"a": {"w": -1}}), "w")


def test_zero_weight_children_are_omitted():
    layout = layout_treemap(tree_of({"a": {"w": 0}, "b": {"w": 2}}), "w")
    assert [t.path for t in layout.leaves()] == ["b"]


def test_squarify_examples():
    rects = squarify([6, 6, 4, 3, 2, 2, 1], Rect(0, 0, 6, 4))
    assert sum(r.area for r in rects) == pytest.approx(24)
    assert [round(r.area, 9) for r in rects] == [6, 6, 4, 3, 2, 2, 1]


@pytest.mark.parametrize("seed", range(40))
def test_random_trees_tile(seed):
    rng = random.Random(seed)
    tree = random_tree(rng, max_leaves=200, missing=0.1, integers=rng.random() < 0.5)
    for n in tree.walk():
        if "m" in n.values:
            n.values["m"] = abs(n.values["m"])
    try:
        layout = layout_treemap(tree, "m", (0, 0, rng.uniform(0.5, 900), rng.uniform(0.5, 900)))
    except ZeroTotalWeight:
        return
    assert check_tiling(layout, tree) == []


def test_max_depth_stops_subdivision():
    tree = tree_of({"d/a": {"w": 1}, "d/b": {"w": 1}, "e": {"w": 2}})
    layout = layout_treemap(tree, "w", max_depth=1)
    assert sorted(t.path for t in layout.leaves()) == ["d", "e"]


def test_render_treemap_is_svg():
    layout = layout_treemap(tree_of({"a": {"w": 1}, "b": {"w": 3}}), "w", (0, 0, 640, 400))
    svg = ET.fromstring(render_treemap(layout, 640, 400))
    assert len(svg.findall(f"{SVG}rect")) == 2


# ---------------------------------------------------------------- trend charts

def series(*values):
    return TrendSeries("clone.ratio", "", [TrendPoint(T0 + timedelta(days=i), f"r{i}", v)
                                           for i, v in enumerate(values)])


def chart_parts(svg_text):
    svg = ET.fromstring(svg_text)
    markers = [e for e in svg.iter(f"{SVG}circle") if e.get("class") == "marker"]
    segments = [e for e in svg.iter(f"{SVG}line") if "segment" in e.get("class", "").split()]
    return markers, segments


def test_single_point_chart():
    markers, segments = chart_parts(render_trend_chart(series(0.1)))
    assert len(markers) == 1 and segments == []


def test_rising_series_flags_last_segment():
    rule = TrendRule("clone.ratio", TrendKind.MUST_NOT_INCREASE)
    _, segments = chart_parts(render_trend_chart(series(0.16, 0.18), rule))
    assert segments[-1].get("class") == "segment flagged"
    _, flat = chart_parts(render_trend_chart(series(0.16, 0.16), rule))
    assert flat[-1].get("class") == "segment"


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20])
def test_marker_and_segment_counts(n):
    markers, segments = chart_parts(render_trend_chart(series(*[random.random() for _ in range(n)])))
    assert (len(markers), len(segments)) == (n, n - 1)


def test_empty_series():
    with pytest.raises(EmptySeries):
        render_trend_chart(series())


# ---------------------------------------------------------------- views

SCOPED = {"src/moduleA/a.c": {"loc": 1}, "src/moduleA/sub/b.c": {"loc": 2}, "src/moduleB/c.c": {"loc": 3},
          "docs/x.c": {"loc": 4}}


def test_overview_shows_root_and_top_level():
    view = ViewSpec("m", "management", detail=Detail.OVERVIEW)
    assert [n.path for n in view_entities(tree_of(SCOPED), view)] == ["", "docs", "src"]


def test_full_scoped_view():
    view = ViewSpec("a", scope="src/moduleA/**")
    assert [n.path for n in view_entities(tree_of(SCOPED), view)] == [
        "src/moduleA", "src/moduleA/a.c", "src/moduleA/sub", "src/moduleA/sub/b.c"]
    root = view_root(tree_of(SCOPED), view)
    assert root.path == "src/moduleA"


def test_views_from_config():
    assert [v.id for v in views_from_config([])] == ["full"]
    decls = [ViewDecl("m", {"detail": "overview", "metrics": ("loc",)}, 1)]
    (v,) = views_from_config(decls)
    assert v.detail is Detail.OVERVIEW and v.metrics == ("loc",)
    with pytest.raises(DuplicateId):
        views_from_config(decls + [ViewDecl("m", {}, 2)])
    with pytest.raises(ConfigError):
        views_from_config([ViewDecl("m", {"detail": "SOME"}, 1)])
    with pytest.raises(ConfigError):
        views_from_config([ViewDecl("m", {"metrics": "loc"}, 1)])


# ---------------------------------------------------------------- full report

def run_report(tmp_path, name="out", **kw):
    project, config = make_project(tmp_path, **kw)
    out = tmp_path / name
    code = main(["-q", "run", "--config", str(config), "--project", str(project), "--out", str(out),
                 "--timestamp", "2026-01-01T00:00:00Z", "--run-id", "r1"])
    return code, out


def read_tree(out):
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_report_pages_are_well_formed(tmp_path):
    code, out = run_report(tmp_path)
    assert code == 0
    files = read_tree(out)
    assert set(files) == {"index.html", "view-manager.html", "view-moda.html", "clones.txt"}
    for name, data in files.items():
        if name.endswith(".html"):
            root = ET.fromstring(data)
            assert root.tag == f"{XHTML}html"
    assert b"2026-01-01T00:00:00Z" in files["index.html"]


def entity_rows(page: bytes):
    root = ET.fromstring(page)
    rows = []
    for table in root.iter(f"{XHTML}table"):
        header = [th.text for th in table.iter(f"{XHTML}th")]
        if header[:2] == ["Entity", "Kind"]:
            for tr in list(table)[1:]:
                rows.append("".join(tr[0].itertext()).replace("\xa0", ""))
            return rows
    return rows


def test_overview_and_scope_pages(tmp_path):
    _, out = run_report(tmp_path)
    assert entity_rows((out / "view-manager.html").read_bytes()) == ["(project)", "src"]
    moda = (out / "view-moda.html").read_bytes()
    assert entity_rows(moda) == ["src/moduleA", "src/moduleA/a1.c", "src/moduleA/a1.h", "src/moduleA/a2.c"]
    # nothing outside the scope leaks into the page: not in clone lists, violations or tile labels
    assert b"moduleB" not in moda


def test_byte_identical_reruns(tmp_path):
    _, one = run_report(tmp_path, "one")
    _, two = run_report(tmp_path, "two")
    assert read_tree(one) == read_tree(two)


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputDirUnwritable):
        render_report(ReportData(), [ViewSpec("v")], blocker / "sub", T0)
    if os.geteuid() != 0:
        ro = tmp_path / "ro"
        ro.mkdir()
        ro.chmod(0o500)
        with pytest.raises(OutputDirUnwritable):
            render_report(ReportData(), [ViewSpec("v")], ro, T0)


def test_empty_report_renders(tmp_path):
    paths = render_report(ReportData(), [ViewSpec("v")], tmp_path / "r", T0)
    assert [p.name for p in paths] == ["index.html", "view-v.html"]
    for p in paths:
        ET.fromstring(p.read_bytes())


def test_metric_colors_in_table(tmp_path):
    tree = tree_of({"a.c": {"cyclomatic": 30}})
    tree.children[0].assessments["cyclomatic"] = Assessment(Color.RED, "cyclomatic=30")
    render_report(ReportData(tree=tree), [ViewSpec("v")], tmp_path, T0)
    page = (tmp_path / "view-v.html").read_text()
    assert re.search(r'<td class="num RED" title="cyclomatic=30">30</td>', page)


def test_merge_trees_links_implied_directories():
    merged = tree_of({"a/b/c.x": {"w": 1}, "a/d.x": {"w": 2}})
    assert [n.path for n in merged.walk()] == ["", "a", "a/b", "a/b/c.x", "a/d.x"]
    first, second = _flat({"f": {"m": 1}}), _flat({"f": {"m": 2, "n": 3}})
    both = merge_trees([first, second]).find("f").values
    assert both == {"m": 1, "n": 3}
