"""Static, self-contained XHTML dashboard pages."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from ..arch import ConformanceResult, Reason
from ..assess import Assessment, Color
from ..clones import CloneReport, format_listing
from ..history import format_timestamp
from ..results import GateVerdict, TreemapRequest, TrendResult
from ..scope.tree import NodeKind, ResourceNode
from .svg import render_treemap, render_trend_chart, value_label
from .treemap import ZeroTotalWeight, layout_treemap
from .views import Detail, ViewSpec, depth_of, view_entities, view_root

log = logging.getLogger(__name__)

MAX_CLONE_CLASSES = 200

CSS = """
body { font-family: sans-serif; margin: 1.5em; color: #222; }
h1 { font-size: 1.5em; } h2 { font-size: 1.2em; margin-top: 1.5em; }
table { border-collapse: collapse; margin: 0.5em 0; }
th, td { border: 1px solid #ccc; padding: 2px 6px; text-align: left; font-size: 0.9em; }
td.num { text-align: right; }
.GREEN { background: #c8e6c9; } .YELLOW { background: #fff3b0; } .RED { background: #f8c4bd; }
.MISSING { background: #e0e0e0; color: #666; }
.meta { color: #666; font-size: 0.85em; }
.allowed { background: #c8e6c9; } .forbidden { background: #f8c4bd; } .intra { background: #eeeeee; }
"""


class OutputDirUnwritable(OSError):
    pass


@dataclass
class ReportData:
    tree: ResourceNode | None = None
    clones: list[tuple[str, CloneReport]] = field(default_factory=list)
    arch: list[tuple[str, ConformanceResult]] = field(default_factory=list)
    trends: list[tuple[str, TrendResult]] = field(default_factory=list)
    treemaps: list[tuple[str, TreemapRequest]] = field(default_factory=list)
    verdicts: list[GateVerdict] = field(default_factory=list)
    statuses: list[tuple[str, str, str, str]] = field(default_factory=list)
    title: str = "Quality report"


def merge_trees(trees) -> ResourceNode | None:
    """Union of several trees by path; for a metric present twice the first tree wins."""
    entries: dict[str, ResourceNode] = {}
    for tree in trees:
        for node in tree.walk():
            entry = entries.get(node.path)
            if entry is None:
                entry = entries[node.path] = ResourceNode(node.path, node.kind, [], node.language)
            for k, v in node.values.items():
                entry.values.setdefault(k, v)
            for k, v in node.assessments.items():
                entry.assessments.setdefault(k, v)
    if not entries:
        return None
    entries.setdefault("", ResourceNode("", NodeKind.DIRECTORY))
    pending = sorted(p for p in entries if p)
    while pending:
        path = pending.pop()
        parent = path.rsplit("/", 1)[0] if "/" in path else ""
        if parent not in entries:
            # a directory only implied by its descendants; link it in turn
            entries[parent] = ResourceNode(parent, NodeKind.DIRECTORY)
            pending.append(parent)
        entries[parent].children.append(entries[path])
    for node in entries.values():
        node.children.sort(key=lambda c: c.name)
    return entries[""]


def collect_report_data(graph, result, title: str = "Quality report") -> ReportData:
    """Gather report inputs from the results of ``output`` nodes (all nodes if none are marked)."""
    data = ReportData(title=title)
    marked = list(graph.outputs) or list(graph.order)
    trees = []
    for node_id in sorted(marked):
        for port, value in sorted(result.outputs.get(node_id, {}).items()):
            name = f"{node_id}.{port}"
            if isinstance(value, ResourceNode):
                trees.append(value)
            elif isinstance(value, CloneReport):
                data.clones.append((name, value))
            elif isinstance(value, ConformanceResult):
                data.arch.append((name, value))
            elif isinstance(value, TrendResult):
                data.trends.append((name, value))
            elif isinstance(value, TreemapRequest):
                data.treemaps.append((name, value))
    data.tree = merge_trees(trees)
    for node_id in graph.order:
        for value in result.outputs.get(node_id, {}).values():
            if isinstance(value, GateVerdict):
                data.verdicts.append(value)
        status = result.status.get(node_id)
        error = result.errors.get(node_id)
        kind = graph.nodes[node_id].decl.kind
        data.statuses.append((node_id, kind, status.value if status else "NOT_RUN", str(error.cause) if error else ""))
    return data


def _page(title: str, body: list[str]) -> str:
    return "".join([
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<!DOCTYPE html>\n",
        '<html xmlns="http://www.w3.org/1999/xhtml" lang="en">\n<head>\n<meta charset="utf-8"/>\n',
        f"<title>{escape(title)}</title>\n<style>{CSS}</style>\n</head>\n<body>\n",
        "\n".join(body),
        "\n</body>\n</html>\n",
    ])


def _color_class(a) -> str:
    return a.color.name if isinstance(a, Assessment) else "MISSING"


def _entity_label(path: str) -> str:
    return path if path else "(project)"


def _render_index(data: ReportData, views: list[ViewSpec], stamp: str, listing: bool) -> str:
    body = [f"<h1>{escape(data.title)}</h1>", f'<p class="meta">Generated {stamp}</p>', "<h2>Views</h2>",
            "<table>", "<tr><th>View</th><th>Audience</th><th>Scope</th><th>Detail</th></tr>"]
    for v in views:
        body.append(f'<tr><td><a href={quoteattr(f"view-{v.id}.html")}>{escape(v.id)}</a></td>'
                    f"<td>{escape(v.audience)}</td><td>{escape(v.scope)}</td><td>{v.detail.value}</td></tr>")
    body.append("</table>")
    if data.verdicts:
        body += ["<h2>Verdicts</h2>", "<table>",
                 "<tr><th>Source</th><th>Metric</th><th>Verdict</th><th>Blocking</th><th>Detail</th></tr>"]
        for g in data.verdicts:
            c = g.assessment.color.name
            body.append(f"<tr><td>{escape(g.source)}</td><td>{escape(g.metric)}</td><td class=\"{c}\">{c}</td>"
                        f"<td>{'yes' if g.blocking else 'no'}</td><td>{escape(g.assessment.message)}</td></tr>")
        body.append("</table>")
    body += ["<h2>Processors</h2>", "<table>", "<tr><th>Id</th><th>Kind</th><th>Status</th><th>Error</th></tr>"]
    for node_id, kind, status, message in data.statuses:
        cls = "GREEN" if status == "OK" else "RED"
        body.append(f"<tr><td>{escape(node_id)}</td><td>{escape(kind)}</td><td class=\"{cls}\">{status}</td>"
                    f"<td>{escape(message)}</td></tr>")
    body.append("</table>")
    if listing:
        body.append('<p><a href="clones.txt">Clone listing</a></p>')
    return _page(data.title, body)


def _wants(view: ViewSpec, *metrics: str) -> bool:
    return not view.metrics or any(m in view.metrics for m in metrics if m)


def _metric_table(data: ReportData, view: ViewSpec) -> list[str]:
    if data.tree is None:
        return ["<p>No resource data.</p>"]
    entities = view_entities(data.tree, view)
    if view.metrics:
        metrics = list(view.metrics)
    else:
        found = set()
        for n in entities:
            found.update(n.values)
            found.update(n.assessments)
        metrics = sorted(found)
    out = ["<h2>Metrics</h2>", "<table>",
           "<tr><th>Entity</th><th>Kind</th>" + "".join(f"<th>{escape(m)}</th>" for m in metrics) + "</tr>"]
    for n in entities:
        cells = []
        for m in metrics:
            value = n.values.get(m)
            a = n.assessments.get(m)
            if value is None or isinstance(value, bool) or not isinstance(value, (int, float)):
                text = a.color.name if a is not None else "n/a"
            else:
                text = value_label(value)
            cls = _color_class(a) if a is not None or value is None else ""
            title = f" title={quoteattr(a.message)}" if a is not None and a.message else ""
            cls_attr = f' class="num {cls}"' if cls else ' class="num"'
            cells.append(f"<td{cls_attr}{title}>{escape(text)}</td>")
        indent = "&#160;" * (2 * depth_of(n.path))
        out.append(f"<tr><td>{indent}{escape(_entity_label(n.path))}</td><td>{n.kind.value.lower()}</td>"
                   + "".join(cells) + "</tr>")
    out.append("</table>")
    return out


def _treemaps(data: ReportData, view: ViewSpec) -> list[str]:
    out = []
    for name, req in data.treemaps:
        if not _wants(view, req.weight, req.color):
            continue
        title = req.title or f"{req.weight} tree map"
        out.append(f"<h2>{escape(title)}</h2>")
        root = view_root(req.tree, view)
        try:
            if root is None:
                raise ZeroTotalWeight("nothing in scope")
            depth = 1 if view.detail is Detail.OVERVIEW else None
            layout = layout_treemap(root, req.weight, (0, 0, 640, 400), max_depth=depth,
                                    color_metric=req.color or None)
        except ZeroTotalWeight:
            out.append("<p>No weighted entities in this view.</p>")
            continue
        out.append(f'<p class="meta">Area: {escape(req.weight)}'
                   + (f"; color: {escape(req.color)}" if req.color else "") + "</p>")
        out.append(render_treemap(layout, 640, 400,
                                  label=lambda p: _entity_label(p) if view.in_scope(p) else None))
        legend = " ".join(f'<span class="{c.name}">&#160;{c.name}&#160;</span>' for c in Color)
        out.append(f'<p class="meta">{legend} <span class="MISSING">&#160;not assessed&#160;</span></p>')
    return out


def _clones(data: ReportData, view: ViewSpec) -> list[str]:
    if not _wants(view, "clone.ratio"):
        return []
    out = []
    for name, rep in data.clones:
        out += [f"<h2>Clones ({escape(name)})</h2>",
                f'<p>Cloning ratio {rep.ratio:.4f}; {len(rep.classes)} clone classes of at least '
                f"{rep.min_length} tokens.</p>"]
        shown = 0
        rows = []
        for class_id, cls in enumerate(rep.classes, start=1):
            inside = [o for o in cls.occurrences if view.in_scope(o.path)]
            if not inside:
                continue
            shown += 1
            if shown > MAX_CLONE_CLASSES:
                continue
            occ = "<br/>".join(escape(f"{o.path}:{o.start_line}-{o.end_line}") for o in inside)
            hidden = len(cls.occurrences) - len(inside)
            extra = f" (+{hidden} outside this view)" if hidden else ""
            rows.append(f"<tr><td class=\"num\">{class_id}</td><td class=\"num\">{cls.length}</td>"
                        f"<td class=\"num\">{len(cls.occurrences)}</td><td>{occ}{extra}</td></tr>")
        if rows:
            out += ["<table>", "<tr><th>Class</th><th>Tokens</th><th>Occurrences</th><th>Locations</th></tr>",
                    *rows, "</table>"]
        if shown > MAX_CLONE_CLASSES:
            out.append(f"<p class=\"meta\">{shown - MAX_CLONE_CLASSES} more classes not shown.</p>")
    return out


def _architecture(data: ReportData, view: ViewSpec) -> list[str]:
    if not _wants(view, "arch.violations"):
        return []
    out = []
    for name, res in data.arch:
        out.append(f"<h2>Architecture ({escape(name)})</h2>")
        comps = list(res.components)
        if comps:
            out.append("<table>")
            out.append("<tr><th>from \\ to</th>" + "".join(f"<th>{escape(c)}</th>" for c in comps) + "</tr>")
            for a in comps:
                cells = []
                for b in comps:
                    count = res.edges.get((a, b), 0)
                    cls = "intra" if a == b else ("allowed" if (a, b) in res.allowed else
                                                  ("forbidden" if count else ""))
                    cls_attr = f' class="num {cls}"' if cls else ' class="num"'
                    cells.append(f"<td{cls_attr}>{count}</td>")
                out.append(f"<tr><th>{escape(a)}</th>" + "".join(cells) + "</tr>")
            out.append("</table>")
        inside = [v for v in res.violations if view.in_scope(v.path)]
        out.append(f"<p>{len(inside)} violation(s) in this view; {res.external_count} external "
                   f"dependencies ignored.</p>")
        if inside:
            out += ["<table>", "<tr><th>File</th><th>Line</th><th>Reason</th><th>Edge</th><th>Target</th></tr>"]
            for v in inside:
                line = str(v.dependency.line) if v.dependency else ""
                edge = f"{v.from_component} -> {v.to_component}" if v.reason is Reason.FORBIDDEN_EDGE else ""
                target = v.dependency.target if v.dependency and view.in_scope(v.dependency.target) else ""
                out.append(f"<tr><td>{escape(v.path)}</td><td class=\"num\">{line}</td>"
                           f"<td class=\"RED\">{v.reason.value}</td><td>{escape(edge)}</td>"
                           f"<td>{escape(target)}</td></tr>")
            out.append("</table>")
    return out


def _trends(data: ReportData, view: ViewSpec) -> list[str]:
    out = []
    for name, tr in data.trends:
        if not _wants(view, tr.series.metric) or not view.in_scope(tr.series.entity):
            continue
        c = tr.verdict.assessment.color.name
        out += [f"<h2>Trend: {escape(tr.series.metric)} at {escape(_entity_label(tr.series.entity))}</h2>",
                f"<p>Rule {tr.rule.kind.value} (tolerance {tr.rule.tolerance:g}); delta {tr.verdict.delta:+.4g}; "
                f"verdict <span class=\"{c}\">{c}</span> {escape(tr.verdict.assessment.message)}</p>",
                render_trend_chart(tr.series, tr.rule, tr.verdict)]
    return out


def _render_view(data: ReportData, view: ViewSpec, stamp: str) -> str:
    title = f"{data.title}: {view.id}"
    body = [f"<h1>{escape(title)}</h1>",
            f'<p class="meta">Audience: {escape(view.audience or "all")}; scope {escape(view.scope)}; '
            f"detail {view.detail.value}; generated {stamp}. <a href=\"index.html\">Back to index</a></p>"]
    body += _metric_table(data, view)
    body += _treemaps(data, view)
    body += _trends(data, view)
    body += _clones(data, view)
    body += _architecture(data, view)
    return _page(title, body)


def render_report(data: ReportData, views: list[ViewSpec], out_dir, timestamp: datetime) -> list[Path]:
    """Write ``index.html``, one ``view-<id>.html`` per view and optionally ``clones.txt``.

    Output depends only on the inputs and ``timestamp``.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputDirUnwritable(f"cannot create report directory {out}: {exc}") from None
    if not os.access(out, os.W_OK | os.X_OK):
        raise OutputDirUnwritable(f"report directory {out} is not writable")
    stamp = format_timestamp(timestamp)
    listing_reports = [rep for _, rep in data.clones if rep.listing]
    if len(listing_reports) > 1:
        log.warning("several clone detectors request a listing; clones.txt holds the first")
    files = {"index.html": _render_index(data, views, stamp, bool(listing_reports))}
    for view in views:
        files[f"view-{view.id}.html"] = _render_view(data, view, stamp)
    if listing_reports:
        files["clones.txt"] = format_listing(listing_reports[0].classes)
    written = []
    for name in sorted(files):
        path = out / name
        try:
            path.write_bytes(files[name].encode("utf-8"))
        except OSError as exc:
            raise OutputDirUnwritable(f"cannot write {path}: {exc}") from None
        written.append(path)
    return written
