"""Inline SVG fragments: trend charts and tree maps."""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from ..assess import Color
from ..history import TrendRule, TrendSeries, TrendVerdict, assess_trend, format_timestamp

SVG_NS = "http://www.w3.org/2000/svg"

FILLS = {Color.GREEN: "#4caf50", Color.YELLOW: "#f2c230", Color.RED: "#e04b3c", None: "#b0b0b0"}
STROKE_OK = "#2b6cb0"
STROKE_FLAGGED = "#e04b3c"


class EmptySeries(ValueError):
    pass


def num(value: float) -> str:
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def value_label(value) -> str:
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return f"{value:.4g}"


def render_trend_chart(series: TrendSeries, rule: TrendRule | None = None, verdict: TrendVerdict | None = None,
                       width: int = 360, height: int = 160) -> str:
    """Polyline chart of ``series``: one marker per point, one segment per step.

    The last segment carries class ``flagged`` when the trend verdict is RED.
    """
    points = series.points
    if not points:
        raise EmptySeries(f"no history for {series.metric} at {series.entity or '<root>'}")
    if verdict is None and rule is not None:
        verdict = assess_trend(series, rule)
    flagged = verdict is not None and verdict.assessment.color is Color.RED

    left, right, top, bottom = 56.0, 12.0, 12.0, 28.0
    plot_w, plot_h = width - left - right, height - top - bottom
    values = [float(p.value) for p in points]
    lo, hi = min(values), max(values)
    span = hi - lo
    t0 = points[0].timestamp.timestamp()
    t_span = points[-1].timestamp.timestamp() - t0

    def px(i: int) -> float:
        if len(points) == 1:
            return left + plot_w / 2
        if t_span > 0:
            return left + plot_w * (points[i].timestamp.timestamp() - t0) / t_span
        return left + plot_w * i / (len(points) - 1)

    def py(v: float) -> float:
        if span == 0:
            return top + plot_h / 2
        return top + plot_h * (hi - v) / span

    title = f"{series.metric} at {series.entity or '<root>'}"
    parts = [
        f'<svg xmlns="{SVG_NS}" class="trend" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" role="img">',
        f"<title>{escape(title)}</title>",
        f'<line class="axis" x1="{num(left)}" y1="{num(top)}" x2="{num(left)}" y2="{num(top + plot_h)}" '
        f'stroke="#555"/>',
        f'<line class="axis" x1="{num(left)}" y1="{num(top + plot_h)}" x2="{num(left + plot_w)}" '
        f'y2="{num(top + plot_h)}" stroke="#555"/>',
        f'<text class="label" x="{num(left - 4)}" y="{num(top + 4)}" text-anchor="end" font-size="10">'
        f"{escape(value_label(points[values.index(hi)].value))}</text>",
        f'<text class="label" x="{num(left - 4)}" y="{num(top + plot_h)}" text-anchor="end" font-size="10">'
        f"{escape(value_label(points[values.index(lo)].value))}</text>",
        f'<text class="label" x="{num(left)}" y="{num(height - 8)}" font-size="10">'
        f"{format_timestamp(points[0].timestamp)}</text>",
    ]
    if len(points) > 1:
        parts.append(f'<text class="label" x="{num(left + plot_w)}" y="{num(height - 8)}" text-anchor="end" '
                     f'font-size="10">{format_timestamp(points[-1].timestamp)}</text>')
    for i in range(1, len(points)):
        last = i == len(points) - 1
        cls = "segment flagged" if last and flagged else "segment"
        stroke = STROKE_FLAGGED if last and flagged else STROKE_OK
        parts.append(f'<line class="{cls}" x1="{num(px(i - 1))}" y1="{num(py(values[i - 1]))}" '
                     f'x2="{num(px(i))}" y2="{num(py(values[i]))}" stroke="{stroke}" stroke-width="2"/>')
    for i, p in enumerate(points):
        label = f"{p.run_id} {format_timestamp(p.timestamp)}: {value_label(p.value)}"
        parts.append(f'<circle class="marker" cx="{num(px(i))}" cy="{num(py(values[i]))}" r="3" fill="{STROKE_OK}">'
                     f"<title>{escape(label)}</title></circle>")
    parts.append("</svg>")
    return "".join(parts)


def render_treemap(layout, width: int = 640, height: int = 400, label=None) -> str:
    """SVG for a tree-map layout computed in unit or pixel coordinates.

    ``label(path)`` returns the tooltip for a tile, or None to draw the tile
    without naming it.
    """
    b = layout.bounds
    sx = width / b.w if b.w else 1.0
    sy = height / b.h if b.h else 1.0
    parts = [f'<svg xmlns="{SVG_NS}" class="treemap" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}" role="img">']
    for tile in layout.tiles:
        if not tile.leaf:
            continue
        r = tile.rect
        fill = FILLS.get(tile.color, FILLS[None])
        text = label(tile.path) if label else tile.path
        title = f"<title>{escape(text)}</title>" if text is not None else ""
        parts.append(f'<rect class="tile" x="{num((r.x - b.x) * sx)}" y="{num((r.y - b.y) * sy)}" '
                     f'width="{num(r.w * sx)}" height="{num(r.h * sy)}" fill="{fill}" stroke="#ffffff" '
                     f'stroke-width="1" data-path={quoteattr(text or "")}>{title}</rect>')
    parts.append("</svg>")
    return "".join(parts)
