from .html import OutputDirUnwritable, ReportData, collect_report_data, merge_trees, render_report
from .svg import EmptySeries, render_treemap, render_trend_chart
from .treemap import Rect, TreeMapLayout, TreeMapTile, ZeroTotalWeight, layout_treemap, node_weights, squarify
from .views import DEFAULT_VIEW, Detail, ViewSpec, view_entities, view_root, views_from_config

__all__ = [
    "OutputDirUnwritable", "ReportData", "collect_report_data", "merge_trees", "render_report",
    "EmptySeries", "render_treemap", "render_trend_chart", "Rect", "TreeMapLayout", "TreeMapTile",
    "ZeroTotalWeight", "layout_treemap", "node_weights", "squarify", "DEFAULT_VIEW", "Detail", "ViewSpec",
    "view_entities", "view_root", "views_from_config",
]
