"""The built-in processor catalog.

Every processor receives the execution context and its resolved parameters and
returns a mapping from output port to value. Processors that annotate a tree
work on a copy, so a failing processor never leaves partial values behind.
"""

from __future__ import annotations

import logging
from typing import Callable

from .arch import check_conformance, extract_dependencies, load_arch_spec
from .assess import (
    AggregationOp, Assessment, Color, Direction, ThresholdRule, aggregate_assessments, aggregate_values, assess,
)
from .clones import DEFAULT_MIN_LENGTH, build_report
from .engine.graph import ParamSpec, ParamType, ProcessorDescriptor, Registry
from .history import TrendKind, TrendPoint, TrendRule, TrendSeries, assess_trend, to_utc
from .metrics import code_lines, compute_size_metrics, compute_structure_metrics
from .patterns import match_any
from .report.treemap import layout_treemap
from .results import GateVerdict, TreemapRequest, TrendResult
from .scope.profiles import BUILTIN_PROFILES, load_profiles
from .scope.tree import MISSING, scan, tokenize_tree

log = logging.getLogger(__name__)

BUILTINS: list[ProcessorDescriptor] = []

S, I, F, B, L, R = (ParamType.STRING, ParamType.INTEGER, ParamType.FLOAT, ParamType.BOOLEAN,
                    ParamType.STRING_LIST, ParamType.REFERENCE)
TREE_OUT = (("tree", "tree"),)


def tree_input(name: str = "input") -> ParamSpec:
    return ParamSpec(name, R, required=True, port_type="tree", doc="resource tree")


def processor(kind: str, params=(), outputs=TREE_OUT, check: Callable | None = None):
    def register(fn):
        doc = (fn.__doc__ or "").strip().splitlines()
        BUILTINS.append(ProcessorDescriptor(kind, tuple(params), tuple(outputs), fn, doc[0] if doc else "", check))
        return fn
    return register


def default_registry() -> Registry:
    """A fresh registry holding the built-in catalog."""
    return Registry(BUILTINS)


def _copy(tree):
    return tree.copy_structure()


def _files(tree):
    if tree.profiles is None and any(True for _ in tree.files()):
        raise ValueError("input tree is not tokenized; feed it through a tokenizer first")
    return [f for f in tree.files() if f.tokens is not None]


def _profiles(tree):
    return tuple(tree.profiles) if tree.profiles else BUILTIN_PROFILES


def _profile_of(tree, node):
    for profile in _profiles(tree):
        if profile.name == node.language:
            return profile
    raise LookupError(f"{node.path}: no profile named {node.language!r}")


def _attach_ratio(tree, metric: str, num: dict, den: dict) -> None:
    """Inner nodes get sum(num) / max(sum(den), 1) over their measured files."""

    def visit(node):
        if not node.children:
            return (num[node.path], den[node.path]) if node.path in num else None
        parts = [r for r in (visit(c) for c in node.children) if r is not None]
        if not parts:
            return None
        n = sum(p[0] for p in parts)
        d = sum(p[1] for p in parts)
        node.attach(metric, n / max(d, 1))
        return n, d

    if tree.children:
        visit(tree)


@processor("scanner", params=(
    ParamSpec("root", S, default=".", doc="directory relative to the project root"),
    ParamSpec("include", L, default=()),
    ParamSpec("exclude", L, default=()),
))
def run_scanner(ctx, p):
    """Scan the project directory into a resource tree."""
    return {"tree": scan(ctx.project_path(p["root"]), p["include"] or None, p["exclude"])}


@processor("tokenizer", params=(
    tree_input(),
    ParamSpec("profiles", L, default=(), doc="profile files relative to the config"),
    ParamSpec("builtin", B, default=True),
    ParamSpec("drop_unknown", B, default=True),
))
def run_tokenizer(ctx, p):
    """Assign languages and token streams; drop files no profile claims."""
    custom = []
    for name in p["profiles"]:
        custom.extend(load_profiles(ctx.config_path(name)))
    names = {c.name for c in custom}
    profiles = custom + ([b for b in BUILTIN_PROFILES if b.name not in names] if p["builtin"] else [])
    tree = tokenize_tree(_copy(p["input"]), profiles)
    if p["drop_unknown"]:
        tree = tree.copy_structure(keep=lambda f: f.tokens is not None)
    return {"tree": tree}


@processor("file-filter", params=(tree_input(), ParamSpec("include", L, default=()), ParamSpec("exclude", L, default=())))
def run_file_filter(ctx, p):
    """Keep files matching an include glob (all if none) and no exclude glob."""
    inc, exc = p["include"], p["exclude"]
    return {"tree": p["input"].copy_structure(
        keep=lambda f: (not inc or match_any(inc, f.path)) and not match_any(exc, f.path))}


@processor("language-filter", params=(tree_input(), ParamSpec("languages", L, required=True)))
def run_language_filter(ctx, p):
    """Keep files whose language tag is listed."""
    wanted = set(p["languages"])
    return {"tree": p["input"].copy_structure(keep=lambda f: f.language in wanted)}


@processor("loc-analyzer", params=(tree_input(),))
def run_loc(ctx, p):
    """loc, sloc and comment.ratio per file, summed up the tree."""
    tree = _copy(p["input"])
    comments, locs = {}, {}
    for f in _files(tree):
        m = compute_size_metrics(f.text or "", f.tokens)
        f.attach("loc", m.loc)
        f.attach("sloc", m.sloc)
        f.attach("comment.ratio", m.comment_ratio)
        comments[f.path], locs[f.path] = m.comment_lines, m.loc
    aggregate_values(tree, "loc", AggregationOp.SUM)
    aggregate_values(tree, "sloc", AggregationOp.SUM)
    _attach_ratio(tree, "comment.ratio", comments, locs)
    return {"tree": tree}


@processor("structure-analyzer", params=(tree_input(),))
def run_structure(ctx, p):
    """Procedures, loop nesting, condition ratio and cyclomatic complexity per file."""
    tree = _copy(p["input"])
    branches, slocs, proc_lines, procs = {}, {}, {}, {}
    for f in _files(tree):
        m = compute_structure_metrics(f.tokens, _profile_of(tree, f))
        f.attach("proc.count", m.procedure_count)
        f.attach("proc.avg_length", m.average_procedure_length)
        f.attach("nesting.max", m.max_nesting)
        f.attach("condition.ratio", m.condition_ratio)
        f.attach("cyclomatic", m.cyclomatic)
        branches[f.path], slocs[f.path] = m.branch_count, m.sloc
        proc_lines[f.path], procs[f.path] = m.procedure_lines, m.procedure_count
    aggregate_values(tree, "proc.count", AggregationOp.SUM)
    aggregate_values(tree, "nesting.max", AggregationOp.MAX)
    aggregate_values(tree, "cyclomatic", AggregationOp.AVG_LEAVES)
    _attach_ratio(tree, "condition.ratio", branches, slocs)
    _attach_ratio(tree, "proc.avg_length", proc_lines, procs)
    return {"tree": tree}


def _check_min_length(p):
    if p["min_length"] < 2:
        raise ValueError(f"min_length must be >= 2, got {p['min_length']}")


@processor("clone-detector", params=(
    tree_input(),
    ParamSpec("min_length", I, default=DEFAULT_MIN_LENGTH, doc="normalized tokens"),
    ParamSpec("listing", B, default=False, doc="write clones.txt"),
), outputs=(("tree", "tree"), ("clones", "clones")), check=_check_min_length)
def run_clones(ctx, p):
    """Clone classes over all tokenized files; clone.ratio per file and up the tree."""
    tree = _copy(p["input"])
    files = _files(tree)
    corpus = {f.path: f.tokens for f in files}
    report = build_report(corpus, p["min_length"], p["listing"])
    cloned, slocs = {}, {}
    for f in files:
        sloc = len(code_lines(f.tokens))
        cloned[f.path] = len(report.cloned_lines.get(f.path, ()))
        slocs[f.path] = sloc
        f.attach("clone.ratio", cloned[f.path] / max(sloc, 1))
    _attach_ratio(tree, "clone.ratio", cloned, slocs)
    if "clone.ratio" not in tree.values:
        tree.attach("clone.ratio", report.ratio)
    return {"tree": tree, "clones": report}


@processor("dependency-extractor", params=(tree_input(),), outputs=(("deps", "deps"),))
def run_dependencies(ctx, p):
    """File-level dependencies from import statements."""
    tree = p["input"]
    return {"deps": tuple(extract_dependencies(tree, _profiles(tree)))}


@processor("arch-checker", params=(
    tree_input(),
    ParamSpec("deps", R, required=True, port_type="deps"),
    ParamSpec("spec", S, required=True, doc="architecture file relative to the config"),
), outputs=(("tree", "tree"), ("result", "arch")))
def run_arch(ctx, p):
    """Check dependencies against a component architecture; arch.violations per file."""
    spec = load_arch_spec(ctx.config_path(p["spec"]))
    tree = _copy(p["input"])
    files = _files(tree)
    result = check_conformance(p["deps"], spec, [f.path for f in files])
    per_file = result.per_file()
    for f in files:
        f.attach("arch.violations", per_file.get(f.path, 0))
    aggregate_values(tree, "arch.violations", AggregationOp.SUM)
    if not files:
        tree.attach("arch.violations", len(result.violations))
    return {"tree": tree, "result": result}


_OPS = tuple(op.value for op in AggregationOp)


@processor("value-aggregator", params=(
    tree_input(), ParamSpec("metric", S, required=True), ParamSpec("op", S, default="SUM", choices=_OPS),
))
def run_value_aggregator(ctx, p):
    """Aggregate a metric from the files up to the root."""
    return {"tree": aggregate_values(_copy(p["input"]), p["metric"], p["op"])}


def _check_threshold(p):
    ThresholdRule(p["metric"], Direction(p["direction"]), p["yellow"], p["red"])


@processor("threshold-assessor", params=(
    tree_input(),
    ParamSpec("metric", S, required=True),
    ParamSpec("direction", S, default="HIGHER_IS_WORSE", choices=tuple(d.value for d in Direction)),
    ParamSpec("yellow", F, required=True),
    ParamSpec("red", F, required=True),
    ParamSpec("op", S, default="", choices=("",) + _OPS, doc="re-aggregate values and assess every node"),
    ParamSpec("blocking", B, default=False),
), outputs=(("tree", "tree"), ("verdict", "verdict")), check=_check_threshold)
def run_threshold(ctx, p):
    """Traffic-light assessment by thresholds, worst-wins up the tree."""
    rule = ThresholdRule(p["metric"], Direction(p["direction"]), p["yellow"], p["red"])
    metric = rule.metric
    tree = _copy(p["input"])

    def numeric(node):
        v = node.values.get(metric)
        return v if isinstance(v, (int, float)) and not isinstance(v, bool) else None

    if p["op"]:
        for node in tree.walk():
            if node.children:
                node.values.pop(metric, None)
        aggregate_values(tree, metric, p["op"])
        for node in tree.walk():
            if numeric(node) is not None:
                node.attach(metric, assess(numeric(node), rule))
    else:
        leaves = [n for n in tree.walk() if not n.children and numeric(n) is not None]
        for leaf in leaves:
            leaf.attach(metric, assess(numeric(leaf), rule))
        aggregate_assessments(tree, metric)
        if not leaves and numeric(tree) is not None:
            tree.attach(metric, assess(numeric(tree), rule))
    root = tree.assessments.get(metric)
    if root is None:
        log.warning("%s: no values of %s to assess", ctx.node_id, metric)
        root = Assessment(Color.GREEN, f"no values of {metric}")
    return {"tree": tree, "verdict": GateVerdict(ctx.node_id, metric, root, p["blocking"])}


@processor("assessment-aggregator", params=(tree_input(), ParamSpec("metric", S, required=True)))
def run_assessment_aggregator(ctx, p):
    """Worst-wins aggregation of existing file assessments."""
    return {"tree": aggregate_assessments(_copy(p["input"]), p["metric"])}


def _check_trend(p):
    TrendRule(p["metric"], TrendKind(p["kind"]), p["tolerance"])


@processor("trend-assessor", params=(
    tree_input(),
    ParamSpec("metric", S, required=True),
    ParamSpec("entity", S, default="", doc="entity path; empty for the project root"),
    ParamSpec("kind", S, default="MUST_NOT_INCREASE", choices=tuple(k.value for k in TrendKind)),
    ParamSpec("tolerance", F, default=0.0),
    ParamSpec("blocking", B, default=False),
), outputs=(("verdict", "verdict"), ("trend", "trend")), check=_check_trend)
def run_trend(ctx, p):
    """Compare this run's value with the previous stored one."""
    rule = TrendRule(p["metric"], TrendKind(p["kind"]), p["tolerance"])
    node = p["input"].find(p["entity"])
    value = node.value(rule.metric) if node is not None else MISSING
    if value is MISSING:
        raise LookupError(f"no {rule.metric} value at {p['entity'] or '<root>'}")
    stored = ctx.history.series(rule.metric, p["entity"]) if ctx.history is not None else \
        TrendSeries(rule.metric, p["entity"])
    series = stored.with_point(TrendPoint(to_utc(ctx.timestamp), ctx.run_id, value))
    verdict = assess_trend(series, rule)
    return {"verdict": GateVerdict(ctx.node_id, rule.metric, verdict.assessment, p["blocking"]),
            "trend": TrendResult(series, rule, verdict)}


@processor("history-recorder", params=(
    tree_input(),
    ParamSpec("metrics", L, required=True),
    ParamSpec("entities", L, default=("",), doc="entity paths to persist; empty string is the root"),
), outputs=(("snapshot", "snapshot"),))
def run_history(ctx, p):
    """Select (entity, metric, value) records for the history store."""
    tree = p["input"]
    records = []
    for entity in p["entities"]:
        node = tree.find(entity)
        for metric in p["metrics"]:
            value = node.value(metric) if node is not None else MISSING
            if value is MISSING or isinstance(value, bool) or not isinstance(value, (int, float)):
                log.warning("%s: no numeric %s at %s; not recorded", ctx.node_id, metric, entity or "<root>")
                continue
            records.append((entity, metric, value))
    return {"snapshot": tuple(records)}


@processor("treemap-renderer", params=(
    tree_input(),
    ParamSpec("weight", S, default="loc"),
    ParamSpec("color", S, default="", doc="metric whose assessments color the tiles"),
    ParamSpec("title", S, default=""),
), outputs=(("treemap", "treemap"),))
def run_treemap(ctx, p):
    """Tree map of the input tree, sized by a weight metric."""
    layout_treemap(p["input"], p["weight"])
    return {"treemap": TreemapRequest(p["input"], p["weight"], p["color"], p["title"])}
