from .blocks import expand_blocks
from .config import (
    BlockDef, BlockInstance, PipelineConfig, ProcessorDecl, ViewDecl, format_config, load_config, parse_config,
)
from .graph import (
    ANY, Edge, ExecutionGraph, GraphNode, ParamSpec, ParamType, ProcessorDescriptor, Registry, build_graph,
    register_processor,
)
from .runner import ExecutionContext, NodeStatus, RunResult, execute

__all__ = [
    "expand_blocks", "BlockDef", "BlockInstance", "PipelineConfig", "ProcessorDecl", "ViewDecl",
    "format_config", "load_config", "parse_config", "ANY", "Edge", "ExecutionGraph", "GraphNode",
    "ParamSpec", "ParamType", "ProcessorDescriptor", "Registry", "build_graph", "register_processor",
    "ExecutionContext", "NodeStatus", "RunResult", "execute",
]
