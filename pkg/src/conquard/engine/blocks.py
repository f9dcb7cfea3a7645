"""Block expansion: inline every ``use`` with prefixed ids and bound formals."""

from __future__ import annotations

from ..errors import BlockArityError, DanglingReference, RecursiveBlock, UnknownBlock
from ..textformat import Formal, Reference
from .config import PipelineConfig, ProcessorDecl


def expand_blocks(config: PipelineConfig) -> PipelineConfig:
    """Return a flat copy of ``config``; a flat config comes back unchanged.

    Inner ids become ``<instance>.<id>``. Only exported members of an instance
    may be referenced from outside it.
    """
    flat: list[ProcessorDecl] = []
    # instance prefix -> names its block exports
    exports: dict[str, frozenset[str]] = {}

    def rewrite(value, prefix: str, bindings: dict):
        if isinstance(value, tuple):
            out = []
            for v in value:
                r = rewrite(v, prefix, bindings)
                # a list-valued actual spliced into a list formal
                out.extend(r if isinstance(r, tuple) and isinstance(v, Formal) else (r,))
            return tuple(out)
        if isinstance(value, Formal):
            return bindings[value.name]
        if isinstance(value, Reference) and prefix:
            return Reference(prefix + value.target, value.port)
        return value

    def expand(items, prefix: str, bindings: dict, chain: list[str]) -> None:
        for item in items:
            if isinstance(item, ProcessorDecl):
                params = {k: rewrite(v, prefix, bindings) for k, v in item.params.items()}
                flat.append(ProcessorDecl(prefix + item.id, item.kind, params, item.line, item.outputs))
                continue
            block = config.blocks.get(item.block)
            if block is None:
                raise UnknownBlock(item.block, item.line, source=config.source)
            if block.name in chain:
                raise RecursiveBlock(chain + [block.name], item.line)
            if len(item.args) != len(block.formals):
                raise BlockArityError(
                    f"block {block.name!r} takes {len(block.formals)} argument(s), "
                    f"instance {prefix + item.id!r} passes {len(item.args)}", item.line, source=config.source)
            args = [rewrite(a, prefix, bindings) for a in item.args]
            inner = prefix + item.id + "."
            exports[prefix + item.id] = frozenset(block.exports)
            expand(block.body, inner, dict(zip(block.formals, args)), chain + [block.name])

    expand(config.declarations, "", {}, [])
    result = PipelineConfig(flat, dict(config.blocks), list(config.outputs), list(config.views), config.source)
    if exports:
        _check_visibility(result, exports)
    return result


def _hidden_by(target: str, referrer: str, exports: dict[str, frozenset[str]]) -> str | None:
    """The instance that hides ``target`` from ``referrer``, if any."""
    parts = target.split(".")
    for k in range(1, len(parts)):
        prefix = ".".join(parts[:k])
        if prefix not in exports:
            continue
        if referrer.startswith(prefix + "."):
            continue
        if parts[k] not in exports[prefix]:
            return prefix
    return None


def _check_visibility(config: PipelineConfig, exports: dict[str, frozenset[str]]) -> None:
    for decl in config.declarations:
        for _, ref in decl.references():
            owner = _hidden_by(ref.target, decl.id, exports)
            if owner is not None:
                raise DanglingReference(ref.target, decl.id, f"is not exported by block instance {owner!r}",
                                        decl.line)
    for name in config.outputs:
        owner = _hidden_by(name, "", exports)
        if owner is not None:
            raise DanglingReference(name, "output", f"is not exported by block instance {owner!r}")
