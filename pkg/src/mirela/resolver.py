"""Target completion and structural validation of parsed specifications."""

from __future__ import annotations

from dataclasses import replace

from .syntax import (
    PUNIT_KINDS,
    ComponentDecl,
    Kind,
    ResolvedSpec,
    SpecAst,
    SpecError,
)


def resolve_targets(ast: SpecAst) -> ResolvedSpec:
    """Complete implicit targets and validate the source/target relation.

    Every component d that lists c as a source and is missing from c's
    explicit target list is appended to c's targets, in declaration order.
    """
    by_id = {c.id: c for c in ast.components}
    warnings: list[str] = []

    # Dangling identifiers first, so later checks can index freely.
    for c in ast.components:
        for s in c.sources:
            if s.id not in by_id:
                raise SpecError(f"component {c.id!r} lists unknown source {s.id!r}")
        for t in c.targets:
            if t not in by_id:
                raise SpecError(f"component {c.id!r} lists unknown target {t!r}")

    # A declared target must be backed by the inverse source relation.
    for c in ast.components:
        for t in c.targets:
            tgt = by_id[t]
            if c.id not in tgt.source_ids():
                raise SpecError(
                    f"{t!r} is a target of {c.id!r} but does not list {c.id!r} as a source"
                )

    resolved: list[ComponentDecl] = []
    for c in ast.components:
        for t in c.targets:
            if by_id[t].kind is Kind.MEMORY:
                warnings.append(
                    f"memory {t!r} appears explicitly in the target list of {c.id!r}"
                )
        implicit = [
            d.id
            for d in ast.components
            if c.id in d.source_ids() and d.id not in c.targets
        ]
        resolved.append(replace(c, targets=c.targets + tuple(implicit)))

    _validate_kinds(resolved)

    channels = tuple(
        (c.id, t)
        for c in resolved
        for t in c.targets
        if by_id[t].kind is not Kind.MEMORY
    )
    return ResolvedSpec(
        name=ast.name,
        components=tuple(resolved),
        channels=channels,
        warnings=tuple(warnings),
    )


def _validate_kinds(components: list[ComponentDecl]) -> None:
    by_id = {c.id: c for c in components}

    def kind_of(cid: str) -> Kind:
        return by_id[cid].kind

    for c in components:
        if c.kind is Kind.BOTH or c.kind is Kind.PRIORITY:
            if len(c.sources) != 2:
                raise SpecError(f"{c.kind.value} {c.id!r} must have exactly 2 sources")
        if c.kind is Kind.RENDERING and len(c.sources) != 1:
            raise SpecError(f"Rendering {c.id!r} must have exactly 1 source")
        if c.kind in (Kind.FIRST, Kind.MEMORY) and not c.sources:
            raise SpecError(f"{c.kind.value} {c.id!r} needs at least one source")

        if c.is_sensor and c.sources:
            raise SpecError(f"sensor {c.id!r} cannot have sources")
        if c.kind in PUNIT_KINDS:
            for s in c.sources:
                if kind_of(s.id) not in PUNIT_KINDS and not by_id[s.id].is_sensor:
                    raise SpecError(
                        f"processing unit {c.id!r} has source {s.id!r} of kind "
                        f"{kind_of(s.id).value}; sources must be sensors or processing units"
                    )
            for t in c.targets:
                if kind_of(t) not in PUNIT_KINDS and kind_of(t) is not Kind.MEMORY:
                    raise SpecError(
                        f"processing unit {c.id!r} has target {t!r} of kind "
                        f"{kind_of(t).value}; targets must be memories or processing units"
                    )
        if c.is_sensor:
            for t in c.targets:
                if kind_of(t) not in PUNIT_KINDS and kind_of(t) is not Kind.MEMORY:
                    raise SpecError(
                        f"sensor {c.id!r} has target {t!r} of kind {kind_of(t).value}"
                    )
        if c.kind is Kind.RENDERING:
            if kind_of(c.sources[0].id) is not Kind.MEMORY:
                raise SpecError(f"Rendering {c.id!r} must read from a Memory")
            if c.targets:
                raise SpecError(f"Rendering {c.id!r} cannot have targets")
        if c.kind is Kind.MEMORY:
            for s in c.sources:
                if kind_of(s.id) is Kind.RENDERING or kind_of(s.id) is Kind.MEMORY:
                    raise SpecError(
                        f"Memory {c.id!r} has source {s.id!r} of kind {kind_of(s.id).value}"
                    )


def pretty_print(spec: ResolvedSpec | SpecAst) -> str:
    """Render a specification; output re-parses to an equal spec.

    Implicit targets of a ResolvedSpec are printed explicitly.
    """
    lines = [f"{spec.name}:"]
    decls = []
    for c in spec.components:
        decls.append(f"  {c.id} = {_format_comp(c)}{_format_targets(c)}")
    lines.append(";\n".join(decls) + ".")
    return "\n".join(lines) + "\n"


def _format_comp(c: ComponentDecl) -> str:
    if c.kind is Kind.PERIODIC:
        return f"Periodic({c.start.min},{c.start.max})[{c.work.min},{c.work.max}]"
    if c.kind is Kind.APERIODIC:
        return f"Aperiodic({c.work.min})"
    if c.kind is Kind.FIRST:
        return f"First({','.join(str(s) for s in c.sources)})"
    if c.kind is Kind.BOTH:
        return (
            f"Both({c.sources[0].id},{c.sources[1].id})[{c.work.min},{c.work.max}]"
        )
    if c.kind is Kind.PRIORITY:
        return f"Priority({c.sources[0]},{c.sources[1]})"
    if c.kind is Kind.MEMORY:
        return f"Memory({','.join(str(s) for s in c.sources)})"
    src = c.sources[0]
    return f"Rendering({c.start.min},{c.start.max})({src})"


def _format_targets(c: ComponentDecl) -> str:
    if not c.targets:
        return ""
    return f"->({','.join(c.targets)})"
