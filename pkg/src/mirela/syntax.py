"""AST types for MIRELA specifications.

A specification is a flat, ordered list of component declarations.  The
types here cover both the freshly parsed form (``SpecAst``) and the form
with implicit targets completed (``ResolvedSpec``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class SpecError(Exception):
    """Structural or semantic error in a MIRELA specification."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is not None:
            return f"{self.line}:{self.column}: {self.message}"
        return self.message


class Kind(enum.Enum):
    PERIODIC = "Periodic"
    APERIODIC = "Aperiodic"
    FIRST = "First"
    BOTH = "Both"
    PRIORITY = "Priority"
    MEMORY = "Memory"
    RENDERING = "Rendering"


SENSOR_KINDS = frozenset({Kind.PERIODIC, Kind.APERIODIC})
PUNIT_KINDS = frozenset({Kind.FIRST, Kind.BOTH, Kind.PRIORITY})


@dataclass(frozen=True)
class Interval:
    """A closed time interval [min, max]; max=None means unbounded."""

    min: int
    max: int | None

    def __post_init__(self):
        if self.min < 0:
            raise SpecError(f"interval lower bound must be non-negative, got {self.min}")
        if self.max is not None and self.min > self.max:
            raise SpecError(f"empty interval [{self.min},{self.max}]")

    def __str__(self) -> str:
        return f"[{self.min},{self.max}]"


@dataclass(frozen=True)
class SourceRef:
    """A source entry ``id`` or ``id[min,max]`` in a source list."""

    id: str
    interval: Interval | None = None

    def __str__(self) -> str:
        if self.interval is None:
            return self.id
        return f"{self.id}{self.interval}"


@dataclass(frozen=True)
class ComponentDecl:
    """One component declaration.

    ``start`` holds the start-up interval of a Periodic sensor or the
    rendering period of a Rendering loop; ``work`` holds the capture /
    processing interval (for Aperiodic, ``work.max`` is None).  For
    Priority, ``sources[0]`` is the master and ``sources[1]`` the slave.
    """

    id: str
    kind: Kind
    sources: tuple[SourceRef, ...] = ()
    targets: tuple[str, ...] = ()
    start: Interval | None = None
    work: Interval | None = None

    @property
    def is_sensor(self) -> bool:
        return self.kind in SENSOR_KINDS

    @property
    def is_punit(self) -> bool:
        return self.kind in PUNIT_KINDS

    def source_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.sources)


@dataclass(frozen=True)
class SpecAst:
    """Parsed specification, before target completion."""

    name: str
    components: tuple[ComponentDecl, ...]

    def component(self, cid: str) -> ComponentDecl:
        for c in self.components:
            if c.id == cid:
                return c
        raise KeyError(cid)


@dataclass(frozen=True)
class ResolvedSpec:
    """Specification with implicit targets appended and invariants checked.

    ``channels`` is the derived set of point-to-point data channels
    (sender id, receiver id), in declaration order of the sender.
    """

    name: str
    components: tuple[ComponentDecl, ...]
    channels: tuple[tuple[str, str], ...] = field(default=(), compare=False)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def component(self, cid: str) -> ComponentDecl:
        for c in self.components:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def memories(self) -> tuple[ComponentDecl, ...]:
        return tuple(c for c in self.components if c.kind is Kind.MEMORY)

    def has_aperiodic(self) -> bool:
        return any(c.kind is Kind.APERIODIC for c in self.components)
