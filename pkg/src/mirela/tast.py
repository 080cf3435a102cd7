"""Timed-automata network IR.

Each automaton has a single work clock ``x`` and, after the urgency
rewrite, an auxiliary clock ``u`` that is only ever compared to 0.
Guards are lower bounds ``x >= g``; invariants inclusive upper bounds
``x <= inv`` (processing intervals are closed: work in ``[min, max]``
may finish at ``max`` exactly).  Wait locations marked ``urgent``
additionally carry the invariant ``u <= 0``, with ``u`` reset on every
incoming edge.
"""

from __future__ import annotations

from dataclasses import dataclass


class NetworkError(Exception):
    pass


@dataclass(frozen=True)
class Channel:
    """A synchronisation channel.

    kind 'data' carries k_{src-dst}; 'lock'/'unlock' pair a memory with
    its clients.  Before demultiplexing, lock/unlock channels are shared
    per memory and have src=None.
    """

    kind: str  # 'data' | 'lock' | 'unlock'
    src: str | None
    dst: str

    @property
    def name(self) -> str:
        if self.kind == "data":
            return f"k_{{{self.src}-{self.dst}}}"
        if self.src is None:
            return self.kind
        return f"{self.kind}_{{{self.src}-{self.dst}}}"

    @property
    def label(self) -> str:
        """Identifier-safe form, usable as a PRISM action label."""
        if self.kind == "data":
            return f"k_{self.src}_{self.dst}"
        if self.src is None:
            return f"{self.kind}_{self.dst}"
        return f"{self.kind}_{self.src}_{self.dst}"


SEND = "!"
RECEIVE = "?"

ACTIVITY = "activity"
WAIT = "wait"


@dataclass(frozen=True)
class Location:
    id: str
    kind: str  # ACTIVITY | WAIT
    inv: int | None = None  # x <= inv
    urgent: bool = False  # u <= 0 (set by the urgency rewrite)


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    guard: int | None = None  # x >= guard
    channel: Channel | None = None
    direction: str | None = None  # SEND | RECEIVE
    reset_x: bool = False
    reset_u: bool = False
    # Escape edges (urgency rewrite): enabled iff no (automaton, location)
    # atom below is occupied.  Atoms reference peer automata.
    blocked_by: tuple[tuple[str, str], ...] | None = None

    @property
    def is_internal(self) -> bool:
        return self.channel is None and self.blocked_by is None

    @property
    def is_escape(self) -> bool:
        return self.blocked_by is not None

    def action_str(self) -> str:
        if self.channel is not None:
            return f"{self.channel.name}{self.direction}"
        if self.is_escape:
            atoms = " | ".join(f"{a}.{l}" for a, l in self.blocked_by)
            return f"!({atoms})"
        if self.guard is not None:
            return f"x>={self.guard}"
        return "tau"


@dataclass(frozen=True)
class TastAutomaton:
    id: str
    locations: tuple[Location, ...]
    edges: tuple[Edge, ...]
    initial: str
    # original wait location -> primed copy, after the urgency rewrite
    primed: tuple[tuple[str, str], ...] = ()

    def location(self, lid: str) -> Location:
        for loc in self.locations:
            if loc.id == lid:
                return loc
        raise KeyError(f"{self.id}.{lid}")

    def location_ids(self) -> tuple[str, ...]:
        return tuple(loc.id for loc in self.locations)

    def out_edges(self, lid: str) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.src == lid)

    def constants(self) -> tuple[int, ...]:
        out = []
        for loc in self.locations:
            if loc.inv is not None:
                out.append(loc.inv)
        for e in self.edges:
            if e.guard is not None:
                out.append(e.guard)
        return tuple(out)

    def wait_locations(self) -> tuple[Location, ...]:
        return tuple(loc for loc in self.locations if loc.kind == WAIT)


@dataclass(frozen=True)
class Network:
    automata: tuple[TastAutomaton, ...]
    demuxed: bool = False
    transformed: bool = False

    def automaton(self, aid: str) -> TastAutomaton:
        for a in self.automata:
            if a.id == aid:
                return a
        raise KeyError(aid)

    def channels(self) -> tuple[Channel, ...]:
        seen: dict[Channel, None] = {}
        for a in self.automata:
            for e in a.edges:
                if e.channel is not None:
                    seen.setdefault(e.channel, None)
        return tuple(seen)

    def channel_edges(self, chan: Channel) -> tuple[list, list]:
        """(senders, receivers) as lists of (automaton id, edge)."""
        sends, recvs = [], []
        for a in self.automata:
            for e in a.edges:
                if e.channel == chan:
                    (sends if e.direction == SEND else recvs).append((a.id, e))
        return sends, recvs

    def constants(self) -> tuple[int, ...]:
        return tuple(c for a in self.automata for c in a.constants())


def validate_structure(net: Network) -> None:
    """Check the structural well-formedness of every automaton.

    Activity locations: outgoing edges internal and guarded, incoming
    edges reset x, guard below the invariant when one is present.  Wait
    locations: outgoing edges are unguarded communications (escape edges
    are exempt: they exist only after the urgency rewrite).
    """
    for a in net.automata:
        ids = a.location_ids()
        if len(set(ids)) != len(ids):
            raise NetworkError(f"{a.id}: duplicate location ids")
        if a.initial not in ids:
            raise NetworkError(f"{a.id}: initial location {a.initial!r} missing")
        for e in a.edges:
            if e.src not in ids or e.dst not in ids:
                raise NetworkError(f"{a.id}: edge endpoints {e.src}->{e.dst} missing")
        _check_connected(a)
        primed_ids = {p for _, p in a.primed}
        for loc in a.locations:
            out = a.out_edges(loc.id)
            inc = [e for e in a.edges if e.dst == loc.id]
            if loc.kind == ACTIVITY:
                for e in out:
                    if not e.is_internal or e.guard is None:
                        raise NetworkError(
                            f"{a.id}.{loc.id}: activity location with non-internal "
                            f"or unguarded outgoing edge"
                        )
                    if loc.inv is not None and e.guard > loc.inv:
                        raise NetworkError(
                            f"{a.id}.{loc.id}: guard x>={e.guard} exceeds "
                            f"invariant x<={loc.inv}"
                        )
                for e in inc:
                    if not e.reset_x:
                        raise NetworkError(
                            f"{a.id}: edge {e.src}->{loc.id} into activity "
                            f"location does not reset x"
                        )
            else:
                if loc.inv is not None:
                    raise NetworkError(f"{a.id}.{loc.id}: wait location with invariant")
                for e in out:
                    if e.is_escape:
                        continue
                    if e.channel is None or e.guard is not None:
                        raise NetworkError(
                            f"{a.id}.{loc.id}: wait location must offer only "
                            f"unguarded communications"
                        )
                if loc.id not in primed_ids and not out:
                    raise NetworkError(f"{a.id}.{loc.id}: wait location with no exit")


def _check_connected(a: TastAutomaton) -> None:
    adj: dict[str, set[str]] = {loc.id: set() for loc in a.locations}
    for e in a.edges:
        adj[e.src].add(e.dst)
        adj[e.dst].add(e.src)
    seen = {a.initial}
    stack = [a.initial]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    if len(seen) != len(a.locations):
        missing = sorted(set(a.location_ids()) - seen)
        raise NetworkError(f"{a.id}: unreachable locations {missing}")


def dump_network(net: Network) -> str:
    """Structured text dump of the network, one block per automaton."""
    lines = []
    for a in net.automata:
        lines.append(f"automaton {a.id} (initial {a.initial})")
        for loc in a.locations:
            bits = [loc.kind]
            if loc.inv is not None:
                bits.append(f"x<={loc.inv}")
            if loc.urgent:
                bits.append("u<=0")
            lines.append(f"  loc {loc.id}: {' '.join(bits)}")
        for e in a.edges:
            resets = []
            if e.reset_x:
                resets.append("x:=0")
            if e.reset_u:
                resets.append("u:=0")
            suffix = f" {{{', '.join(resets)}}}" if resets else ""
            lines.append(f"  edge {e.src} -> {e.dst}: {e.action_str()}{suffix}")
        lines.append("")
    return "\n".join(lines)


def dump_dot(net: Network) -> str:
    """Graphviz rendering of the network, for visual inspection."""
    lines = ["digraph network {", "  rankdir=LR;", "  node [shape=circle];"]
    for a in net.automata:
        lines.append(f"  subgraph cluster_{a.id} {{")
        lines.append(f'    label="{a.id}";')
        for loc in a.locations:
            extras = []
            if loc.inv is not None:
                extras.append(f"x<={loc.inv}")
            if loc.urgent:
                extras.append("u<=0")
            label = loc.id + ("\\n" + " ".join(extras) if extras else "")
            shape = "doublecircle" if loc.id == a.initial else "circle"
            style = ', style=filled, fillcolor="lightblue"' if loc.kind == ACTIVITY else ""
            lines.append(
                f'    "{a.id}.{loc.id}" [label="{label}", shape={shape}{style}];'
            )
        for e in a.edges:
            resets = "".join(
                [" x:=0" if e.reset_x else "", " u:=0" if e.reset_u else ""]
            )
            lines.append(
                f'    "{a.id}.{e.src}" -> "{a.id}.{e.dst}" '
                f'[label="{e.action_str()}{resets}"];'
            )
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
