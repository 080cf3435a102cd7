"""Translation of resolved specifications into timed-automata networks.

One automaton per component, following the per-kind templates; output
sequences are appended per the resolved target list (a lock/processing/
unlock block for memory targets, a single send for processing-unit
targets).
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import ComponentDecl, Interval, Kind, ResolvedSpec, SourceRef, SpecError
from .tast import (
    ACTIVITY,
    RECEIVE,
    SEND,
    WAIT,
    Channel,
    Edge,
    Location,
    Network,
    TastAutomaton,
    validate_structure,
)


class _Builder:
    def __init__(self, cid: str):
        self.cid = cid
        self.locations: list[Location] = []
        self.edges: list[Edge] = []

    def loc(self, kind: str, inv: int | None = None) -> str:
        lid = f"s{len(self.locations)}"
        self.locations.append(Location(lid, kind, inv))
        return lid

    def edge(self, **kw) -> None:
        self.edges.append(Edge(**kw))

    def build(self, initial: str = "s0") -> TastAutomaton:
        return TastAutomaton(
            id=self.cid,
            locations=tuple(self.locations),
            edges=tuple(self.edges),
            initial=initial,
        )


def resolve_source_intervals(
    owner: str, sources: tuple[SourceRef, ...]
) -> dict[str, Interval]:
    """Assign a processing interval to every source of a source list.

    A bare source borrows the interval of the nearest following source
    that has one, falling back to the nearest preceding one.
    """
    if not any(s.interval for s in sources):
        raise SpecError(f"no source of {owner!r} carries a processing interval")
    out: dict[str, Interval] = {}
    for i, s in enumerate(sources):
        if s.interval is not None:
            out[s.id] = s.interval
            continue
        following = next((t.interval for t in sources[i + 1 :] if t.interval), None)
        if following is not None:
            out[s.id] = following
        else:
            out[s.id] = next(t.interval for t in reversed(sources[:i]) if t.interval)
    return out


def elaborate(spec: ResolvedSpec) -> Network:
    by_id = {c.id: c for c in spec.components}
    automata = tuple(_component(c, by_id) for c in spec.components)
    net = Network(automata)
    validate_structure(net)
    return net


def _component(c: ComponentDecl, by_id: dict[str, ComponentDecl]) -> TastAutomaton:
    b = _Builder(c.id)
    if c.kind is Kind.PERIODIC:
        b.loc(ACTIVITY, inv=c.start.max)  # s0: start-up
        cycle = b.loc(ACTIVITY, inv=c.work.max)  # s1: capture
        b.edge(src="s0", dst=cycle, guard=c.start.min, reset_x=True)
        _sequence(b, c, by_id, entries=[(cycle, c.work.min)], loop=cycle, sensor=True)
    elif c.kind is Kind.APERIODIC:
        cycle = b.loc(ACTIVITY, inv=None)  # s0: unbounded event wait
        _sequence(b, c, by_id, entries=[(cycle, c.work.min)], loop=cycle, sensor=True)
    elif c.kind is Kind.FIRST:
        start = b.loc(WAIT)
        intervals = resolve_source_intervals(c.id, c.sources)
        groups: dict[Interval, str] = {}
        entries = []
        pending = []
        for s in c.sources:
            iv = intervals[s.id]
            if iv not in groups:
                groups[iv] = b.loc(ACTIVITY, inv=iv.max)
                entries.append((groups[iv], iv.min))
            pending.append((s.id, groups[iv]))
        for sid, ploc in pending:
            b.edge(
                src=start,
                dst=ploc,
                channel=Channel("data", sid, c.id),
                direction=RECEIVE,
                reset_x=True,
            )
        _sequence(b, c, by_id, entries=entries, loop=start, sensor=False)
    elif c.kind is Kind.BOTH:
        # s1 is entered on the second declared input arriving first; this
        # matches the published numbering of the diamond.
        i1, i2 = c.sources[0].id, c.sources[1].id
        start = b.loc(WAIT)
        half2 = b.loc(WAIT)  # s1: second input received first
        half1 = b.loc(WAIT)  # s2: first input received first
        proc = b.loc(ACTIVITY, inv=c.work.max)  # s3
        b.edge(src=start, dst=half2, channel=Channel("data", i2, c.id), direction=RECEIVE)
        b.edge(src=half2, dst=proc, channel=Channel("data", i1, c.id), direction=RECEIVE, reset_x=True)
        b.edge(src=start, dst=half1, channel=Channel("data", i1, c.id), direction=RECEIVE)
        b.edge(src=half1, dst=proc, channel=Channel("data", i2, c.id), direction=RECEIVE, reset_x=True)
        _sequence(b, c, by_id, entries=[(proc, c.work.min)], loop=start, sensor=False)
    elif c.kind is Kind.PRIORITY:
        master, slave = c.sources
        start = b.loc(WAIT)
        slave_first = b.loc(WAIT)  # s1: slave arrived, awaiting master
        proc_m = b.loc(ACTIVITY, inv=master.interval.max)  # s2
        proc_s = b.loc(ACTIVITY, inv=slave.interval.max)  # s3
        b.edge(src=start, dst=proc_m, channel=Channel("data", master.id, c.id), direction=RECEIVE, reset_x=True)
        b.edge(src=start, dst=slave_first, channel=Channel("data", slave.id, c.id), direction=RECEIVE)
        b.edge(src=slave_first, dst=proc_s, channel=Channel("data", master.id, c.id), direction=RECEIVE, reset_x=True)
        _sequence(
            b,
            c,
            by_id,
            entries=[(proc_m, master.interval.min), (proc_s, slave.interval.min)],
            loop=start,
            sensor=False,
        )
    elif c.kind is Kind.MEMORY:
        # Intervals are managed in the peer components; still resolve them
        # so missing intervals are diagnosed here rather than at the client.
        resolve_source_intervals(c.id, c.sources)
        free = b.loc(WAIT)
        held = b.loc(WAIT)
        b.edge(src=free, dst=held, channel=Channel("lock", None, c.id), direction=RECEIVE)
        b.edge(src=held, dst=free, channel=Channel("unlock", None, c.id), direction=RECEIVE)
    else:  # Rendering
        mem = c.sources[0]
        start = b.loc(WAIT)
        proc = b.loc(ACTIVITY, inv=mem.interval.max)
        done = b.loc(WAIT)
        render = b.loc(ACTIVITY, inv=c.start.max)
        b.edge(src=start, dst=proc, channel=Channel("lock", None, mem.id), direction=SEND, reset_x=True)
        b.edge(src=proc, dst=done, guard=mem.interval.min)
        b.edge(src=done, dst=render, channel=Channel("unlock", None, mem.id), direction=SEND, reset_x=True)
        b.edge(src=render, dst=start, guard=c.start.min)
    return b.build()


def _sequence(
    b: _Builder,
    c: ComponentDecl,
    by_id: dict[str, ComponentDecl],
    entries: list[tuple[str, int]],
    loop: str,
    sensor: bool,
) -> None:
    """Append the output sequence for c's resolved target list.

    ``entries`` are (activity location, guard) pairs that feed the first
    block; the last edge returns to ``loop``, resetting x for sensors.
    """
    # Pending edges awaiting their destination: (kwargs for Edge minus dst).
    pending = [dict(src=src, guard=g) for src, g in entries]

    def attach(dst: str, final: bool) -> None:
        for kw in pending:
            reset = kw.pop("reset_x", False) or (final and sensor)
            b.edge(dst=dst, reset_x=reset, **kw)
        pending.clear()

    for tid in c.targets:
        tgt = by_id[tid]
        if tgt.kind is Kind.MEMORY:
            iv = resolve_source_intervals(tid, tgt.sources)[c.id]
            w_lock = b.loc(WAIT)
            attach(w_lock, final=False)
            busy = b.loc(ACTIVITY, inv=iv.max)
            b.edge(
                src=w_lock,
                dst=busy,
                channel=Channel("lock", None, tid),
                direction=SEND,
                reset_x=True,
            )
            w_unlock = b.loc(WAIT)
            b.edge(src=busy, dst=w_unlock, guard=iv.min)
            pending.append(
                dict(src=w_unlock, channel=Channel("unlock", None, tid), direction=SEND)
            )
        elif tgt.kind is Kind.RENDERING:
            raise SpecError(f"{c.id!r} cannot target rendering loop {tid!r}")
        else:
            w_send = b.loc(WAIT)
            attach(w_send, final=False)
            pending.append(
                dict(src=w_send, channel=Channel("data", c.id, tid), direction=SEND)
            )
    attach(loop, final=True)


@dataclass(frozen=True)
class ZenoViolation:
    automaton: str
    cycle: tuple[str, ...]
    reason: str

    def __str__(self) -> str:
        return f"{self.automaton}: cycle {'->'.join(self.cycle)}: {self.reason}"


def check_zeno_free(net: Network) -> list[ZenoViolation]:
    """Report cycles that admit Zeno evolutions.

    A cycle is fine if it carries a positive guard and a reset of x, or
    consists of input channels only.  Returns one violation per offending
    cycle; an empty list means the network is structurally Zeno-free.
    """
    violations = []
    for a in net.automata:
        for cycle in _simple_cycles(a):
            if all(e.channel is not None and e.direction == RECEIVE for e in cycle):
                continue
            has_guard = any(e.guard is not None and e.guard > 0 for e in cycle)
            has_reset = any(e.reset_x for e in cycle)
            if has_guard and has_reset:
                continue
            if not has_guard:
                reason = "no positive guard x>=e on the cycle"
            else:
                reason = "no reset of x on the cycle"
            nodes = tuple(e.src for e in cycle) + (cycle[-1].dst,)
            violations.append(ZenoViolation(a.id, nodes, reason))
    return violations


def _simple_cycles(a: TastAutomaton) -> list[list[Edge]]:
    """All vertex-simple cycles, distinguishing parallel edges."""
    order = {lid: i for i, lid in enumerate(a.location_ids())}
    out: dict[str, list[Edge]] = {lid: [] for lid in order}
    for e in a.edges:
        out[e.src].append(e)
    cycles: list[list[Edge]] = []

    def dfs(start: str, node: str, path: list[Edge], on_path: set[str]) -> None:
        for e in out[node]:
            if e.dst == start:
                cycles.append(path + [e])
            elif order[e.dst] > order[start] and e.dst not in on_path:
                on_path.add(e.dst)
                dfs(start, e.dst, path + [e], on_path)
                on_path.discard(e.dst)

    for start in a.location_ids():
        dfs(start, start, [], {start})
    return cycles


@dataclass(frozen=True)
class StaticPartition:
    """Syntactic split of wait locations by outgoing action.

    ``n``: origins of unlock!/unlock? (never indefinitely waiting);
    ``only_s``: origins of lock! (starvation at worst); ``w``: the rest.
    """

    n: tuple[tuple[str, str], ...]
    only_s: tuple[tuple[str, str], ...]
    w: tuple[tuple[str, str], ...]

    def set_of(self, aut: str, loc: str) -> str:
        key = (aut, loc)
        if key in self.n:
            return "N"
        if key in self.only_s:
            return "onlyS"
        if key in self.w:
            return "W"
        raise KeyError(key)

    def all_locations(self) -> tuple[tuple[str, str], ...]:
        return self.n + self.only_s + self.w


def static_partition(net: Network) -> StaticPartition:
    n, only_s, w = [], [], []
    for a in net.automata:
        primed_ids = {p for _, p in a.primed}
        for loc in a.wait_locations():
            if loc.id in primed_ids:
                continue
            chans = [e.channel.kind for e in a.out_edges(loc.id) if e.channel]
            sends = [
                e.channel.kind
                for e in a.out_edges(loc.id)
                if e.channel and e.direction == SEND
            ]
            key = (a.id, loc.id)
            if "unlock" in chans:
                n.append(key)
            elif "lock" in sends:
                only_s.append(key)
            else:
                w.append(key)
    return StaticPartition(tuple(n), tuple(only_s), tuple(w))
