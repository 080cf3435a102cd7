"""Discrete-time product semantics of an automata network.

Clocks advance in unit ticks and are clamped at one above the largest
constant they are compared against, so clamping never changes the value
of any guard or invariant.  Invariants are inclusive upper bounds: a
location with bound c may be occupied while x<=c, and a tick is allowed
only if every bound still holds afterwards.

Two successor rules are provided:

* ``build_ts`` -- for networks rewritten by ``emulate_urgency``: ticks
  are blocked by the u<=0 invariants, escape edges consult peer
  locations.
* ``build_ts_urgent`` -- reference rule for demuxed, untransformed
  networks: a tick is forbidden whenever some synchronisation is jointly
  enabled.  Used to cross-check the rewrite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tast import RECEIVE, SEND, Edge, Network, NetworkError, TastAutomaton

DEFAULT_TRANSITION_CAP = 50_000_000


class AnalysisLimitError(Exception):
    def __init__(self, message: str, frontier: int):
        super().__init__(message)
        self.frontier = frontier


def clock_ceiling(a: TastAutomaton) -> int:
    """Clamping bound for a's work clock: 1 + the largest constant."""
    return 1 + max(a.constants(), default=0)


def constants_gcd(net: Network) -> int:
    g = 0
    for c in net.constants():
        g = math.gcd(g, c)
    return g or 1


def scale_constants(net: Network, divisor: int) -> Network:
    """Divide every guard and invariant constant by ``divisor``."""
    from dataclasses import replace

    if divisor <= 0:
        raise ValueError("divisor must be positive")
    for c in net.constants():
        if c % divisor:
            raise NetworkError(f"constant {c} is not divisible by {divisor}")
    automata = []
    for a in net.automata:
        locs = tuple(
            replace(l, inv=None if l.inv is None else l.inv // divisor)
            for l in a.locations
        )
        edges = tuple(
            replace(e, guard=None if e.guard is None else e.guard // divisor)
            for e in a.edges
        )
        automata.append(replace(a, locations=locs, edges=edges))
    return replace(net, automata=tuple(automata))


@dataclass
class TransitionSystem:
    """Explicit Kripke structure over reachable global states.

    States are indexed in BFS discovery order; terminal states carry a
    self-loop so every state has a successor.
    """

    aut_ids: tuple[str, ...]
    loc_names: tuple[tuple[str, ...], ...]
    locs: np.ndarray  # (n_states, n_automata) location indices
    clocks_x: np.ndarray
    clocks_u: np.ndarray | None
    succ_indptr: np.ndarray
    succ_indices: np.ndarray
    initial: int = 0
    _pred: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @property
    def n_states(self) -> int:
        return self.locs.shape[0]

    @property
    def n_transitions(self) -> int:
        return len(self.succ_indices)

    def successors(self, s: int) -> np.ndarray:
        return self.succ_indices[self.succ_indptr[s] : self.succ_indptr[s + 1]]

    def predecessors_csr(self) -> tuple[np.ndarray, np.ndarray]:
        if self._pred is None:
            n = self.n_states
            dst = self.succ_indices
            src = np.repeat(
                np.arange(n, dtype=dst.dtype), np.diff(self.succ_indptr)
            )
            order = np.argsort(dst, kind="stable")
            pred_indices = src[order]
            counts = np.bincount(dst, minlength=n)
            pred_indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(counts, out=pred_indptr[1:])
            self._pred = (pred_indptr, pred_indices)
        return self._pred

    def aut_index(self, aut: str) -> int:
        try:
            return self.aut_ids.index(aut)
        except ValueError:
            raise KeyError(f"unknown automaton {aut!r}") from None

    def atom_mask(self, aut: str, loc: str) -> np.ndarray:
        ai = self.aut_index(aut)
        try:
            li = self.loc_names[ai].index(loc)
        except ValueError:
            raise KeyError(f"unknown location {aut}.{loc}") from None
        return self.locs[:, ai] == li

    def state_str(self, s: int) -> str:
        parts = []
        for i, aid in enumerate(self.aut_ids):
            loc = self.loc_names[i][self.locs[s, i]]
            x = self.clocks_x[s, i]
            if self.clocks_u is not None:
                parts.append(f"{aid}.{loc}(x={x},u={self.clocks_u[s, i]})")
            else:
                parts.append(f"{aid}.{loc}(x={x})")
        return " ".join(parts)

    def export_adjacency(self) -> str:
        lines = []
        for s in range(self.n_states):
            for t in self.successors(s):
                lines.append(f"{s} {t}")
        return "\n".join(lines) + "\n"

    def export_state_table(self) -> str:
        lines = ["# index: component.location(x[,u]) ..."]
        for s in range(self.n_states):
            lines.append(f"{s}: {self.state_str(s)}")
        return "\n".join(lines) + "\n"


class _Compiled:
    """Per-automaton transition tables with integer location indices."""

    def __init__(self, net: Network, split: bool):
        self.split = split
        self.n = len(net.automata)
        self.aut_ids = tuple(a.id for a in net.automata)
        self.loc_names = tuple(a.location_ids() for a in net.automata)
        self.loc_index = [
            {lid: k for k, lid in enumerate(names)} for names in self.loc_names
        ]
        self.ceil = [clock_ceiling(a) for a in net.automata]
        self.inv = []  # x <= inv, None if unbounded
        self.urgent = []
        self.internal = []  # [aut][loc] -> [(guard, dst, reset_x, reset_u)]
        self.escapes = []  # [aut][loc] -> [(dst, ((aut_idx, loc_idx), ...))]
        self.sends = []  # [aut][loc] -> [(chan, dst, reset_x, reset_u)]
        self.recvs = []
        aut_index = {a.id: i for i, a in enumerate(net.automata)}
        channels = net.channels()
        self.chan_order = {c: k for k, c in enumerate(channels)}

        for i, a in enumerate(net.automata):
            idx = self.loc_index[i]
            self.inv.append([loc.inv for loc in a.locations])
            self.urgent.append([loc.urgent for loc in a.locations])
            nloc = len(a.locations)
            internal = [[] for _ in range(nloc)]
            escapes = [[] for _ in range(nloc)]
            sends = [[] for _ in range(nloc)]
            recvs = [[] for _ in range(nloc)]
            for e in a.edges:
                s, d = idx[e.src], idx[e.dst]
                if e.is_escape:
                    atoms = tuple(
                        (aut_index[aid], self.loc_index[aut_index[aid]][lid])
                        for aid, lid in e.blocked_by
                    )
                    escapes[s].append((d, atoms))
                elif e.channel is not None:
                    entry = (self.chan_order[e.channel], d, e.reset_x, e.reset_u)
                    (sends if e.direction == SEND else recvs)[s].append(entry)
                else:
                    internal[s].append((e.guard or 0, d, e.reset_x, e.reset_u))
            self.internal.append(internal)
            self.escapes.append(escapes)
            self.sends.append(sends)
            self.recvs.append(recvs)
        self.initial = tuple(
            self.loc_index[i][a.initial] for i, a in enumerate(net.automata)
        )

    def initial_state(self) -> tuple:
        n = self.n
        return self.initial + (0,) * (2 * n if self.split else n)

    def target_ok(self, i: int, loc: int, x: int, u: int) -> bool:
        inv = self.inv[i][loc]
        if inv is not None and x > inv:
            return False
        if self.split and self.urgent[i][loc] and u > 0:
            return False
        return True

    def successors(self, state: tuple) -> list[tuple]:
        n = self.n
        locs = state[:n]
        xs = state[n : 2 * n]
        us = state[2 * n :] if self.split else (0,) * n
        out: list[tuple] = []

        # Synchronisations: pair up offered sends/receives per channel.
        offers_send: dict[int, list[tuple[int, tuple]]] = {}
        offers_recv: dict[int, list[tuple[int, tuple]]] = {}
        for i in range(n):
            for entry in self.sends[i][locs[i]]:
                offers_send.setdefault(entry[0], []).append((i, entry))
            for entry in self.recvs[i][locs[i]]:
                offers_recv.setdefault(entry[0], []).append((i, entry))
        syncs: list[tuple] = []
        for chan in sorted(set(offers_send) & set(offers_recv)):
            for i, (_, di, rxi, rui) in offers_send[chan]:
                for j, (_, dj, rxj, ruj) in offers_recv[chan]:
                    if i == j:
                        continue
                    xi = 0 if rxi else xs[i]
                    xj = 0 if rxj else xs[j]
                    ui = 0 if rui else us[i]
                    uj = 0 if ruj else us[j]
                    if not self.target_ok(i, di, xi, ui):
                        continue
                    if not self.target_ok(j, dj, xj, uj):
                        continue
                    new_locs = list(locs)
                    new_locs[i], new_locs[j] = di, dj
                    new_xs = list(xs)
                    new_xs[i], new_xs[j] = xi, xj
                    if self.split:
                        new_us = list(us)
                        new_us[i], new_us[j] = ui, uj
                        syncs.append(tuple(new_locs) + tuple(new_xs) + tuple(new_us))
                    else:
                        syncs.append(tuple(new_locs) + tuple(new_xs))

        # Tick: +1 on every clock (clamped), if all invariants survive.
        tick_ok = not syncs if not self.split else True
        if tick_ok:
            for i in range(n):
                if self.split and self.urgent[i][locs[i]]:
                    tick_ok = False
                    break
                inv = self.inv[i][locs[i]]
                if inv is not None and xs[i] + 1 > inv:
                    tick_ok = False
                    break
        if tick_ok:
            new_xs = tuple(min(xs[i] + 1, self.ceil[i]) for i in range(n))
            if self.split:
                new_us = tuple(min(u + 1, 1) for u in us)
                out.append(locs + new_xs + new_us)
            else:
                out.append(locs + new_xs)

        # Internal moves.
        for i in range(n):
            for guard, d, rx, ru in self.internal[i][locs[i]]:
                if xs[i] < guard:
                    continue
                x = 0 if rx else xs[i]
                u = 0 if ru else us[i]
                if not self.target_ok(i, d, x, u):
                    continue
                new_locs = locs[:i] + (d,) + locs[i + 1 :]
                new_xs = xs[:i] + (x,) + xs[i + 1 :]
                if self.split:
                    new_us = us[:i] + (u,) + us[i + 1 :]
                    out.append(new_locs + new_xs + new_us)
                else:
                    out.append(new_locs + new_xs)

        out.extend(syncs)

        # Escape moves (split semantics only).
        if self.split:
            for i in range(n):
                for d, atoms in self.escapes[i][locs[i]]:
                    if any(locs[aj] == lj for aj, lj in atoms):
                        continue
                    new_locs = locs[:i] + (d,) + locs[i + 1 :]
                    out.append(new_locs + xs + us)

        # Deduplicate, preserving first-seen order.
        if len(out) > 1:
            seen = set()
            uniq = []
            for s in out:
                if s not in seen:
                    seen.add(s)
                    uniq.append(s)
            return uniq
        return out


def _build(net: Network, split: bool, cap: int) -> TransitionSystem:
    comp = _Compiled(net, split)
    n = comp.n
    init = comp.initial_state()
    for i in range(n):
        if not comp.target_ok(i, init[i], 0, 0):
            raise NetworkError(f"initial state violates invariant of {comp.aut_ids[i]}")

    index: dict[tuple, int] = {init: 0}
    states: list[tuple] = [init]
    src_list: list[int] = []
    dst_list: list[int] = []
    head = 0
    explored = 0
    while head < len(states):
        s = states[head]
        succs = comp.successors(s)
        if not succs:
            succs = [s]
        explored += len(succs)
        if explored > cap:
            raise AnalysisLimitError(
                f"transition cap {cap} exceeded "
                f"(frontier {len(states) - head} states, {len(states)} reached)",
                frontier=len(states) - head,
            )
        for t in succs:
            ti = index.get(t)
            if ti is None:
                ti = len(states)
                index[t] = ti
                states.append(t)
            src_list.append(head)
            dst_list.append(ti)
        head += 1

    n_states = len(states)
    arr = np.asarray(states, dtype=np.int32)
    locs = np.ascontiguousarray(arr[:, :n], dtype=np.int16)
    xs = np.ascontiguousarray(arr[:, n : 2 * n], dtype=np.int16)
    us = np.ascontiguousarray(arr[:, 2 * n :], dtype=np.int16) if split else None

    src = np.asarray(src_list, dtype=np.int64)
    dst = np.asarray(dst_list, dtype=np.int32)
    # BFS emits transitions grouped by source in increasing order already.
    indptr = np.zeros(n_states + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n_states), out=indptr[1:])
    return TransitionSystem(
        aut_ids=comp.aut_ids,
        loc_names=comp.loc_names,
        locs=locs,
        clocks_x=xs,
        clocks_u=us,
        succ_indptr=indptr,
        succ_indices=dst,
    )


def build_ts(net: Network, cap: int = DEFAULT_TRANSITION_CAP) -> TransitionSystem:
    """Transition system of an urgency-rewritten network."""
    if not net.transformed:
        raise NetworkError("build_ts expects an urgency-rewritten network")
    return _build(net, split=True, cap=cap)


def build_ts_urgent(
    net: Network, cap: int = DEFAULT_TRANSITION_CAP
) -> TransitionSystem:
    """Reference semantics: urgent synchronisation, no location splitting."""
    if net.transformed:
        raise NetworkError("build_ts_urgent expects an untransformed network")
    return _build(net, split=False, cap=cap)
