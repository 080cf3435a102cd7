"""Network rewrites for binary-channel, urgency-free semantics.

``demux_channels`` splits each memory's shared lock/unlock channels into
one pair per client, expanding the memory cycle into per-client
branches so an unlock always returns to the client that locked.

``emulate_urgency`` removes the urgent-synchronisation assumption: each
wait location w gets the invariant u<=0 (time cannot pass at w), plus an
escape edge to a fresh copy w' guarded by "no peer is ready to
synchronise"; w' repeats w's communication edges and may dwell.
"""

from __future__ import annotations

from dataclasses import replace

from .tast import (
    RECEIVE,
    SEND,
    WAIT,
    Channel,
    Edge,
    Location,
    Network,
    NetworkError,
    TastAutomaton,
    validate_structure,
)


def demux_channels(net: Network) -> Network:
    if net.demuxed:
        return net
    lock_clients: dict[str, list[str]] = {}
    for a in net.automata:
        for e in a.edges:
            if (
                e.channel is not None
                and e.channel.kind == "lock"
                and e.direction == SEND
            ):
                lock_clients.setdefault(e.channel.dst, []).append(a.id)

    automata = []
    for a in net.automata:
        if _is_memory(a):
            automata.append(_demux_memory(a, lock_clients.get(a.id, [])))
        else:
            automata.append(_rename_client_channels(a))
    out = Network(tuple(automata), demuxed=True)
    validate_structure(out)
    for chan in out.channels():
        sends, recvs = out.channel_edges(chan)
        send_auts = {aid for aid, _ in sends}
        recv_auts = {aid for aid, _ in recvs}
        if len(send_auts) != 1 or len(recv_auts) != 1:
            raise NetworkError(
                f"channel {chan.name} is not binary after demultiplexing"
            )
    return out


def _is_memory(a: TastAutomaton) -> bool:
    return any(
        e.channel is not None
        and e.channel.kind == "lock"
        and e.direction == RECEIVE
        and e.channel.dst == a.id
        for e in a.edges
    )


def _demux_memory(a: TastAutomaton, clients: list[str]) -> TastAutomaton:
    free = a.initial
    locations = [Location(free, WAIT)]
    edges = []
    for cid in clients:
        held = f"s1_{cid}"
        locations.append(Location(held, WAIT))
        edges.append(
            Edge(src=free, dst=held, channel=Channel("lock", cid, a.id), direction=RECEIVE)
        )
        edges.append(
            Edge(src=held, dst=free, channel=Channel("unlock", cid, a.id), direction=RECEIVE)
        )
    return replace(a, locations=tuple(locations), edges=tuple(edges))


def _rename_client_channels(a: TastAutomaton) -> TastAutomaton:
    edges = []
    for e in a.edges:
        if (
            e.channel is not None
            and e.channel.kind in ("lock", "unlock")
            and e.channel.src is None
        ):
            edges.append(replace(e, channel=replace(e.channel, src=a.id)))
        else:
            edges.append(e)
    return replace(a, edges=tuple(edges))


def primed_name(loc: str) -> str:
    return loc + "'"


def emulate_urgency(net: Network) -> Network:
    """Apply the wait-location splitting construction to a demuxed network."""
    if not net.demuxed:
        raise NetworkError("network must be demultiplexed before emulating urgency")
    if net.transformed:
        return net

    # Source locations offering each channel, across the whole network.
    chan_locs: dict[Channel, list[tuple[str, str]]] = {}
    for a in net.automata:
        for e in a.edges:
            if e.channel is not None:
                entry = (a.id, e.src)
                if entry not in chan_locs.setdefault(e.channel, []):
                    chan_locs[e.channel].append(entry)

    automata = []
    for a in net.automata:
        waits = [loc.id for loc in a.wait_locations()]
        primed = {w: primed_name(w) for w in waits}
        locations = [
            replace(loc, urgent=True) if loc.kind == WAIT else loc
            for loc in a.locations
        ]
        locations += [Location(primed[w], WAIT) for w in waits]
        urgent_ids = set(waits)

        def with_u_reset(e: Edge) -> Edge:
            return replace(e, reset_u=True) if e.dst in urgent_ids else e

        edges = [with_u_reset(e) for e in a.edges]
        for w in waits:
            comm = [e for e in a.edges if e.src == w and e.channel is not None]
            atoms: list[tuple[str, str]] = []
            for e in comm:
                for aid, lid in chan_locs[e.channel]:
                    if aid == a.id:
                        continue
                    for atom in ((aid, lid), (aid, primed_name(lid))):
                        if atom not in atoms:
                            atoms.append(atom)
            edges.append(Edge(src=w, dst=primed[w], blocked_by=tuple(atoms)))
            for e in comm:
                edges.append(with_u_reset(replace(e, src=primed[w])))

        automata.append(
            replace(
                a,
                locations=tuple(locations),
                edges=tuple(edges),
                primed=tuple(sorted(primed.items())),
            )
        )
    out = Network(tuple(automata), demuxed=True, transformed=True)
    validate_structure(out)
    return out
