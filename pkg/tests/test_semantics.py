import numpy as np
import pytest

from mirela import (
    build_ts,
    build_ts_urgent,
    clock_ceiling,
    constants_gcd,
    demux_channels,
    elaborate,
    emulate_urgency,
    parse,
    resolve_targets,
    scale_constants,
)
from mirela.semantics import AnalysisLimitError
from mirela.tast import NetworkError

from conftest import SPEC_DIR


def _network(text):
    return elaborate(resolve_targets(parse(text)))


def _transformed(text):
    return emulate_urgency(demux_channels(_network(text)))


SMALL = "A = Periodic(1,2)[1,2] -> (F); F = First(A[1,1])."


def test_clock_ceiling_is_one_above_largest_constant():
    net = _network((SPEC_DIR / "ex1.mirela").read_text())
    assert clock_ceiling(net.automaton("S1")) == 101
    assert clock_ceiling(net.automaton("S2")) == 401
    assert clock_ceiling(net.automaton("M")) == 1  # no constants


def test_constants_gcd_and_scaling():
    net = _transformed((SPEC_DIR / "ex1.mirela").read_text())
    assert constants_gcd(net) == 25
    scaled = scale_constants(net, 25)
    assert max(scaled.constants()) == 16  # 400 / 25
    assert constants_gcd(scaled) == 1
    with pytest.raises(NetworkError):
        scale_constants(net, 7)
    with pytest.raises(ValueError):
        scale_constants(net, 0)


def test_build_requires_matching_transform_state():
    net = _network(SMALL)
    demuxed = demux_channels(net)
    with pytest.raises(NetworkError):
        build_ts(demuxed)  # not transformed
    with pytest.raises(NetworkError):
        build_ts_urgent(emulate_urgency(demuxed))  # already transformed


def test_every_state_has_a_successor():
    ts = build_ts(_transformed(SMALL))
    assert (np.diff(ts.succ_indptr) >= 1).all()


def test_determinism():
    net = _transformed(SMALL)
    a, b = build_ts(net), build_ts(net)
    assert np.array_equal(a.locs, b.locs)
    assert np.array_equal(a.clocks_x, b.clocks_x)
    assert np.array_equal(a.clocks_u, b.clocks_u)
    assert np.array_equal(a.succ_indptr, b.succ_indptr)
    assert np.array_equal(a.succ_indices, b.succ_indices)


def test_tick_monotone_and_clamped():
    net = _transformed(SMALL)
    ts = build_ts(net)
    ceilings = np.array([clock_ceiling(a) for a in net.automata])
    for s in range(ts.n_states):
        for t in ts.successors(s):
            is_tick = (ts.locs[s] == ts.locs[t]).all() and (
                ts.clocks_x[t] >= ts.clocks_x[s]
            ).all() and (ts.clocks_x[t] != ts.clocks_x[s]).any()
            if is_tick:
                grew = ts.clocks_x[t] == ts.clocks_x[s] + 1
                capped = ts.clocks_x[s] == ceilings
                assert (grew | capped).all()
    assert (ts.clocks_x <= ceilings).all()


def test_no_tick_while_an_urgent_wait_is_occupied():
    net = _transformed(SMALL)
    ts = build_ts(net)
    urgent = [
        {k for k, lid in enumerate(a.location_ids()) if a.location(lid).urgent}
        for a in net.automata
    ]
    ceilings = np.array([clock_ceiling(a) for a in net.automata])
    for s in range(ts.n_states):
        occupied = any(int(ts.locs[s, i]) in urgent[i] for i in range(len(net.automata)))
        if not occupied:
            continue
        succs = list(ts.successors(s))
        if succs == [s]:
            continue  # terminal self-loop, not a time step
        tick_x = np.minimum(ts.clocks_x[s] + 1, ceilings)
        tick_u = np.minimum(ts.clocks_u[s] + 1, 1)
        for t in succs:
            is_tick = (
                (ts.locs[t] == ts.locs[s]).all()
                and (ts.clocks_x[t] == tick_x).all()
                and (ts.clocks_u[t] == tick_u).all()
            )
            assert not is_tick


def test_invariants_hold_in_every_reachable_state():
    net = _transformed(SMALL)
    ts = build_ts(net)
    for i, a in enumerate(net.automata):
        for k, lid in enumerate(a.location_ids()):
            inv = a.location(lid).inv
            if inv is None:
                continue
            here = ts.locs[:, i] == k
            assert (ts.clocks_x[here, i] <= inv).all()


def test_urgent_native_oracle_agrees_on_locations():
    demuxed = demux_channels(_network(SMALL))
    ts_t = build_ts(emulate_urgency(demuxed))
    ts_u = build_ts_urgent(demuxed)

    def locations(ts, merge):
        out = {}
        for i, aid in enumerate(ts.aut_ids):
            names = ts.loc_names[i]
            seen = set()
            for k in np.unique(ts.locs[:, i]):
                name = names[k]
                if merge and name.endswith("'"):
                    name = name[:-1]
                seen.add(name)
            out[aid] = seen
        return out

    assert locations(ts_t, merge=True) == locations(ts_u, merge=False)


def test_transition_cap():
    with pytest.raises(AnalysisLimitError):
        build_ts(_transformed(SMALL), cap=10)


def test_exports_are_consistent():
    ts = build_ts(_transformed(SMALL))
    adj = ts.export_adjacency().strip().splitlines()
    assert len(adj) == ts.n_transitions
    table = ts.export_state_table().strip().splitlines()
    assert len(table) == ts.n_states + 1  # header line
    assert table[1].startswith("0: ")
