import pytest

from mirela import demux_channels, elaborate, emulate_urgency, parse, resolve_targets
from mirela.tast import (
    RECEIVE,
    SEND,
    WAIT,
    Channel,
    Edge,
    Location,
    Network,
    NetworkError,
    TastAutomaton,
)
from mirela.transform import primed_name

from conftest import SPEC_DIR


@pytest.fixture(scope="module")
def ex1_demuxed():
    spec = resolve_targets(parse((SPEC_DIR / "ex1.mirela").read_text()))
    return demux_channels(elaborate(spec))


@pytest.fixture(scope="module")
def ex1_transformed(ex1_demuxed):
    return emulate_urgency(ex1_demuxed)


def test_demux_channel_inventory(ex1_demuxed):
    names = sorted(c.name for c in ex1_demuxed.channels())
    assert names == [
        "k_{F2-B}",
        "k_{S1-F1}",
        "k_{S2-F1}",
        "k_{S2-F2}",
        "k_{S3-B}",
        "k_{S3-F2}",
        "lock_{B-M}",
        "lock_{F1-M}",
        "lock_{R-M}",
        "unlock_{B-M}",
        "unlock_{F1-M}",
        "unlock_{R-M}",
    ]


def test_demux_is_binary(ex1_demuxed):
    for chan in ex1_demuxed.channels():
        sends, recvs = ex1_demuxed.channel_edges(chan)
        assert len({aid for aid, _ in sends}) == 1
        assert len({aid for aid, _ in recvs}) == 1


def test_memory_expanded_per_client(ex1_demuxed):
    m = ex1_demuxed.automaton("M")
    # one held location per client, in declaration (network) order
    assert m.location_ids() == ("s0", "s1_F1", "s1_B", "s1_R")
    locks = [e for e in m.edges if e.channel.kind == "lock"]
    unlocks = [e for e in m.edges if e.channel.kind == "unlock"]
    assert [(e.src, e.dst, e.channel.src) for e in locks] == [
        ("s0", "s1_F1", "F1"),
        ("s0", "s1_B", "B"),
        ("s0", "s1_R", "R"),
    ]
    assert all(e.dst == "s0" for e in unlocks)
    assert all(e.direction == RECEIVE for e in locks + unlocks)


def test_urgency_splits_every_wait(ex1_transformed):
    for a in ex1_transformed.automata:
        primed = dict(a.primed)
        originals = [l for l in a.locations if l.id in primed]
        for loc in originals:
            assert loc.urgent
            copy = a.location(primed[loc.id])
            assert not copy.urgent and copy.kind == WAIT and copy.inv is None
            # the copy repeats exactly the original's communication edges
            orig_comm = {
                (e.dst, e.channel, e.direction) for e in a.out_edges(loc.id) if e.channel
            }
            copy_comm = {
                (e.dst, e.channel, e.direction) for e in a.out_edges(copy.id)
            }
            assert copy_comm == orig_comm
            # exactly one escape, into the copy
            escapes = [e for e in a.out_edges(loc.id) if e.is_escape]
            assert [e.dst for e in escapes] == [copy.id]


def test_escape_covers_all_peer_offer_locations(ex1_transformed):
    """A channel offered by its peer from two locations blocks the
    escape at both of them (and their copies)."""
    s3 = ex1_transformed.automaton("S3")
    (escape,) = [e for e in s3.out_edges("s3") if e.is_escape]
    assert set(escape.blocked_by) == {
        ("B", "s0"),
        ("B", "s0'"),
        ("B", "s1"),
        ("B", "s1'"),
    }


def test_u_reset_on_edges_into_urgent_waits(ex1_transformed):
    for a in ex1_transformed.automata:
        urgent = {l.id for l in a.locations if l.urgent}
        for e in a.edges:
            if e.dst in urgent:
                assert e.reset_u, f"{a.id}: {e.src}->{e.dst} missing u reset"
            else:
                assert not e.reset_u


def test_three_party_construction():
    """One sender, one receiver, one bystander: the sender's escape is
    guarded by the receiver's locations only."""
    k = Channel("data", "S", "R")
    sender = TastAutomaton(
        "S",
        locations=(Location("s0", WAIT),),
        edges=(Edge("s0", "s0", channel=k, direction=SEND),),
        initial="s0",
    )
    receiver = TastAutomaton(
        "R",
        locations=(Location("r0", WAIT),),
        edges=(Edge("r0", "r0", channel=k, direction=RECEIVE),),
        initial="r0",
    )
    bystander = TastAutomaton(
        "N",
        locations=(Location("n0", WAIT), Location("n1", WAIT)),
        edges=(
            Edge("n0", "n1", channel=Channel("data", "N", "N2"), direction=SEND),
            Edge("n1", "n0", channel=Channel("data", "N2", "N"), direction=RECEIVE),
        ),
        initial="n0",
    )
    peer = TastAutomaton(
        "N2",
        locations=(Location("p0", WAIT), Location("p1", WAIT)),
        edges=(
            Edge("p0", "p1", channel=Channel("data", "N", "N2"), direction=RECEIVE),
            Edge("p1", "p0", channel=Channel("data", "N2", "N"), direction=SEND),
        ),
        initial="p0",
    )
    net = emulate_urgency(
        Network((sender, receiver, bystander, peer), demuxed=True)
    )
    s = net.automaton("S")
    (escape,) = [e for e in s.out_edges("s0") if e.is_escape]
    assert set(escape.blocked_by) == {("R", "r0"), ("R", primed_name("r0"))}


def test_urgency_requires_demux():
    spec = resolve_targets(parse((SPEC_DIR / "ex1.mirela").read_text()))
    with pytest.raises(NetworkError):
        emulate_urgency(elaborate(spec))


def test_transforms_are_idempotent(ex1_demuxed, ex1_transformed):
    assert demux_channels(ex1_demuxed) is ex1_demuxed
    assert emulate_urgency(ex1_transformed) is ex1_transformed
