"""Randomized inputs shared by the test modules.

Provides random explicit transition systems, random CTL formulas, and
random well-formed component specifications.
"""

from __future__ import annotations

import random

import numpy as np

from mirela.ctl import (
    AF, AG, AU, AX, EF, EG, EU, EX, FALSE, TRUE, And, Atom, Formula, Not, Or,
)
from mirela.semantics import TransitionSystem

LOC_NAMES = ("L0", "L1", "L2")


def random_ts(rng: random.Random, n_states: int) -> TransitionSystem:
    """A random total transition system over one three-location automaton."""
    locs = np.array([[rng.randrange(len(LOC_NAMES))] for _ in range(n_states)], dtype=np.int16)
    indptr = [0]
    indices: list[int] = []
    for s in range(n_states):
        degree = rng.randrange(0, min(n_states, 3) + 1)
        succs = sorted(rng.sample(range(n_states), degree)) if degree else [s]
        indices.extend(succs)
        indptr.append(len(indices))
    return TransitionSystem(
        aut_ids=("A",),
        loc_names=(LOC_NAMES,),
        locs=locs,
        clocks_x=np.zeros((n_states, 1), dtype=np.int16),
        clocks_u=None,
        succ_indptr=np.array(indptr, dtype=np.int64),
        succ_indices=np.array(indices, dtype=np.int32),
    )


_LEAVES = tuple(Atom("A", name) for name in LOC_NAMES) + (TRUE, FALSE)


def random_formula(rng: random.Random, depth: int) -> Formula:
    if depth <= 0:
        return rng.choice(_LEAVES)
    f = random_formula(rng, depth - 1)
    g = random_formula(rng, depth - 1)
    builders = (
        lambda: Not(f),
        lambda: And(f, g),
        lambda: Or(f, g),
        lambda: EX(f),
        lambda: AX(f),
        lambda: EF(f),
        lambda: AF(f),
        lambda: EG(f),
        lambda: AG(f),
        lambda: EU(f, g),
        lambda: AU(f, g),
    )
    return rng.choice(builders)()


def random_spec(rng: random.Random) -> str:
    """Source text of a random well-formed specification.

    Layered: sensors first, then processing units drawing on earlier
    components, then an optional memory with a rendering loop.  All
    minimum durations are positive, so the result elaborates to a
    structurally Zeno-free network.
    """

    def interval() -> str:
        lo = rng.randrange(1, 6) * 5
        return f"[{lo},{lo + rng.randrange(1, 4) * 5}]"

    def pair() -> str:
        lo = rng.randrange(1, 6) * 5
        return f"({lo},{lo + rng.randrange(1, 4) * 5})"

    decls: list[str] = []
    sensors = []
    for k in range(rng.randrange(1, 4)):
        sid = f"S{k + 1}"
        sensors.append(sid)
        if rng.random() < 0.25:
            decls.append(f"{sid} = Aperiodic({rng.randrange(1, 5) * 5})")
        else:
            decls.append(f"{sid} = Periodic{pair()}{interval()}")

    units: list[str] = []
    pool = list(sensors)
    for k in range(rng.randrange(1, 4)):
        uid = f"U{k + 1}"
        kind = rng.choice(("First", "Both", "Priority"))
        if kind == "First":
            srcs = rng.sample(pool, rng.randrange(1, min(3, len(pool)) + 1))
            # at least one source must carry an interval
            refs = [s + (interval() if rng.random() < 0.6 else "") for s in srcs]
            if not any("[" in r for r in refs):
                refs[-1] += interval()
            decls.append(f"{uid} = First({','.join(refs)})")
        elif kind == "Both" and len(pool) >= 2:
            a, b = rng.sample(pool, 2)
            decls.append(f"{uid} = Both({a},{b}){interval()}")
        else:
            if len(pool) < 2:
                decls.append(f"{uid} = First({pool[0]}{interval()})")
            else:
                a, b = rng.sample(pool, 2)
                decls.append(f"{uid} = Priority({a}{interval()},{b}{interval()})")
        units.append(uid)
        pool.append(uid)

    if rng.random() < 0.7:
        clients = rng.sample(units, rng.randrange(1, len(units) + 1))
        refs = [c + interval() for c in clients]
        decls.append(f"M = Memory({','.join(refs)})")
        decls.append(f"R = Rendering{pair()}(M{interval()})")

    name = f"Rand{rng.randrange(1000)}"
    return f"{name}:\n  " + ";\n  ".join(decls) + ".\n"
