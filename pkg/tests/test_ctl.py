import random

import numpy as np
import pytest

from mirela.ctl import (
    AF, AG, AU, AX, EF, EG, EU, EX, FALSE, TRUE,
    And, Atom, FormulaError, Not, Or,
    eval_mask, eval_states, holds_initially, parse_formula, witness,
)
from mirela.semantics import TransitionSystem

from generators import random_formula, random_ts


def chain_ts():
    """0 -> 1 -> 2, with a self-loop on 2.  Locations L0, L1, L2."""
    return TransitionSystem(
        aut_ids=("A",),
        loc_names=(("L0", "L1", "L2"),),
        locs=np.array([[0], [1], [2]], dtype=np.int16),
        clocks_x=np.zeros((3, 1), dtype=np.int16),
        clocks_u=None,
        succ_indptr=np.array([0, 1, 2, 3], dtype=np.int64),
        succ_indices=np.array([1, 2, 2], dtype=np.int32),
    )


L0, L1, L2 = (Atom("A", f"L{i}") for i in range(3))


def test_atoms_and_boolean_connectives():
    ts = chain_ts()
    assert eval_states(ts, L1) == {1}
    assert eval_states(ts, Not(L1)) == {0, 2}
    assert eval_states(ts, Or(L0, L2)) == {0, 2}
    assert eval_states(ts, And(L0, L2)) == set()
    assert eval_states(ts, TRUE) == {0, 1, 2}
    assert eval_states(ts, FALSE) == set()


def test_temporal_operators_on_chain():
    ts = chain_ts()
    assert eval_states(ts, EX(L1)) == {0}
    assert eval_states(ts, AX(L2)) == {1, 2}
    assert eval_states(ts, EF(L2)) == {0, 1, 2}
    assert eval_states(ts, AF(L2)) == {0, 1, 2}
    assert eval_states(ts, EG(L2)) == {2}
    assert eval_states(ts, AG(L2)) == {2}
    assert eval_states(ts, EG(Not(L1))) == {2}
    assert eval_states(ts, EU(Not(L1), L2)) == {2}
    assert eval_states(ts, AU(Or(L0, L1), L2)) == {0, 1, 2}
    assert holds_initially(ts, EF(EG(L2)))
    assert not holds_initially(ts, EG(L0))


def test_eg_true_is_everything():
    rng = random.Random(3)
    ts = random_ts(rng, 40)
    assert eval_states(ts, EG(TRUE)) == set(range(40))
    assert eval_states(ts, AG(TRUE)) == set(range(40))
    assert eval_states(ts, EF(FALSE)) == set()


def test_against_brute_force_oracle():
    from oracle import brute_eval

    rng = random.Random(20260823)
    for _ in range(150):
        ts = random_ts(rng, rng.randrange(2, 12))
        f = random_formula(rng, rng.randrange(1, 5))
        assert eval_states(ts, f) == brute_eval(ts, f), str(f)


def test_dualities_hold_on_random_systems():
    rng = random.Random(17)
    for _ in range(30):
        ts = random_ts(rng, rng.randrange(2, 30))
        f = random_formula(rng, 2)
        lhs = eval_mask(ts, AG(f))
        rhs = ~eval_mask(ts, EF(Not(f)))
        assert (lhs == rhs).all()
        lhs = eval_mask(ts, AF(f))
        rhs = ~eval_mask(ts, EG(Not(f)))
        assert (lhs == rhs).all()
        lhs = eval_mask(ts, AX(f))
        rhs = ~eval_mask(ts, EX(Not(f)))
        assert (lhs == rhs).all()


def test_unknown_atom_raises():
    with pytest.raises(FormulaError):
        eval_mask(chain_ts(), Atom("A", "nope"))
    with pytest.raises(FormulaError):
        eval_mask(chain_ts(), Atom("B", "L0"))


def test_witness_lasso_stays_in_the_set():
    rng = random.Random(5)
    found = 0
    for _ in range(80):
        ts = random_ts(rng, rng.randrange(3, 25))
        f = EF(EG(random_formula(rng, 1)))
        w = witness(ts, f)
        if w is None:
            assert not holds_initially(ts, f)
            continue
        found += 1
        assert w.stem[0] == ts.initial
        h = eval_mask(ts, f.f.f)
        assert all(h[s] for s in w.cycle)
        assert w.cycle[0] == w.cycle[-1]
        for a, b in zip(w.cycle, w.cycle[1:]):
            assert b in ts.successors(a)
    assert found > 10


def test_parse_formula_roundtrip():
    cases = {
        "EF EG at(B,s1')": EF(EG(Atom("B", "s1'"))),
        "!at(A,L0) & at(A,L1)": And(Not(Atom("A", "L0")), Atom("A", "L1")),
        "not at(A,L0) or false": Or(Not(Atom("A", "L0")), FALSE),
        "E[true U at(M,s0)]": EU(TRUE, Atom("M", "s0")),
        "A[at(A,L0) U at(A,L1)]": AU(Atom("A", "L0"), Atom("A", "L1")),
        "EF EG (at(B,s1') ∧ EF ¬at(B,s1'))": EF(
            EG(And(Atom("B", "s1'"), EF(Not(Atom("B", "s1'")))))
        ),
        "AG (at(A,L0) | at(A,L1))": AG(Or(Atom("A", "L0"), Atom("A", "L1"))),
    }
    for text, expected in cases.items():
        assert parse_formula(text) == expected


@pytest.mark.parametrize("text", ["", "EF", "at(A)", "E[f U", "at(A,L0) &", "EG EG"])
def test_parse_formula_rejects(text):
    with pytest.raises(FormulaError):
        parse_formula(text)
