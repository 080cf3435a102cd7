"""CTL over explicit transition systems, by fixpoint computation.

EX and E[.U.] are least fixpoints, EG a greatest fixpoint; AX/AF/AG/EF
are rewritten into those.  All paths are infinite (terminal states carry
self-loops), so no totality side conditions are needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .semantics import TransitionSystem


class FormulaError(Exception):
    pass


@dataclass(frozen=True)
class Formula:
    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True)
class Bool(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE = Bool(True)
FALSE = Bool(False)


@dataclass(frozen=True)
class Atom(Formula):
    aut: str
    loc: str

    def __str__(self):
        return f"at({self.aut},{self.loc})"


@dataclass(frozen=True)
class Not(Formula):
    f: Formula

    def __str__(self):
        return f"!{_paren(self.f)}"


@dataclass(frozen=True)
class And(Formula):
    f: Formula
    g: Formula

    def __str__(self):
        return f"({self.f} & {self.g})"


@dataclass(frozen=True)
class Or(Formula):
    f: Formula
    g: Formula

    def __str__(self):
        return f"({self.f} | {self.g})"


@dataclass(frozen=True)
class Unary(Formula):
    f: Formula

    def __str__(self):
        return f"{type(self).__name__} {_paren(self.f)}"


class EX(Unary):
    pass


class EF(Unary):
    pass


class EG(Unary):
    pass


class AX(Unary):
    pass


class AF(Unary):
    pass


class AG(Unary):
    pass


@dataclass(frozen=True)
class Binary(Formula):
    f: Formula
    g: Formula

    def __str__(self):
        return f"{type(self).__name__[0]}[{self.f} U {self.g}]"


class EU(Binary):
    pass


class AU(Binary):
    pass


def _paren(f: Formula) -> str:
    s = str(f)
    return s if isinstance(f, (Atom, Bool, Not)) else f"({s})"


@njit(cache=True)
def _eu_kernel(pred_indptr, pred_indices, f_mask, g_mask):  # pragma: no cover
    n = len(f_mask)
    result = g_mask.copy()
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for s in range(n):
        if result[s]:
            stack[top] = s
            top += 1
    while top > 0:
        top -= 1
        s = stack[top]
        for k in range(pred_indptr[s], pred_indptr[s + 1]):
            p = pred_indices[k]
            if f_mask[p] and not result[p]:
                result[p] = True
                stack[top] = p
                top += 1
    return result


@njit(cache=True)
def _eg_kernel(succ_indptr, succ_indices, pred_indptr, pred_indices, f_mask):  # pragma: no cover
    n = len(f_mask)
    result = f_mask.copy()
    count = np.zeros(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for s in range(n):
        if result[s]:
            c = 0
            for k in range(succ_indptr[s], succ_indptr[s + 1]):
                if f_mask[succ_indices[k]]:
                    c += 1
            count[s] = c
            if c == 0:
                stack[top] = s
                top += 1
    while top > 0:
        top -= 1
        s = stack[top]
        result[s] = False
        for k in range(pred_indptr[s], pred_indptr[s + 1]):
            p = pred_indices[k]
            if result[p]:
                count[p] -= 1
                if count[p] == 0:
                    stack[top] = p
                    top += 1
    return result


def _ex_mask(ts: TransitionSystem, f: np.ndarray) -> np.ndarray:
    indptr, indices = ts.succ_indptr, ts.succ_indices
    vals = f[indices].astype(np.int8)
    out = np.zeros(ts.n_states, dtype=bool)
    starts = indptr[:-1]
    nonempty = starts < indptr[1:]
    if nonempty.any():
        out[nonempty] = np.bitwise_or.reduceat(vals, starts[nonempty]) > 0
    return out


def eval_mask(ts: TransitionSystem, f: Formula, _memo: dict | None = None) -> np.ndarray:
    """Boolean satisfaction mask of f over all states of ts."""
    memo = _memo if _memo is not None else {}
    hit = memo.get(f)
    if hit is not None:
        return hit

    def rec(g: Formula) -> np.ndarray:
        return eval_mask(ts, g, memo)

    if isinstance(f, Bool):
        out = np.full(ts.n_states, f.value, dtype=bool)
    elif isinstance(f, Atom):
        try:
            out = ts.atom_mask(f.aut, f.loc)
        except KeyError as exc:
            raise FormulaError(str(exc)) from None
    elif isinstance(f, Not):
        out = ~rec(f.f)
    elif isinstance(f, And):
        out = rec(f.f) & rec(f.g)
    elif isinstance(f, Or):
        out = rec(f.f) | rec(f.g)
    elif isinstance(f, EX):
        out = _ex_mask(ts, rec(f.f))
    elif isinstance(f, AX):
        out = ~_ex_mask(ts, ~rec(f.f))
    elif isinstance(f, EF):
        out = rec(EU(TRUE, f.f))
    elif isinstance(f, AF):
        out = rec(AU(TRUE, f.f))
    elif isinstance(f, AG):
        out = ~rec(EU(TRUE, Not(f.f)))
    elif isinstance(f, EG):
        pp, pi = ts.predecessors_csr()
        out = _eg_kernel(ts.succ_indptr, ts.succ_indices, pp, pi, rec(f.f))
    elif isinstance(f, EU):
        pp, pi = ts.predecessors_csr()
        out = _eu_kernel(pp, pi, rec(f.f), rec(f.g))
    elif isinstance(f, AU):
        # A[f U g] == !(E[!g U (!f & !g)] | EG !g)
        not_g = ~rec(f.g)
        trap = not_g & ~rec(f.f)
        pp, pi = ts.predecessors_csr()
        eu = _eu_kernel(pp, pi, not_g, trap)
        eg = _eg_kernel(ts.succ_indptr, ts.succ_indices, pp, pi, not_g)
        out = ~(eu | eg)
    else:
        raise FormulaError(f"unsupported formula node {type(f).__name__}")
    memo[f] = out
    return out


def eval_states(ts: TransitionSystem, f: Formula) -> set[int]:
    """Exact satisfaction set, as state indices."""
    return set(np.flatnonzero(eval_mask(ts, f)).tolist())


def holds_initially(ts: TransitionSystem, f: Formula) -> bool:
    return bool(eval_mask(ts, f)[ts.initial])


@dataclass
class Witness:
    """Finite evidence for EF EG h / EF AG h: a stem, plus a lasso cycle
    staying inside h for the EG form."""

    stem: list[int]
    cycle: list[int] | None


def witness(ts: TransitionSystem, f: Formula) -> Witness | None:
    if not isinstance(f, EF) or not isinstance(f.f, (EG, AG)):
        raise FormulaError("witness supports only EF EG h / EF AG h formulas")
    memo: dict = {}
    if not bool(eval_mask(ts, f, memo)[ts.initial]):
        return None
    goal = eval_mask(ts, f.f, memo)
    stem = _shortest_path(ts, ts.initial, goal)
    if isinstance(f.f, AG):
        return Witness(stem=stem, cycle=None)
    # Lasso within EG h: every EG-state has a successor in the EG set.
    h_mask = eval_mask(ts, f.f.f, memo)
    eg_mask = goal
    seen_at = {}
    path = [stem[-1]]
    seen_at[stem[-1]] = 0
    while True:
        cur = path[-1]
        nxt = None
        for t in ts.successors(cur):
            if eg_mask[t] and h_mask[t]:
                nxt = int(t)
                break
        assert nxt is not None, "EG fixpoint guarantees a successor in the set"
        if nxt in seen_at:
            cycle = path[seen_at[nxt] :]
            return Witness(stem=stem + path[1:], cycle=cycle + [nxt])
        seen_at[nxt] = len(path)
        path.append(nxt)


def _shortest_path(ts: TransitionSystem, start: int, goal_mask: np.ndarray) -> list[int]:
    from collections import deque

    parent = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if goal_mask[s]:
            path = []
            cur: int | None = s
            while cur is not None:
                path.append(cur)
                cur = parent[cur]
            return path[::-1]
        for t in ts.successors(s):
            t = int(t)
            if t not in parent:
                parent[t] = s
                queue.append(t)
    raise AssertionError("goal set unreachable despite positive verdict")


# ----- surface syntax -----

_WORD_OPS = {
    "EX": EX,
    "EF": EF,
    "EG": EG,
    "AX": AX,
    "AF": AF,
    "AG": AG,
}


def parse_formula(text: str) -> Formula:
    """Parse the CLI formula syntax, e.g. ``EF EG at(B,s1')``.

    Negation: ``!``, ``not``, ``¬``; conjunction: ``&``, ``and``, ``∧``;
    disjunction: ``|``, ``or``, ``∨``; until: ``E[f U g]``, ``A[f U g]``.
    """
    tokens = _tokenize_formula(text)
    pos = [0]

    def peek() -> str:
        return tokens[pos[0]] if pos[0] < len(tokens) else ""

    def advance() -> str:
        tok = peek()
        pos[0] += 1
        return tok

    def expect(tok: str) -> None:
        got = advance()
        if got != tok:
            raise FormulaError(f"expected {tok!r}, got {got or 'end of input'!r}")

    def formula() -> Formula:
        f = conjunct()
        while peek() in ("|", "or"):
            advance()
            f = Or(f, conjunct())
        return f

    def conjunct() -> Formula:
        f = unary()
        while peek() in ("&", "and"):
            advance()
            f = And(f, unary())
        return f

    def unary() -> Formula:
        tok = peek()
        if tok in ("!", "not"):
            advance()
            return Not(unary())
        if tok in _WORD_OPS:
            advance()
            return _WORD_OPS[tok](unary())
        if tok in ("E", "A"):
            advance()
            expect("[")
            f = formula()
            expect("U")
            g = formula()
            expect("]")
            return EU(f, g) if tok == "E" else AU(f, g)
        if tok == "(":
            advance()
            f = formula()
            expect(")")
            return f
        if tok == "true":
            advance()
            return TRUE
        if tok == "false":
            advance()
            return FALSE
        if tok == "at":
            advance()
            expect("(")
            aut = advance()
            expect(",")
            loc = advance()
            expect(")")
            if not aut or not loc:
                raise FormulaError("malformed atom")
            return Atom(aut, loc)
        raise FormulaError(f"unexpected token {tok or 'end of input'!r}")

    f = formula()
    if pos[0] != len(tokens):
        raise FormulaError(f"trailing input from {tokens[pos[0]]!r}")
    return f


def _tokenize_formula(text: str) -> list[str]:
    text = text.replace("¬", "!").replace("∧", "&").replace("∨", "|")
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()[],&|!":
            tokens.append(ch)
            i += 1
        elif ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise FormulaError(f"unexpected character {ch!r} in formula")
    return tokens
