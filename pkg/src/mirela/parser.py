"""Recursive-descent parser for the MIRELA surface syntax.

Grammar (free-form whitespace, ``//`` line comments)::

    spec     := [ ident ':' ] decl ( ';' decl )* '.'
    decl     := ident '=' comp [ ('->' | '→') '(' ident (',' ident)* ')' ]
    comp     := 'Periodic'  '(' num ',' num ')' '[' num ',' num ']'
              | 'Aperiodic' '(' num ')'
              | 'First'     '(' slist ')'
              | 'Both'      '(' ident ',' ident ')' '[' num ',' num ']'
              | 'Priority'  '(' sitem ',' sitem ')'      (intervals required)
              | 'Memory'    '(' slist ')'
              | 'Rendering' '(' num ',' num ')' '(' sitem ')'
    slist    := sitem (',' sitem)*
    sitem    := ident [ '[' num ',' num ']' ]
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import ComponentDecl, Interval, Kind, SourceRef, SpecAst, SpecError

_PUNCT = {"(", ")", "[", "]", ",", ";", ".", "=", ":"}


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident' | 'num' | 'punct' | 'arrow' | 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch == "-" and text.startswith("->", i):
            tokens.append(Token("arrow", "->", line, start_col))
            i += 2
            col += 2
            continue
        if ch == "→":  # →
            tokens.append(Token("arrow", "->", line, start_col))
            i += 1
            col += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token("punct", ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("num", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("ident", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        raise SpecError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> SpecError:
        tok = tok or self.peek()
        return SpecError(message, tok.line, tok.column)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            got = tok.text or "end of input"
            raise self.error(f"expected {want!r}, got {got!r}")
        return self.advance()

    def expect_punct(self, text: str) -> Token:
        return self.expect("punct", text)

    def ident(self) -> str:
        return self.expect("ident").text

    def number(self) -> int:
        return int(self.expect("num").text)

    # ----- grammar -----

    def spec(self) -> SpecAst:
        name = "spec"
        if (
            self.peek().kind == "ident"
            and self.peek(1).kind == "punct"
            and self.peek(1).text == ":"
        ):
            name = self.advance().text
            self.advance()
        decls = [self.decl()]
        while self.peek().kind == "punct" and self.peek().text == ";":
            self.advance()
            decls.append(self.decl())
        self.expect_punct(".")
        if self.peek().kind != "eof":
            raise self.error("trailing input after final '.'")
        seen: dict[str, ComponentDecl] = {}
        for d in decls:
            if d.id in seen:
                raise SpecError(f"duplicate component id {d.id!r}")
            seen[d.id] = d
        return SpecAst(name=name, components=tuple(decls))

    def decl(self) -> ComponentDecl:
        tok = self.peek()
        cid = self.ident()
        self.expect_punct("=")
        decl = self.comp(cid, tok)
        targets: tuple[str, ...] = ()
        if self.peek().kind == "arrow":
            self.advance()
            self.expect_punct("(")
            tgt = [self.ident()]
            while self.peek().text == ",":
                self.advance()
                tgt.append(self.ident())
            self.expect_punct(")")
            if len(set(tgt)) != len(tgt):
                raise self.error(f"duplicate target in target list of {cid!r}", tok)
            targets = tuple(tgt)
        return ComponentDecl(
            id=cid,
            kind=decl.kind,
            sources=decl.sources,
            targets=targets,
            start=decl.start,
            work=decl.work,
        )

    def comp(self, cid: str, at: Token) -> ComponentDecl:
        tok = self.peek()
        kw = self.ident()
        try:
            kind = Kind(kw)
        except ValueError:
            raise self.error(f"unknown component kind {kw!r}", tok) from None
        if kind is Kind.PERIODIC:
            self.expect_punct("(")
            lo = self.number()
            self.expect_punct(",")
            hi = self.number()
            self.expect_punct(")")
            work = self.interval()
            return ComponentDecl(cid, kind, start=Interval(lo, hi), work=work)
        if kind is Kind.APERIODIC:
            self.expect_punct("(")
            ev = self.number()
            self.expect_punct(")")
            return ComponentDecl(cid, kind, work=Interval(ev, None))
        if kind is Kind.FIRST:
            sources = self.slist()
            return ComponentDecl(cid, kind, sources=sources)
        if kind is Kind.BOTH:
            self.expect_punct("(")
            a = self.ident()
            self.expect_punct(",")
            b = self.ident()
            self.expect_punct(")")
            work = self.interval()
            if a == b:
                raise self.error(f"Both sources of {cid!r} must be distinct", tok)
            return ComponentDecl(cid, kind, sources=(SourceRef(a), SourceRef(b)), work=work)
        if kind is Kind.PRIORITY:
            self.expect_punct("(")
            master = self.sitem(require_interval=True)
            self.expect_punct(",")
            slave = self.sitem(require_interval=True)
            self.expect_punct(")")
            if master.id == slave.id:
                raise self.error(f"Priority sources of {cid!r} must be distinct", tok)
            return ComponentDecl(cid, kind, sources=(master, slave))
        if kind is Kind.MEMORY:
            sources = self.slist()
            return ComponentDecl(cid, kind, sources=sources)
        # Rendering
        self.expect_punct("(")
        lo = self.number()
        self.expect_punct(",")
        hi = self.number()
        self.expect_punct(")")
        self.expect_punct("(")
        src = self.sitem(require_interval=True)
        self.expect_punct(")")
        return ComponentDecl(cid, kind, sources=(src,), start=Interval(lo, hi))

    def slist(self) -> tuple[SourceRef, ...]:
        self.expect_punct("(")
        items = [self.sitem()]
        while self.peek().text == ",":
            self.advance()
            items.append(self.sitem())
        self.expect_punct(")")
        ids = [s.id for s in items]
        if len(set(ids)) != len(ids):
            raise self.error("duplicate source id in source list")
        return tuple(items)

    def sitem(self, require_interval: bool = False) -> SourceRef:
        tok = self.peek()
        sid = self.ident()
        interval = None
        if self.peek().text == "[":
            interval = self.interval()
        elif require_interval:
            raise self.error(f"source {sid!r} requires an interval here", tok)
        return SourceRef(sid, interval)

    def interval(self) -> Interval:
        tok = self.peek()
        self.expect_punct("[")
        lo = self.number()
        self.expect_punct(",")
        hi = self.number()
        self.expect_punct("]")
        if lo > hi:
            raise self.error(f"empty interval [{lo},{hi}]", tok)
        return Interval(lo, hi)


def parse(text: str) -> SpecAst:
    """Parse MIRELA source text into a SpecAst.

    Raises SpecError with (line, column) on lexical or shape errors.
    """
    return _Parser(tokenize(text)).spec()


def parse_file(path) -> SpecAst:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
