"""
Surface syntax.

    type P;                      declare an atom
    val f : P -> Q;              declare a variable
    fn x => e   fix u => e   e1 e2   (e : G |- A, |- B)

Types use ``bot``, declared atoms, ``/\\`` (binds tightest), ``\\/`` and ``->``
(right associative, loosest).  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    BOT,
    Anno,
    App,
    Arrow,
    Base,
    ContextualAnnotation,
    Fix,
    FixVar,
    Intersect,
    Lam,
    Term,
    Type,
    TypingContext,
    Union,
    Var,
)

KEYWORDS = {"fn", "fix", "type", "val", "bot"}


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message, self.line, self.col = message, line, col


class DuplicateDecl(ParseError):
    pass


class UnknownAtom(ParseError):
    pass


@dataclass(frozen=True)
class SourceFile:
    atoms: tuple[str, ...]
    gamma: TypingContext
    term: Term


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "sym" or "eof"
    text: str
    line: int
    col: int


_TOKEN = re.compile(r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
                    r"|(?P<id>[A-Za-z_][A-Za-z0-9_']*)"
                    r"|(?P<sym>->|=>|\|-|/\\|\\/|[():,;])")


def tokenize(text: str) -> list[Token]:
    out, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind in ("id", "sym"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, text: str, atoms: set[str] | None):
        self.toks = tokenize(text)
        self.i = 0
        self.atoms = atoms  # None: any identifier is an atom
        self.used_atoms: list[Token] = []

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None, cls=ParseError):
        tok = tok or self.tok
        raise cls(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind != "eof" and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> Token:
        tok = self.tok
        if tok.kind != "id" or tok.text in KEYWORDS:
            self.error(f"expected an identifier, found {tok.text or 'end of input'!r}")
        return self.advance()

    # types

    def type_(self) -> Type:
        left = self.union()
        if self.at("->"):
            self.advance()
            return Arrow(left, self.type_())
        return left

    def union(self) -> Type:
        t = self.inter()
        while self.at("\\/"):
            self.advance()
            t = Union(t, self.inter())
        return t

    def inter(self) -> Type:
        t = self.type_atom()
        while self.at("/\\"):
            self.advance()
            t = Intersect(t, self.type_atom())
        return t

    def type_atom(self) -> Type:
        if self.at("("):
            self.advance()
            t = self.type_()
            self.expect(")")
            return t
        if self.at("bot"):
            self.advance()
            return BOT
        tok = self.ident()
        self.used_atoms.append(tok)
        if self.atoms is not None and tok.text not in self.atoms:
            self.error(f"unknown atom {tok.text!r}", tok, UnknownAtom)
        return Base(tok.text)

    # terms

    def term(self, scope: dict[str, type]) -> Term:
        if self.at("fn") or self.at("fix"):
            kind = Lam if self.advance().text == "fn" else Fix
            name = self.ident().text
            self.expect("=>")
            inner = {**scope, name: Var if kind is Lam else FixVar}
            return kind(name, self.term(inner))
        e = self.term_atom(scope)
        while self.tok.kind == "id" and self.tok.text not in KEYWORDS or self.at("("):
            e = App(e, self.term_atom(scope))
        if self.at("fn") or self.at("fix"):
            # a trailing lambda is the last argument: f fn x => x
            e = App(e, self.term(scope))
        return e

    def term_atom(self, scope) -> Term:
        if self.at("("):
            self.advance()
            e = self.term(scope)
            if self.at(":"):
                self.advance()
                anns = [self.annotation()]
                while self.at(","):
                    self.advance()
                    anns.append(self.annotation())
                e = Anno(e, tuple(anns))
            self.expect(")")
            return e
        name = self.ident().text
        return scope.get(name, Var)(name)

    def annotation(self) -> ContextualAnnotation:
        entries = []
        if self.at("|-"):
            self.advance()
        elif self.tok.kind == "id" and self.peek().text == ":":
            while True:
                tok = self.ident()
                self.expect(":")
                if any(n == tok.text for n, _ in entries):
                    self.error(f"{tok.text} appears twice in an annotation context", tok, DuplicateDecl)
                entries.append((tok.text, self.type_()))
                if self.at(",") and self.peek().kind == "id" and self.peek(2).text == ":":
                    self.advance()
                    continue
                break
            self.expect("|-")
        return ContextualAnnotation(TypingContext(tuple(entries)), self.type_())

    # files

    def source(self) -> SourceFile:
        # atoms may be used before their declaration; a file that declares no
        # atoms at all may use any atom name
        atoms: list[str] = []
        entries: list[tuple[str, Type]] = []
        while self.at("type") or self.at("val"):
            if self.advance().text == "type":
                tok = self.ident()
                if tok.text in atoms:
                    self.error(f"atom {tok.text} declared twice", tok, DuplicateDecl)
                atoms.append(tok.text)
            else:
                tok = self.ident()
                self.expect(":")
                if any(n == tok.text for n, _ in entries):
                    self.error(f"variable {tok.text} declared twice", tok, DuplicateDecl)
                entries.append((tok.text, self.type_()))
            self.expect(";")
        e = self.term({})
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r} after the term")
        if atoms:
            for tok in self.used_atoms:
                if tok.text not in atoms:
                    self.error(f"unknown atom {tok.text!r}", tok, UnknownAtom)
        return SourceFile(tuple(atoms), TypingContext(tuple(entries)), e)


def parse(text: str) -> SourceFile:
    return _Parser(text, None).source()


def parse_type(text: str, atoms=None) -> Type:
    p = _Parser(text, set(atoms) if atoms is not None else None)
    t = p.type_()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r} after the type")
    return t


def parse_term(text: str) -> Term:
    p = _Parser(text, None)
    e = p.term({})
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r} after the term")
    return e
