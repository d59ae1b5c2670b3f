"""Finite group presentations: words, a small DSL parser, Fox calculus.

A word is stored as a tuple of ``(generator, exponent)`` pairs in freely
reduced form.  Relations ``u = v`` become relators ``u v^-1`` and the
commutator convention is ``[a, b] = a b a^-1 b^-1``.

Grammar of the ``.grp`` format::

    file     := ['group' NAME '='] '<' gens '|' rels '>'
    gens     := NAME (',' NAME)*
    rels     := [rel (',' rel)*]
    rel      := word ('=' word)*
    word     := factor (['*'] factor)*
    factor   := atom ('^' exponent)*
    atom     := NAME | '1' | '(' word ')' | '[' word ',' word ']'
    exponent := ['-'] (INT | NAME | '(' arith ')')
    arith    := integer expression with + - * / ^ and parentheses

Names used as exponents are parameters and must be supplied by the caller.
Comments run from ``#`` to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        self.message = message
        where = " at line %d, column %d" % (line, col) if line else ""
        super().__init__(message + where)


# ---------------------------------------------------------------------------
# words


def _reduce(letters: Iterable[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    out: List[Tuple[int, int]] = []
    for g, e in letters:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            e += out[-1][1]
            out.pop()
            if e:
                out.append((g, e))
        else:
            out.append((g, e))
    return tuple(out)


class Word:
    """Freely reduced word in a free group, as ``(generator, exponent)`` pairs."""

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[Tuple[int, int]] = ()):
        self.letters = _reduce((int(g), int(e)) for g, e in letters)
        self._hash = hash(self.letters)

    @classmethod
    def gen(cls, g: int, e: int = 1) -> "Word":
        return cls([(g, e)])

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self.letters))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        if len(self.letters) == 1:
            g, e = self.letters[0]
            return Word([(g, e * n)])
        return Word(self.letters * n)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __repr__(self) -> str:
        return "Word(%r)" % (self.letters,)

    def exponent_sum(self, g: int) -> int:
        return sum(e for h, e in self.letters if h == g)

    def generators(self) -> set:
        return {g for g, _ in self.letters}

    def syllables(self):
        """Yield single letters ``(g, +1/-1)`` in order."""
        for g, e in self.letters:
            s = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield g, s

    def render(self, names: Sequence[str]) -> str:
        if not self.letters:
            return "1"
        parts = []
        for g, e in self.letters:
            parts.append(names[g] if e == 1 else "%s^%d" % (names[g], e))
        return "*".join(parts)


def commutator(u: Word, v: Word) -> Word:
    return u * v * u.inverse() * v.inverse()


# ---------------------------------------------------------------------------
# free group ring


class FreeRingElement:
    """Finitely supported integer combination of free-group words."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Word, int]] = None):
        self.terms: Dict[Word, int] = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[w] = self.terms.get(w, 0) + c
            self.terms = {w: c for w, c in self.terms.items() if c}

    @classmethod
    def word(cls, w: Word, c: int = 1) -> "FreeRingElement":
        return cls({w: c})

    def __add__(self, other: "FreeRingElement") -> "FreeRingElement":
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t.get(w, 0) + c
        return FreeRingElement(t)

    def __neg__(self) -> "FreeRingElement":
        return FreeRingElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "FreeRingElement") -> "FreeRingElement":
        return self + (-other)

    def left_mul(self, w: Word) -> "FreeRingElement":
        """The product ``w * self``."""
        return FreeRingElement({w * u: c for u, c in self.terms.items()})

    def __mul__(self, other: "FreeRingElement") -> "FreeRingElement":
        t: Dict[Word, int] = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                uv = u * v
                t[uv] = t.get(uv, 0) + a * b
        return FreeRingElement(t)

    def augmentation(self) -> int:
        return sum(self.terms.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeRingElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return "FreeRingElement(%r)" % (self.terms,)


def fox_derivative(rel: Word, gen: int) -> FreeRingElement:
    """Fox derivative of ``rel`` with respect to generator ``gen``."""
    terms: Dict[Word, int] = {}
    prefix: List[Tuple[int, int]] = []
    for g, s in rel.syllables():
        if g == gen:
            if s > 0:
                w = Word(prefix)
                terms[w] = terms.get(w, 0) + 1
            else:
                w = Word(prefix + [(g, -1)])
                terms[w] = terms.get(w, 0) - 1
        prefix.append((g, s))
    return FreeRingElement(terms)


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Presentation:
    generator_names: Tuple[str, ...]
    relators: Tuple[Word, ...]
    name: str = ""

    def __post_init__(self):
        names = tuple(self.generator_names)
        object.__setattr__(self, "generator_names", names)
        object.__setattr__(self, "relators", tuple(self.relators))
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        n = len(names)
        for r in self.relators:
            for g, _ in r.letters:
                if not 0 <= g < n:
                    raise ValueError("relator uses generator index %d" % g)

    @property
    def ngens(self) -> int:
        return len(self.generator_names)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Presentation)
                and self.generator_names == other.generator_names
                and self.relators == other.relators)

    def __hash__(self):
        return hash((self.generator_names, self.relators))

    def render(self) -> str:
        rels = ", ".join(r.render(self.generator_names) for r in self.relators)
        body = "< %s | %s >" % (", ".join(self.generator_names), rels)
        return "group %s = %s" % (self.name, body) if self.name else body

    def exponent_matrix(self) -> List[List[int]]:
        """Relators x generators matrix of exponent sums."""
        return [[r.exponent_sum(g) for g in range(self.ngens)] for r in self.relators]

    def fox_jacobian(self) -> List[List[FreeRingElement]]:
        return [[fox_derivative(r, g) for g in range(self.ngens)] for r in self.relators]


@dataclass(frozen=True)
class BalanceAccount:
    generators: int
    relators: int
    deficiency: int
    balanced: bool


def balance_accounting(p: Presentation) -> BalanceAccount:
    g, r = p.ngens, len(p.relators)
    return BalanceAccount(g, r, g - r, g == r)


def epsilon_p_jacobian(p: Presentation, characteristic: int) -> np.ndarray:
    """Augmentation of the Fox Jacobian, reduced mod ``characteristic``.

    Augmenting a Fox derivative gives the exponent sum, so this is the
    abelianized relation matrix (relators x generators).  Characteristic 0
    returns the integer matrix itself.
    """
    m = np.array(p.exponent_matrix(), dtype=object).reshape(len(p.relators), p.ngens)
    if characteristic:
        m = np.mod(m, characteristic)
    return m.astype(np.int64)


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) |
    (?P<nl>\n) |
    (?P<comment>\#[^\n]*) |
    (?P<int>\d+) |
    (?P<name>[A-Za-z_][A-Za-z0-9_]*) |
    (?P<sym>[<>|,=*^()\[\]+\-/])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character %r" % text[pos], line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, params: Mapping[str, int]):
        self.toks = _tokenize(text)
        self.i = 0
        self.params = dict(params)
        self.gens: Dict[str, int] = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("sym", "name"):
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            self.error("expected %r, found %r" % (text, found))

    def name(self) -> str:
        if self.tok.kind != "name":
            self.error("expected a name, found %r" % (self.tok.text or "end of input"))
        t = self.tok.text
        self.i += 1
        return t

    # -- whole presentation
    def presentation(self) -> Presentation:
        gname = ""
        if self.tok.kind == "name" and self.tok.text == "group":
            self.i += 1
            gname = self.name()
            self.expect("=")
        self.expect("<")
        names: List[str] = []
        if self.tok.text != "|":
            while True:
                tok = self.tok
                n = self.name()
                if n in self.gens:
                    self.error("duplicate generator %r" % n, tok)
                if n in self.params:
                    self.error("generator %r clashes with a parameter" % n, tok)
                self.gens[n] = len(names)
                names.append(n)
                if not self.accept(","):
                    break
        if not names:
            self.error("empty generator list")
        self.expect("|")
        rels: List[Word] = []
        if self.tok.text != ">":
            while True:
                rels.extend(self.relation())
                if not self.accept(","):
                    break
        self.expect(">")
        if self.tok.kind != "eof":
            self.error("trailing input %r" % self.tok.text)
        return Presentation(tuple(names), tuple(rels), gname)

    def relation(self) -> List[Word]:
        sides = [self.word()]
        while self.accept("="):
            sides.append(self.word())
        if len(sides) == 1:
            return sides
        return [sides[i] * sides[i + 1].inverse() for i in range(len(sides) - 1)]

    def word(self) -> Word:
        w = self.factor()
        while True:
            if self.accept("*"):
                w = w * self.factor()
            elif self.tok.kind in ("name", "int") or self.tok.text in ("(", "["):
                w = w * self.factor()
            else:
                return w

    def factor(self) -> Word:
        w = self.atom()
        while self.accept("^"):
            w = w ** self.exponent()
        return w

    def atom(self) -> Word:
        tok = self.tok
        if tok.kind == "name":
            self.i += 1
            if tok.text not in self.gens:
                if tok.text in self.params:
                    self.error("parameter %r used as a generator" % tok.text, tok)
                self.error("unknown generator %r" % tok.text, tok)
            return Word.gen(self.gens[tok.text])
        if tok.kind == "int":
            if tok.text != "1":
                self.error("only the identity 1 may appear as a bare number", tok)
            self.i += 1
            return Word()
        if self.accept("("):
            w = self.word()
            self.expect(")")
            return w
        if self.accept("["):
            u = self.word()
            self.expect(",")
            v = self.word()
            self.expect("]")
            return commutator(u, v)
        self.error("expected a word, found %r" % (tok.text or "end of input"))

    def exponent(self) -> int:
        sign = 1
        while self.accept("-"):
            sign = -sign
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return sign * int(tok.text)
        if tok.kind == "name":
            self.i += 1
            return sign * self.param(tok)
        if self.accept("("):
            v = self.arith()
            self.expect(")")
            return sign * v
        self.error("expected an exponent")

    def param(self, tok: _Tok) -> int:
        if tok.text in self.gens:
            self.error("generator %r used as an exponent" % tok.text, tok)
        if tok.text not in self.params:
            self.error("unbound parameter %r" % tok.text, tok)
        return int(self.params[tok.text])

    # integer arithmetic inside parenthesised exponents
    def arith(self) -> int:
        v = self.term()
        while self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            t = self.term()
            v = v + t if op == "+" else v - t
        return v

    def term(self) -> int:
        v = self.power()
        while self.tok.text in ("*", "/"):
            op = self.tok.text
            self.i += 1
            u = self.power()
            if op == "/" and (u == 0 or v % u):
                self.error("inexact division")
            v = v * u if op == "*" else v // u
        return v

    def power(self) -> int:
        v = self.unary()
        if self.accept("^"):
            e = self.power()
            if e < 0:
                self.error("negative power in an integer expression")
            v = v ** e
        return v

    def unary(self) -> int:
        if self.accept("-"):
            return -self.unary()
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return int(tok.text)
        if tok.kind == "name":
            self.i += 1
            return self.param(tok)
        if self.accept("("):
            v = self.arith()
            self.expect(")")
            return v
        self.error("expected an integer expression")


def parse(text: str, params: Optional[Mapping[str, int]] = None) -> Presentation:
    """Parse presentation source text, substituting integer parameters."""
    return _Parser(text, params or {}).presentation()


def parse_word(text: str, generator_names: Sequence[str],
               params: Optional[Mapping[str, int]] = None) -> Word:
    """Parse a single word over the given generator names."""
    p = _Parser(text, params or {})
    p.gens = {n: i for i, n in enumerate(generator_names)}
    if p.tok.kind == "eof":
        return Word()
    w = p.word()
    if p.tok.kind != "eof":
        p.error("trailing input %r" % p.tok.text)
    return w


def parse_integer(text: str, params: Optional[Mapping[str, int]] = None) -> int:
    """Evaluate an integer expression that may mention parameters."""
    p = _Parser(text, params or {})
    v = p.arith()
    if p.tok.kind != "eof":
        p.error("trailing input %r" % p.tok.text)
    return v


def load(path: str, params: Optional[Mapping[str, int]] = None) -> Presentation:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), params)


def free_group(n: int, names: Optional[Sequence[str]] = None) -> Presentation:
    names = tuple(names) if names else tuple("x%d" % i for i in range(1, n + 1))
    return Presentation(names, ())
