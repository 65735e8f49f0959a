"""Formulas of the bisimulation modal language.

Every formula is stored in core form, built from five constructors only:
``Atom``, ``Falsum``, ``Implies``, ``Box`` and ``BisBox``.  The remaining
connectives are abbreviations that :func:`parse` expands and :func:`render`
can fold back.

Surface syntax (ASCII)::

    atoms        p, q1, foo_bar        ([a-z][a-zA-Z0-9_]*)
    constants    false, true
    prefix       ~A   []A   <>A   [b]A   <b>A
    infix        A & B   A | B   A -> B   A <-> B

Prefix operators bind tightest, then ``&``, ``|``, ``->`` and ``<->``.
``->`` associates to the right, the others to the left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .errors import ParseError

__all__ = [
    "Formula", "Atom", "Falsum", "Implies", "Box", "BisBox", "FALSUM",
    "neg", "top", "conj", "disj", "iff", "dia", "bis_dia",
    "parse", "render", "atoms", "modal_depth", "size", "is_lsquare",
    "is_literal", "formula_key", "enumerate_formulas",
]


class Formula:
    """Base class of the five core constructors."""

    __slots__ = ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str
    _hash: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.name, str) or not ATOM_RE.fullmatch(self.name):
            raise ValueError(f"bad atom name {self.name!r}")
        object.__setattr__(self, "_hash", hash(("Atom", self.name)))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Falsum(Formula):
    def __hash__(self):
        return 0x5F

    def __repr__(self):
        return "Falsum()"


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    lhs: Formula
    rhs: Formula
    _hash: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("->", self.lhs, self.rhs)))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Implies({self.lhs!r}, {self.rhs!r})"


@dataclass(frozen=True, repr=False)
class Box(Formula):
    body: Formula
    _hash: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("[]", self.body)))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Box({self.body!r})"


@dataclass(frozen=True, repr=False)
class BisBox(Formula):
    body: Formula
    _hash: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("[b]", self.body)))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"BisBox({self.body!r})"


FALSUM = Falsum()


# -- abbreviations, expanded into core form --------------------------------

def neg(a):
    return Implies(a, FALSUM)


def top():
    return Implies(FALSUM, FALSUM)


def conj(a, b):
    return Implies(Implies(a, Implies(b, FALSUM)), FALSUM)


def disj(a, b):
    return Implies(Implies(a, FALSUM), b)


def iff(a, b):
    return conj(Implies(a, b), Implies(b, a))


def dia(a):
    return Implies(Box(Implies(a, FALSUM)), FALSUM)


def bis_dia(a):
    return Implies(BisBox(Implies(a, FALSUM)), FALSUM)


# -- parsing ----------------------------------------------------------------

ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")
_KEYWORDS = {"false", "true"}
# longest symbols first so that "<->" wins over "<>" and "<b>"
_SYMBOLS = ("<->", "[b]", "<b>", "->", "[]", "<>", "~", "&", "|", "(", ")")
_PREFIX = {"~", "[]", "<>", "[b]", "<b>"}
_PRIMARY_START = frozenset(_PREFIX | {"(", "false", "true", "identifier"})


def _tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        m = ATOM_RE.match(text, i)
        if m:
            word = m.group()
            kind = word if word in _KEYWORDS else "identifier"
            tokens.append((kind, word, i))
            i = m.end()
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append((sym, sym, i))
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}",
                             _byte_offset(text, i), _PRIMARY_START)
    tokens.append(("end of input", "", n))
    return tokens


def _byte_offset(text, index):
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected):
        kind, value, index = self.tokens[self.pos]
        what = "end of input" if kind == "end of input" else repr(value)
        raise ParseError(f"unexpected {what}", _byte_offset(self.text, index),
                         expected)

    def parse(self):
        f = self.iff()
        if self.peek() != "end of input":
            self.fail({"&", "|", "->", "<->", "end of input"})
        return f

    def iff(self):
        f = self.imp()
        while self.peek() == "<->":
            self.advance()
            f = iff(f, self.imp())
        return f

    def imp(self):
        f = self.disj()
        if self.peek() == "->":
            self.advance()
            return Implies(f, self.imp())
        return f

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.advance()
            f = disj(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == "&":
            self.advance()
            f = conj(f, self.unary())
        return f

    def unary(self):
        kind = self.peek()
        if kind in _PREFIX:
            self.advance()
            body = self.unary()
            if kind == "~":
                return neg(body)
            if kind == "[]":
                return Box(body)
            if kind == "<>":
                return dia(body)
            if kind == "[b]":
                return BisBox(body)
            return bis_dia(body)
        return self.primary()

    def primary(self):
        kind = self.peek()
        if kind == "identifier":
            return Atom(self.advance()[1])
        if kind == "false":
            self.advance()
            return FALSUM
        if kind == "true":
            self.advance()
            return top()
        if kind == "(":
            self.advance()
            f = self.iff()
            if self.peek() != ")":
                self.fail({")", "&", "|", "->", "<->"})
            self.advance()
            return f
        self.fail(_PRIMARY_START)


def parse(text: str) -> Formula:
    """Parse surface syntax into a core-normalized formula."""
    return _Parser(text).parse()


# -- rendering --------------------------------------------------------------

_IFF, _IMP, _OR, _AND, _PREFIX_LEVEL, _ATOMIC = range(6)


def _neg_body(f):
    if isinstance(f, Implies) and f.rhs == FALSUM:
        return f.lhs
    return None


def _is_diamond(f):
    inner = _neg_body(f)
    return isinstance(inner, (Box, BisBox)) and _neg_body(inner.body) is not None


def _is_conj(f):
    inner = _neg_body(f)
    return isinstance(inner, Implies) and _neg_body(inner.rhs) is not None


def _plain_negation(f):
    # a negation that will not itself print as <>, <b>, & or true
    inner = _neg_body(f)
    return inner is not None and inner != FALSUM and not _is_diamond(f) and not _is_conj(f)


def _render(f, resugar):
    if isinstance(f, Atom):
        return f.name, _ATOMIC
    if isinstance(f, Falsum):
        return "false", _ATOMIC
    if isinstance(f, Box):
        return "[]" + _wrap(f.body, resugar, _PREFIX_LEVEL), _PREFIX_LEVEL
    if isinstance(f, BisBox):
        return "[b]" + _wrap(f.body, resugar, _PREFIX_LEVEL), _PREFIX_LEVEL
    if resugar:
        sugared = _resugar(f)
        if sugared is not None:
            return sugared
    lhs = _wrap(f.lhs, resugar, _IMP + 1)
    rhs = _wrap(f.rhs, resugar, _IMP)
    return f"{lhs} -> {rhs}", _IMP


def _resugar(f):
    inner = _neg_body(f)
    if inner is not None:
        if isinstance(inner, (Box, BisBox)):
            body = _neg_body(inner.body)
            if body is not None:
                op = "<>" if isinstance(inner, Box) else "<b>"
                return op + _wrap(body, True, _PREFIX_LEVEL), _PREFIX_LEVEL
        if isinstance(inner, Implies):
            b = _neg_body(inner.rhs)
            if b is not None:
                a = inner.lhs
                return (f"{_wrap(a, True, _AND)} & {_wrap(b, True, _AND + 1)}",
                        _AND)
        if inner == FALSUM:
            return "true", _ATOMIC
        return "~" + _wrap(inner, True, _PREFIX_LEVEL), _PREFIX_LEVEL
    if _plain_negation(f.lhs):
        a = f.lhs.lhs
        return f"{_wrap(a, True, _OR)} | {_wrap(f.rhs, True, _OR + 1)}", _OR
    return None


def _wrap(f, resugar, level):
    text, own = _render(f, resugar)
    return text if own >= level else f"({text})"


def render(f: Formula, resugar: bool = True) -> str:
    """Print ``f`` in surface syntax.

    With ``resugar`` the printer folds ``~``, ``<>``, ``<b>``, ``&``, ``|``
    and ``true`` back in wherever the core pattern matches; either way
    ``parse(render(f, resugar)) == f``.
    """
    return _render(f, resugar)[0]


# -- structural measures ----------------------------------------------------

def atoms(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, Falsum):
        return frozenset()
    if isinstance(f, Implies):
        return atoms(f.lhs) | atoms(f.rhs)
    return atoms(f.body)


def modal_depth(f: Formula) -> int:
    if isinstance(f, (Atom, Falsum)):
        return 0
    if isinstance(f, Implies):
        return max(modal_depth(f.lhs), modal_depth(f.rhs))
    return 1 + modal_depth(f.body)


def size(f: Formula) -> int:
    if isinstance(f, (Atom, Falsum)):
        return 1
    if isinstance(f, Implies):
        return 1 + size(f.lhs) + size(f.rhs)
    return 1 + size(f.body)


def is_lsquare(f: Formula) -> bool:
    """True when ``f`` belongs to the basic modal language (no ``[b]``)."""
    if isinstance(f, (Atom, Falsum)):
        return True
    if isinstance(f, Implies):
        return is_lsquare(f.lhs) and is_lsquare(f.rhs)
    if isinstance(f, BisBox):
        return False
    return is_lsquare(f.body)


def is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (
        isinstance(f, Implies) and isinstance(f.lhs, Atom) and f.rhs == FALSUM)


@lru_cache(maxsize=65536)
def formula_key(f: Formula) -> tuple:
    """Total order on formulas: size first, then constructor
    (Atom < Falsum < Implies < Box < BisBox), then atom names and children.
    """
    if isinstance(f, Atom):
        return (1, 0, f.name)
    if isinstance(f, Falsum):
        return (1, 1)
    if isinstance(f, Implies):
        lk, rk = formula_key(f.lhs), formula_key(f.rhs)
        return (1 + lk[0] + rk[0], 2, lk, rk)
    bk = formula_key(f.body)
    return (1 + bk[0], 3 if isinstance(f, Box) else 4, bk)


def enumerate_formulas(atom_names, max_size, max_depth=None,
                       bisbox=False) -> Iterator[Formula]:
    """Yield every core formula up to ``max_size`` nodes in size order.

    ``max_depth`` bounds the modal depth; ``bisbox`` admits ``[b]``.
    """
    by_size = {}  # size -> list of (formula, depth)
    base = [(Atom(a), 0) for a in sorted(atom_names)] + [(FALSUM, 0)]
    for s in range(1, max_size + 1):
        level = []
        if s == 1:
            level = base
        else:
            for f, d in by_size.get(s - 1, ()):
                if max_depth is None or d < max_depth:
                    level.append((Box(f), d + 1))
                    if bisbox:
                        level.append((BisBox(f), d + 1))
            for ls in range(1, s - 1):
                for lf, ld in by_size.get(ls, ()):
                    for rf, rd in by_size.get(s - 1 - ls, ()):
                        level.append((Implies(lf, rf), max(ld, rd)))
        level.sort(key=lambda t: formula_key(t[0]))
        by_size[s] = level
        for f, _ in level:
            yield f
