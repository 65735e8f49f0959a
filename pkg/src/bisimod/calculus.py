"""Hilbert-style calculus: axiom recognition, proof checking, proof generators.

Axiom schemes (core form after desugaring)::

    TAU    substitution instances of propositional tautologies
    KBOX   [](A -> B) -> ([]A -> []B)
    KBIS   [b](A -> B) -> ([b]A -> [b]B)
    FORTH  (<b>A & <>[b]B) -> <b>(A & <>B)
    BACK   <b><>A -> <><b>A
    HARM   l -> [b]l            (l an atom or a negated atom)
    NTS    [b][b]false

Rules: MP (from A -> B and A infer B), NBOX and NBIS (necessitation).
Necessitation only applies to lines whose derivation uses no assumption.

Proof files are line oriented::

    # comment
    1. p -> p ; TAU
    2. [b](p -> p) ; NBIS 1
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .errors import BoundExceeded, FormatError, NotLSquare, ParseError, SkeletonTooLarge
from .syntax import (FALSUM, Atom, BisBox, Box, Falsum, Formula, Implies,
                     bis_dia, conj, dia, is_literal, is_lsquare, neg, parse, render)

AXIOM_ORDER = ("NTS", "HARM", "KBOX", "KBIS", "FORTH", "BACK", "TAU")
RULES = AXIOM_ORDER + ("ASM", "MP", "NBOX", "NBIS")
_ARITY = {"MP": 2, "NBOX": 1, "NBIS": 1}
SKELETON_CAP = 20
DEFAULT_TOWER_BOUND = 64


# -- schema matching --------------------------------------------------------

@dataclass(frozen=True)
class _Meta(Formula):
    name: str
    literal: bool = False


_A, _B, _L = _Meta("A"), _Meta("B"), _Meta("l", literal=True)

SCHEMAS = {
    "NTS": BisBox(BisBox(FALSUM)),
    "HARM": Implies(_L, BisBox(_L)),
    "KBOX": Implies(Box(Implies(_A, _B)), Implies(Box(_A), Box(_B))),
    "KBIS": Implies(BisBox(Implies(_A, _B)), Implies(BisBox(_A), BisBox(_B))),
    "FORTH": Implies(conj(bis_dia(_A), dia(BisBox(_B))), bis_dia(conj(_A, dia(_B)))),
    "BACK": Implies(bis_dia(dia(_A)), dia(bis_dia(_A))),
}


def _match(pat, f, env):
    if isinstance(pat, _Meta):
        if pat.literal and not is_literal(f):
            return False
        bound = env.get(pat.name)
        if bound is None:
            env[pat.name] = f
            return True
        return bound == f
    if type(pat) is not type(f):
        return False
    if isinstance(pat, Implies):
        return _match(pat.lhs, f.lhs, env) and _match(pat.rhs, f.rhs, env)
    if isinstance(pat, (Box, BisBox)):
        return _match(pat.body, f.body, env)
    return pat == f


def instantiate(name, **subst) -> Formula:
    """Fill the metavariables ``A``, ``B`` or ``l`` of a non-TAU scheme."""
    def fill(p):
        if isinstance(p, _Meta):
            return subst[p.name]
        if isinstance(p, Implies):
            return Implies(fill(p.lhs), fill(p.rhs))
        if isinstance(p, Box):
            return Box(fill(p.body))
        if isinstance(p, BisBox):
            return BisBox(fill(p.body))
        return p
    return fill(SCHEMAS[name])


@dataclass(frozen=True)
class Var(Formula):
    """Propositional variable of a skeleton."""

    index: int


def skeleton(f: Formula):
    """Propositional skeleton of ``f``.

    Atoms and maximal ``[]``/``[b]`` subformulas become variables (equal
    subformulas share one); returns ``(tree, variables)`` where the tree uses
    ``Var(i)`` for ``variables[i]``.
    """
    table = {}

    def walk(g):
        if isinstance(g, Falsum):
            return g
        if isinstance(g, Implies):
            return Implies(walk(g.lhs), walk(g.rhs))
        if g not in table:
            table[g] = len(table)
        return Var(table[g])

    tree = walk(f)
    return tree, list(table)


def _column(i, n):
    # truth-table column of variable i over 2**n rows, packed into an int
    half = 1 << i
    pattern = ((1 << half) - 1) << half
    width = half << 1
    rows = 1 << n
    while width < rows:
        pattern |= pattern << width
        width <<= 1
    return pattern


def is_tautology(f: Formula, cap: int = SKELETON_CAP) -> bool:
    tree, variables = skeleton(f)
    n = len(variables)
    if n > cap:
        raise SkeletonTooLarge(f"skeleton has {n} variables (cap {cap})")
    full = (1 << (1 << n)) - 1
    cols = [_column(i, n) for i in range(n)]
    memo = {}

    def ev(g):
        if isinstance(g, Falsum):
            return 0
        if isinstance(g, Var):
            return cols[g.index]
        hit = memo.get(g)
        if hit is None:
            hit = memo[g] = (~ev(g.lhs) | ev(g.rhs)) & full
        return hit

    return ev(tree) == full


def is_instance(f: Formula, name: str) -> bool:
    if name == "TAU":
        return is_tautology(f)
    return _match(SCHEMAS[name], f, {})


def match_axiom(f: Formula) -> Optional[str]:
    """First axiom scheme (in ``AXIOM_ORDER``) that ``f`` instantiates."""
    for name in AXIOM_ORDER:
        if is_instance(f, name):
            return name
    return None


# -- proofs -----------------------------------------------------------------

@dataclass(frozen=True)
class Line:
    index: int
    formula: Formula
    rule: str
    refs: tuple = ()

    def justification(self):
        return " ".join([self.rule, *map(str, self.refs)])


@dataclass
class Proof:
    lines: list = field(default_factory=list)

    def __len__(self):
        return len(self.lines)

    @property
    def conclusion(self):
        return self.lines[-1].formula if self.lines else None

    def format(self) -> str:
        return "".join(f"{ln.index}. {render(ln.formula)} ; {ln.justification()}\n"
                       for ln in self.lines)


@dataclass(frozen=True)
class Diagnostic:
    index: Optional[int]
    kind: str
    message: str

    def __str__(self):
        where = f"line {self.index}" if self.index is not None else "proof"
        return f"{where}: {self.kind}: {self.message}"


@dataclass
class ProofVerdict:
    accepted: bool
    diagnostics: list
    theorem_lines: dict

    def __bool__(self):
        return self.accepted

    def to_dict(self):
        return {"verdict": self.accepted,
                "diagnostics": [{"line": d.index, "kind": d.kind, "message": d.message}
                                for d in self.diagnostics]}


def check_proof(p: Proof, goal: Optional[Formula] = None, assumptions=()) -> ProofVerdict:
    """Check every line of ``p`` and that its last line is ``goal``.

    With no assumptions this decides theoremhood.  ``theorem_lines`` maps each
    line index to whether its derivation avoids assumption lines.
    """
    assumptions = frozenset(assumptions)
    diags = []
    seen = {}      # index -> formula
    theorem = {}   # index -> bool

    def bad(ln, kind, msg):
        diags.append(Diagnostic(ln.index, kind, msg))

    for ln in p.lines:
        if ln.index in seen:
            bad(ln, "BadReference", f"duplicate line index {ln.index}")
            continue
        if ln.rule not in RULES:
            bad(ln, "BadReference", f"unknown justification {ln.rule!r}")
            seen[ln.index], theorem[ln.index] = ln.formula, False
            continue
        if len(ln.refs) != _ARITY.get(ln.rule, 0):
            bad(ln, "BadReference", f"{ln.rule} takes {_ARITY.get(ln.rule, 0)} references")
        elif any(r not in seen for r in ln.refs):
            bad(ln, "BadReference", "references must name earlier lines")
        elif ln.rule in AXIOM_ORDER:
            try:
                ok = is_instance(ln.formula, ln.rule)
            except SkeletonTooLarge as exc:
                ok, why = False, str(exc)
            else:
                why = f"not an instance of {ln.rule}"
            if not ok:
                bad(ln, "BadAxiomInstance", why)
        elif ln.rule == "ASM":
            if ln.formula not in assumptions:
                bad(ln, "BadReference", "formula is not among the assumptions")
        elif ln.rule == "MP":
            i, j = ln.refs
            major, minor = seen[i], seen[j]
            if not isinstance(major, Implies):
                bad(ln, "BadReference", f"line {i} is not an implication")
            elif major.lhs != minor:
                bad(ln, "BadReference", f"line {j} is not the antecedent of line {i}")
            elif major.rhs != ln.formula:
                bad(ln, "BadReference", f"formula is not the consequent of line {i}")
        else:
            (i,) = ln.refs
            wrap = Box if ln.rule == "NBOX" else BisBox
            if ln.formula != wrap(seen[i]):
                bad(ln, "BadReference", f"formula is not {ln.rule} applied to line {i}")
            elif not theorem[i]:
                bad(ln, "NecOnAssumption", f"line {i} depends on an assumption")
        seen[ln.index] = ln.formula
        if ln.rule == "ASM":
            theorem[ln.index] = False
        else:
            theorem[ln.index] = all(theorem.get(r, False) for r in ln.refs)
    if not p.lines:
        diags.append(Diagnostic(None, "GoalMismatch", "empty proof"))
    elif goal is not None and p.lines[-1].formula != goal:
        diags.append(Diagnostic(p.lines[-1].index, "GoalMismatch",
                                f"last line proves {render(p.lines[-1].formula)}, "
                                f"not {render(goal)}"))
    return ProofVerdict(not diags, diags, theorem)


def parse_proof(text: str) -> Proof:
    """Read the line-oriented proof format; blank lines and ``#`` comments
    are skipped."""
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        head, dot, rest = body.partition(".")
        if not dot or not head.strip().isdigit():
            raise FormatError(f"line {no}: expected '<index>. <formula> ; <JUST>'")
        formula_text, semi, just = rest.rpartition(";")
        if not semi:
            raise FormatError(f"line {no}: missing '; <JUST>'")
        try:
            f = parse(formula_text)
        except ParseError as exc:
            raise FormatError(f"line {no}: {exc}") from None
        words = just.split()
        if not words:
            raise FormatError(f"line {no}: empty justification")
        rule = words[0].upper()
        if rule not in RULES:
            raise FormatError(f"line {no}: unknown justification {words[0]!r}")
        try:
            refs = tuple(int(w) for w in words[1:])
        except ValueError:
            raise FormatError(f"line {no}: line references must be integers") from None
        if len(refs) != _ARITY.get(rule, 0):
            raise FormatError(f"line {no}: {rule} takes {_ARITY.get(rule, 0)} references")
        lines.append(Line(int(head), f, rule, refs))
    return Proof(lines)


# -- proof generation -------------------------------------------------------

class _Builder:
    """Appends lines, reusing any formula already proved."""

    def __init__(self):
        self.lines = []
        self.known = {}

    def add(self, f, rule, refs=()):
        idx = self.known.get(f)
        if idx is None:
            idx = len(self.lines) + 1
            self.lines.append(Line(idx, f, rule, tuple(refs)))
            self.known[f] = idx
        return idx

    def __getitem__(self, i):
        return self.lines[i - 1].formula

    def axiom(self, f, name):
        return self.add(f, name)

    def mp(self, i, j):
        return self.add(self[i].rhs, "MP", (i, j))

    def nec(self, i, modal):
        return self.add(modal(self[i]), "NBOX" if modal is Box else "NBIS", (i,))

    def prop(self, conclusion, *premises):
        """Derive ``conclusion`` from earlier lines by one tautology and MPs."""
        chain = conclusion
        for p in reversed(premises):
            chain = Implies(self[p], chain)
        t = self.add(chain, "TAU")
        for p in premises:
            t = self.mp(t, p)
        return t

    def chain(self, i, j):
        return self.prop(Implies(self[i].lhs, self[j].rhs), i, j)

    def mono(self, i, modal):
        """From A -> B derive MA -> MB by necessitation and K."""
        f = self[i]
        k = self.axiom(Implies(modal(f), Implies(modal(f.lhs), modal(f.rhs))),
                       "KBOX" if modal is Box else "KBIS")
        return self.mp(k, self.nec(i, modal))

    def proof(self, last):
        # lines after ``last`` cannot be needed by its derivation
        return Proof(self.lines[:last])


def _nn(f):
    return neg(neg(f))


def _box_bis_commute(b: _Builder, x):
    """Prove ``[][b]x -> [b][]x`` from BACK instantiated at ``~x``."""
    target = Implies(Box(BisBox(x)), BisBox(Box(x)))
    if target in b.known:
        return b.known[target]
    nx = neg(x)
    c = b.chain(b.mono(b.add(Implies(x, _nn(x)), "TAU"), BisBox),
                b.add(Implies(BisBox(_nn(x)), _nn(BisBox(_nn(x)))), "TAU"))
    d = b.mono(c, Box)                                   # [][b]x -> []~<b>~x
    back = b.axiom(instantiate("BACK", A=nx), "BACK")    # <b><>~x -> <><b>~x
    e = b.prop(Implies(Box(neg(bis_dia(nx))), neg(bis_dia(dia(nx)))), back)
    g = b.chain(e, b.add(Implies(neg(bis_dia(dia(nx))), BisBox(neg(dia(nx)))), "TAU"))
    h = b.chain(b.add(Implies(neg(dia(nx)), Box(_nn(x))), "TAU"),
                b.mono(b.add(Implies(_nn(x), x), "TAU"), Box))
    return b.chain(b.chain(d, g), b.mono(h, BisBox))


def _harmony(b: _Builder, a, negative):
    """Line proving ``a -> [b]a`` (or ``~a -> [b]~a`` when ``negative``)."""
    target = Implies(neg(a), BisBox(neg(a))) if negative else Implies(a, BisBox(a))
    if target in b.known:
        return b.known[target]
    if isinstance(a, Atom):
        return b.axiom(target, "HARM")
    if isinstance(a, Falsum):
        if not negative:
            return b.add(target, "TAU")
        return b.prop(target, b.nec(b.add(neg(FALSUM), "TAU"), BisBox))
    if isinstance(a, Implies):
        lhs, rhs = a.lhs, a.rhs
        if not negative:
            d1 = b.chain(_harmony(b, lhs, True),
                         b.mono(b.add(Implies(neg(lhs), a), "TAU"), BisBox))
            d2 = b.chain(_harmony(b, rhs, False),
                         b.mono(b.add(Implies(rhs, a), "TAU"), BisBox))
            return b.prop(target, d1, d2)
        pos_l = _harmony(b, lhs, False)
        neg_r = _harmony(b, rhs, True)
        m = b.mono(b.add(Implies(lhs, Implies(neg(rhs), neg(a))), "TAU"), BisBox)
        k = b.axiom(instantiate("KBIS", A=neg(rhs), B=neg(a)), "KBIS")
        return b.prop(target, pos_l, neg_r, b.chain(m, k))
    if isinstance(a, Box):
        body = a.body
        if not negative:
            m = b.mono(_harmony(b, body, False), Box)        # []B -> [][b]B
            return b.chain(m, _box_bis_commute(b, body))
        nb = neg(body)
        # <>[b]~B -> [b]~[]B, via FORTH
        m1 = b.mono(b.add(Implies(body, _nn(body)), "TAU"), Box)
        y = conj(a, dia(nb))
        not_y = b.nec(b.prop(neg(y), m1), BisBox)
        no_dia_y = b.prop(neg(bis_dia(y)), not_y)
        forth = b.axiom(instantiate("FORTH", A=a, B=nb), "FORTH")
        e = b.prop(Implies(dia(BisBox(nb)), neg(bis_dia(a))), forth, no_dia_y)
        ttt = b.chain(e, b.add(Implies(neg(bis_dia(a)), BisBox(neg(a))), "TAU"))
        # ~[]B -> <>[b]~B, via the hypothesis for ~B
        c1 = b.prop(Implies(neg(BisBox(nb)), body), _harmony(b, body, True))
        c3 = b.prop(Implies(neg(a), dia(BisBox(nb))), b.mono(c1, Box))
        return b.chain(c3, ttt)
    raise NotLSquare(f"{render(a)} contains [b]")


def gen_harmony_proof(a: Formula, negative: bool = False) -> Proof:
    """Proof of ``a -> [b]a`` for a basic modal formula ``a``.

    Works by induction on ``a``, proving both polarities of every
    subformula; with ``negative`` the goal is ``~a -> [b]~a``.
    """
    if not is_lsquare(a):
        raise NotLSquare(f"{render(a)} contains [b]")
    b = _Builder()
    return b.proof(_harmony(b, a, negative))


def nts_tower(n: int) -> Formula:
    f = BisBox(FALSUM)
    for _ in range(n):
        f = Box(f)
    return BisBox(f)


def gen_nts_tower_proof(n: int, bound: int = DEFAULT_TOWER_BOUND) -> Proof:
    """Proof of ``[b] []^n [b]false`` by induction on ``n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > bound:
        raise BoundExceeded(f"tower height {n} exceeds bound {bound}")
    b = _Builder()
    i = b.axiom(nts_tower(0), "NTS")
    for _ in range(n):
        body = b[i].body
        boxed = b.nec(i, Box)
        i = b.mp(_box_bis_commute(b, body), boxed)
    return b.proof(i)


# -- random instances -------------------------------------------------------

_P, _Q, _R = _Meta("A"), _Meta("B"), _Meta("C")
TAUTOLOGY_SCHEMES = (
    Implies(_P, _P),
    Implies(_P, Implies(_Q, _P)),
    Implies(Implies(_P, Implies(_Q, _R)), Implies(Implies(_P, _Q), Implies(_P, _R))),
    Implies(neg(neg(_P)), _P),
    Implies(Implies(neg(_P), neg(_Q)), Implies(_Q, _P)),
    Implies(FALSUM, _P),
    Implies(conj(_P, _Q), _P),
    Implies(_P, Implies(_Q, conj(_P, _Q))),
    Implies(_P, Implies(neg(_P), _Q)),
    Implies(Implies(_P, _Q), Implies(Implies(_Q, _R), Implies(_P, _R))),
)


def random_formula(rng: random.Random, atom_names, depth, bisbox=True, size=4):
    """Random formula with modal depth at most ``depth``."""
    if size <= 1 or (depth == 0 and rng.random() < 0.3):
        return Atom(rng.choice(atom_names)) if rng.random() < 0.85 else FALSUM
    ops = ["imp", "imp"]
    if depth > 0:
        ops += ["box", "bis"] if bisbox else ["box"]
    op = rng.choice(ops)
    if op == "imp":
        left = rng.randint(1, max(1, size - 2))
        return Implies(random_formula(rng, atom_names, depth, bisbox, left),
                       random_formula(rng, atom_names, depth, bisbox, size - 1 - left))
    body = random_formula(rng, atom_names, depth - 1, bisbox, size - 1)
    return Box(body) if op == "box" else BisBox(body)


def random_instance(name: str, rng: random.Random, atom_names=("p", "q"), depth=3):
    """A random instance of the named scheme; metavariables get formulas of
    modal depth at most ``depth``."""
    def pick():
        return random_formula(rng, list(atom_names), rng.randint(0, depth),
                              size=rng.randint(1, 6))
    if name == "TAU":
        scheme = rng.choice(TAUTOLOGY_SCHEMES)
        subst = {"A": pick(), "B": pick(), "C": pick()}

        def fill(p):
            if isinstance(p, _Meta):
                return subst[p.name]
            if isinstance(p, Implies):
                return Implies(fill(p.lhs), fill(p.rhs))
            return p
        return fill(scheme)
    if name == "HARM":
        lit = Atom(rng.choice(list(atom_names)))
        return instantiate(name, l=neg(lit) if rng.random() < 0.5 else lit)
    if name == "NTS":
        return SCHEMAS["NTS"]
    return instantiate(name, A=pick(), B=pick())
