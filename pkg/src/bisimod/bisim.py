"""Bisimulation clauses, greatest bisimulations and distinguishing formulas."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownWorld
from .models import BiModel, KripkeModel
from .syntax import FALSUM, Atom, Box, Implies, formula_key, modal_depth


@dataclass(frozen=True)
class BisimReport:
    """Every violation of the three bisimulation clauses.

    ``harmony_violations`` holds ``((w, w1), atom)``; ``forth_violations``
    holds ``(w, w1, v)`` with ``w R v`` unmatched on the right;
    ``back_violations`` holds ``(w, w1, v1)`` with ``w1 R' v1`` unmatched
    on the left.
    """

    harmony_violations: list = field(default_factory=list)
    forth_violations: list = field(default_factory=list)
    back_violations: list = field(default_factory=list)
    nonempty: bool = True

    @property
    def is_bisimulation(self):
        return (self.nonempty and not self.harmony_violations
                and not self.forth_violations and not self.back_violations)

    def to_dict(self):
        return {
            "verdict": self.is_bisimulation,
            "nonempty": self.nonempty,
            "harmony_violations": [{"pair": list(p), "atom": a}
                                   for p, a in self.harmony_violations],
            "forth_violations": [list(t) for t in self.forth_violations],
            "back_violations": [list(t) for t in self.back_violations],
        }


def check_conditions(m: BiModel) -> BisimReport:
    atom_names = sorted(m.atom_names)
    harmony, forth, back = [], [], []
    ls, rs = m.left.successors, m.right.successors
    zs = m.z_successors
    for w, w1 in sorted(m.z):
        for a in atom_names:
            if m.left.holds(a, w) != m.right.holds(a, w1):
                harmony.append(((w, w1), a))
        for v in sorted(ls[w]):
            if not (zs[v] & rs[w1]):
                forth.append((w, w1, v))
        for v1 in sorted(rs[w1]):
            if not any(v1 in zs[v] for v in ls[w]):
                back.append((w, w1, v1))
    return BisimReport(harmony, forth, back, bool(m.z))


def is_bisimulation(m: BiModel) -> bool:
    return check_conditions(m).is_bisimulation


def max_bisimulation(left: KripkeModel, right: KripkeModel) -> frozenset:
    """Union of all relations obeying harmony, forth and back (maybe empty).

    Starts from every atomically harmonious pair and deletes pairs that
    break forth or back until nothing changes.
    """
    z = {(w, w1) for w in left.worlds for w1 in right.worlds
         if left.atoms_at(w) == right.atoms_at(w1)}
    ls, rs = left.successors, right.successors
    changed = True
    while changed:
        changed = False
        for w, w1 in sorted(z):
            ok = all(any((v, v1) in z for v1 in rs[w1]) for v in ls[w]) and \
                all(any((v, v1) in z for v in ls[w]) for v1 in rs[w1])
            if not ok:
                z.discard((w, w1))
                changed = True
    return frozenset(z)


# -- distinguishing formulas ------------------------------------------------

def _reachable(model, start):
    seen = {start}
    todo = [start]
    while todo:
        w = todo.pop()
        for v in model.successors[w]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def _point_graph(left, w, right, w1):
    """Disjoint union of the parts of both models generated by w and w1."""
    points = [("L", x) for x in sorted(_reachable(left, w))] + \
             [("R", x) for x in sorted(_reachable(right, w1))]
    index = {p: i for i, p in enumerate(points)}
    succ, labels = [], []
    for side, x in points:
        model = left if side == "L" else right
        succ.append(sum(1 << index[(side, y)] for y in model.successors[x]))
        labels.append(model.atoms_at(x))
    return points, index, succ, labels


def separation_depth(left, w, right, w1):
    """Least n such that some formula of modal depth n tells (left, w) from
    (right, w1), or ``None`` when they agree on every basic modal formula.

    Computed by refining the partition of the joint point set one modal
    level at a time.
    """
    points, index, succ, labels = _point_graph(left, w, right, w1)
    a, b = index[("L", w)], index[("R", w1)]
    block = _canon([labels[i] for i in range(len(points))])
    depth = 0
    while True:
        if block[a] != block[b]:
            return depth
        sig = [(block[i], frozenset(block[j] for j in range(len(points))
                                    if succ[i] >> j & 1))
               for i in range(len(points))]
        refined = _canon(sig)
        if len(set(refined)) == len(set(block)):
            return None
        block = refined
        depth += 1


def _canon(keys):
    ids = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


def distinguishing_formula(left: KripkeModel, w: str, right: KripkeModel, w1: str):
    """A basic modal formula true at (left, w) and false at (right, w1).

    Returns ``None`` when no such formula exists.  Otherwise the result has
    the least possible modal depth and, among those, is the least formula
    under :func:`bisimod.syntax.formula_key` (smallest size first).  Atoms
    that hold nowhere in the generated submodels are not used.
    """
    if w not in left.worlds:
        raise UnknownWorld(f"no world {w!r} in the left model")
    if w1 not in right.worlds:
        raise UnknownWorld(f"no world {w1!r} in the right model")
    depth = separation_depth(left, w, right, w1)
    if depth is None:
        return None
    points, index, succ, labels = _point_graph(left, w, right, w1)
    n = len(points)
    full = (1 << n) - 1
    a_bit, b_bit = 1 << index[("L", w)], 1 << index[("R", w1)]
    names = sorted(set().union(*labels))

    def box_mask(mask):
        return sum(1 << i for i in range(n) if succ[i] & ~mask == 0)

    # (denotation, depth) -> (formula, size); one canonical representative each
    classes = {}
    by_size = {}
    s = 0
    while True:
        s += 1
        fresh = {}
        if s == 1:
            cands = [(Atom(p), sum(1 << i for i in range(n) if p in labels[i]), 0)
                     for p in names]
            cands.append((FALSUM, 0, 0))
        else:
            cands = []
            for f, mask, d in by_size.get(s - 1, ()):
                if d < depth:
                    cands.append((Box(f), box_mask(mask), d + 1))
            for i in range(1, s - 1):
                for lf, lm, ld in by_size.get(i, ()):
                    for rf, rm, rd in by_size.get(s - 1 - i, ()):
                        cands.append((Implies(lf, rf), (~lm | rm) & full, max(ld, rd)))
        best = None
        for f, mask, d in cands:
            if mask & a_bit and not mask & b_bit:
                if best is None or formula_key(f) < formula_key(best):
                    best = f
            cls = (mask, d)
            if cls in classes:
                continue
            old = fresh.get(cls)
            if old is None or formula_key(f) < formula_key(old):
                fresh[cls] = f
        if best is not None:
            assert modal_depth(best) == depth
            return best
        for (mask, d), f in fresh.items():
            classes[(mask, d)] = f
        by_size[s] = [(f, mask, d) for (mask, d), f in fresh.items()]
