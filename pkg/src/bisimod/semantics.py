"""Two-sided truth, model validity and frame validity.

A point is a world together with the side it lives on.  ``[b]A`` at a
left world quantifies over its ``z``-successors on the right; at a right
world it is always true.  Boxes use the relation of the point's own side.

Three evaluators live here and are tested against each other:

* :func:`satisfies` follows the truth clauses directly, one point at a time;
* :func:`truth_sets` computes the extension of every subformula once;
* :func:`batch_truth` evaluates over a stack of structures with numpy and
  backs frame validity and the bounded search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BoundExceeded
from .models import LEFT, RIGHT, BiModel, Point
from .syntax import Atom, BisBox, Box, Falsum, Formula, Implies, atoms

DEFAULT_FRAME_BOUND = 24
CHUNK = 1 << 15


def satisfies(m: BiModel, pt: Point, f: Formula) -> bool:
    m.check_point(pt)
    return _sat(m, pt.side, pt.world, f)


def _sat(m, side, w, f):
    if isinstance(f, Atom):
        return m.model(side).holds(f.name, w)
    if isinstance(f, Falsum):
        return False
    if isinstance(f, Implies):
        return not _sat(m, side, w, f.lhs) or _sat(m, side, w, f.rhs)
    if isinstance(f, Box):
        return all(_sat(m, side, v, f.body) for v in m.model(side).successors[w])
    if isinstance(f, BisBox):
        if side == RIGHT:
            return True
        return all(_sat(m, RIGHT, v, f.body) for v in m.z_successors[w])
    raise TypeError(f"not a formula: {f!r}")


def truth_sets(m: BiModel, f: Formula, memo=None):
    """Return ``(left_worlds, right_worlds)`` where ``f`` holds."""
    if memo is None:
        memo = {}
    hit = memo.get(f)
    if hit is not None:
        return hit
    lw, rw = m.left.worlds, m.right.worlds
    if isinstance(f, Atom):
        out = (m.left.val.get(f.name, frozenset()), m.right.val.get(f.name, frozenset()))
    elif isinstance(f, Falsum):
        out = (frozenset(), frozenset())
    elif isinstance(f, Implies):
        a, b = truth_sets(m, f.lhs, memo), truth_sets(m, f.rhs, memo)
        out = ((lw - a[0]) | b[0], (rw - a[1]) | b[1])
    elif isinstance(f, Box):
        a = truth_sets(m, f.body, memo)
        ls, rs = m.left.successors, m.right.successors
        out = (frozenset(w for w in lw if ls[w] <= a[0]),
               frozenset(w for w in rw if rs[w] <= a[1]))
    elif isinstance(f, BisBox):
        a = truth_sets(m, f.body, memo)
        zs = m.z_successors
        out = (frozenset(w for w in lw if zs[w] <= a[1]), rw)
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


@dataclass(frozen=True)
class Report:
    """Verdict of a validity check.

    On failure ``point`` names the first refuting point (left side first,
    worlds sorted) and, for frame validity, ``valuation`` the refuting
    valuation as ``{"left": {atom: [worlds]}, "right": {...}}``.
    """

    verdict: bool
    point: Optional[Point] = None
    valuation: Optional[dict] = None

    def __bool__(self):
        return self.verdict

    def to_dict(self):
        out = {"verdict": self.verdict}
        if self.point is not None:
            out["witness"] = {"side": self.point.side, "world": self.point.world}
            if self.valuation is not None:
                out["witness"]["valuation"] = self.valuation
        return out


def valid_in_model(m: BiModel, f: Formula) -> Report:
    left, right = truth_sets(m, f)
    for pt in m.points():
        if pt.world not in (left if pt.side == LEFT else right):
            return Report(False, pt)
    return Report(True)


# -- batched evaluation -----------------------------------------------------

@dataclass
class Structures:
    """A stack of bi-models of one shape, as boolean arrays.

    Leading axis is the stack (length N, or 1 to broadcast).  Shapes:
    ``left_rel`` (N, nL, nL), ``right_rel`` (N, nR, nR), ``z`` (N, nL, nR),
    ``left_val`` (N, k, nL), ``right_val`` (N, k, nR) with the ``k`` axis
    indexed by ``atoms``.
    """

    left_rel: np.ndarray
    right_rel: np.ndarray
    z: np.ndarray
    left_val: np.ndarray
    right_val: np.ndarray
    atoms: tuple

    @property
    def shape(self):
        return self.left_rel.shape[1], self.right_rel.shape[1]

    def __len__(self):
        return max(a.shape[0] for a in (self.left_rel, self.right_rel, self.z,
                                        self.left_val, self.right_val))


def batch_truth(f: Formula, s: Structures, memo=None):
    """Extensions of ``f`` over every structure in ``s``.

    Returns arrays of shape (N, nL) and (N, nR); entries may be broadcast
    views when ``f`` does not depend on the stacked axes.
    """
    if memo is None:
        memo = {}
    hit = memo.get(f)
    if hit is not None:
        return hit
    nl, nr = s.shape
    if isinstance(f, Atom):
        if f.name in s.atoms:
            k = s.atoms.index(f.name)
            out = (s.left_val[:, k, :], s.right_val[:, k, :])
        else:
            out = (np.zeros((1, nl), bool), np.zeros((1, nr), bool))
    elif isinstance(f, Falsum):
        out = (np.zeros((1, nl), bool), np.zeros((1, nr), bool))
    elif isinstance(f, Implies):
        a, b = batch_truth(f.lhs, s, memo), batch_truth(f.rhs, s, memo)
        out = (~a[0] | b[0], ~a[1] | b[1])
    elif isinstance(f, Box):
        a = batch_truth(f.body, s, memo)
        out = (np.all(~s.left_rel | a[0][:, None, :], axis=2),
               np.all(~s.right_rel | a[1][:, None, :], axis=2))
    elif isinstance(f, BisBox):
        a = batch_truth(f.body, s, memo)
        out = (np.all(~s.z | a[1][:, None, :], axis=2), np.ones((1, nr), bool))
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def bits_of(codes, nbits):
    """Bit matrix of ``codes``; column 0 is the most significant bit."""
    shifts = np.arange(nbits - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(bool)


def relation_array(worlds_a, worlds_b, pairs):
    ia = {w: i for i, w in enumerate(worlds_a)}
    ib = {w: i for i, w in enumerate(worlds_b)}
    out = np.zeros((len(worlds_a), len(worlds_b)), bool)
    for a, b in pairs:
        out[ia[a], ib[b]] = True
    return out


def valuation_array(worlds, val, atom_names):
    out = np.zeros((len(atom_names), len(worlds)), bool)
    for k, a in enumerate(atom_names):
        for i, w in enumerate(worlds):
            out[k, i] = w in val.get(a, ())
    return out


def structures_of(m: BiModel, atom_names=None) -> Structures:
    """A single bi-model as a one-element stack."""
    if atom_names is None:
        atom_names = tuple(sorted(m.atom_names))
    lw, rw = m.left.sorted_worlds, m.right.sorted_worlds
    return Structures(
        relation_array(lw, lw, m.left.rel)[None],
        relation_array(rw, rw, m.right.rel)[None],
        relation_array(lw, rw, m.z)[None],
        valuation_array(lw, m.left.val, atom_names)[None],
        valuation_array(rw, m.right.val, atom_names)[None],
        tuple(atom_names))


def first_failure(left, right, n):
    """Index of the first stacked structure where some point fails, and the
    index of that point in left-then-right order; ``None`` if none fails."""
    both = np.concatenate([np.broadcast_to(left, (n, left.shape[1])),
                           np.broadcast_to(right, (n, right.shape[1]))], axis=1)
    bad = ~both.all(axis=1)
    if not bad.any():
        return None
    i = int(np.argmax(bad))
    return i, int(np.argmin(both[i]))


def valid_in_frame(m: BiModel, f: Formula, bound: int = DEFAULT_FRAME_BOUND) -> Report:
    """Validity of ``f`` under every valuation of the frame underlying ``m``.

    Only the atoms of ``f`` are varied.  Valuations are visited in a fixed
    order (atoms sorted, left worlds before right worlds, most significant
    bit first) and the first refuting one is reported.
    """
    names = tuple(sorted(atoms(f)))
    lw, rw = m.left.sorted_worlds, m.right.sorted_worlds
    nl, nr, k = len(lw), len(rw), len(names)
    nbits = k * (nl + nr)
    if nbits > bound:
        raise BoundExceeded(
            f"{k} atoms x {nl + nr} worlds = {nbits} valuation bits exceeds bound {bound}")
    frame = structures_of(m.frame(), ())
    total = 1 << nbits
    for start in range(0, total, CHUNK):
        codes = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
        bits = bits_of(codes, nbits)
        s = Structures(frame.left_rel, frame.right_rel, frame.z,
                       bits[:, :k * nl].reshape(len(codes), k, nl),
                       bits[:, k * nl:].reshape(len(codes), k, nr), names)
        left, right = batch_truth(f, s)
        hit = first_failure(left, right, len(codes))
        if hit is None:
            continue
        i, p = hit
        row = bits[i]
        valuation = {
            LEFT: {a: [w for j, w in enumerate(lw) if row[a_i * nl + j]]
                   for a_i, a in enumerate(names)},
            RIGHT: {a: [w for j, w in enumerate(rw) if row[k * nl + a_i * nr + j]]
                    for a_i, a in enumerate(names)},
        }
        pt = Point(LEFT, lw[p]) if p < nl else Point(RIGHT, rw[p - nl])
        return Report(False, pt, valuation)
    return Report(True)
