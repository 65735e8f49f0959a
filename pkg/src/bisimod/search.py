"""Exhaustive enumeration of small bi-models and countermodel search.

Structures are visited by (left size, right size) and then by an integer
code whose bits, most significant first, spell out the left relation,
the right relation, the left valuation, the right valuation and ``z``
(each matrix row-major, valuations atom by atom).  Left worlds are named
``w0, w1, ...`` and right worlds ``v0, v1, ...``.

A failed search means only that no countermodel exists within the
bounds; it is never evidence of validity beyond them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import BoundExceeded
from .models import LEFT, RIGHT, BiModel, KripkeModel, Point
from .semantics import Structures, batch_truth, bits_of

DEFAULT_CAP = 1 << 26
CHUNK = 1 << 16


@dataclass(frozen=True)
class SearchBounds:
    max_left_worlds: int
    max_right_worlds: int
    atoms: tuple = ()
    require_bimodel: bool = False
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.max_left_worlds < 1 or self.max_right_worlds < 1:
            raise ValueError("world bounds must be positive")
        object.__setattr__(self, "atoms", tuple(sorted(set(self.atoms))))

    def shapes(self):
        return [(nl, nr) for nl in range(1, self.max_left_worlds + 1)
                for nr in range(1, self.max_right_worlds + 1)]

    def code_bits(self, nl, nr):
        k = len(self.atoms)
        return nl * nl + nr * nr + k * (nl + nr) + nl * nr

    def size(self):
        """Number of structures enumerated before any filtering."""
        return sum(1 << self.code_bits(nl, nr) for nl, nr in self.shapes())

    def check(self):
        if self.size() > self.cap:
            raise BoundExceeded(
                f"{self.size()} structures to enumerate exceeds cap {self.cap}")


def left_names(n):
    return tuple(f"w{i}" for i in range(n))


def right_names(n):
    return tuple(f"v{i}" for i in range(n))


def _decode(bits, nl, nr, k, atom_names):
    n = bits.shape[0]
    cuts = np.cumsum([nl * nl, nr * nr, k * nl, k * nr])
    r, rp, v, vp, z = np.split(bits, cuts, axis=1)
    return Structures(r.reshape(n, nl, nl), rp.reshape(n, nr, nr),
                      z.reshape(n, nl, nr), v.reshape(n, k, nl),
                      vp.reshape(n, k, nr), atom_names)


def bimodel_mask(s: Structures) -> np.ndarray:
    """Which stacked structures are bi-models: ``z`` nonempty and obeying
    harmony, forth and back."""
    z, r, rp = s.z, s.left_rel, s.right_rel
    nonempty = z.any(axis=(1, 2))
    same = (s.left_val[:, :, :, None] == s.right_val[:, :, None, :]).all(axis=1)
    harmony = (~z | same).all(axis=(1, 2))
    # matched[n, k, j]: left k has a z-partner among right j's successors
    matched = (z[:, :, None, :] & rp[:, None, :, :]).any(axis=3)
    forth_bad = z[:, :, :, None] & r[:, :, None, :] & ~matched.transpose(0, 2, 1)[:, None, :, :]
    # covered[n, i, l]: right l has a z-partner among left i's successors
    covered = (r[:, :, :, None] & z[:, None, :, :]).any(axis=2)
    back_bad = z[:, :, :, None] & rp[:, None, :, :] & ~covered[:, :, None, :]
    return nonempty & harmony & ~forth_bad.any(axis=(1, 2, 3)) & ~back_bad.any(axis=(1, 2, 3))


def _subset(s: Structures, rows) -> Structures:
    return Structures(s.left_rel[rows], s.right_rel[rows], s.z[rows],
                      s.left_val[rows], s.right_val[rows], s.atoms)


def structure_blocks(b: SearchBounds):
    """Yield ``(codes, structures)`` in canonical order, unfiltered."""
    b.check()
    k = len(b.atoms)
    for nl, nr in b.shapes():
        nbits = b.code_bits(nl, nr)
        total = 1 << nbits
        for start in range(0, total, CHUNK):
            codes = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
            yield codes, _decode(bits_of(codes, nbits), nl, nr, k, b.atoms)


def _chunks(b: SearchBounds):
    for codes, s in structure_blocks(b):
        if b.require_bimodel:
            keep = bimodel_mask(s)
            if not keep.any():
                continue
            codes, s = codes[keep], _subset(s, keep)
        yield codes, s


def _to_bimodel(s: Structures, i: int) -> BiModel:
    nl, nr = s.shape
    lw, rw = left_names(nl), right_names(nr)

    def model(names, rel, val):
        return KripkeModel(
            names,
            [(names[a], names[c]) for a, c in zip(*np.nonzero(rel))],
            {atom: [names[j] for j in np.nonzero(val[a])[0]]
             for a, atom in enumerate(s.atoms)})

    z = [(lw[a], rw[c]) for a, c in zip(*np.nonzero(s.z[i]))]
    return BiModel(model(lw, s.left_rel[i], s.left_val[i]),
                   model(rw, s.right_rel[i], s.right_val[i]), z)


def enumerate_bimodels(b: SearchBounds) -> Iterator[BiModel]:
    """Every structure within ``b``, in canonical order.

    With ``require_bimodel`` only genuine bi-models are produced.
    """
    for codes, s in _chunks(b):
        for i in range(len(codes)):
            yield _to_bimodel(s, i)


def count_structures(b: SearchBounds) -> int:
    return sum(len(codes) for codes, _ in _chunks(b))


def _refutations(s, n, premises, conclusion):
    """Boolean (n, nL + nR) matrix of points satisfying every premise and
    falsifying the conclusion."""
    memo = {}
    nl, nr = s.shape
    ok_l = np.ones((n, nl), bool)
    ok_r = np.ones((n, nr), bool)
    for p in premises:
        pl, pr = batch_truth(p, s, memo)
        ok_l = ok_l & pl
        ok_r = ok_r & pr
    cl, cr = batch_truth(conclusion, s, memo)
    return np.concatenate([np.broadcast_to(ok_l & ~cl, (n, nl)),
                           np.broadcast_to(ok_r & ~cr, (n, nr))], axis=1)


def _point(s, bad_row):
    nl, nr = s.shape
    p = int(np.argmax(bad_row))
    return Point(LEFT, left_names(nl)[p]) if p < nl else Point(RIGHT, right_names(nr)[p - nl])


def _first_refutation(s, n, premises, conclusion, require_bimodel=False):
    bad = _refutations(s, n, premises, conclusion)
    rows = np.nonzero(bad.any(axis=1))[0]
    if require_bimodel and len(rows):
        rows = rows[bimodel_mask(_subset(s, rows))]
    if not len(rows):
        return None
    i = int(rows[0])
    return i, _point(s, bad[i])


def find_countermodel(premises, conclusion, b: SearchBounds) -> Optional[tuple]:
    """First pointed structure (canonical order) satisfying all premises
    and falsifying the conclusion, as ``(BiModel, Point)``; ``None`` if
    there is none within the bounds."""
    premises = list(premises)
    # evaluate first; the bi-model filter then only runs on refuting rows
    for codes, s in structure_blocks(b):
        hit = _first_refutation(s, len(codes), premises, conclusion, b.require_bimodel)
        if hit is not None:
            i, pt = hit
            return _to_bimodel(s, i), pt
    return None


class Universe:
    """All structures within some bounds, kept in memory for repeated
    refutation queries (one enumeration, many formulas)."""

    def __init__(self, b: SearchBounds):
        self.bounds = b
        self.blocks = list(_chunks(b))

    def __len__(self):
        return sum(len(codes) for codes, _ in self.blocks)

    def bimodels(self):
        for codes, s in self.blocks:
            for i in range(len(codes)):
                yield _to_bimodel(s, i)

    def countermodel(self, conclusion, premises=()):
        premises = list(premises)
        for codes, s in self.blocks:
            hit = _first_refutation(s, len(codes), premises, conclusion)
            if hit is not None:
                i, pt = hit
                return _to_bimodel(s, i), pt
        return None

    def valid(self, f):
        return self.countermodel(f) is None
