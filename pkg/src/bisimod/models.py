"""Kripke models, bi-models and their JSON file format.

A bi-model file is one JSON object::

    {"left":  {"worlds": [...], "rel": [[w, v], ...], "val": {"p": [w, ...]}},
     "right": {...same shape...},
     "z":     [[left_world, right_world], ...]}

World names are strings.  The same name may be used on both sides; the
two occurrences are distinct points (see :class:`Point`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from .errors import FormatError, UnknownFixture, UnknownWorld, ValidationError
from .syntax import ATOM_RE

LEFT = "left"
RIGHT = "right"
SIDES = (LEFT, RIGHT)


@dataclass(frozen=True)
class Point:
    side: str
    world: str

    def __str__(self):
        return f"{self.side}:{self.world}"


@dataclass(frozen=True, eq=True)
class KripkeModel:
    """A finite Kripke model ``(W, R, V)``.

    ``val`` maps atom names to the worlds where they hold; atoms that are
    missing (or map to the empty set) are false everywhere.
    """

    worlds: frozenset
    rel: frozenset = frozenset()
    val: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "worlds", frozenset(self.worlds))
        object.__setattr__(self, "rel", frozenset(tuple(e) for e in self.rel))
        val = {a: frozenset(ws) for a, ws in dict(self.val).items() if ws}
        object.__setattr__(self, "val", dict(sorted(val.items())))
        _validate_model(self, "")

    def __hash__(self):
        return hash((self.worlds, self.rel,
                     tuple((a, ws) for a, ws in self.val.items())))

    @cached_property
    def sorted_worlds(self):
        return tuple(sorted(self.worlds))

    @cached_property
    def successors(self):
        succ = {w: set() for w in self.worlds}
        for a, b in self.rel:
            succ[a].add(b)
        return {w: frozenset(s) for w, s in succ.items()}

    def holds(self, atom, world):
        return world in self.val.get(atom, ())

    def atoms_at(self, world):
        return frozenset(a for a, ws in self.val.items() if world in ws)

    def with_valuation(self, val):
        return KripkeModel(self.worlds, self.rel, val)


@dataclass(frozen=True)
class BiModel:
    """Two Kripke models joined by a correspondence relation ``z``.

    ``z`` may be empty or violate the bisimulation clauses; use
    :func:`bisimod.bisim.is_bisimulation` to find out.
    """

    left: KripkeModel
    right: KripkeModel
    z: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "z", frozenset(tuple(e) for e in self.z))
        for i, (a, b) in enumerate(sorted(self.z)):
            if a not in self.left.worlds:
                raise ValidationError(f"unknown left world {a!r}", f"z[{i}][0]")
            if b not in self.right.worlds:
                raise ValidationError(f"unknown right world {b!r}", f"z[{i}][1]")

    def model(self, side) -> KripkeModel:
        if side == LEFT:
            return self.left
        if side == RIGHT:
            return self.right
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")

    @cached_property
    def z_successors(self):
        succ = {w: set() for w in self.left.worlds}
        for a, b in self.z:
            succ[a].add(b)
        return {w: frozenset(s) for w, s in succ.items()}

    def points(self):
        """All points, left side first, worlds sorted."""
        return [Point(LEFT, w) for w in self.left.sorted_worlds] + \
               [Point(RIGHT, w) for w in self.right.sorted_worlds]

    def check_point(self, pt):
        if pt.side not in SIDES or pt.world not in self.model(pt.side).worlds:
            raise UnknownWorld(f"no world {pt.world!r} on the {pt.side} side")

    def with_z(self, z):
        return BiModel(self.left, self.right, z)

    def with_valuations(self, left_val, right_val):
        return BiModel(self.left.with_valuation(left_val),
                       self.right.with_valuation(right_val), self.z)

    def frame(self):
        """The underlying bi-frame: the same structure with empty valuations."""
        return self.with_valuations({}, {})

    @property
    def atom_names(self):
        return frozenset(self.left.val) | frozenset(self.right.val)


def _validate_model(m, path):
    prefix = f"{path}." if path else ""
    if not m.worlds:
        raise ValidationError("world set must be nonempty", f"{prefix}worlds")
    for w in m.worlds:
        if not isinstance(w, str):
            raise ValidationError(f"world names must be strings, got {w!r}",
                                  f"{prefix}worlds")
    for i, e in enumerate(sorted(m.rel)):
        if len(e) != 2:
            raise ValidationError("relation entries are pairs", f"{prefix}rel[{i}]")
        for j, w in enumerate(e):
            if w not in m.worlds:
                raise ValidationError(f"unknown world {w!r}", f"{prefix}rel[{i}][{j}]")
    for atom, ws in m.val.items():
        if not ATOM_RE.fullmatch(atom) or atom in ("true", "false"):
            raise ValidationError(f"bad atom name {atom!r}", f"{prefix}val")
        for w in ws:
            if w not in m.worlds:
                raise ValidationError(f"unknown world {w!r}", f"{prefix}val.{atom}")


# -- serialization ----------------------------------------------------------

_MODEL_KEYS = {"worlds", "rel", "val"}
_TOP_KEYS = {"left", "right", "z"}


def _expect(cond, message, path):
    if not cond:
        raise FormatError(f"{path}: {message}" if path else message)


def _read_pairs(raw, path):
    _expect(isinstance(raw, list), "expected a list of pairs", path)
    pairs = []
    for i, e in enumerate(raw):
        _expect(isinstance(e, list) and len(e) == 2
                and all(isinstance(x, str) for x in e),
                "expected a pair of world names", f"{path}[{i}]")
        pairs.append(tuple(e))
    return pairs


def _read_model(raw, side):
    _expect(isinstance(raw, dict), "expected an object", side)
    extra = set(raw) - _MODEL_KEYS
    _expect(not extra, f"unknown keys {sorted(extra)}", side)
    _expect("worlds" in raw, "missing 'worlds'", side)
    worlds = raw["worlds"]
    _expect(isinstance(worlds, list) and all(isinstance(w, str) for w in worlds),
            "expected a list of world names", f"{side}.worlds")
    if not worlds:
        raise ValidationError("world set must be nonempty", f"{side}.worlds")
    world_set = set(worlds)
    rel = _read_pairs(raw.get("rel", []), f"{side}.rel")
    for i, e in enumerate(rel):
        for j, w in enumerate(e):
            if w not in world_set:
                raise ValidationError(f"unknown world {w!r}", f"{side}.rel[{i}][{j}]")
    val_raw = raw.get("val", {})
    _expect(isinstance(val_raw, dict), "expected an object", f"{side}.val")
    val = {}
    for atom, ws in val_raw.items():
        _expect(isinstance(ws, list) and all(isinstance(w, str) for w in ws),
                "expected a list of world names", f"{side}.val.{atom}")
        for i, w in enumerate(ws):
            if w not in world_set:
                raise ValidationError(f"unknown world {w!r}", f"{side}.val.{atom}[{i}]")
        val[atom] = ws
    try:
        return KripkeModel(worlds, rel, val)
    except ValidationError as exc:
        raise ValidationError(str(exc).split(": ", 1)[-1], f"{side}.{exc.path}") from None


def bimodel_from_dict(doc) -> BiModel:
    _expect(isinstance(doc, dict), "top level must be an object", "")
    extra = set(doc) - _TOP_KEYS
    _expect(not extra, f"unknown keys {sorted(extra)}", "")
    for key in ("left", "right"):
        _expect(key in doc, f"missing {key!r}", "")
    left = _read_model(doc["left"], LEFT)
    right = _read_model(doc["right"], RIGHT)
    z = _read_pairs(doc.get("z", []), "z")
    return BiModel(left, right, z)


def load_bimodel(document) -> BiModel:
    """Parse and validate a bi-model from UTF-8 bytes (or text)."""
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return bimodel_from_dict(doc)


def _model_dict(m):
    return {
        "worlds": sorted(m.worlds),
        "rel": sorted([list(e) for e in m.rel]),
        "val": {a: sorted(ws) for a, ws in sorted(m.val.items())},
    }


def bimodel_to_dict(m: BiModel) -> dict:
    return {"left": _model_dict(m.left), "right": _model_dict(m.right),
            "z": sorted([list(e) for e in m.z])}


def save_bimodel(m: BiModel) -> bytes:
    """Canonical serialization: every array sorted, keys sorted."""
    text = json.dumps(bimodel_to_dict(m), sort_keys=True, indent=2)
    return (text + "\n").encode("utf-8")


# -- fixtures ---------------------------------------------------------------

def _sym(*pairs):
    out = set()
    for a, b in pairs:
        out.add((a, b))
        out.add((b, a))
    return out


def _loops(*ws):
    return {(w, w) for w in ws}


def _example_35():
    left = KripkeModel({"w", "v", "u"},
                       _loops("w", "v", "u") | _sym(("w", "v"), ("w", "u"), ("u", "v")),
                       {"p": {"w", "u"}, "q": {"v"}})
    right = KripkeModel({"w1", "v1"}, _loops("w1", "v1") | _sym(("w1", "v1")),
                        {"p": {"w1"}, "q": {"v1"}})
    return BiModel(left, right, {("w", "w1"), ("u", "w1"), ("v", "v1")})


def _expressivity(z):
    left = KripkeModel({"w"}, (), {"p": {"w"}})
    right = KripkeModel({"v"}, (), {"p": {"v"}})
    return BiModel(left, right, z)


def _undef_harmony(z):
    left = KripkeModel({"w"}, (), {"p": {"w"}})
    right = KripkeModel({"w1", "v1"}, (), {"p": {"w1"}})
    return BiModel(left, right, z)


def _undef_frame(z):
    left = KripkeModel({"w"}, _loops("w"))
    right = KripkeModel({"w1", "v1"}, _sym(("w1", "v1")))
    return BiModel(left, right, z)


_FIXTURES = {
    "example-3.5": _example_35,
    "expressivity-1": lambda: _expressivity(()),
    "expressivity-2": lambda: _expressivity({("w", "v")}),
    "undef-harmony-1": lambda: _undef_harmony({("w", "w1")}),
    "undef-harmony-2": lambda: _undef_harmony({("w", "v1")}),
    "undef-frame-1": lambda: _undef_frame({("w", "w1"), ("w", "v1")}),
    "undef-frame-2": lambda: _undef_frame({("w", "w1")}),
    "znovacia": lambda: BiModel(KripkeModel({"w", "v"}), KripkeModel({"w1", "v1"}),
                                {("w", "w1")}),
    "znovacia-sub": lambda: BiModel(KripkeModel({"v"}), KripkeModel({"v1"}), ()),
}

FIXTURE_NAMES = tuple(_FIXTURES)


def fixture(name: str) -> BiModel:
    """Return one of the named example structures.

    Primed worlds of the right-hand model carry a ``1`` suffix (``w1`` for
    w', ``v1`` for v').
    """
    try:
        return _FIXTURES[name]()
    except KeyError:
        raise UnknownFixture(
            f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}") from None
