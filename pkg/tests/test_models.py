import json

import pytest
from hypothesis import given, settings, strategies as st

from bisimod.bisim import is_bisimulation
from bisimod.errors import FormatError, UnknownFixture, UnknownWorld, ValidationError
from bisimod.models import (FIXTURE_NAMES, LEFT, RIGHT, BiModel, KripkeModel, Point,
                            bimodel_from_dict, bimodel_to_dict, fixture,
                            load_bimodel, save_bimodel)

import oracles


def doc(**over):
    base = {"left": {"worlds": ["w"], "rel": [], "val": {}},
            "right": {"worlds": ["v"], "rel": [], "val": {}},
            "z": []}
    base.update(over)
    return json.dumps(base).encode()


def test_example_35_shape():
    m = load_bimodel(save_bimodel(fixture("example-3.5")))
    assert len(m.left.worlds) == 3 and len(m.right.worlds) == 2 and len(m.z) == 3


def test_example_35_contents():
    m = fixture("example-3.5")
    assert m.left.val == {"p": {"w", "u"}, "q": {"v"}}
    assert m.right.val == {"p": {"w1"}, "q": {"v1"}}
    assert m.z == {("w", "w1"), ("u", "w1"), ("v", "v1")}
    # reflexive and symmetric on both sides, complete on the left
    assert m.left.rel == {(a, b) for a in "wvu" for b in "wvu"}
    assert m.right.rel == {(a, b) for a in ("w1", "v1") for b in ("w1", "v1")}


def test_example_35_is_a_bimodel():
    assert is_bisimulation(fixture("example-3.5"))


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixtures_round_trip(name):
    m = fixture(name)
    assert load_bimodel(save_bimodel(m)) == m


def test_fixture_catalogue():
    assert set(FIXTURE_NAMES) == {
        "example-3.5", "expressivity-1", "expressivity-2", "undef-harmony-1",
        "undef-harmony-2", "undef-frame-1", "undef-frame-2", "znovacia", "znovacia-sub"}


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        fixture("nope")


def test_fixture_details():
    e1, e2 = fixture("expressivity-1"), fixture("expressivity-2")
    assert e1.left == e2.left and e1.right == e2.right
    assert e1.z == frozenset() and e2.z == {("w", "v")}
    h1, h2 = fixture("undef-harmony-1"), fixture("undef-harmony-2")
    assert h1.right.val == {"p": {"w1"}} and h1.z == {("w", "w1")} and h2.z == {("w", "v1")}
    f1, f2 = fixture("undef-frame-1"), fixture("undef-frame-2")
    assert f1.left.rel == {("w", "w")}
    assert f1.right.rel == {("w1", "v1"), ("v1", "w1")}
    assert f1.z == {("w", "w1"), ("w", "v1")} and f2.z == {("w", "w1")}
    sub = fixture("znovacia-sub")
    assert sub.left.worlds == {"v"} and sub.right.worlds == {"v1"} and not sub.z
    big = fixture("znovacia")
    assert sub.left.worlds <= big.left.worlds and sub.right.worlds <= big.right.worlds
    assert big.z


def test_save_is_canonical():
    a = BiModel(KripkeModel(["b", "a"], [("b", "a"), ("a", "b")], {"q": ["b"], "p": ["b", "a"]}),
                KripkeModel(["y", "x"]), [("b", "y"), ("a", "x")])
    b = BiModel(KripkeModel(["a", "b"], [("a", "b"), ("b", "a")], {"p": ["a", "b"], "q": ["b"]}),
                KripkeModel(["x", "y"]), [("a", "x"), ("b", "y")])
    assert a == b
    assert save_bimodel(a) == save_bimodel(b)
    out = json.loads(save_bimodel(a))
    assert out["left"]["worlds"] == ["a", "b"]
    assert out["left"]["rel"] == [["a", "b"], ["b", "a"]]
    assert list(out["left"]["val"]) == ["p", "q"]
    assert out["z"] == [["a", "x"], ["b", "y"]]


def test_empty_z_round_trips():
    m = fixture("expressivity-1")
    again = load_bimodel(save_bimodel(m))
    assert again.z == frozenset()
    assert json.loads(save_bimodel(m))["z"] == []


def test_empty_valuation_entries_are_dropped():
    m = KripkeModel(["w"], [], {"p": [], "q": ["w"]})
    assert m == KripkeModel(["w"], [], {"q": ["w"]})
    assert m.holds("q", "w") and not m.holds("p", "w") and not m.holds("zz", "w")


def test_optional_keys_default_to_empty():
    m = load_bimodel(b'{"left": {"worlds": ["w"]}, "right": {"worlds": ["v"]}}')
    assert not m.z and not m.left.rel and not m.right.val


def test_load_accepts_text():
    assert load_bimodel(doc().decode()) == load_bimodel(doc())


@pytest.mark.parametrize("document, path", [
    (doc(z=[["w", "nope"]]), "z[0][1]"),
    (doc(z=[["nope", "v"]]), "z[0][0]"),
    (doc(left={"worlds": [], "rel": [], "val": {}}), "left.worlds"),
    (doc(left={"worlds": ["w"], "rel": [["w", "x"]], "val": {}}), "left.rel[0][1]"),
    (doc(right={"worlds": ["v"], "rel": [], "val": {"p": ["w"]}}), "right.val.p[0]"),
    (doc(right={"worlds": ["v"], "rel": [], "val": {"Bad": ["v"]}}), "right.val"),
])
def test_validation_errors(document, path):
    with pytest.raises(ValidationError) as exc:
        load_bimodel(document)
    assert exc.value.path == path


@pytest.mark.parametrize("document", [
    b"{not json",
    b"\xff\xfe",
    b"[]",
    doc(extra=1),
    json.dumps({"left": {"worlds": ["w"], "colour": 1}, "right": {"worlds": ["v"]}}).encode(),
    json.dumps({"left": {"worlds": ["w"]}}).encode(),
    doc(z=[["w"]]),
    doc(z="w v"),
    json.dumps({"left": {"worlds": [1]}, "right": {"worlds": ["v"]}}).encode(),
])
def test_format_errors(document):
    with pytest.raises(FormatError):
        load_bimodel(document)


def test_bimodel_rejects_bad_z_directly():
    with pytest.raises(ValidationError):
        BiModel(KripkeModel(["w"]), KripkeModel(["v"]), [("v", "w")])


def test_points_and_check_point():
    m = fixture("example-3.5")
    assert m.points() == [Point(LEFT, "u"), Point(LEFT, "v"), Point(LEFT, "w"),
                          Point(RIGHT, "v1"), Point(RIGHT, "w1")]
    with pytest.raises(UnknownWorld):
        m.check_point(Point(RIGHT, "w"))
    with pytest.raises(UnknownWorld):
        m.check_point(Point("middle", "w"))


def test_same_name_on_both_sides():
    m = BiModel(KripkeModel(["w"], [], {"p": ["w"]}), KripkeModel(["w"]), [("w", "w")])
    assert m.left.holds("p", "w") and not m.right.holds("p", "w")


def test_frame_drops_valuations():
    f = fixture("example-3.5").frame()
    assert not f.left.val and not f.right.val and f.z == fixture("example-3.5").z


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3))
def test_random_round_trip(seed, nl, nr):
    m = oracles.random_bimodel(oracles.rng(seed), nl, nr, ("p", "q"))
    data = save_bimodel(m)
    assert load_bimodel(data) == m
    assert save_bimodel(load_bimodel(data)) == data
    assert bimodel_from_dict(bimodel_to_dict(m)) == m
