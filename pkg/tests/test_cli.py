import json
import subprocess
import sys

import pytest

from bisimod import calculus, semantics
from bisimod.bisim import check_conditions, distinguishing_formula, max_bisimulation
from bisimod.cli import run
from bisimod.models import LEFT, RIGHT, Point, fixture, load_bimodel, save_bimodel
from bisimod.search import SearchBounds, find_countermodel
from bisimod.syntax import parse, render


@pytest.fixture
def files(tmp_path):
    out = {}
    for name in ("example-3.5", "expressivity-2", "undef-frame-2", "undef-harmony-2"):
        path = tmp_path / f"{name}.json"
        path.write_bytes(save_bimodel(fixture(name)))
        out[name] = str(path)
    return out


def cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def cli_json(capsys, *argv):
    code, out, _ = cli(capsys, *argv, "--json")
    return code, json.loads(out)


def test_valid_example(files, capsys):
    code, out, _ = cli(capsys, "valid", "-m", files["example-3.5"], "p -> [b]p")
    assert code == 0 and out.strip() == "valid"


def test_check_right_point(files, capsys):
    code, out, _ = cli(capsys, "check", "-m", files["example-3.5"], "-s", "right", "-w", "w1",
                       "[b]false")
    assert code == 0 and out.startswith("true")


def test_gen_nts_zero(capsys):
    code, out, _ = cli(capsys, "proof", "gen-nts", "0")
    assert code == 0
    p = calculus.parse_proof(out)
    assert [ln.rule for ln in p.lines] == ["NTS"]


@pytest.mark.parametrize("name, side, world, text", [
    ("example-3.5", "left", "w", "[]<b><>p"),
    ("example-3.5", "right", "w1", "~[]<b><>p"),
    ("example-3.5", "left", "v", "p"),
    ("expressivity-2", "left", "w", "[b]false"),
    ("undef-frame-2", "left", "w", "<b><>true"),
])
def test_check_matches_library(files, capsys, name, side, world, text):
    expected = semantics.satisfies(fixture(name), Point(side, world), parse(text))
    code, doc = cli_json(capsys, "check", "-m", files[name], "-s", side, "-w", world, text)
    assert doc["verdict"] == expected
    assert doc["point"] == {"side": side, "world": world}
    assert code == (0 if expected else 1)


@pytest.mark.parametrize("name, text, frame", [
    ("example-3.5", "p -> [b]p", False),
    ("expressivity-2", "[b]false", False),
    ("example-3.5", "[b]false | []<b>[b]false", True),
    ("undef-frame-2", "<b>p & <>[b]q -> <b>(p & <>q)", True),
    ("example-3.5", "p -> [b]p", True),
])
def test_valid_matches_library(files, capsys, name, text, frame):
    m, f = fixture(name), parse(text)
    report = semantics.valid_in_frame(m, f) if frame else semantics.valid_in_model(m, f)
    args = ["valid", "-m", files[name], text] + (["--frame"] if frame else [])
    code, doc = cli_json(capsys, *args)
    assert doc == report.to_dict()
    assert code == (0 if report.verdict else 1)


def test_valid_frame_bound(files, capsys):
    code, _, err = cli(capsys, "valid", "-m", files["example-3.5"], "--frame", "--bound", "4",
                       "p & q")
    assert code == 3 and "bound" in err


@pytest.mark.parametrize("name", ["example-3.5", "undef-frame-2", "undef-harmony-2"])
def test_bisim_check_matches_library(files, capsys, name):
    report = check_conditions(fixture(name))
    code, doc = cli_json(capsys, "bisim", "check", "-m", files[name])
    assert doc == report.to_dict()
    assert code == (0 if report.is_bisimulation else 1)


def test_bisim_check_text(files, capsys):
    code, out, _ = cli(capsys, "bisim", "check", "-m", files["undef-frame-2"])
    assert code == 1
    assert "forth: (w, w1) with w R w unmatched" in out
    assert "back: (w, w1) with w1 R' v1 unmatched" in out


def test_bisim_max(files, capsys):
    m = fixture("example-3.5")
    code, doc = cli_json(capsys, "bisim", "max", "-m", files["example-3.5"])
    assert code == 0
    assert doc["z"] == sorted(list(p) for p in max_bisimulation(m.left, m.right))
    code, doc = cli_json(capsys, "bisim", "max", "-m", files["undef-harmony-2"])
    # w carries p, v1 does not, w1 does: the greatest bisimulation is {(w, w1)}
    assert doc == {"verdict": True, "z": [["w", "w1"]]}


def test_bisim_distinguish(files, capsys):
    m = fixture("example-3.5")
    f = distinguishing_formula(m.left, "w", m.right, "v1")
    code, doc = cli_json(capsys, "bisim", "distinguish", "-m", files["example-3.5"],
                         "-w", "w", "-v", "v1")
    assert code == 1 and doc == {"verdict": False, "formula": render(f)}
    code, doc = cli_json(capsys, "bisim", "distinguish", "-m", files["example-3.5"],
                         "-w", "u", "-v", "w1")
    assert code == 0 and doc == {"verdict": True, "formula": None}


def test_distinguish_unknown_world(files, capsys):
    code, _, err = cli(capsys, "bisim", "distinguish", "-m", files["example-3.5"],
                       "-w", "zz", "-v", "w1")
    assert code == 2 and "zz" in err


def test_proof_check(tmp_path, capsys):
    good = tmp_path / "good.prf"
    good.write_text(calculus.gen_harmony_proof(parse("[]p")).format())
    code, doc = cli_json(capsys, "proof", "check", "-p", str(good), "-g", "[]p -> [b][]p")
    assert code == 0 and doc == {"verdict": True, "diagnostics": []}
    code, doc = cli_json(capsys, "proof", "check", "-p", str(good), "-g", "p")
    assert code == 1 and doc["diagnostics"][0]["kind"] == "GoalMismatch"


def test_proof_check_assumptions(tmp_path, capsys):
    path = tmp_path / "asm.prf"
    path.write_text("1. p ; ASM\n2. p -> [b]p ; HARM\n3. [b]p ; MP 2 1\n")
    code, _, _ = cli(capsys, "proof", "check", "-p", str(path), "--asm", "p")
    assert code == 0
    code, out, _ = cli(capsys, "proof", "check", "-p", str(path))
    assert code == 1 and "BadReference" in out


def test_proof_check_format_error(tmp_path, capsys):
    path = tmp_path / "bad.prf"
    path.write_text("1. p -> p ; NOPE\n")
    code, _, err = cli(capsys, "proof", "check", "-p", str(path))
    assert code == 2 and "NOPE" in err


def test_gen_harmony(capsys):
    code, out, _ = cli(capsys, "proof", "gen-harmony", "<>p")
    assert code == 0
    p = calculus.parse_proof(out)
    assert p == calculus.gen_harmony_proof(parse("<>p"))
    code, doc = cli_json(capsys, "proof", "gen-harmony", "p", "--negative")
    assert parse(doc["goal"]) == parse("~p -> [b]~p")
    assert doc["lines"][-1]["justification"] == "HARM"


def test_gen_harmony_not_lsquare(capsys):
    code, _, err = cli(capsys, "proof", "gen-harmony", "[b]p")
    assert code == 2 and "[b]" in err


def test_gen_nts_bound(capsys):
    code, _, _ = cli(capsys, "proof", "gen-nts", "65")
    assert code == 3
    code, doc = cli_json(capsys, "proof", "gen-nts", "2")
    assert code == 0 and parse(doc["goal"]) == calculus.nts_tower(2)
    assert len(doc["lines"]) == 75


def test_countermodel_found(capsys):
    lib = find_countermodel([], parse("[b]false"), SearchBounds(1, 1, (), True))
    code, doc = cli_json(capsys, "countermodel", "[b]false", "--max-left", "1",
                         "--max-right", "1", "--bimodel")
    assert code == 1
    m, pt = lib
    assert doc["witness"]["side"] == pt.side and doc["witness"]["world"] == pt.world
    assert load_bimodel(json.dumps(doc["witness"]["model"])) == m


def test_countermodel_none(capsys):
    code, doc = cli_json(capsys, "countermodel", "p", "--premise", "p", "--max-left", "2",
                         "--max-right", "2")
    assert code == 0 and doc == {"verdict": True, "witness": None}


def test_countermodel_cap_env(capsys, monkeypatch):
    monkeypatch.setenv("BISIMOD_MAX_ENUM", "100")
    code, _, err = cli(capsys, "countermodel", "p", "--max-left", "2", "--max-right", "2")
    assert code == 3
    monkeypatch.setenv("BISIMOD_MAX_ENUM", "lots")
    code, _, _ = cli(capsys, "countermodel", "p", "--max-left", "1", "--max-right", "1")
    assert code == 2


def test_fixture_output(tmp_path, capsys):
    path = tmp_path / "f.json"
    code, _, _ = cli(capsys, "fixture", "znovacia", "-o", str(path))
    assert code == 0 and load_bimodel(path.read_bytes()) == fixture("znovacia")
    code, out, _ = cli(capsys, "fixture", "example-3.5")
    assert out.encode() == save_bimodel(fixture("example-3.5"))


def test_parse_subcommand(capsys):
    code, out, _ = cli(capsys, "parse", "<b>p")
    assert code == 0 and out.strip() == "<b>p"
    code, out, _ = cli(capsys, "parse", "<b>p", "--core")
    assert out.strip() == "[b](p -> false) -> false"
    code, doc = cli_json(capsys, "parse", "(p & <>q) -> p")
    assert doc["atoms"] == ["p", "q"] and doc["modal_depth"] == 1 and doc["lsquare"]


def test_usage_and_format_errors(tmp_path, capsys):
    assert cli(capsys, "parse", "p &")[0] == 2
    assert cli(capsys, "frobnicate")[0] == 2
    assert cli(capsys, "check", "-m", "nope.json", "-s", "left", "-w", "w", "p")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"left": {"worlds": []}, "right": {"worlds": ["v"]}}')
    code, _, err = cli(capsys, "valid", "-m", str(bad), "p")
    assert code == 2 and "left.worlds" in err
    assert cli(capsys, "fixture", "nope")[0] == 2
    assert cli(capsys, "check", "-m", str(bad), "-s", "middle", "-w", "w", "p")[0] == 2


def test_module_entry_point(tmp_path):
    path = tmp_path / "ex.json"
    path.write_bytes(save_bimodel(fixture("example-3.5")))
    done = subprocess.run([sys.executable, "-m", "bisimod", "valid", "-m", str(path),
                           "p -> [b]p", "--json"], capture_output=True, text=True)
    assert done.returncode == 0
    assert json.loads(done.stdout) == {"verdict": True}
