import json
import subprocess
import sys

import pytest

from corrmod.cli import main, render_ascii
from corrmod.cmodule import GridCModule
from corrmod.decompose import multiplicities
from corrmod.levelset import PLComplex
from corrmod.slice2d import GridModule2D

from conftest import fixture_json

FIXTURES = ["fig4.json", "circle.json", "rectangle2d.json", "interval_closed.json"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def fixture(fixtures_dir, name):
    return str(fixtures_dir.joinpath(name))


def test_decompose_ascii_interval(capsys, fixtures_dir):
    code, out, _ = run(capsys, "decompose", "--in", fixture(fixtures_dir, "interval_closed.json"),
                       "--ascii")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 1 and "|-" in lines[0] and "-|" in lines[0]


def test_levelset_fig4_json(capsys, fixtures_dir):
    code, out, _ = run(capsys, "levelset", "--complex", fixture(fixtures_dir, "fig4.json"),
                       "--degree", "0")
    assert code == 0
    data = json.loads(out)
    got = sorted((b["type"], b["birth"]["value"], b["birth"].get("dec"),
                  b["death"]["value"], b["death"].get("dec"), b["mult"]) for b in data["bars"])
    assert got == sorted([("[]", "-2", "-", "2", "+", 1), ("[>", "-2", "-", "-1", "-", 1),
                          ("<]", "1", "+", "2", "+", 1), ("<>", "-1", "+", "1", "-", 1)])


def test_levelset_ascii_has_all_glyphs(capsys, fixtures_dir):
    code, out, _ = run(capsys, "levelset", "--complex", fixture(fixtures_dir, "fig4.json"),
                       "--ascii")
    assert code == 0
    for a, b in (("|", "|"), ("|", ">"), ("<", "|"), ("<", ">")):
        assert any(f"{a}-" in line and f"-{b}" in line for line in out.splitlines())


def test_bottleneck_self_is_zero(capsys, tmp_path, fixtures_dir):
    run(capsys, "levelset", "--complex", fixture(fixtures_dir, "fig4.json"),
        "--out", str(tmp_path / "d.json"))
    code, out, _ = run(capsys, "bottleneck", "--a", str(tmp_path / "d.json"),
                       "--b", str(tmp_path / "d.json"))
    assert code == 0 and out.strip() == "0"


def test_bottleneck_against_empty(capsys, tmp_path):
    a = write(tmp_path, "a.json", [{"type": "[]", "birth": {"value": "0"},
                                    "death": {"value": "2"}}])
    b = write(tmp_path, "b.json", [])
    code, out, _ = run(capsys, "bottleneck", "--a", a, "--b", b, "--out", str(tmp_path / "c.json"))
    assert code == 0 and out.strip() == "0.5"
    assert json.loads((tmp_path / "c.json").read_text())["distance"] == "0.5"


def test_undecorated_output(capsys, fixtures_dir):
    code, out, _ = run(capsys, "levelset", "--complex", fixture(fixtures_dir, "fig4.json"),
                       "--undecorated")
    assert code == 0
    assert len(json.loads(out)["bars"]) == 4


def test_sublevel_and_superlevel(capsys, fixtures_dir):
    for cmd in ("sublevel", "superlevel"):
        code, out, _ = run(capsys, cmd, "--complex", fixture(fixtures_dir, "circle.json"),
                           "--degree", "1")
        assert code == 0
        assert len(json.loads(out)["bars"]) == 1


def test_mv_circle(capsys, fixtures_dir):
    code, out, _ = run(capsys, "mv", "--complex", fixture(fixtures_dir, "circle.json"))
    assert code == 0
    data = json.loads(out)
    assert all(r["exact"] for r in data["exactness"])
    assert [b["type"] for b in data["diagram"]] == ["<>"]
    code, out, _ = run(capsys, "mv", "--complex", fixture(fixtures_dir, "circle.json"), "--ascii")
    assert code == 0 and "<-" in out


def test_slice_negative_slope_argument(capsys, fixtures_dir):
    code, out, _ = run(capsys, "slice", "--module2d", fixture(fixtures_dir, "rectangle2d.json"),
                       "--line", "-1,9/2")
    assert code == 0
    data = json.loads(out)
    assert [b["type"] for b in data["bars"]] == ["<>"]
    assert data["line"] == {"slope": "-1", "intercept": "4.5"}


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--seed", "1")
    assert code == 0
    assert out.count("PASS") == 4


@pytest.mark.parametrize("argv_tail, payload", [
    (("decompose", "--in"), "{not json"),
    (("decompose", "--in"), {"field": 4, "grid": ["0"], "dims": [0, 0, 0], "corrs": []}),
    (("decompose", "--in"), {"field": 2, "grid": ["0"], "dims": [1, 1, 1],
                             "corrs": [[[1, 1, 1]], [[1, 1]]]}),
    (("levelset", "--complex"), {"field": 2, "vertices": [{"id": 0, "value": "0"}],
                                 "simplices": [[0, 1]]}),
    (("slice", "--line", "1,0", "--module2d"), None),
])
def test_invalid_input_exit_2(capsys, tmp_path, fixtures_dir, argv_tail, payload):
    if payload is None:
        path = fixture(fixtures_dir, "rectangle2d.json")
    elif isinstance(payload, str):
        path = tmp_path / "bad.json"
        path.write_text(payload)
        path = str(path)
    else:
        path = write(tmp_path, "bad.json", payload)
    code, out, err = run(capsys, *argv_tail, path)
    assert code == 2
    assert err.startswith("error: ") and len(err.strip().splitlines()) == 1


def test_noncanonical_bar_exit_2(capsys, tmp_path):
    a = write(tmp_path, "a.json", [{"type": "[]", "birth": {"value": "-inf"},
                                    "death": {"value": "1"}}])
    code, _, err = run(capsys, "bottleneck", "--a", a, "--b", a)
    assert code == 2 and "BadBar" in err
    b = write(tmp_path, "b.json", [{"type": "<>", "birth": {"value": "2"},
                                    "death": {"value": "1"}}])
    assert run(capsys, "bottleneck", "--a", b, "--b", b)[0] == 2


def test_field_override_and_non_prime(capsys, fixtures_dir):
    path = fixture(fixtures_dir, "circle.json")
    assert run(capsys, "levelset", "--complex", path, "--field", "3")[0] == 0
    assert run(capsys, "levelset", "--complex", path, "--field", "6")[0] == 2


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "decompose", "--in", str(tmp_path / "nope.json"))
    assert code == 2 and "cannot read" in err


def test_invariant_violation_exit_3(capsys, fixtures_dir, monkeypatch):
    from corrmod import cli
    monkeypatch.setattr(cli, "decompose_via_unfolding", lambda m: None)
    code, _, err = run(capsys, "decompose", "--in", fixture(fixtures_dir, "interval_closed.json"))
    assert code == 3 and "DecompositionMismatch" in err
    code, _, _ = run(capsys, "decompose", "--in", fixture(fixtures_dir, "interval_closed.json"),
                     "--no-verify")
    assert code == 0


def test_output_is_byte_stable(capsys, fixtures_dir):
    outs = [run(capsys, "levelset", "--complex", fixture(fixtures_dir, "fig4.json"))[1]
            for _ in range(3)]
    assert outs[0] == outs[1] == outs[2]


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_json_round_trip(name):
    data = fixture_json(name)
    if "vertices" in data:
        obj = PLComplex.from_json(data)
        assert PLComplex.from_json(obj.to_json()) == obj
    elif "xs" in data:
        obj = GridModule2D.from_json(data)
        assert GridModule2D.from_json(obj.to_json()).to_json() == obj.to_json()
    else:
        obj = GridCModule.from_json(data)
        assert GridCModule.from_json(obj.to_json()).to_json() == obj.to_json()
    assert json.loads(json.dumps(obj.to_json())) == obj.to_json()


def test_render_ascii_empty():
    m = GridCModule.from_json({"field": 2, "grid": ["0"], "dims": [0, 0, 0], "corrs": [[], []]})
    assert render_ascii(multiplicities(m)) == "(empty diagram)"


def test_module_entry_point(fixtures_dir):
    res = subprocess.run([sys.executable, "-m", "corrmod", "decompose", "--in",
                          fixture(fixtures_dir, "interval_closed.json")],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["bars"][0]["type"] == "[]"
