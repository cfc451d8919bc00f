import json

import pytest

from eberlein.cli import EXIT_CHECK, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, main
from eberlein.errors import InvalidSpec
from eberlein.io import format_complex, parse_complex, validate_spec


@pytest.fixture
def spec(tmp_path):
    def write(doc, name="spec.json"):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_numerical(spec, capsys):
    code, out, _ = run(capsys, "spectrum", "--input", spec({"generators": [2, 3]}), "--grid", "4")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0] == "PuncturedDisc, d=1, conductor=2"
    assert lines[1] == "re,im,value_re,value_im"
    assert len(lines) == 2 + 16


def test_spectrum_full_disc_and_cone(spec, capsys):
    _, out, _ = run(capsys, "spectrum", "--input", spec({"generators": [0, 2, 3]}))
    assert out.startswith("FullDisc")
    cone = {"type": "cone", "l": 1, "thresholds": [0.0], "basis": [[1, 0], [0, 1]]}
    code, out, _ = run(capsys, "spectrum", "--input", spec(cone), "--grid", "3")
    assert code == EXIT_OK and out.splitlines()[0] == "dual = R^1 x H^1"


def test_spectrum_writes_csv_to_file(spec, capsys, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "spectrum", "--input", spec({"generators": [3, 5]}), "--out", str(target))
    assert code == EXIT_OK and out.strip() == "PuncturedDisc, d=1, conductor=8"
    assert target.read_text().startswith("re,im,value_re,value_im\n")


def test_eval_examples(spec, capsys):
    path = spec({"generators": [2, 3]})
    assert run(capsys, "eval", "--input", path, "--z", "0.5", "--s", "4")[1] == "0.0625,0\n"
    assert run(capsys, "eval", "--input", path, "--zero", "--s", "9")[1] == "0,0\n"
    code, out, _ = run(capsys, "eval", "--input", spec({"generators": [2, 4]}), "--z", "i", "--s", "6")
    assert code == EXIT_OK and out == "0,-1\n"


def test_eval_cone(spec, capsys):
    cone = spec({"type": "cone", "l": 0, "thresholds": [0.0], "basis": [[1.0]]})
    code, out, _ = run(capsys, "eval", "--input", cone, "--z", "i", "--s", "1")
    re, im = map(float, out.split(","))
    assert code == EXIT_OK and re == pytest.approx(0.36787944117144233) and im == 0


def test_eval_outside_semigroup_exits_with_domain_code(spec, capsys):
    code, _, err = run(capsys, "eval", "--input", spec({"generators": [3, 5]}), "--z", "0.5", "--s", "7")
    assert code == EXIT_DOMAIN and "domain error" in err


def test_bad_inputs_exit_with_usage_code(spec, capsys):
    code, _, err = run(capsys, "spectrum", "--input", spec("{bad json"))
    assert code == EXIT_USAGE and "line 1" in err
    code, _, err = run(capsys, "spectrum", "--input", spec({"generators": "x"}))
    assert code == EXIT_USAGE and "generators" in err
    assert run(capsys, "spectrum", "--input", "/nonexistent/file.json")[0] == EXIT_USAGE
    assert run(capsys, "spectrum")[0] == EXIT_USAGE
    assert run(capsys, "eval", "--input", spec({"generators": [2]}), "--z", "2", "--s", "2")[0] == EXIT_DOMAIN


def test_tolerance_must_be_positive(capsys, monkeypatch):
    assert run(capsys, "verify", "axb", "--tol", "0")[0] == EXIT_USAGE
    assert run(capsys, "verify", "axb", "--tol", "abc")[0] == EXIT_USAGE
    monkeypatch.setenv("EBERLEIN_TOL", "-1")
    assert run(capsys, "verify", "axb")[0] == EXIT_USAGE


def test_tolerance_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("EBERLEIN_TOL", "1e-9")
    code, out, _ = run(capsys, "verify", "semichar")
    assert code == EXIT_OK and json.loads(out)["tol"] == 1e-9
    code, out, _ = run(capsys, "verify", "semichar", "--tol", "1e-8")
    assert json.loads(out)["tol"] == 1e-8


def test_unknown_suite(capsys):
    assert run(capsys, "verify", "nonsense")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == EXIT_USAGE


@pytest.mark.parametrize("suite", ["semichar", "spine", "opcompact", "xform", "axb"])
def test_verify_suites_pass(capsys, suite):
    code, out, _ = run(capsys, "verify", suite)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["pass"] and doc["v"] == 1 and doc["suite"] == suite
    assert all(c["pass"] for c in doc["checks"])


def test_verify_all_is_byte_deterministic(tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--suite", "all", "--seed", "3", "--out", str(first)]) == EXIT_OK
    assert main(["verify", "all", "--seed", "3", "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    names = [c["name"] for c in json.loads(first.read_text())["checks"]]
    assert len(names) == len(set(names))


def test_transform(capsys):
    assert run(capsys, "transform", "laplace", "--n", "3", "--z", "1+2i")[1] == "0.0168,0.0576\n"
    assert run(capsys, "transform", "cayley", "--z", "i")[1] == "0,0\n"
    assert run(capsys, "transform", "gn", "--n", "1", "--z", "0")[1] == "-2,0\n"
    code, out, _ = run(capsys, "transform", "gn", "--n", "2", "--grid", "3")
    assert code == EXIT_OK and len(out.splitlines()) == 10
    assert run(capsys, "transform", "laplace", "--z", "i")[0] == EXIT_USAGE
    assert run(capsys, "transform", "cayley", "--z=-i")[0] == EXIT_DOMAIN


def test_axb_walter_refine(capsys):
    code, out, _ = run(capsys, "axb", "--walter", "--a", "2", "--z", "0.5+0.3i", "--grid", "32", "--refine")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["pass"] and doc["grids"] == [32, 64] and doc["ratio"] >= 1.5


def test_axb_polar_and_limits(capsys):
    code, out, _ = run(capsys, "axb", "--polar", "--a", "0.5", "--z=-1+i", "--grid", "16", "--refine")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["unitary"]["pass"] and doc["positive"]["pass"]
    code, _, err = run(capsys, "axb", "--a", "2", "--grid", "128")
    assert code == EXIT_CHECK and "exceeds" in err
    assert run(capsys, "axb", "--a=-1")[0] == EXIT_DOMAIN
    assert run(capsys, "axb", "--a", "1", "--z=-i")[0] == EXIT_DOMAIN


def test_spine_command(spec, capsys):
    doc = {"type": "spine", "nodes": ["o", "l", "r"],
           "join": [["o", "o", "o"], ["o", "l", "o"], ["o", "o", "r"]],
           "groups": {"o": {"kind": "real", "dim": 2}, "l": {"kind": "real", "dim": 1},
                      "r": {"kind": "real", "dim": 1}},
           "homs": {"o->l": [[1, 0]], "o->r": [[0, 1]]}}
    path = spec(doc)
    code, out, _ = run(capsys, "spine", "--input", path, "--product", "l:1", "r:2")
    body = json.loads(out)
    assert code == EXIT_OK and body["product"] == "ZERO" and body["maximum"] == "o"
    assert body["no_common_lower_bound"] == [["l", "r"]] and body["complement_is_ideal"]["pass"]
    body = json.loads(run(capsys, "spine", "--input", path, "--product", "o:1,2", "l:5")[1])
    assert body["product"] == {"node": "l", "value": [6.0]}


def test_spine_invalid_system(spec, capsys):
    bad = {"type": "spine", "nodes": [1, 2], "join": [[1, 2], [2, 2]],
           "groups": {"1": {"kind": "real", "dim": 1}, "2": {"kind": "real", "dim": 1}}, "homs": {}}
    code, _, err = run(capsys, "spine", "--input", spec(bad))
    assert code == EXIT_USAGE and err


@pytest.mark.parametrize("text, value", [("1+2i", 1 + 2j), ("0.5i", 0.5j), ("-1+i", -1 + 1j), ("i", 1j),
                                         ("2", 2), ([1, -1], 1 - 1j), (3, 3)])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


def test_parse_complex_rejects_garbage():
    with pytest.raises(InvalidSpec):
        parse_complex("1+2k")


def test_format_complex():
    assert format_complex(-0.0 + 0j) == "0,0"
    assert format_complex(0.1 + 0.2j) == "0.1,0.2"


def test_validate_spec_reports_field():
    with pytest.raises(InvalidSpec, match="field 'type'"):
        validate_spec({"type": "galaxy"})
    with pytest.raises(InvalidSpec, match="field 'generators/1'"):
        validate_spec({"generators": [2, -3]})
