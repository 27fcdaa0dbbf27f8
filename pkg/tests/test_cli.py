import csv
import io
import json

import pytest

from zyglab.cli import main
from zyglab.errors import ConfigInvalid
from zyglab.harness import CHECKS, parse_config, run_scenario, strip_durations


def write(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_empty_checks_pass(tmp_path, capsys):
    code, out, _ = run(["check", "--config", write(tmp_path, {"checks": []})], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["status"] == "pass" and report["checks"] == {}
    assert report["seed"] == 0 and len(report["config_hash"]) == 64


def test_report_is_deterministic(tmp_path):
    cfg = {"seed": 5, "suite": [{"kind": "monomial", "k": 3}, {"kind": "random_poly",
                                                               "degree": 4, "seed": 2}],
           "checks": ["norm", "extreme-point", "domain"]}
    a = strip_durations(run_scenario(parse_config(cfg)).to_dict())
    b = strip_durations(run_scenario(parse_config(cfg)).to_dict())
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["status"] == "pass"
    assert list(a["checks"]) == sorted(a["checks"])


def test_seed_changes_hash(tmp_path, capsys):
    path = write(tmp_path, {"checks": ["domain"]})
    _, one, _ = run(["check", "--config", path, "--seed", "1"], capsys)
    _, two, _ = run(["check", "--config", path, "--seed", "2"], capsys)
    assert json.loads(one)["seed"] == 1
    assert json.loads(one)["config_hash"] != json.loads(two)["config_hash"]


def test_failing_check_exits_one(tmp_path, capsys):
    path = write(tmp_path, {"checks": ["domain"]})
    code, out, err = run(["check", "--config", path, "--tol", "domain=1e-300"], capsys)
    assert code == 0  # the 4/3 measurement is exact
    code, out, err = run(["check", "--config", write(tmp_path, {"checks": ["generator"]}),
                          "--format", "csv"], capsys)
    assert code == 1
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["check", "measurement", "value", "relation", "tolerance", "status"]
    assert any(r[-1] == "fail" for r in rows[1:])
    assert "FAIL generator" in err


@pytest.mark.parametrize("data, where", [
    ({"checks": ["norm", "bogus"]}, "$.checks[1]"),
    ({"tolerances": {"norm": 0}}, "$.tolerances.norm"),
    ({"tolerances": {"nope": 1}}, "$.tolerances.nope"),
    ({"seed": -1}, "$.seed"),
    ({"suite": [{"kind": "monomial", "k": 2}, {"kind": "peaking", "z0": 2}]}, "$.suite[1]"),
    ({"operator": {"type": "canonical", "sigma": {"a": 1.5}}}, "$.operator"),
    ({"surprise": 1}, "$"),
])
def test_config_errors(tmp_path, capsys, data, where):
    code, _, err = run(["check", "--config", write(tmp_path, data)], capsys)
    assert code == 2
    assert where in err
    with pytest.raises(ConfigInvalid):
        parse_config(data)


def test_config_io_errors(tmp_path, capsys):
    assert run(["check", "--config", str(tmp_path / "missing.json")], capsys)[0] == 2
    code, _, err = run(["check", "--config", write(tmp_path, "{not json")], capsys)
    assert code == 2 and "line 1" in err
    assert run(["check", "--config", write(tmp_path, {}), "--tol", "norm"], capsys)[0] == 2
    assert run(["check", "--config", write(tmp_path, {}), "--tol", "norm=-1"], capsys)[0] == 2
    assert run(["check", "--config", write(tmp_path, {}), "--seed", str(2 ** 64)], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2


def test_tol_override_is_echoed(tmp_path, capsys):
    path = write(tmp_path, {"checks": []})
    _, out, _ = run(["check", "--config", path, "--tol", "norm=1e-3", "--tol", "argmax=0.5"],
                    capsys)
    tol = json.loads(out)["tolerances"]
    assert tol["norm"] == 1e-3 and tol["argmax"] == 0.5 and tol["isometry"] == 1e-6


def test_norm_command(tmp_path, capsys):
    path = write(tmp_path, {"function": {"kind": "monomial", "k": 3}})
    code, out, _ = run(["norm", "--config", path], capsys)
    assert code == 0
    rep = json.loads(out)[0]["norm"]
    assert rep["seminorm"] == pytest.approx(0.3849002, abs=1e-6)
    out_csv = tmp_path / "n.csv"
    argv = ["norm", "--config", path, "--format", "csv", "--out", str(out_csv)]
    assert run(argv, capsys)[0] == 0
    assert out_csv.read_text().startswith("label,")
    assert run(["norm", "--config", write(tmp_path, {"suite": []})], capsys)[0] == 2


def test_grid_command(tmp_path, capsys):
    path = write(tmp_path, {"function": {"kind": "monomial", "k": 2}, "n_r": 2, "n_theta": 1})
    out = tmp_path / "grid.csv"
    assert run(["grid", "--config", path, "--out", str(out)], capsys)[0] == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["r", "theta", "value"]
    assert float(rows[1][2]) == 1.0 and float(rows[2][2]) == pytest.approx(0.002, abs=1e-5)
    path = write(tmp_path, {"function": {"kind": "peaking", "z0": 0.5}, "n_r": 64,
                            "n_theta": 64})
    code, text, _ = run(["grid", "--config", path], capsys)
    rows = list(csv.reader(io.StringIO(text)))[1:]
    best = max(rows, key=lambda r: float(r[2]))
    assert float(best[2]) == pytest.approx(1, abs=1e-2) and float(best[1]) == 0
    assert run(["grid", "--config", write(tmp_path, {"function": {}})], capsys)[0] == 2
    assert run(["grid", "--config", write(tmp_path, {"n_r": 3})], capsys)[0] == 2


@pytest.mark.parametrize("data, cls, points", [
    ({"automorphism": {"lambda": [0.5403023058681398, 0.8414709848078965], "a": 0}},
     "elliptic", [[0.0, 0.0], "inf"]),
    ({"flow": {"variant": "parabolic", "c": 1, "gamma": 1}, "t": 1}, "parabolic", [[1.0, 0.0]]),
    ({"flow": {"variant": "hyperbolic", "phi": 1, "p": 1, "q": -1}, "t": 0.5}, "hyperbolic",
     [[1.0, 0.0], [-1.0, 0.0]]),
])
def test_classify_command(tmp_path, capsys, data, cls, points):
    code, out, _ = run(["classify", "--config", write(tmp_path, data)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["classification"] == cls
    assert len(rep["points"]) == len(points)
    for g, w in zip(sorted(rep["points"], key=str), sorted(points, key=str)):
        if w == "inf":
            assert g == "inf"
        else:
            assert g == pytest.approx(w, abs=1e-9)


def test_classify_errors(tmp_path, capsys):
    assert run(["classify", "--config", write(tmp_path, {})], capsys)[0] == 2
    bad = {"flow": {"variant": "elliptic", "c": 1, "tau": 1.5}}
    assert run(["classify", "--config", write(tmp_path, bad)], capsys)[0] == 2


def test_shipped_suite_parses():
    from importlib import resources
    data = json.loads(resources.files("zyglab.data").joinpath("paper_suite.json").read_text())
    cfg = parse_config(data)
    assert sorted(cfg.checks) == list(CHECKS)
    assert len(cfg.suite) == 10


def test_threaded_run_matches_serial(monkeypatch):
    cfg = parse_config({"seed": 9, "checks": ["extreme-point", "domain", "norm"],
                        "suite": [{"kind": "monomial", "k": 4}]})
    serial = strip_durations(run_scenario(cfg).to_dict())
    monkeypatch.setenv("ZYGLAB_THREADS", "3")
    threaded = strip_durations(run_scenario(cfg).to_dict())
    assert serial == threaded
