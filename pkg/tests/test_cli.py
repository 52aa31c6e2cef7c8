import json

import pytest

from qcext.cli import REGISTRY, ConfigError, ExperimentConfig, emit_report, main, run_experiment
from qcext.errors import QCError

SMALL = {
    "grunsky-vs-k": {"family": "affine", "b1": {"start": 0.1, "stop": 0.3, "step": 0.1}, "N": 5},
    "variation-consistency": {"eps": 1e-3, "N": 3, "n_r": 64, "n_theta": 64},
    "coefficient-table": {"n": [3, 4], "t": 0.1},
    "kappa-n-table": {"n": {"start": 3, "stop": 5, "step": 1}},
    "golusin-property": {"m": [1], "trials": 20, "n_radial": 10},
    "l1-span-distance": {"psi0": "constant", "e": [0.5], "n_r": 48, "n_theta": 96, "restarts": 2},
    "distortion-bound": {"a": [0.3], "kappa": [0.01], "M": 1.0},
}


def write_config(tmp_path, experiment, params, name="cfg.json", **extra):
    path = tmp_path / name
    path.write_text(json.dumps({"experiment": experiment, "params": params, **extra}))
    return str(path)


def test_registry_covers_all_experiments():
    assert set(SMALL) == set(REGISTRY)


def test_coefficient_table_rows():
    rows = run_experiment({"experiment": "coefficient-table",
                           "params": {"n": {"start": 3, "stop": 8, "step": 1}, "t": 0.1}})
    assert [r["n"] for r in rows] == list(range(3, 9))
    for r in rows:
        assert abs(r["value"] - 0.2 / (r["n"] - 1)) < 1e-12


def test_grunsky_vs_k_affine_rows():
    rows = run_experiment({"experiment": "grunsky-vs-k",
                           "params": {"family": "affine", "b1": {"start": 0.1, "stop": 0.9, "step": 0.1}}})
    assert len(rows) == 9
    for r in rows:
        assert abs(r["value"] - r["param"]) < 1e-9 and r["k"] == r["param"]


def test_kappa_n_rows():
    rows = run_experiment({"experiment": "kappa-n-table", "params": {"n": [3, 4]}})
    assert rows[0]["value"] == 0.1 and abs(rows[0]["upper"] - 1 / 3) < 1e-15


def test_emit_report_shapes(tmp_path):
    rows = [{"op": "x", "value": 0.1 + 0.2, "certified": True}]
    text = emit_report(rows)
    assert text.count("\n") == 2
    assert text.splitlines()[1] == "x,0.3,True"
    data = json.loads(emit_report(rows, "json"))
    assert data == [{"op": "x", "value": 0.3, "certified": True}]
    with pytest.raises(QCError):
        emit_report([])
    with pytest.raises(OSError):
        emit_report(rows, path=str(tmp_path / "missing" / "out.csv"))


@pytest.mark.parametrize("experiment", sorted(SMALL))
def test_determinism(tmp_path, experiment):
    cfg = write_config(tmp_path, experiment, SMALL[experiment])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", cfg, "--out", str(a)]) == 0
    assert main(["run", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_override_and_json(tmp_path):
    cfg = write_config(tmp_path, "golusin-property", SMALL["golusin-property"])
    for seed in ("1", "2"):
        out = tmp_path / f"{seed}.json"
        assert main(["run", cfg, "--seed", seed, "--format", "json", "--out", str(out)]) == 0
        rows = json.loads(out.read_text())
        assert rows[0]["value"] == 0 and rows[0]["certified"] is True


def test_config_errors(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 2
    assert main(["run", write_config(tmp_path, "no-such-thing", {})]) == 2
    assert "registry" in capsys.readouterr().err
    assert main(["run", write_config(tmp_path, "coefficient-table", {"n": [3], "bogus": 1})]) == 2
    assert main(["run", write_config(tmp_path, "kappa-n-table", {"n": [2]})]) == 2
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "kappa-n-table", "format": "xml"})


def test_non_certified_exit_code(tmp_path):
    params = dict(SMALL["l1-span-distance"], tol=1e-14)
    assert main(["run", write_config(tmp_path, "l1-span-distance", params),
                 "--out", str(tmp_path / "o.csv")]) == 3


def test_list(capsys):
    assert main(["--list"]) == 0
    assert capsys.readouterr().out.split() == list(REGISTRY)
