import json
import subprocess
import sys

import numpy as np
import pytest

from triadic.cli import read_pvalue_csv, run


@pytest.fixture
def pfile(tmp_path):
    def write(text, name="p.csv"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_test_command_decisions(pfile):
    path = pfile("index,p_h\n1,0.001\n2,0.5\n3,0.999\n")
    out, code = run(["test", "--input", path, "--format", "json"])
    assert code == 0
    rep = json.loads(out)
    assert [d["decision"] for d in rep["decisions"]] == ["D2", "D3", "D1"]
    assert rep["thresholds"]["lower"] == pytest.approx(0.05 / 3)
    assert rep["sets"] == {"u_bar": [1], "l": [3], "g": [2]}
    assert rep["complementary"] is True


def test_table_output_lists_sets(pfile):
    out, code = run(["test", "--input", pfile("index,p_h\n1,0.001\n2,0.5\n")])
    assert code == 0 and "uncertain (G): {2}" in out


@pytest.mark.parametrize("text, needle", [
    ("", "empty"),
    ("index,p_h\n", "no data"),
    ("index,p_h\n1,1.2\n", "line 2"),
    ("index,p_h\n1,0.1\n2,abc\n", "line 3"),
    ("idx,p\n1,0.1\n", "header"),
    ("index,p_h\n1,0.1\n3,0.2\n", "indices"),
    ("index,p_h\n1,0.1,7\n", "line 2"),
])
def test_parse_errors(pfile, text, needle):
    out, code = run(["test", "--input", pfile(text)])
    assert code == 1 and needle in out


def test_missing_file():
    out, code = run(["test", "--input", "/nonexistent/p.csv"])
    assert code == 1


def test_noncomplementary_rows_reported(pfile):
    path = pfile("index,p_h,p_k\n1,0.01,0.99\n2,0.3,0.3\n3,0.4,0.5\n")
    out, code = run(["test", "--input", path])
    assert code == 2 and "[2, 3]" in out
    out, code = run(["test", "--input", path, "--allow-noncomplementary", "--format", "json"])
    assert code == 0 and json.loads(out)["override"] is True


def test_csv_round_trip(pfile, tmp_path):
    rng = np.random.default_rng(0)
    p = rng.random(40) ** 4
    text = "index,p_h\n" + "".join(f"{i},{float(v)!r}\n" for i, v in enumerate(p, 1))
    out1, code = run(["test", "--input", pfile(text), "--format", "csv", "--alpha", "0.2"])
    assert code == 0
    out2, code = run(["test", "--input", pfile(out1, "again.csv"), "--format", "csv",
                      "--alpha", "0.2"])
    assert code == 0 and out1 == out2
    _, p_h, _ = read_pvalue_csv(out1)
    assert p_h == p.tolist()


def test_simulate_deterministic():
    args = ["simulate", "--m", "5", "--replicates", "2000", "--seed", "7", "--format", "json"]
    a, code = run(args)
    b, _ = run(args)
    c, _ = run(args + ["--workers", "4"])
    assert code == 0 and a == b == c


def test_simulate_single_replicate_byte_identical():
    args = ["simulate", "--theta", "0", "0.5", "--replicates", "1", "--seed", "3",
            "--format", "json"]
    assert run(args)[0] == run(args)[0]


def test_simulate_b_zero():
    out, _ = run(["simulate", "--m", "3", "--theta", "0.5", "--replicates", "3000",
                  "--loss-b", "0", "--format", "json"])
    rep = json.loads(out)
    assert rep["risk"] == pytest.approx(rep["directional_h"] + rep["directional_k"], abs=1e-15)


def test_simulate_nested_counterexample():
    out, code = run(["simulate", "--model", "nested", "--theta", "0.5", "--theta1", "0",
                     "--theta2", "1", "--procedure", "counterexample", "--replicates", "2000",
                     "--format", "json"])
    assert code == 0 and json.loads(out)["h_true"] == [True, False]


def test_simulate_config_errors():
    assert run(["simulate", "--replicates", "10"])[1] == 2
    assert run(["simulate", "--m", "2", "--replicates", "0"])[1] == 2
    assert run(["simulate", "--m", "2", "--alpha", "1.5"])[1] == 2
    assert run(["simulate", "--m", "2", "--procedure", "counterexample",
                "--replicates", "5"])[1] == 2


def test_config_file_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sim settings\nm = 3\nreplicates = 500\nseed = 11\nalpha = 0.1\n")
    out, _ = run(["simulate", "--config", str(cfg), "--format", "json"])
    rep = json.loads(out)
    assert rep["replicates"] == 500 and rep["seed"] == 11 and rep["procedure"]["alpha"] == 0.1
    out, _ = run(["simulate", "--config", str(cfg), "--seed", "12", "--format", "json"])
    assert json.loads(out)["seed"] == 12


def test_seed_env_fallback(monkeypatch):
    monkeypatch.setenv("TRIADIC_SEED", "99")
    out, _ = run(["simulate", "--m", "2", "--replicates", "10", "--format", "json"])
    assert json.loads(out)["seed"] == 99
    out, _ = run(["simulate", "--m", "2", "--replicates", "10", "--seed", "1", "--format", "json"])
    assert json.loads(out)["seed"] == 1


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("m 3\n")
    out, code = run(["simulate", "--config", str(cfg)])
    assert code == 1 and "line 1" in out


@pytest.mark.parametrize("args, code", [
    (["closure-check", "--m", "4"], 0),
    (["closure-check", "--m", "1"], 0),
    (["closure-check", "--nested"], 2),
    (["closure-check", "--m", "13", "--trials", "1"], 2),
])
def test_closure_check_exit_codes(args, code):
    assert run(args)[1] == code


def test_counterexample_defaults():
    out, code = run(["counterexample", "--format", "json"])
    assert code == 0
    rep = json.loads(out)
    k1 = [iv for iv in rep["analytic_intervals"] if iv["test"] == "k1"][0]
    assert k1["lo"] == pytest.approx(1.6448536269514727, abs=1e-9)
    assert k1["hi"] == pytest.approx(1.959963984540054, abs=1e-9)
    assert rep["observed_intervals"]


def test_counterexample_errors_and_alpha_half():
    assert run(["counterexample", "--theta1", "1", "--theta2", "1"])[1] == 2
    out, code = run(["counterexample", "--alpha", "0.5", "--format", "json"])
    k1 = [iv for iv in json.loads(out)["analytic_intervals"] if iv["test"] == "k1"][0]
    assert code == 0 and k1["lo"] == pytest.approx(0.0, abs=1e-12) and k1["hi"] > 0.6


def test_counterexample_table_and_csv():
    out, code = run(["counterexample"])
    assert code == 0 and "(1.644854, 1.959964]" in out
    out, code = run(["counterexample", "--format", "csv"])
    assert out.startswith("xbar_from,xbar_to,closure,bonferroni")


def _data_csv(path, x, names=None):
    names = names or [f"v{i}" for i in range(1, x.shape[1] + 1)]
    lines = [",".join(names)] + [",".join(repr(float(v)) for v in row) for row in x]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_graph_independent(tmp_path):
    x = np.random.default_rng(0).standard_normal((100, 5))
    out, code = run(["graph", "--input", _data_csv(tmp_path / "d.csv", x), "--format", "json"])
    rep = json.loads(out)
    assert code == 0 and rep["m"] == 10
    assert rep["counts"]["significant_edges"] <= 1
    assert sum(rep["counts"].values()) == 10


def test_graph_duplicate_pair(tmp_path):
    x = np.random.default_rng(1).standard_normal((50, 4))
    x[:, 3] = x[:, 1]
    out, _ = run(["graph", "--input", _data_csv(tmp_path / "d.csv", x, list("abcd")),
                  "--rho0", "0.5", "--format", "json"])
    assert ["b", "d"] in json.loads(out)["significant_edges"]


def test_graph_single_variable(tmp_path):
    x = np.random.default_rng(2).standard_normal((10, 1))
    out, code = run(["graph", "--input", _data_csv(tmp_path / "d.csv", x), "--format", "json"])
    rep = json.loads(out)
    assert code == 0 and rep["m"] == 0 and rep["edges"] == []


def test_graph_errors(tmp_path):
    x = np.random.default_rng(2).standard_normal((3, 3))
    assert run(["graph", "--input", _data_csv(tmp_path / "d.csv", x)])[1] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n3,x\n")
    out, code = run(["graph", "--input", str(bad)])
    assert code == 1 and "line 3" in out


def test_console_entry_point(pfile):
    path = pfile("index,p_h\n1,0.001\n")
    proc = subprocess.run([sys.executable, "-m", "triadic.cli", "test", "--input", path,
                           "--format", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.splitlines()[1] == "1,0.001,0.999,D2"
    proc = subprocess.run([sys.executable, "-m", "triadic.cli", "closure-check", "--nested"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "error" in proc.stderr
