import json
import subprocess
import sys

import pytest

from tentlab.cli import RunConfig, main, run


def _run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--output", str(out)])
    doc = json.loads(out.read_text()) if out.exists() and out.read_text().startswith("{") else None
    return code, doc, out


def test_classify_weight(tmp_path):
    code, doc, _ = _run(tmp_path, "classify-weight", "--alpha", "0")
    assert code == 0
    assert doc["report"]["in_D"] is True
    assert doc["report"]["C_hat"] == pytest.approx(2.0, rel=1e-9)
    assert doc["config"]["command"] == "classify-weight"


def test_volterra_identity(tmp_path):
    code, doc, _ = _run(tmp_path, "volterra", "certify", "--g", "z", "--alpha", "0", "--p", "2", "--q", "2")
    assert code == 0
    assert doc["report"]["verdict"] == "bounded"
    assert doc["report"]["estimate"] == 1.0


def test_lp_check_moment_column(tmp_path):
    csv = tmp_path / "lp.csv"
    code, doc, _ = _run(tmp_path, "lp", "check", "--alpha", "0", "--q", "2", "--m", "1", "--nmax", "200",
                        "--csv", str(csv))
    assert code == 0
    lines = csv.read_text().strip().splitlines()
    head = lines[0].split(",")
    col, ncol = head.index("moment_ratio"), head.index("n")
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 200
    for row in rows:
        n = int(row[ncol])
        assert float(row[col]) == pytest.approx(n / (2 * n + 1), rel=1e-6)
    assert abs(float(rows[-1][col]) - 0.5) < 2e-3


def test_precondition_exit(tmp_path):
    code, doc, _ = _run(tmp_path, "embed", "certify", "--weight", '{"kind": "exp_inv"}', "--measure",
                        '{"kind": "density", "expr": "1"}')
    assert code == 4
    assert doc["exit_status"] == 4 and "error" in doc["report"]


def test_config_errors(tmp_path):
    assert main(["classify-weight", "--weight", "{not json"]) == 2
    assert main(["no-such-command"]) == 2
    bad = tmp_path / "cfg.json"
    bad.write_text(json.dumps({"command": "classify-weight", "bogus": 1}))
    assert main(["classify-weight", "--config", str(bad)]) == 2
    with pytest.raises(Exception):
        RunConfig.from_dict({"command": "lp check", "params": {"nope": 3}})


def test_config_replay_is_byte_identical(tmp_path, monkeypatch):
    # the output path is part of the echoed config, so replays write to the same relative name elsewhere
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    first, second = tmp_path / "a" / "out.json", tmp_path / "b" / "out.json"
    monkeypatch.chdir(tmp_path / "a")
    assert main(["embed", "certify", "--alpha", "1", "--J", "6", "--angles", "4", "--output", "out.json"]) == 0
    monkeypatch.chdir(tmp_path / "b")
    assert main(["embed", "certify", "--config", str(first), "--output", "out.json"]) == 0
    assert first.read_bytes() == second.read_bytes()
    cfg = RunConfig.from_dict(json.loads(first.read_text())["config"])
    cfg.output = None
    status, doc = run(cfg)
    assert status == 0
    assert doc["report"] == json.loads(first.read_text())["report"]


def test_csv_and_plot(tmp_path):
    csv, svg = tmp_path / "t.csv", tmp_path / "t.svg"
    code, doc, _ = _run(tmp_path, "carleson", "--measure", '{"kind": "density", "expr": "(1 - r)**0.5"}',
                        "--J", "6", "--angles", "4", "--csv", str(csv), "--plot", str(svg))
    assert code == 0
    assert doc["report"]["vanishing"] == "vanishing"
    assert csv.read_text().splitlines()[0].split(",")[0]
    text = svg.read_text()
    assert text.startswith("<svg") and "polyline" in text


def test_csv_format_output(tmp_path):
    out = tmp_path / "fr.csv"
    assert main(["fr-check", "--alpha", "0", "--s", "1", "--J", "4", "--angles", "2", "--format", "csv",
                 "--output", str(out)]) == 0
    assert out.read_text().startswith("z_re,")


def test_threads_do_not_change_results(tmp_path, monkeypatch):
    outs = []
    for t in ("1", "3"):
        (tmp_path / t).mkdir()
        monkeypatch.chdir(tmp_path / t)
        assert main(["embed", "compact", "--alpha", "0", "--J", "6", "--angles", "4", "--threads", t,
                     "--measure", '{"kind": "density", "expr": "abs(1 - z)**-0.5"}', "--output", "out.json"]) == 0
        outs.append((tmp_path / t / "out.json").read_bytes())
    assert outs[0] == outs[1]


def test_lattice_and_atoms(tmp_path):
    code, doc, _ = _run(tmp_path, "lattice", "--lattice-r", "0.2", "--eps", "2^-6")
    assert code == 0 and doc["report"]["count"] > 100
    code, doc, _ = _run(tmp_path, "atoms", "analyze", "--f", "1 + z", "--q", "2", "--lattice-r", "0.2",
                        "--eps", "2^-8", name="an.json")
    assert code == 0
    assert doc["report"]["residual_trace"][-1] < doc["report"]["residual_trace"][0]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "tentlab", "classify-weight", "--alpha", "1"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0
    assert json.loads(res.stdout)["report"]["C_hat"] == pytest.approx(4.0, rel=1e-9)
