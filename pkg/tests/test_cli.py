import json

import pytest

from mixlap.cli import main, parse_config, run
from mixlap.errors import ConfigError


def test_parse_minimal_solve_config():
    cfg = parse_config(json.dumps({
        "command": "solve", "s": 0.5, "domain": [-1, 1], "n": 127,
        "f": "constant:1",
    }))
    assert cfg.command == "solve"
    assert cfg.s == 0.5
    assert cfg.n == 127


def test_parse_rejects_bad_order():
    with pytest.raises(ConfigError, match="s"):
        parse_config(json.dumps({"command": "solve", "s": 1.2}))


def test_parse_rejects_zero_nodes():
    with pytest.raises(ConfigError, match="n"):
        parse_config(json.dumps({"command": "solve", "n": 0}))


def test_parse_rejects_unknown_key():
    with pytest.raises(ConfigError, match="mystery"):
        parse_config(json.dumps({"command": "solve", "mystery": 1}))


def test_parse_rejects_bad_domain():
    with pytest.raises(ConfigError, match="domain"):
        parse_config(json.dumps({"command": "solve", "domain": [1, -1]}))


def test_parse_rejects_bad_load():
    with pytest.raises(ConfigError, match="f"):
        parse_config(json.dumps({"command": "solve", "f": "sine:3"}))


def test_parse_poly_and_csv_loads(tmp_path):
    cfg = parse_config(json.dumps({"command": "solve", "f": "poly:1,0,2"}))
    assert cfg.f == "poly:1,0,2"
    sample = tmp_path / "load.csv"
    sample.write_text("x,u\n-0.5,1.0\n0.5,1.0\n")
    cfg = parse_config(json.dumps({"command": "solve", "f": f"csv:{sample}"}))
    assert cfg.f.startswith("csv:")


def test_solve_run_emits_artifacts(tmp_path):
    cfg = parse_config(json.dumps({
        "command": "solve", "s": 0.5, "n": 31, "f": "constant:1",
        "output_dir": str(tmp_path),
    }))
    assert run(cfg) == 0
    csv = (tmp_path / "solution.csv").read_text().splitlines()
    assert len(csv) == 1 + 31
    assert (tmp_path / "report.json").exists()
    assert (tmp_path / "stiffness.txt").exists()


def test_rerun_reproduces_artifacts(tmp_path):
    doc = {"command": "solve", "s": 0.5, "n": 31, "f": "constant:1",
           "output_dir": str(tmp_path)}
    run(parse_config(json.dumps(doc)))
    first = (tmp_path / "solution.csv").read_bytes()
    (tmp_path / "solution.csv").unlink()
    run(parse_config(json.dumps(doc)))
    assert (tmp_path / "solution.csv").read_bytes() == first


def test_verify_summaries_byte_identical(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    for out in (out1, out2):
        code = main(["verify", "--s", "0.5", "--n", "63", "--seed", "42",
                     "--output-dir", str(out)])
        assert code == 0
    assert (out1 / "verify_summary.txt").read_bytes() == \
        (out2 / "verify_summary.txt").read_bytes()


def test_counterexample_summary_mentions_scale(tmp_path):
    code = main(["counterexample", "--s", "0.25", "--output-dir", str(tmp_path)])
    assert code == 0
    text = (tmp_path / "counterexample_summary.txt").read_text()
    assert "eps0=" in text
    assert "passed" in text


def test_barrier_dump(tmp_path):
    code = main(["barrier", "--s", "0.6", "--output-dir", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "barrier.csv").read_text().splitlines()
    assert lines[0] == "x,beta,gamma,Lgamma"
    assert len(lines) == 51
    cert = (tmp_path / "certificate.txt").read_text()
    assert "C_sharp" in cert and "certificate.lgamma_min" in cert


def test_cli_reports_config_errors(capsys):
    code = main(["solve", "--s", "1.5"])
    assert code == 2
    assert "s" in capsys.readouterr().err


def test_env_var_sets_default_output_dir(tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv("MIXLAP_OUTPUT_DIR", str(target))
    code = main(["solve", "--s", "0.5", "--n", "15", "--f", "constant:1"])
    assert code == 0
    assert (target / "solution.csv").exists()
