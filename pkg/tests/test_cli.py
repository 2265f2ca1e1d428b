import json
import subprocess
import sys

import numpy as np
import pytest

from nonlocal_optics.cli import (
    EXIT_CONFIG,
    EXIT_GUARD,
    EXIT_OK,
    ConfigError,
    RunConfig,
    compare,
    main,
    read_csv,
)


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def summary(path, name):
    return json.loads((path / f"{name}_summary.json").read_text())


def test_dispersion_cancellation_summary(tmp_path, capsys):
    assert run(tmp_path, "dispersion", "--beta1", "1", "--beta2", "-1", "--length", "2",
               "--sigma-f", "1", "--trials", "20000") == EXIT_OK
    s = summary(tmp_path, "dispersion")["summary"]
    assert s["sigma_T_theory"] == 1.0
    assert s["sigma_T_numeric"] == pytest.approx(1.0, rel=1e-6)
    meta, cols, data = read_csv(tmp_path / "dispersion.csv")
    assert cols == ["beta1", "beta2", "L", "sigma_F", "sigma_T_theory", "sigma_T_numeric",
                    "sigma_C_theory", "sigma_C_mc", "mc_error"]
    assert meta["schema"] == "nonlocal-optics/dispersion/v1"
    assert meta["config"]["parameters"]["beta2"] == -1.0
    assert "sigma_T_numeric" in capsys.readouterr().out


def test_modulation_byte_identical(tmp_path):
    args = ["modulation", "--depth1", "1", "--depth2", "1", "--omega", "1",
            "--trials", "100000", "--seed", "7"]
    assert main(args + ["--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(args + ["--out", str(tmp_path / "b"), "--threads", "4"]) == EXIT_OK
    for name in ("modulation.csv", "modulation_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    _, cols, data = read_csv(tmp_path / "a" / "modulation.csv")
    row = dict(zip(cols, data[0]))
    assert row["delta2_classical"] == pytest.approx(1.0, abs=1e-12)
    assert abs(row["delta2_mc"] - 1.0) < 3 * row["mc_err"]
    assert row["delta2_quantum_opposite"] == pytest.approx(row["delta2_baseline"], rel=0.05)


def test_franson_outputs(tmp_path):
    assert run(tmp_path, "franson", "--delta-t", "5", "--scan-phases", "32",
               "--trials", "50000") == EXIT_OK
    _, cols, data = read_csv(tmp_path / "franson.csv")
    assert cols == ["phi_sum", "rate_quantum", "rate_ou_mandel", "err"]
    assert data.shape == (32, 4)
    s = summary(tmp_path, "franson")["summary"]
    assert s["visibility_quantum"] == 1.0
    assert s["visibility_classical"] <= 0.5 + 3 * s["visibility_classical_error"]
    assert s["chsh_quantum"]["S"] == pytest.approx(2 * np.sqrt(2), abs=1e-9)
    assert s["inequality"]["violated"] is True
    assert s["inequality"]["violated_classical_model"] is False


def test_chaotic_outputs(tmp_path):
    assert run(tmp_path, "chaotic", "--trials", "16", "--duration", "128", "--n-points", "512",
               "--beta", "0.5", "--format", "json") == EXIT_OK
    table = json.loads((tmp_path / "chaotic.json").read_text())
    assert set(table["table"]) >= {"tau", "g2_no_medium", "g2_with_medium", "err"}
    assert (tmp_path / "chaotic_trace.json").exists()


def test_pulse_train_outputs(tmp_path):
    assert run(tmp_path, "pulse-train", "--trials", "5000", "--bins", "21") == EXIT_OK
    _, cols, data = read_csv(tmp_path / "pulse_train.csv")
    assert data.shape == (21, 2)


def test_config_round_trip(tmp_path):
    assert run(tmp_path / "a", "modulation", "--trials", "20000", "--seed", "3",
               "--depth1", "0.5") == EXIT_OK
    cfg = tmp_path / "a" / "modulation_summary.json"
    assert main(["modulation", "--config", str(cfg), "--out", str(tmp_path / "b")]) == EXIT_OK
    assert ((tmp_path / "a" / "modulation.csv").read_bytes()
            == (tmp_path / "b" / "modulation.csv").read_bytes())


def test_invalid_parameters_exit_2(tmp_path, capsys):
    assert run(tmp_path, "modulation", "--depth1", "-1") == EXIT_CONFIG
    assert "depth" in capsys.readouterr().err
    assert run(tmp_path, "franson", "--delta-t", "2") == EXIT_CONFIG
    assert run(tmp_path, "modulation", "--threads", "0") == EXIT_CONFIG
    with pytest.raises(SystemExit) as e:
        main(["modulation", "--no-such-flag", "1"])
    assert e.value.code == 2


def test_unknown_config_keys_rejected(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"experiment": "franson", "bogus": 1}))
    assert main(["franson", "--config", str(bad)]) == EXIT_CONFIG
    with pytest.raises(ConfigError):
        RunConfig("franson", {"delta": 3})
    with pytest.raises(ConfigError):
        RunConfig("nonsense")


def test_guard_failure_exit_3(tmp_path, capsys):
    assert run(tmp_path, "chaotic", "--beta", "100") == EXIT_GUARD
    assert "increase" in capsys.readouterr().err


def test_config_excludes_threads_and_output():
    rec = RunConfig("modulation").record()
    assert "threads" not in rec and "output_path" not in rec
    assert rec["seed"] == 0 and rec["trials"] == 100_000


def test_compare_modulation():
    q = RunConfig("modulation", {"source": "quantum"}, trials=20_000)
    c = RunConfig("modulation", {"source": "classical"}, trials=20_000)
    rep = compare(q, c)
    rows = {r["metric"]: r for r in rep["metrics"]}
    assert rows["delta2_with_modulators"]["value_b"] > 0.5
    assert rows["delta2_with_modulators"]["value_a"] == pytest.approx(1 / 32, rel=0.05)
    assert rows["delta2_with_modulators"]["classical_reproduces_quantum"] == "no"


def test_compare_identical_quantum():
    q = RunConfig("franson", {"source": "quantum"}, trials=20_000)
    rep = compare(q, q)
    assert all(r["classical_reproduces_quantum"] == "yes" for r in rep["metrics"])


def test_compare_dispersion_family():
    q = RunConfig("dispersion", {"sigma_f": 10.0, "length": 0.0}, trials=2000)
    c = RunConfig("pulse-train", {"sigma_p": 1.0, "sigma_d": 10.0, "length": 0.0}, trials=20_000)
    rep = compare(q, c)
    row = rep["metrics"][0]
    assert row["metric"] == "correlation_width"
    assert row["value_a"] < row["value_b"]
    assert row["classical_reproduces_quantum"] == "no"


def test_compare_mismatched_families():
    with pytest.raises(ConfigError):
        compare(RunConfig("dispersion"), RunConfig("franson"))


def test_compare_cli(tmp_path):
    a = tmp_path / "a.json"
    a.write_text(json.dumps({"experiment": "franson", "parameters": {"source": "quantum"},
                             "trials": 20000}))
    b = tmp_path / "b.json"
    b.write_text(json.dumps({"experiment": "franson", "parameters": {"source": "ou-mandel"},
                             "trials": 20000}))
    assert main(["compare", str(a), str(b), "--out", str(tmp_path)]) == EXIT_OK
    text = (tmp_path / "compare.csv").read_text()
    assert text.startswith("# schema=nonlocal-optics/compare/v1")
    assert "visibility" in text and "chsh_S" in text


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "nonlocal_optics", "--help"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "c = 1" in out.stdout
