import csv
import io
import json

import numpy as np
import pytest
from scipy import integrate

from synthprune import __version__
from synthprune.cli import SweepSpec, main, parse_grid
from synthprune.errors import ConfigError


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    meta = json.loads(lines[0][2:])
    body = [ln for ln in lines[1:] if not ln.startswith("#")]
    return meta, list(csv.DictReader(io.StringIO("\n".join(body))))


def test_parse_grid():
    assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("0.1, 0.2") == [0.1, 0.2]
    for bad in ("1:0:3", "a:b:c", "0:1:0", "0.2,0.1", ""):
        with pytest.raises(ConfigError):
            parse_grid(bad)


def test_header_line_carries_config_seed_and_version(tmp_path):
    code, out = run(tmp_path, "deltas", "--grid", "0.1:1:3", "--seed", "42", "--p", "50")
    assert code == 0
    meta, rows = read_csv(out)
    assert meta["version"] == __version__ and meta["tool"] == "synthprune"
    assert meta["seed"] == 42 and meta["config"]["p"] == 50
    assert meta["command"] == "deltas"
    assert len(rows) == 3
    assert out.read_bytes().count(b"\r") == 0


def test_deltas_rows(tmp_path):
    code, out = run(tmp_path, "deltas", "--grid", "1e-7:3:25", "--epsilon", "0.1", "--rho", "0.2",
                    "--phi", "0.9")
    assert code == 0
    _, rows = read_csv(out)
    first = rows[0]
    assert max(float(first[k]) for k in ("delta_r", "delta_s", "delta_g")) < 1e-4
    dr = [float(r["delta_r"]) for r in rows]
    assert all(b >= a for a, b in zip(dr, dr[1:]))
    assert all(float(r["residual"]) <= 1e-12 * max(1.0, float(r["delta_r"])) for r in rows)
    assert all(r["error"] == "" for r in rows)


def test_mixing_rows(tmp_path):
    code, out = run(tmp_path, "mixing", "--grid", "0:0.75:4", "--presets", "oracle,weak,none,strong",
                    "--epsilon", "0.2")
    assert code == 0
    _, rows = read_csv(out)
    by = {(float(r["proportion"]), r["preset"]): float(r["theory_accuracy"]) for r in rows}
    at_zero = [v for (p, _), v in by.items() if p == 0.0]
    assert max(at_zero) - min(at_zero) <= 1e-12
    for p in (0.25, 0.5, 0.75):
        assert by[(p, "oracle")] >= by[(p, "weak")]


def test_mixing_coupled_epsilon(tmp_path):
    code, out = run(tmp_path, "mixing", "--grid", "0.25,0.5", "--presets", "oracle",
                    "--epsilon-mode", "coupled")
    assert code == 0
    _, rows = read_csv(out)
    eps = [float(r["epsilon"]) for r in rows]
    assert all(0 < e < 0.5 for e in eps)
    # more synthetic samples make the synthetic-only classifier better
    assert eps[1] < eps[0]


def test_phase_rows(tmp_path):
    eps_star = 8 / 11
    grid = f"0.5,0.7,{eps_star!r},0.75,0.9"
    code, out = run(tmp_path, "phase", "--p", "100", "--rho", "0.3", "--phi", "0.8", "--mu-norm", "1",
                    "--grid", grid, "--m-grid", "200,1000,10000")
    assert code == 0
    meta, rows = read_csv(out)
    assert meta["config"]["n"] == 0
    slopes = []
    for m in ("200", "1000", "10000"):
        sub = {float(r["epsilon"]): float(r["theory_accuracy"]) for r in rows if r["m"] == m}
        assert abs(sub[eps_star] - 0.5) <= 1e-12
        slopes.append(abs(sub[0.75] - sub[0.7]) / 0.05)
    assert slopes[0] < slopes[1] < slopes[2]


@pytest.mark.slow
def test_phase_empirical_columns(tmp_path):
    trials = 6
    code, out = run(tmp_path, "phase", "--p", "100", "--rho", "0.3", "--phi", "0.8", "--mu-norm", "1",
                    "--grid", "0.2,0.9", "--m-grid", "1000", "--trials", str(trials), "--n-test", "20000")
    assert code == 0
    _, rows = read_csv(out)
    for r in rows:
        diff = abs(float(r["empirical_mean"]) - float(r["theory_accuracy"]))
        assert diff <= 2 * float(r["empirical_std"]) / np.sqrt(trials) + 0.01


def test_spectrum_rows(tmp_path):
    code, out = run(tmp_path, "spectrum", "--p", "200", "--n-hat-grid", "200,400")
    assert code == 0
    _, rows = read_csv(out)
    for nh in ("200", "400"):
        ev = [r for r in rows if r["n_hat"] == nh and r["kind"] == "eigenvalue"]
        assert len(ev) == 200
        dens = [r for r in rows if r["n_hat"] == nh and r["kind"] == "density"]
        assert len(dens) == 512
        x = np.array([float(r["x"]) for r in dens])
        y = np.array([float(r["value"]) for r in dens])
        atom = float(next(r["value"] for r in rows if r["n_hat"] == nh and r["kind"] == "point_mass"))
        assert abs(integrate.trapezoid(y, x) + atom - 1.0) <= 1e-3
        ks = float(next(r["value"] for r in rows if r["n_hat"] == nh and r["kind"] == "kolmogorov"))
        assert ks <= 0.1


def test_theory_json(tmp_path):
    code, out = run(tmp_path, "theory", "--epsilon", "0.2", name="t.json")
    assert code == 0
    rec = json.loads(out.read_text())
    assert rec["model"] == "theorem1"
    assert 0.5 < rec["stats"]["accuracy"] < 1
    assert set(rec["deltas"]) >= {"delta_r", "delta_s", "delta_g"}
    for model in ("isotropic",):
        code, out = run(tmp_path, "theory", "--model", model, "--epsilon", "0.2", name="i.json")
        assert code == 0


def test_theory_corollary_requires_synthetic_only(tmp_path):
    code, _ = run(tmp_path, "theory", "--model", "corollary", name="c.json")
    assert code == 2
    code, out = run(tmp_path, "theory", "--model", "corollary", "--n", "0", name="c.json")
    assert code == 0


def test_simulate_rows_and_summary(tmp_path):
    code, out = run(tmp_path, "simulate", "--p", "20", "--n", "50", "--m", "50", "--n-hat", "100",
                    "--trials", "3", "--n-test", "500")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[-1].startswith("# ")
    summary = json.loads(lines[-1][2:])["summary"]
    _, rows = read_csv(out)
    accs = [float(r["accuracy"]) for r in rows]
    assert len(rows) == 3 and summary["mean_acc"] == pytest.approx(np.mean(accs))


@pytest.mark.slow
def test_validate_reference_point_passes(tmp_path):
    code, out = run(tmp_path, "validate", "--p", "200", "--n", "1000", "--m", "1000", "--n-hat", "1000",
                    "--mu-norm", "0.7", "--gamma", "1", "--epsilon", "0.2", "--rho", "0", "--phi", "1",
                    "--trials", "20", "--seed", "1", name="v.json")
    report = json.loads(out.read_text())
    assert code == 0 and report["passed"]
    acc = next(c for c in report["checks"] if c["name"] == "accuracy")
    assert abs(acc["difference"]) <= 0.02 and "z" in acc


def test_validate_chance_level(tmp_path):
    code, out = run(tmp_path, "validate", "--p", "50", "--n", "0", "--m", "500", "--epsilon", "0.5",
                    "--rho", "1", "--phi", "1", "--trials", "5", "--n-test", "5000", name="v.json")
    report = json.loads(out.read_text())
    chance = next(c for c in report["checks"] if c["name"] == "chance_level")
    assert chance["passed"]
    assert 0.47 <= chance["theory"] <= 0.53 and 0.47 <= chance["empirical"] <= 0.53


def test_validate_failure_exit_code(tmp_path):
    # an impossible tolerance forces a failed check
    code, out = run(tmp_path, "validate", "--p", "20", "--n", "50", "--m", "50", "--trials", "2",
                    "--n-test", "500", "--tolerance", "0", name="v.json")
    assert code == 4
    assert json.loads(out.read_text())["passed"] is False


REGIME_BREAK = ["--p", "22", "--n", "16", "--m", "4", "--n-hat", "14", "--mu-norm", "2.9",
                "--gamma", "0.0087", "--epsilon", "0.41", "--rho", "0.26", "--phi", "0.074"]


def test_component_error_becomes_failed_check(tmp_path):
    code, out = run(tmp_path, "validate", *REGIME_BREAK, "--trials", "2", "--n-test", "200",
                    name="v.json")
    assert code == 4
    report = json.loads(out.read_text())
    theory = next(c for c in report["checks"] if c["name"] == "theory")
    assert not theory["passed"] and "InvalidRegimeError" in theory["error"]
    assert "empirical" in report


def test_numerical_regime_error_exit_3(tmp_path, capsys):
    code, _ = run(tmp_path, "theory", *REGIME_BREAK, name="t.json")
    assert code == 3
    assert "h1" in capsys.readouterr().err


def test_config_errors_exit_2(tmp_path, capsys):
    code, _ = run(tmp_path, "validate", "--gamma", "0", name="v.json")
    assert code == 2
    assert "gamma" in capsys.readouterr().err
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p": 10, "epsilonn": 0.1}))
    code, _ = run(tmp_path, "theory", "--config", str(cfg), name="t.json")
    assert code == 2
    assert "epsilonn" in capsys.readouterr().err
    code, _ = run(tmp_path, "mixing", "--presets", "bogus")
    assert code == 2


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p": 30, "n": 100, "m": 100, "n_hat": 100, "mu_norm": 1.0, "gamma": 2.0}))
    code, out = run(tmp_path, "theory", "--config", str(cfg), "--gamma", "0.5", name="t.json")
    assert code == 0
    cfg_out = json.loads(out.read_text())["meta"]["config"]
    assert cfg_out["p"] == 30 and cfg_out["gamma"] == 0.5


def test_ingest(tmp_path):
    rng = np.random.default_rng(0)
    p, k = 10, 1500
    y = rng.choice([-1, 1], k)
    X = rng.standard_normal((k, p)) + 0.5 * y[:, None] * (np.arange(p) == 0)
    path = tmp_path / "data.csv"
    with path.open("w") as fh:
        fh.write(",".join(f"f{i}" for i in range(p)) + ",label\n")
        for xi, yi in zip(X, y):
            fh.write(",".join(f"{v:.6f}" for v in xi) + ("," + ("yes" if yi > 0 else "no")) + "\n")
    code, out = run(tmp_path, "ingest", "--csv", str(path), "--label-column", "label", "--n", "300",
                    "--n-hat", "600", "--epsilon", "0.2", "--trials", "2", "--grid", "0,0.5")
    assert code == 0
    meta, rows = read_csv(out)
    assert meta["dataset"]["rows"] == k and meta["dataset"]["label_values"] == ["no", "yes"]
    assert len(rows) == 4 and all(0.5 < float(r["empirical_mean"]) <= 1 for r in rows)
    code, _ = run(tmp_path, "ingest", "--csv", str(tmp_path / "missing.csv"), "--label-column", "label")
    assert code == 2


def sweep_file(tmp_path, **over):
    spec = {"variable": "epsilon", "grid": [0.0, 0.3],
            "base": {"p": 50, "n": 0, "m": 250, "n_hat": 500, "mu_norm": 1.0, "gamma": 1.0,
                     "rho": 0.3, "phi": 0.8},
            "trials": 2, "n_test": 1000, "outputs": ["theory", "empirical"]}
    spec.update(over)
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(spec))
    return path


def test_sweep(tmp_path):
    code, out = run(tmp_path, "sweep", str(sweep_file(tmp_path)))
    assert code == 0
    meta, rows = read_csv(out)
    assert meta["sweep"]["variable"] == "epsilon"
    assert [float(r["value"]) for r in rows] == [0.0, 0.3]
    assert all(r["empirical_mean"] for r in rows)


@pytest.mark.parametrize("over", [
    {"variable": "nope"}, {"grid": [0.3, 0.1]}, {"grid": []}, {"outputs": ["plots"]},
    {"extra": 1}, {"variable": "synthetic_proportion", "grid": [0.5, 1.0]},
])
def test_bad_sweep_specs(tmp_path, over):
    code, _ = run(tmp_path, "sweep", str(sweep_file(tmp_path, **over)))
    assert code == 2


def test_sweep_spec_variables():
    base = {"p": 100, "n": 200, "m": 0, "n_hat": 100, "mu_norm": 1.0, "gamma": 1.0}
    spec = SweepSpec.from_dict({"variable": "p_over_n", "grid": [0.5, 1.0], "base": base})
    assert spec.config_at(0.5).p == 100
    spec = SweepSpec.from_dict({"variable": "eta_s", "grid": [0.5], "base": base})
    assert spec.config_at(0.5).m == 200
    spec = SweepSpec.from_dict({"variable": "synthetic_proportion", "grid": [0.5], "base": base})
    assert spec.config_at(0.5).m == 200


@pytest.mark.parametrize("argv", [
    ["deltas", "--grid", "0.1:2:5"],
    ["mixing", "--grid", "0:0.5:2", "--trials", "2", "--n-test", "500", "--p", "20", "--n", "50",
     "--n-hat", "60"],
    ["spectrum", "--p", "50", "--n-hat-grid", "50,100"],
    ["simulate", "--p", "20", "--n", "40", "--m", "40", "--n-hat", "50", "--trials", "2",
     "--n-test", "300", "--workers", "2"],
])
def test_byte_identical_reruns(tmp_path, argv):
    _, a = run(tmp_path, *argv, name="a.csv")
    _, b = run(tmp_path, *argv, name="a2.csv")
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "synthprune", "theory", "--p", "20"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["stats"]["accuracy"] > 0.5
