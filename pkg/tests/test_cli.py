import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from freescs.cli import main
from freescs.scenario import (
    ScenarioParseError,
    ScenarioValidationError,
    build_scenario,
    load_scenario,
    parse_text,
)
from freescs.statistics import classical_trajectory

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"

R_FORM = """\
model.hbar = 1
model.m0 = 1
model.gamma = 0.01
init.r = 0.4
init.varphi = 0.5
init.theta_varphi = 1.5707963267948966
init.sigma_x0 = 1
time.t_start = 0
time.t_end = 10
time.n_samples = 3
"""

FG_FORM = """\
model.hbar = 1
model.m0 = 1
model.gamma = 0.05
model.l = 1
init.f0 = 1
init.g0 = 0
init.varphi = 2
time.t_start = 0
time.t_end = 1
time.n_samples = 2
"""


def write(tmp_path, text, name="s.scn"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_table(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    return rows


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# --- scenario parsing -------------------------------------------------------------


def test_parse_sections_and_comments():
    table = parse_text("# header\nmodel.hbar = 1  # inline\n\ngrid = auto\n")
    assert table["model"] == {"hbar": "1"} and table["grid"] == {"mode": "auto"}


@pytest.mark.parametrize("text", ["model.hbar 1", "hbar = 1", "foo.bar = 1", "model.hbar = 1\nmodel.hbar = 2", "model.hbar ="])
def test_parse_errors(text):
    with pytest.raises(ScenarioParseError):
        parse_text(text)


def test_r_form_sets_length_scale():
    sc = build_scenario(parse_text(R_FORM))
    assert abs(sc.model.l - math.sqrt(2) * math.exp(0.4)) < 1e-15
    assert abs(sc.init.zeta0 - math.tanh(0.4)) < 1e-15
    assert sc.grid is None and sc.truncation_eps == 1e-10


def test_complex_values_accept_i_suffix():
    sc = build_scenario(parse_text(FG_FORM.replace("init.varphi = 2", "init.varphi = 1 + 0.5i")))
    assert sc.init.varphi == 1 + 0.5j


@pytest.mark.parametrize(
    "edit",
    [
        lambda s: s + "init.f0 = 1\n",  # both init forms
        lambda s: s.replace("time.n_samples = 3", "time.n_samples = 1"),
        lambda s: s + "output.truncation_eps = 1e-3\n",
        lambda s: s + "output.truncation_eps = 0\n",
        lambda s: s.replace("model.m0 = 1", "model.m0 = -1"),
        lambda s: s + "model.l = 2\n",
        lambda s: s + "output.artifacts = nonsense\n",
        lambda s: s + "model.mass = 3\n",
        lambda s: s.replace("time.t_end = 10\n", ""),
        lambda s: s + "init.regime = cs\n",  # zeta0 != 0
    ],
)
def test_validation_errors(edit):
    with pytest.raises(ScenarioValidationError):
        build_scenario(parse_text(edit(R_FORM)))


def test_inadmissible_squeeze_rejected():
    with pytest.raises(ScenarioValidationError):
        build_scenario(parse_text(FG_FORM.replace("init.g0 = 0", "init.g0 = 1")))


def test_non_numeric_is_parse_error():
    with pytest.raises(ScenarioParseError):
        build_scenario(parse_text(R_FORM.replace("model.gamma = 0.01", "model.gamma = fast")))


# --- subcommands --------------------------------------------------------------------


def test_moments_minimum_uncertainty(tmp_path, capsys):
    code, out, _ = run(["moments", write(tmp_path, R_FORM), "--t", "0"], capsys)
    assert code == 0
    row = read_table(out)[0]
    assert abs(float(row["sigma_x_sigma_p"]) - 0.5) < 1e-12


def test_transition_coherent_ground_probability(tmp_path, capsys):
    code, out, _ = run(["transition", write(tmp_path, FG_FORM), "--t", "0"], capsys)
    assert code == 0
    rows = read_table(out)
    assert abs(float(rows[0]["P_n"]) - math.exp(-4)) < 1e-15
    assert abs(sum(float(r["P_n"]) for r in rows) - 1) < 1e-10


def test_verify_subcommand(tmp_path, capsys):
    code, out, _ = run(["verify", str(SCENARIOS / "verify.scn"), "--t", "2"], capsys)
    assert code == 0
    row = read_table(out)[0]
    assert float(row["relative_residual"]) < 1e-5 and row["converged"] == "true"


def test_json_output(tmp_path, capsys):
    code, out, _ = run(["evolve", write(tmp_path, FG_FORM), "--t", "0.5", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    row = dict(zip(doc["columns"], doc["rows"][0]))
    assert row["t"] == 0.5 and abs(row["mu"] - 1) < 1e-12


def test_coeffs_fixed_truncation(tmp_path, capsys):
    code, out, _ = run(["coeffs", write(tmp_path, FG_FORM), "--n-max", "5", "--method", "closed_form"], capsys)
    assert code == 0
    rows = read_table(out)
    assert [int(r["n"]) for r in rows] == list(range(6))
    # coherent state with xi = 2: |c_n|^2 is Poisson(4)
    for r in rows:
        n = int(r["n"])
        assert abs(float(r["abs_sq"]) - 4**n * math.exp(-4) / math.factorial(n)) < 1e-15


def test_density_subcommand(tmp_path, capsys):
    code, out, _ = run(["density", write(tmp_path, R_FORM + "grid.n_points = 101\n")], capsys)
    assert code == 0
    rows = read_table(out)
    x = np.array([float(r["x"]) for r in rows])
    rho = np.array([float(r["rho"]) for r in rows])
    assert len(rows) == 101 and abs(np.sum(rho) * (x[1] - x[0]) - 1) < 1e-6


def test_overlap_subcommand(tmp_path, capsys):
    a = write(tmp_path, R_FORM, "a.scn")
    code, out, _ = run(["overlap", a, "--other", a, "--t", "3"], capsys)
    assert code == 0
    row = read_table(out)[0]
    assert abs(float(row["re"]) - 1) < 1e-14 and abs(float(row["im"])) < 1e-14
    b = write(tmp_path, FG_FORM, "b.scn")
    code, _, err = run(["overlap", a, "--other", b], capsys)
    assert code == 3 and json.loads(err)["kind"] == "validation"


def test_completeness_subcommand(tmp_path, capsys):
    code, out, _ = run(["completeness", write(tmp_path, R_FORM), "--n-max", "4"], capsys)
    assert code == 0
    assert "# ok: true" in out
    code, _, err = run(["completeness", write(tmp_path, R_FORM), "--n-max", "20"], capsys)
    assert code == 3


def test_exit_codes(tmp_path, capsys):
    code, _, err = run(["moments", write(tmp_path, "model.hbar 1\n")], capsys)
    assert code == 2 and json.loads(err) == {
        "status": "error",
        "kind": "parse",
        "exit_code": 2,
        "message": json.loads(err)["message"],
    }
    code, _, err = run(["moments", write(tmp_path, R_FORM + "init.f0 = 1\n")], capsys)
    assert code == 3 and json.loads(err)["kind"] == "validation"
    near_one = FG_FORM.replace("init.g0 = 0", "init.g0 = 0.9999")
    code, _, err = run(["coeffs", write(tmp_path, near_one)], capsys)
    assert code == 4 and json.loads(err)["kind"] == "numerical"
    code, _, _ = run(["moments", str(tmp_path / "missing.scn")], capsys)
    assert code == 2


def test_round_trip_precision(tmp_path, capsys):
    from freescs.statistics import moments

    path = write(tmp_path, R_FORM)
    _, out, _ = run(["moments", path, "--t", "7.25"], capsys)
    row = read_table(out)[0]
    sc = load_scenario(path)
    mo = moments(sc.evolved(7.25), sc.model)
    assert float(row["sigma_x"]) == mo.sigma_x and float(row["mean_p"]) == mo.mean_p


# --- run / figures --------------------------------------------------------------------


def run_dir(scn, out):
    assert main(["run", str(scn), str(out)]) == 0
    return out


def test_run_is_deterministic(tmp_path):
    a = run_dir(SCENARIOS / "fig3a.scn", tmp_path / "a")
    b = run_dir(SCENARIOS / "fig3a.scn", tmp_path / "b")
    for name in ("density.csv", "trajectory.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
        assert b"\r" not in (a / name).read_bytes()


def test_manifest_reproduces_outputs(tmp_path):
    out = run_dir(SCENARIOS / "fig4c.scn", tmp_path / "first")
    manifest = json.loads((out / "manifest.json").read_text())
    assert {"inputs", "tolerances", "version", "wall_time_s", "artifacts"} <= manifest.keys()
    lines = [f"{sec}.{key} = {val}" for sec, kv in manifest["inputs"].items() for key, val in kv.items()]
    rebuilt = write(tmp_path, "\n".join(lines) + "\n", "rebuilt.scn")
    again = run_dir(rebuilt, tmp_path / "second")
    assert (out / "transition.csv").read_bytes() == (again / "transition.csv").read_bytes()


def test_fig1_uncertainty(tmp_path):
    out = run_dir(SCENARIOS / "fig1a.scn", tmp_path)
    text = (out / "uncertainty.csv").read_text()
    rows = read_table(text)
    assert list(rows[0]) == ["gamma", "t", "sigma_x_sigma_p"]
    assert {float(r["gamma"]) for r in rows} == {0.05, 0.1, 0.5, 1.0}
    plateau = [r for r in rows if float(r["gamma"]) == 0.1 and float(r["t"]) == 200.0][0]
    assert abs(float(plateau["sigma_x_sigma_p"]) - 0.5 * math.sqrt(26)) < 1e-6


def test_fig3a_center_follows_classical_path(tmp_path):
    out = run_dir(SCENARIOS / "fig3a.scn", tmp_path)
    rows = read_table((out / "density.csv").read_text())
    assert list(rows[0]) == ["t", "x", "rho"]
    sc = load_scenario(SCENARIOS / "fig3a.scn")
    by_t = {}
    for r in rows:
        by_t.setdefault(float(r["t"]), []).append((float(r["x"]), float(r["rho"])))
    assert len(by_t) == 50
    for t, pts in by_t.items():
        x, rho = np.array(pts).T
        centre = np.sum(x * rho) / np.sum(rho)
        x_cl, _ = classical_trajectory(0.0, -0.5, sc.model, t)
        assert abs(centre - x_cl) < 1e-6 * max(1.0, abs(x_cl))


@pytest.mark.parametrize("name", ["fig4a", "fig4b", "fig4c", "fig4d"])
def test_fig4_spectra(tmp_path, name):
    out = run_dir(SCENARIOS / f"{name}.scn", tmp_path)
    rows = read_table((out / "transition.csv").read_text())
    assert list(rows[0]) == ["t", "n", "P_n"]
    times = sorted({float(r["t"]) for r in rows})
    assert len(times) == 6
    probs = {t: np.array([float(r["P_n"]) for r in rows if float(r["t"]) == t]) for t in times}
    for p in probs.values():
        assert np.all(p >= 0) and p.sum() <= 1 + 1e-12
        if name in ("fig4a", "fig4b"):
            assert np.all(p[1::2] == 0)
    if name == "fig4d":
        poisson = np.array([math.exp(n * math.log(16) - 16 - math.lgamma(n + 1)) for n in range(41)])
        for p in probs.values():
            assert np.max(np.abs(p - poisson)) < 1e-12


def test_fig2_quadratures(tmp_path):
    out = run_dir(SCENARIOS / "fig2b.scn", tmp_path)
    rows = read_table((out / "quadrature.csv").read_text())
    assert abs(float(rows[0]["sigma_Q_sigma_P"]) - 0.5) < 1e-12
    assert float(rows[0]["sigma_Q"]) < 1 / math.sqrt(2)


def test_every_shipped_scenario_runs(tmp_path):
    for scn in sorted(SCENARIOS.glob("*.scn")):
        run_dir(scn, tmp_path / scn.stem)
        assert (tmp_path / scn.stem / "manifest.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "freescs", "moments", str(SCENARIOS / "fig3a.scn")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("# artifact: moments\n")
