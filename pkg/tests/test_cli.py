import io
import json
import math

import pytest

from qvf_eos.cli import EXIT_CHECK, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, run
from qvf_eos.io import read_table


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def table(text, tmp_path, name="out.csv"):
    path = tmp_path / name
    path.write_text(text)
    return read_table(path)


def test_dispersion_table(tmp_path):
    code, out, _ = cli("dispersion", "--k", "1:2:2")
    assert code == EXIT_OK
    columns, data, _ = table(out, tmp_path)
    assert columns == ["k", "omega_lower", "omega_upper", "omega_bare"]
    assert data["omega_lower"][0] == pytest.approx((math.sqrt(5) - 1) / 2, rel=1e-15)


def test_hopfield_json(tmp_path):
    code, out, _ = cli("hopfield", "--k", "1:1:1", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert [row["branch"] for row in doc["data"]] == [0, 1]
    assert doc["meta"]["model"] == {"kind": "lorentz", "eps_r": 1.0, "omega_x": 1.0, "g": 0.5}


def test_ratio_and_spectrum(tmp_path):
    _, out, _ = cli("ratio", "--omega", "0.5:2:4")
    _, data, _ = table(out, tmp_path)
    assert data["value"].tolist()[1] == 0.0
    code, out, _ = cli("spectrum", "--source", "vacuum", "--omega", "1:1:1", "--t-p", "1")
    assert code == EXIT_OK
    _, data, _ = table(out, tmp_path)
    assert data["value"][0] == pytest.approx(math.exp(-0.5) / 4)


def test_timecorr_vacuum(tmp_path):
    code, out, _ = cli("timecorr", "--source", "vacuum", "--tau", "0:0:1", "--t-p", "1")
    assert code == EXIT_OK
    _, data, _ = table(out, tmp_path)
    assert data["value"][0] == pytest.approx(1 / (4 * math.pi), rel=1e-10)


def test_nk_columns(tmp_path):
    _, out, _ = cli("nk", "--k", "1:1:1")
    _, data, _ = table(out, tmp_path)
    assert data["value"][0] == pytest.approx(0.0590170, abs=1e-7)
    assert abs(data["residual"][0]) < 1e-12


def test_multi_model_from_flags(tmp_path):
    code, out, _ = cli("dispersion", "--oscillators", "1:0.3,2.5:0.4", "--eps-r", "1.5", "--k", "1:1:1")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "k,omega_0,omega_1,omega_2,omega_bare"


def test_config_file(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({
        "model": {"kind": "lorentz", "eps_r": 2.0, "omega_x": 1.0, "g": 0.2},
        "grids": {"omega": [0.5, 0.5, 1]},
        "format": "json",
    }))
    code, out, _ = cli("ratio", "--config", str(config))
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["meta"]["model"]["eps_r"] == 2.0
    assert doc["data"][0]["value"] == pytest.approx(math.sqrt(1 / (1 - 0.16 / (0.25 - 1))))


def test_synth_invert_fit_pipeline(tmp_path):
    trace = tmp_path / "trace.csv"
    code, _, _ = cli("synth", "--omega", "0.01:5:400", "--sigma", "0", "--seed", "1", "--output", str(trace))
    assert code == EXIT_OK
    code, out, _ = cli("invert", "--input", str(trace), "--format", "json")
    assert code == EXIT_OK
    gaps = json.loads(out)["meta"]["gaps"]
    assert len(gaps) == 1 and abs(gaps[0][0] - 1) < 0.02
    code, out, _ = cli("fit", "--input", str(trace), "--guess", "1.2,0.4")
    assert code == EXIT_OK
    _, data, _ = table(out, tmp_path, "fit.csv")
    assert data["parameter"].tolist() == ["eps_r", "omega_x", "g"]
    assert data["value"][1] == pytest.approx(1.0, rel=1e-9)
    assert data["value"][2] == pytest.approx(0.5, rel=1e-9)


def test_reproduce_fig2(tmp_path):
    code, out, _ = cli("reproduce-fig2", "--output-dir", str(tmp_path / "fig"))
    assert code == EXIT_OK
    _, disp, _ = read_table(tmp_path / "fig" / "fig2a_dispersion.csv")
    assert disp["k"].size == 300 and 1.0 in disp["k"]
    _, ratio, _ = read_table(tmp_path / "fig" / "fig2b_ratio.csv")
    gap = ratio["omega"][ratio["value"] == 0.0]
    assert gap.min() >= 1.0 and gap.max() < math.sqrt(2)


def test_ratio_value_at_twice_resonance(tmp_path):
    code, out, _ = cli("ratio", "--model", "lorentz", "--eps-r", "1", "--omega-x", "1", "--g", "0.5",
                       "--omega", "0.01:5:500")
    assert code == EXIT_OK
    _, data, _ = table(out, tmp_path)
    i = abs(data["omega"] - 2.0).argmin()
    assert data["omega"][i] == pytest.approx(2.0, abs=1e-12)
    assert data["value"][i] == pytest.approx(1.224745, abs=1e-6)


def test_check_passes():
    code, out, _ = cli("check", "--model", "lorentz", "--eps-r", "1", "--omega-x", "1", "--g", "0.5")
    assert code == EXIT_OK, out
    assert out.strip().endswith("checks passed")
    assert "[FAIL]" not in out


def test_check_failure_exit_code(monkeypatch):
    from qvf_eos import cli as cli_module
    from qvf_eos.checks import CheckResult

    monkeypatch.setattr(cli_module, "run_checks", lambda *a, **k: [CheckResult("x", False, "forced")])
    code, out, _ = cli("check")
    assert code == EXIT_CHECK
    assert "[FAIL] x: forced" in out


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["ratio", "--omega", "1:2"],
    ["ratio", "--omega", "2:1:10"],
    ["ratio", "--eps-r", "-1"],
    ["ratio", "--config", "/nonexistent.json"],
    ["spectrum", "--units", "reduced", "--c", "3"],
    ["fit", "--input", "/nonexistent.csv"],
])
def test_usage_errors(argv):
    code, _, err = cli(*argv)
    assert code == EXIT_USAGE
    assert "usage error" in err


def test_numerical_error_exit_code():
    code, _, err = cli("timecorr", "--filter", "identity", "--tau", "0:1:2")
    assert code == EXIT_NUMERIC
    assert "DivergentIntegral" in err


def test_si_units_run():
    code, out, _ = cli("dispersion", "--units", "si", "--omega-x", "1e13", "--g", "5e12", "--k", "10:100:3")
    assert code == EXIT_OK
    assert len(out.splitlines()) == 4
