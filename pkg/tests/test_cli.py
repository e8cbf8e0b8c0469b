import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from dmtlab import cli
from dmtlab.io import curves_from_csv


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_range():
    assert np.allclose(cli.parse_range("0:0.6:0.01"), np.arange(61) / 100)
    assert cli.parse_range("0:0.6:0.01")[-1] == 0.6
    assert list(cli.parse_range("2:3:0.5")) == [2.0, 2.5, 3.0]
    assert list(cli.parse_range("0.3")) == [0.3]
    for bad in ("1:0:0.1", "0:1:0", "a:b:c", "0:1"):
        with pytest.raises(cli.ConfigError):
            cli.parse_range(bad)


def test_parse_snr_list():
    assert [s.rho_db for s in cli.parse_snr_list("30,40,50")] == [30, 40, 50]
    assert [s.rho_db for s in cli.parse_snr_list("30:60:10")] == [30, 40, 50, 60]


def test_four_regime_curve(capsys):
    code, out, _ = run(capsys, "curve", "--scheme", "theorem1", "--a", "1", "--b", "1", "--c", "0.2", "--r", "0:0.6:0.01")
    assert code == 0
    rs = rows(out)
    assert len(rs) == 61
    assert float(rs[0]["d"]) == pytest.approx(1.2, abs=1e-12)
    assert float(rs[-1]["d"]) == pytest.approx(0.0, abs=1e-12)


def test_parallel_optimal_curve(capsys):
    code, out, _ = run(capsys, "curve", "--scheme", "parallel-optimal", "--r", "0:1:0.01")
    assert code == 0
    (curve,) = curves_from_csv(out)
    assert curve.d[50] == pytest.approx(1.0, abs=1e-12)
    assert rows(out)[0]["network"] == "parallel"


def test_full_duplex_past_max_gain(capsys):
    code, out, _ = run(capsys, "curve", "--scheme", "fd", "--a", "1", "--b", "1", "--c", "1", "--r", "2:3:0.5")
    assert code == 0
    assert [float(r["d"]) for r in rows(out)] == [0.0, 0.0, 0.0]


def test_grid_curve_and_json(capsys, tmp_path):
    out = tmp_path / "c.json"
    code, _, _ = run(
        capsys, "curve", "--scheme", "grid-fd", "--a", "1", "--b", "1", "--c", "0.2",
        "--r", "0:0.4:0.2", "--grid-step", "0.05", "--format", "json", "--out", str(out),
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["meta"]["config"]["grid_step"] == 0.05
    assert [r["d"] for r in doc["rows"]] == pytest.approx([1.2, 0.8, 0.6], abs=1e-12)
    assert doc["rows"][0]["method"] == "grid"


def test_exit_codes(capsys):
    # the four-regime optimum only covers symmetric profiles
    code, _, err = run(capsys, "curve", "--scheme", "theorem1", "--a", "1", "--b", "2", "--c", "0.2", "--r", "0:0.5:0.1")
    assert code == 4 and "error" in err
    code, _, _ = run(capsys, "curve", "--scheme", "fd", "--a", "1", "--b", "1", "--c", "1", "--r", "1:0:0.1")
    assert code == 2
    code, _, _ = run(capsys, "curve", "--scheme", "fd", "--a", "-1", "--b", "1", "--c", "1", "--r", "0:1:0.1")
    assert code == 2
    code, _, _ = run(capsys, "mc", "--scheme", "p2p", "--a", "1", "--b", "0", "--c", "0", "--r", "0.5", "--snr", "30,40", "--n", "1e4")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["curve", "--scheme", "nope", "--r", "0:1:0.1"])
    assert exc.value.code == 2


def test_ddf_out_of_regime_falls_back_to_grid(capsys):
    code, out, err = run(
        capsys, "curve", "--scheme", "ddf", "--a", "1", "--b", "1", "--c", "1.2", "--r", "0:0.2:0.1", "--grid-step", "0.05"
    )
    assert code == 0
    assert "grid" in err
    assert {r["method"] for r in rows(out)} == {"grid"}


def test_figure_writes_curves_and_manifest(capsys, tmp_path):
    code, _, _ = run(capsys, "figure", "parallel", "--out", str(tmp_path / "fig"))
    assert code == 0
    man = json.loads((tmp_path / "fig" / "manifest.json").read_text())
    names = [f["scheme"] for f in man["files"]]
    assert names == ["parallel-optimal", "parallel-static-qmf", "parallel-ddf-upper", "parallel-ddf-split"]
    assert all(f["runtime_s"] >= 0 for f in man["files"])
    (opt,) = curves_from_csv((tmp_path / "fig" / "parallel-optimal.csv").read_text())
    (stat,) = curves_from_csv((tmp_path / "fig" / "parallel-static-qmf.csv").read_text())
    assert np.all(opt.d >= stat.d - 1e-12)


def test_mc_outputs_are_deterministic(capsys, tmp_path):
    argv = ["mc", "--scheme", "p2p", "--a", "1", "--b", "0", "--c", "0", "--r", "0.5", "--snr", "10,20,30", "--n", "1e5", "--seed", "7"]
    for k in (1, 2):
        assert run(capsys, *argv, "--out", str(tmp_path / f"run{k}.csv"))[0] == 0
    for name in ("run{}.csv", "run{}_fit.csv"):
        a = (tmp_path / name.format(1)).read_bytes()
        b = (tmp_path / name.format(2)).read_bytes()
        assert a == b
    fit = rows((tmp_path / "run1_fit.csv").read_text())[0]
    assert fit["seed"] == "7" and int(fit["points_used"]) == 3


def test_mc_unmet_fit_preconditions_exit_3(capsys):
    code, out, err = run(
        capsys, "mc", "--scheme", "parallel-static", "--r", "0.25", "--snr", "50,55,60", "--n", "1e4"
    )
    assert code == 3
    assert "fit" in err
    assert len(rows(out)) == 3


def test_mc_json(capsys):
    code, out, _ = run(capsys, "mc", "--scheme", "ddf", "--a", "1", "--b", "1", "--c", "0", "--r", "0.25", "--snr", "10:30:10", "--n", "2e4", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 3 and doc["fit"]["scheme"] == "ddf"


def test_check_quick(capsys):
    code, out, err = run(capsys, "check", "tables", "--quick")
    assert code == 0
    rep = json.loads(out)
    assert rep["passed"] and rep["cases"] == 100


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dmtlab", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "dmtlab" in res.stdout
