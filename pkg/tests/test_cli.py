import json
import subprocess
import sys

import numpy as np
import pytest

from qmcar import io as qio
from qmcar.cli import main
from qmcar.discrepancy import star_discrepancy_2d_uniform
from qmcar.driver import make_driver


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_criterion_auto(capsys):
    rc, out, _ = run(capsys, "criterion", "--family", "fibonacci", "--k", "12", "--R", "auto")
    assert rc == 0
    payload = json.loads(out)
    assert payload["R"] == 21 and payload["M"] == 144 and payload["method"] == "fibonacci-fast"


def test_criterion_general_flag(capsys):
    _, fast, _ = run(capsys, "criterion", "--family", "fibonacci", "--k", "9")
    _, gen, _ = run(capsys, "criterion", "--family", "fibonacci", "--k", "9", "--general")
    assert abs(json.loads(fast)["value"] - json.loads(gen)["value"]) <= 1e-9


def test_unknown_density(capsys):
    rc, out, err = run(capsys, "sample", "--density", "nosuch", "--family", "fibonacci", "--k", "8")
    assert rc == 2 and out == ""
    assert "example1" in err and err.count("\n") == 1


def test_missing_config(capsys, tmp_path):
    rc, _, err = run(capsys, "experiment", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path))
    assert rc == 3 and err.startswith("error:")


def test_malformed_config(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    rc, _, _ = run(capsys, "experiment", "--config", str(p), "--out", str(tmp_path))
    assert rc == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["driver", "--family", "fibonacci"],
        ["driver", "--family", "random", "--m", "5"],
        ["driver", "--family", "sobol", "--m", "5"],
        ["driver", "--family", "grid", "--m", "5", "--nope"],
        ["criterion", "--family", "kronecker", "--m", "50"],
        ["criterion", "--family", "fibonacci", "--k", "8", "--R", "abc"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["driver", "--family", "fibonacci", "--k", "2"],
        ["driver", "--family", "grid", "--m", "0"],
        ["criterion", "--family", "fibonacci", "--k", "8", "--R", "1"],
        ["criterion", "--family", "fibonacci", "--k", "5", "--R", "6"],
        ["discrepancy", "--mode", "oracle", "--density", "uniform", "--family", "grid", "--m", "9", "--grid", "10"],
        ["discrepancy", "--mode", "2d", "--family", "random", "--m", "50", "--seed", "1", "--max-points", "10"],
        ["integrate", "--f", "cos", "--density", "example1", "--family", "fibonacci", "--k", "8"],
        ["sample", "--density", "example1", "--L", "0.1", "--family", "fibonacci", "--k", "8"],
    ],
)
def test_domain_errors(capsys, argv):
    rc, out, err = run(capsys, *argv)
    assert rc == 2 and out == "" and err.startswith("error:")


@pytest.mark.parametrize("sub", ["driver", "sample", "discrepancy", "criterion", "integrate", "experiment"])
def test_help(capsys, sub):
    with pytest.raises(SystemExit) as info:
        main([sub, "--help"])
    assert info.value.code == 0
    assert "usage" in capsys.readouterr().out


@pytest.mark.parametrize("hex_flag", [[], ["--hex"]])
@pytest.mark.parametrize("family, flags", [("kronecker", ["--m", "300"]), ("random", ["--m", "200", "--seed", "4"])])
def test_round_trip_2d(capsys, tmp_path, hex_flag, family, flags):
    path = tmp_path / "pts.csv"
    assert run(capsys, "driver", "--family", family, *flags, *hex_flag, "--out", str(path))[0] == 0
    rc, out, _ = run(capsys, "discrepancy", "--mode", "2d", "--input", str(path))
    assert rc == 0
    seed = int(flags[-1]) if family == "random" else None
    expected = star_discrepancy_2d_uniform(make_driver(family, int(flags[1]), seed)).value
    assert json.loads(out)["value"] == expected
    assert b"\r" not in path.read_bytes()


def test_sample_and_sidecar(capsys, tmp_path):
    out = tmp_path / "s.csv"
    rc, _, _ = run(capsys, "sample", "--density", "example1", "--family", "fibonacci", "--k", "20", "--out", str(out))
    assert rc == 0
    side = json.loads(out.with_suffix(".json").read_text())
    samples = qio.read_samples_csv(out.read_text())
    assert side["N"] == samples.size and side["M"] == 6765
    assert abs(side["rate"] - side["C"] / side["L"]) <= 0.01
    rc, res, _ = run(capsys, "discrepancy", "--mode", "1d", "--density", "example1", "--input", str(out))
    rc2, oracle, _ = run(capsys, "discrepancy", "--mode", "oracle", "--density", "example1", "--input", str(out))
    assert rc == rc2 == 0
    assert abs(json.loads(res)["value"] - json.loads(oracle)["value"]) <= 1e-12


def test_density_config_file(capsys, tmp_path):
    cfg = tmp_path / "psi.json"
    cfg.write_text(json.dumps({"kind": "builtin", "name": "example2"}))
    _, a, _ = run(capsys, "sample", "--density", str(cfg), "--family", "grid", "--m", "400")
    _, b, _ = run(capsys, "sample", "--density", "example2", "--family", "grid", "--m", "400")
    assert a == b and a.startswith("y\n")


def test_integrate(capsys):
    rc, out, _ = run(capsys, "integrate", "--f", "x^2", "--density", "example2", "--family", "fibonacci", "--k", "16")
    rep = json.loads(out)
    assert rc == 0 and rep["abs_error"] <= rep["bound"] + 1e-9


def test_experiment_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "grid", "m_pow2_range": [8, 11], "measures": ["dstar"]}))
    rc, out, _ = run(capsys, "experiment", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert rc == 0 and json.loads(out)["rows"] == 4
    csv_text = (tmp_path / "o" / "report.csv").read_text()
    assert len(csv_text.splitlines()) == 5
    assert json.loads((tmp_path / "o" / "report.json").read_text())["rows"][0]["family"] == "grid"


def test_driver_stdout_is_csv(capsys):
    rc, out, _ = run(capsys, "driver", "--family", "fibonacci", "--k", "4")
    assert rc == 0
    assert out.splitlines() == ["j,x1,x2", "1,0.33333333333333331,0.66666666666666663",
                                "2,0.66666666666666663,0.33333333333333331", "3,1,0"]
    assert np.array_equal(qio.read_points_csv(out), make_driver("fibonacci", 4).points)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qmcar", "criterion", "--family", "fibonacci", "--k", "12", "--R", "auto"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["R"] == 21
