import csv
import io
import json
import math

import pytest

from wva_lab import bench, cli
from wva_lab.servo import TRACE_COLUMNS

SMALL = {
    "curves": ["--theta-grid", "log:1e-5:0.1:5", "--aw", "1,100"],
    "qfi": ["--eta-grid", "lin:0:0.5:6"],
    "nonlinearity": ["--theta-grid", "log:1e-5:0.1:5"],
    "compare": [],
    "servo": [],
}

EXPECTED_FILES = {
    "curves": {"curves", "curves_aw1", "curves_aw100"},
    "qfi": {"qfi"},
    "nonlinearity": {"nonlinearity", "nonlinearity_limits"},
    "compare": {"compare"},
    "servo": {"servo", "servo_summary"},
}

GOLDEN_COLUMNS = {
    "curves": (
        "theta,delta,epsilon,p_d1,p_d2,i_d1,i_d2,signal,theta_prime,re_aw,im_aw,n_prime,signal_ratio"
    ),
    "qfi": "eta,theta,scheme,re_aw,im_aw,qfi,cramer_rao_bound",
    "nonlinearity": "a_w,theta,a_w_theta,nonlinearity,nonlinearity_ppm,below_threshold",
    "nonlinearity_limits": "a_w,threshold_ppm,theta_max,a_w_theta_max",
    "compare": (
        "scheme,accuracy_per_epsilon,accuracy_limit,snr,precision_hard,precision_easy,"
        "precision_ratio_hard,precision_ratio_easy,theta_max_open,dynamic_range_open,"
        "theta_min_closed,theta_max_closed,dynamic_range_closed,qfi"
    ),
    "servo": "iteration,phi_hat,signal,theta_hat_running",
    "servo_summary": "theta,theta_hat,phi_hat,iterations,converged,precision",
}


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def header_lines(path):
    return [ln for ln in path.read_text().splitlines() if ln.startswith("#")]


@pytest.mark.parametrize("command", sorted(SMALL))
def test_subcommand_outputs(tmp_path, command):
    assert cli.main([command, "--out", str(tmp_path), *SMALL[command]]) == 0
    assert {p.stem for p in tmp_path.iterdir()} == EXPECTED_FILES[command]
    for p in tmp_path.iterdir():
        body = [ln for ln in p.read_text().splitlines() if not ln.startswith("#")]
        assert body[0] == GOLDEN_COLUMNS.get(p.stem, GOLDEN_COLUMNS["curves"])
        assert header_lines(p)[0] == f"# wva-lab {command} schema={bench.SCHEMA_VERSION}"


@pytest.mark.parametrize("command", sorted(SMALL))
def test_byte_identical_reruns(tmp_path, command):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main([command, "--out", str(d), "--seed", "5", *SMALL[command]]) == 0
    for p in a.iterdir():
        assert p.read_bytes() == (b / p.name).read_bytes()


def test_noisy_servo_seeded(tmp_path):
    args = ["servo", "--alpha", "1e-3", "--beta", "1e-4", "--max-iterations", "30"]
    for d, seed in (("a", "1"), ("b", "1"), ("c", "2")):
        assert cli.main([*args, "--seed", seed, "--out", str(tmp_path / d)]) == 0
    a, b, c = ((tmp_path / d / "servo.csv").read_bytes() for d in "abc")
    assert a == b
    assert a != c


def test_header_records_effective_config(tmp_path):
    assert cli.main(["compare", "--out", str(tmp_path), "--gamma", "0.1"]) == 0
    head = header_lines(tmp_path / "compare.csv")
    assert "# gamma = 0.1" in head
    assert "# seed = 0" in head
    assert "# format = csv" in head


def test_precedence_flag_over_file_over_default(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# comment\ngamma = 0.05\nbeta = 0.02  # trailing\n")
    assert cli.main(["compare", "--config", str(conf), "--gamma", "0.1", "--out", str(tmp_path)]) == 0
    head = header_lines(tmp_path / "compare.csv")
    assert "# gamma = 0.1" in head
    assert "# beta = 0.02" in head
    assert "# alpha = 1.0" in head


def test_set_override(tmp_path):
    assert cli.main(["qfi", "--set", "theta=0.0015", "--eta-grid", "0.1", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "qfi.csv")
    assert {float(r["theta"]) for r in rows} == {0.0015}


def test_json_mirrors_csv(tmp_path):
    assert cli.main(["nonlinearity", "--out", str(tmp_path), *SMALL["nonlinearity"]]) == 0
    assert cli.main(["nonlinearity", "--out", str(tmp_path), "--format", "json", *SMALL["nonlinearity"]]) == 0
    doc = json.loads((tmp_path / "nonlinearity.json").read_text())
    assert doc["schema"] == bench.SCHEMA_VERSION
    assert doc["command"] == "nonlinearity"
    assert ",".join(doc["columns"]) == GOLDEN_COLUMNS["nonlinearity"]
    rows = read_csv(tmp_path / "nonlinearity.csv")
    assert len(rows) == len(doc["rows"])
    for c_row, j_row in zip(rows, doc["rows"]):
        for k in doc["columns"]:
            assert float(c_row[k]) == pytest.approx(float(j_row[k]), rel=1e-15)


def test_curves_values(tmp_path):
    assert cli.main(["curves", "--out", str(tmp_path), *SMALL["curves"]]) == 0
    for row in read_csv(tmp_path / "curves_aw100.csv"):
        theta = float(row["theta"])
        assert float(row["theta_prime"]) == pytest.approx(math.atan(100 * math.tan(theta)), abs=1e-12)
        assert float(row["signal_ratio"]) == pytest.approx(math.sin(2 * float(row["theta_prime"])), abs=1e-10)


def test_compare_values(tmp_path):
    assert cli.main(["compare", "--out", str(tmp_path)]) == 0
    rows = {r["scheme"]: r for r in read_csv(tmp_path / "compare.csv")}
    assert float(rows["DWM"]["accuracy_per_epsilon"]) == pytest.approx(1e-2)
    assert float(rows["SI"]["accuracy_per_epsilon"]) == 1.0
    assert float(rows["SWM"]["accuracy_per_epsilon"]) == pytest.approx(1e4)
    assert rows["SWM"]["snr"] == ""
    assert float(rows["DWM"]["precision_ratio_easy"]) == pytest.approx(1e-2)


def test_qfi_zero_information_written_as_inf(tmp_path):
    assert cli.main(["qfi", "--eta-grid", "0.5", "--aw", "100", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "qfi.csv")
    assert all(r["cramer_rao_bound"] == "inf" for r in rows)


def test_servo_trace(tmp_path):
    assert cli.main(["servo", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "servo.csv")
    assert tuple(rows[0]) == TRACE_COLUMNS
    (summary,) = read_csv(tmp_path / "servo_summary.csv")
    assert summary["converged"] == "1"
    assert float(summary["theta_hat"]) == pytest.approx(1e-3, abs=2e-8)


@pytest.mark.parametrize(
    "argv",
    [
        ["compare", "--set", "nonsense=1"],
        ["compare", "--set", "gamma"],
        ["compare", "--gamma", "abc"],
        ["curves", "--theta-grid", "0.3,0.1"],
        ["curves", "--aw", ""],
        ["servo", "--scheme", "SWM"],
        ["servo", "--seed", "x"],
        ["compare", "--phi-min", "0"],
    ],
)
def test_bad_arguments_exit_2(tmp_path, argv, capsys):
    try:
        code = cli.main([*argv, "--out", str(tmp_path)])
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_unknown_key_in_config_file(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("colour = blue\n")
    assert cli.main(["compare", "--config", str(conf), "--out", str(tmp_path)]) == 2
    conf.write_text("no equals sign\n")
    assert cli.main(["compare", "--config", str(conf), "--out", str(tmp_path)]) == 2


def test_io_errors_exit_3(tmp_path):
    assert cli.main(["compare", "--config", str(tmp_path / "missing.conf")]) == 3
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["compare", "--out", str(blocker / "sub")]) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["servo", "--theta", "0.05", "--modulator-range", "0.5"],
        ["qfi", "--theta", "0.01"],
        ["curves", "--aw", "nan"],
    ],
)
def test_numeric_errors_exit_4(tmp_path, argv):
    assert cli.main([*argv, "--out", str(tmp_path)]) == 4


def test_config_file_parser(tmp_path):
    conf = tmp_path / "c.conf"
    conf.write_text("theta-grid = lin:0:1:3\n\n  aw=1 # one\n")
    assert cli.read_config_file(conf) == {"theta_grid": "lin:0:1:3", "aw": "1"}


def test_make_grid():
    assert list(bench.make_grid("lin:0:1:3")) == [0.0, 0.5, 1.0]
    assert bench.make_grid("log:1e-6:1:7")[3] == pytest.approx(1e-3)
    assert list(bench.make_grid("0.1, 0.2")) == [0.1, 0.2]
    for bad in ("", "lin:0:1:0", "0.2,0.1", "0.1,0.1"):
        with pytest.raises(ValueError):
            bench.make_grid(bad)
