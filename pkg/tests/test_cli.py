import json
import subprocess
import sys

import pytest

from spinflip.cli import (
    COMMANDS,
    HEADERS,
    ScenarioError,
    emit,
    main,
    parse_complex,
    parse_scenario,
    run_scenario,
)

# cheap argument sets so every command runs in well under a second
FAST = {
    "verify": ["--samples", "20"],
    "scatter": ["--steps", "5"],
    "bound": ["--kappa-max", "3"],
    "converge": ["--eps", "0.4,0.2,0.1"],
    "radial": [],
    "classify": [],
}


def run(cmd, *args, fmt="csv"):
    s = parse_scenario([cmd, *FAST[cmd], *args, "--format", fmt])
    return run_scenario(s), emit(run_scenario(s), fmt)


def test_parse_complex():
    assert parse_complex("2,0") == 2
    assert parse_complex("0, -0.5") == -0.5j
    assert parse_complex("3") == 3
    with pytest.raises(ValueError):
        parse_complex("1,2,3")


def test_parse_scatter_example():
    s = parse_scenario("scatter --family 3 --z 2,0 --kmin 0.1 --kmax 10 --steps 50".split())
    assert s.command == "scatter"
    assert s.params["family"] == 3 and s.params["z"] == 2
    assert s.params["steps"] == 50 and s.params["kmax"] == 10.0


def test_flag_beats_config():
    cfg = "[scatter]\nz = \"0,0.5\"\nsteps = 4\n"
    s = parse_scenario(["scatter", "--z", "1,0"], config_text=cfg)
    assert s.params["z"] == 1
    assert s.params["steps"] == 4
    s = parse_scenario(["scatter"], config_text=cfg)
    assert s.params["z"] == 0.5j


def test_config_file_path(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[radial]\nomega = -3\nw = 0,0,2\n")
    s = parse_scenario(["radial", "--config", str(path)])
    assert s.params["omega"] == -3.0 and s.params["w"] == [0.0, 0.0, 2.0]


def test_unknown_config_key():
    with pytest.raises(ScenarioError, match="colour"):
        parse_scenario(["scatter"], config_text="[scatter]\ncolour = red\n")


@pytest.mark.parametrize("argv,key", [
    (["scatter", "--family", "7"], "family out of range"),
    (["scatter", "--z", "a,b"], "z"),
    (["scatter", "--kmin", "-1"], "kmin"),
    (["converge", "--eps", "0.1,0.2,0.05"], "eps"),
    (["radial", "--w", "1,2"], "w"),
    (["verify", "--samples", "nan"], "samples"),
    (["classify", "--x1", "inf"], "x1"),
])
def test_bad_input_names_key(argv, key):
    with pytest.raises(ScenarioError, match=key):
        parse_scenario(argv)


def test_exit_code_bad_input(capsys):
    assert main(["scatter", "--family", "7"]) == 2
    assert "family out of range" in capsys.readouterr().err
    assert main(["nosuch"]) == 2


def test_exit_code_unwritable(tmp_path, capsys):
    target = tmp_path / "missing" / "out.csv"
    assert main(["radial", "--output", str(target)]) == 2
    assert "output" in capsys.readouterr().err


def test_exit_code_failed_check(capsys):
    # published x1 matrix at unit strength: matching is singular
    assert main(["scatter", "--rashba", "x1", "--value", "1", "--steps", "2"]) == 1
    assert "ill-conditioned" in capsys.readouterr().err
    # order requirement that cannot be met
    assert main(["converge", "--eps", "0.4,0.2,0.1", "--min-order", "3"]) == 1


def test_exit_code_success(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--samples", "10", "--format", "json", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["pass"] is True


@pytest.mark.parametrize("cmd", COMMANDS)
def test_headers(cmd):
    _, payload = run(cmd)
    assert payload.decode().splitlines()[0] == HEADERS[cmd]


def test_documented_headers():
    assert HEADERS["scatter"] == ("k,side,in_spin,re_r_up,im_r_up,re_r_dn,im_r_dn,"
                                  "re_t_up,im_t_up,re_t_dn,im_t_dn,flux_residual")
    assert HEADERS["converge"] == "epsilon,residual,fitted_order"


def test_verify_json_keys():
    report, payload = run("verify", fmt="json")
    data = json.loads(payload)
    for key in ("command", "samples", "max_j4_residual", "max_hm_residual",
                "max_lambda_residual", "family_permutation", "pass", "seed"):
        assert key in data
    assert data["family_permutation"]["1"] == {"family": 3, "sign": 1}
    assert data["family_permutation"]["3"] == {"family": 1, "sign": -1}
    assert data["pass"] is True and report.passed


def test_verify_default_passes():
    report = run_scenario(parse_scenario(["verify"]))
    assert report.passed
    assert report.summary["max_j4_residual"] <= 1e-12


def test_scatter_k1_row():
    report, _ = run("scatter", "--kmin", "1", "--kmax", "1", "--steps", "1", "--side", "left")
    row = dict(zip(report.columns, report.rows[0]))
    assert row["in_spin"] == "up"
    assert row["re_t_up"] == pytest.approx(0.5, abs=1e-12)
    assert row["im_t_dn"] == pytest.approx(-0.5, abs=1e-12)
    assert row["re_r_up"] == pytest.approx(-0.5, abs=1e-12)
    assert row["im_r_dn"] == pytest.approx(-0.5, abs=1e-12)
    assert row["flux_residual"] <= 1e-12


def test_radial_energies():
    report, payload = run("radial")
    energies = sorted(r[2] for r in report.rows if r[0] == "bound")
    assert energies == pytest.approx([-9.0, -1.0], abs=1e-10)
    assert report.passed
    assert b"bound,,-9," in payload


def test_converge_rows():
    report, _ = run("converge")
    assert [r[0] for r in report.rows] == [0.4, 0.2, 0.1]
    assert report.summary["oracle_max_deviation"] <= 1e-9


def test_classify_summary():
    report, payload = run("classify", fmt="json")
    data = json.loads(payload)
    assert data["accepted"] is True
    assert data["rashba"] == {"x1": -0.5, "x4": -1.0}
    assert [r[0] for r in report.rows] == ["params", "mr_matrix1", "mr_matrix4",
                                          "substituted_x1", "substituted_x4"]
    rejected = run_scenario(parse_scenario(["classify", "--z2", "1,0"]))
    assert rejected.summary["violated"] == "z2 != 0"


def test_json_round_trip():
    report, payload = run("scatter", fmt="json")
    data = json.loads(payload)
    assert data["rows"][0][0] == report.rows[0][0]
    assert json.dumps(data, indent=2) + "\n" == payload.decode()


@pytest.mark.parametrize("cmd", COMMANDS)
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_deterministic(cmd, fmt):
    assert run(cmd, fmt=fmt)[1] == run(cmd, fmt=fmt)[1]


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.csv"
    proc = subprocess.run([sys.executable, "-m", "spinflip", "radial", "-o", str(out)],
                          capture_output=True)
    assert proc.returncode == 0
    assert out.read_bytes() == run("radial")[1]
