import json

import pytest

from lsbec.cli import ConfigError, main, validate


def body(path):
    return "".join(line for line in path.read_text().splitlines(True) if not line.startswith("#"))


def run_cli(tmp_path, name, *args):
    out = tmp_path / name
    status = main([*args, "--output-dir", str(out)])
    return status, out


def test_minimal_config_is_valid():
    cfg = validate({"nu": 1, "gamma": 5, "beta": 1, "rho": 1, "experiment": "bec",
                    "sizes": [1000], "R": 10, "seed": 7})
    assert cfg.experiment == "bec" and cfg.sizes == [1000]


@pytest.mark.parametrize("raw,key", [
    ({"experiment": "gap", "eta": 3}, "eta"),
    ({"experiment": "gap", "c2": 2}, "c2"),
    ({"experiment": "gap", "colour": 2}, "colour"),
    ({"experiment": "gap", "sizes": [0]}, "sizes"),
    ({"experiment": "warp"}, "experiment"),
    ({"experiment": "bec", "rho": -1}, "rho"),
])
def test_bad_configs_name_the_key(raw, key):
    with pytest.raises(ConfigError) as info:
        validate(raw)
    assert info.value.key == key


def test_unknown_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"nu": 1, "teleport": True}))
    assert main(["bec", "--config", str(cfg)]) == 2
    assert "teleport" in capsys.readouterr().err


def test_spectrum_csv(tmp_path):
    status, out = run_cli(tmp_path, "s", "spectrum", "--L", "50", "--n-levels", "5", "--seed", "3")
    assert status == 0
    lines = (out / "spectrum.csv").read_text().splitlines()
    assert lines[0] == "j,E_j" and len(lines) == 6
    assert [int(line.split(",")[0]) for line in lines[1:]] == [1, 2, 3, 4, 5]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["exit_status"] == 0 and "numpy" in manifest["versions"]
    assert manifest["config"]["seed"] == 3


def test_lifshitz_writes_curve_and_fit(tmp_path):
    status, out = run_cli(tmp_path, "l", "lifshitz", "--L", "1000", "--R", "10", "--workers", "1")
    assert status == 0
    assert (out / "curve.csv").exists()
    fit = json.loads((out / "fit.json").read_text())
    assert "slope" in fit and "r2" in fit


def test_reruns_are_byte_identical(tmp_path):
    args = ["bec", "--sizes", "200", "400", "--R", "3", "--seed", "7", "--rho", "0.5",
            "--rho-c", "0.0962"]
    s1, a = run_cli(tmp_path, "a", *args, "--workers", "1")
    s2, b = run_cli(tmp_path, "b", *args, "--workers", "2")
    assert s1 == s2 == 0
    assert body(a / "report.csv") == body(b / "report.csv")


def test_numerical_failure_exits_3(tmp_path):
    # the window of values is empty, so the fit cannot run
    status, out = run_cli(tmp_path, "f", "lifshitz", "--L", "200", "--R", "2",
                          "--value-range", "10", "20", "--workers", "1")
    assert status == 3
    assert json.loads((out / "manifest.json").read_text())["error"]


def test_resource_cap_exits_4(tmp_path):
    status, _ = run_cli(tmp_path, "c", "spectrum", "--L", "100", "--energy-cutoff", "100",
                        "--level-cap", "10")
    assert status == 4


def test_file_and_command_must_agree(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"experiment": "gap"}))
    assert main(["bec", "--config", str(cfg)]) == 2
