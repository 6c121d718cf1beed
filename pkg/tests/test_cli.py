import json

import pytest

from riscap.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def small_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"base": {"n_b": 4, "n_r_y": 3, "n_r_z": 3, "n_u": 4, "p_paths": 2, "l_paths": 3}}))
    return str(p)


def test_validate_to_stdout(capsys, small_config):
    code, out, err = run(capsys, "validate", "--config", small_config, "--trials", "5")
    assert code == 0 and out.startswith("sweep_axis,sweep_value,exact_mc,")
    assert out.count("\n") == 2


def test_threads_do_not_change_output(tmp_path, capsys, small_config):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["sweep", "--config", small_config, "--trials", "6", "--out", str(a), "--format", "json"]) == 0
    assert main(["sweep", "--config", small_config, "--trials", "6", "--out", str(b), "--format", "json", "--threads", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_override_changes_output(capsys, small_config):
    _, a, _ = run(capsys, "validate", "--config", small_config, "--trials", "4", "--seed", "1")
    _, b, _ = run(capsys, "validate", "--config", small_config, "--trials", "4", "--seed", "2")
    assert a != b


def test_optimize_subcommand(capsys, small_config):
    code, out, _ = run(capsys, "optimize", "--config", small_config, "--trials", "2")
    assert code == 0 and "joint_exact_mc" in out.splitlines()[0]


def test_preset_subcommand(capsys):
    code, out, _ = run(capsys, "fig3", "--trials", "3")
    assert code == 0
    assert out.splitlines()[0] == "sweep_axis,sweep_value,exact_mc,exact_mc_std_err,high_snr_upper,high_snr_upper_std_err"
    assert len(out.splitlines()) == 7


def test_validation_error_is_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"trials": 0}')
    code, out, err = run(capsys, "validate", "--config", str(p))
    assert code == 2 and out == ""
    obj = json.loads(err.strip().splitlines()[-1])
    assert obj["error"] == "validation_error" and obj["key"] == "trials"


def test_missing_config_file(capsys):
    code, _, err = run(capsys, "validate", "--config", "/nonexistent/spec.json")
    assert code == 1 and json.loads(err)["error"] == "io_error"


def test_unwritable_output(capsys, small_config):
    code, _, err = run(capsys, "validate", "--config", small_config, "--trials", "2", "--out", "/nonexistent/x.csv")
    assert code == 1 and "cannot write" in json.loads(err)["message"]


def test_usage_error_is_json(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    assert json.loads(capsys.readouterr().err)["error"] == "usage_error"


def test_bad_threads(capsys, small_config):
    code, _, err = run(capsys, "validate", "--config", small_config, "--threads", "0")
    assert code == 2 and json.loads(err)["key"] == "threads"


def test_preset_rejects_config(capsys, small_config):
    code, _, err = run(capsys, "fig2", "--config", small_config)
    assert code == 2 and json.loads(err)["key"] == "config"
