import argparse
import json

import pytest

from src.cli.config import RunConfig
from src.cli.manifest import MANIFEST_NAME
from src.cli.parser import parse_args, parse_axes
from src.cli.runner import ERROR_NAME, main
from src.core.errors import ConfigurationError, FlagError, UnknownCommandError
from src.core.parallel import THREADS_ENV


def read_manifest(out_dir):
    return json.loads((out_dir / MANIFEST_NAME).read_text())


def test_cl1_run_writes_table_and_manifest(tmp_path):
    status = main(["diagnose", "--what", "cl1", "--pmax", "10", "--bmax", "2", "--out-dir", str(tmp_path)])
    assert status == 0
    assert (tmp_path / "cl1.csv").read_text().startswith("p,b,S,bound,pass\n")
    manifest = read_manifest(tmp_path)
    assert manifest["command"] == "diagnose"
    assert manifest["outputs"] == ["cl1.csv"]
    result = manifest["results"][0]
    assert result["all_pass"] is True
    assert result["control_failures"] > 0


def test_unknown_command_exit_code(capsys):
    assert main(["bogus"]) == 21
    report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert report["error"] == "unknown-subcommand"


def test_bad_flag_value_exit_code():
    assert main(["solve", "--nr", "abc"]) == 22


def test_missing_required_input_writes_error_report(tmp_path, capsys):
    assert main(["transform", "--out-dir", str(tmp_path)]) == 22
    report = json.loads((tmp_path / ERROR_NAME).read_text())
    assert report["exit_code"] == 22
    assert report["error"] == "invalid-flags"
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1]) == report


def test_missing_input_file_exit_code(tmp_path):
    argv = ["transform", "--input", str(tmp_path / "absent.dgma"), "--out-dir", str(tmp_path)]
    assert main(argv) == 20


def test_run_config_json_round_trip():
    config = RunConfig("solve", q=0.5, domain=[1.5, 0.75], nr=32)
    assert RunConfig.from_json(config.to_json()) == config


def test_digest_ignores_presentation_fields():
    base = RunConfig("solve")
    assert RunConfig("solve", verbose=True, out_dir="elsewhere").digest() == base.digest()
    assert RunConfig("solve", q=2.5).digest() != base.digest()


def test_config_file_then_flags(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "solve", "q": 0.5, "nr": 16}))
    config = RunConfig.from_args(parse_args(["solve", "--config", str(path), "--nr", "24"]))
    assert config.q == 0.5
    assert config.nr == 24
    assert config.ntheta == 64


def test_run_config_validation(tmp_path):
    with pytest.raises(FlagError):
        RunConfig.from_dict({"command": "solve", "colour": "red"})
    with pytest.raises(UnknownCommandError):
        RunConfig("bogus")
    with pytest.raises(FlagError):
        RunConfig("diagnose", what="spectrum")
    with pytest.raises(FlagError):
        RunConfig("solve", input=str(tmp_path))
    with pytest.raises(ConfigurationError):
        RunConfig("flow", dt=0.0)


def test_parse_axes():
    assert parse_axes("2") == [2.0, 2.0]
    assert parse_axes("1,0.5") == [1.0, 0.5]
    for text in ("a", "1,2,3"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_axes(text)


def test_parser_aliases():
    args = parse_args(["oracle", "--R", "2", "--lambda", "3"])
    assert (args.radius, args.lam) == (2.0, 3.0)
    args = parse_args(["diagnose", "--what", "induction", "--Nmax", "8"])
    assert args.n_max == 8
    assert not hasattr(args, "q")


def test_verify_linear_tables_are_reproducible(tmp_path):
    argv = ["verify-linear", "--modes", "16", "--vertical", "16", "--samples", "3", "--seed", "7"]
    assert main(argv + ["--out-dir", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out-dir", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a" / "ratios.csv").read_bytes()
    assert first == (tmp_path / "b" / "ratios.csv").read_bytes()
    assert len(first.decode().splitlines()) == 4
    summary = json.loads((tmp_path / "a" / "verify_linear.json").read_text())
    assert summary["samples"] == 3


def test_oracle_run(tmp_path):
    assert main(["oracle", "--q", "0", "--out-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "oracle.csv").read_text().splitlines()
    assert lines[0] == "r,u,du"
    summary = json.loads((tmp_path / "oracle_summary.json").read_text())
    assert summary["center_value"] == pytest.approx(-0.5, abs=1e-9)


def test_thread_variable_reaches_the_manifest(tmp_path, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert main(["diagnose", "--what", "cl1", "--pmax", "5", "--bmax", "1", "--out-dir", str(tmp_path)]) == 0
    assert read_manifest(tmp_path)["environment"]["workers"] == 3


@pytest.mark.slow
def test_eigen_then_transform(tmp_path):
    assert main(["eigen", "--nr", "32", "--ntheta", "32", "--out-dir", str(tmp_path)]) == 0
    dump = tmp_path / "eigenfunction.dgma"
    assert dump.exists()
    assert main(["transform", "--input", str(dump), "--out-dir", str(tmp_path / "t")]) == 0
    report = json.loads((tmp_path / "t" / "transform_report.json").read_text())
    assert report["m"] == 2
    assert report["identity_residual"] <= 1e-10


def test_superlinear_solve_run(tmp_path):
    argv = ["solve", "--q", "3", "--nr", "32", "--ntheta", "16", "--out-dir", str(tmp_path)]
    assert main(argv) == 0
    summary = json.loads((tmp_path / "solution_summary.json").read_text())
    assert summary["q"] == 3.0
    assert summary["center_value"] < 0.0
    assert read_manifest(tmp_path)["results"][0]["residual"] <= 1e-8


def test_flow_run_converges_with_default_settings(tmp_path):
    assert main(["flow", "--q", "1", "--nr", "24", "--ntheta", "16", "--out-dir", str(tmp_path)]) == 0
    result = read_manifest(tmp_path)["results"][0]
    assert result["converged"] is True
    assert result["residual"] <= 1e-6
    assert (tmp_path / "flow_history.csv").exists()


def test_unwritable_output_directory_exit_code(tmp_path, capsys):
    blocker = tmp_path / "taken"
    blocker.write_text("not a directory")
    argv = ["diagnose", "--what", "cl1", "--pmax", "5", "--bmax", "1", "--out-dir", str(blocker)]
    assert main(argv) == 23
    report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert report["error"] == "persistence"
    assert report["details"]["path"] == str(blocker)
    assert blocker.read_text() == "not a directory"
