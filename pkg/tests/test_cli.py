import json
import subprocess
import sys

import pytest

from tht.cli import main


def test_run_writes_report_and_tables(tmp_path, capsys):
    out = tmp_path / "rep" / "endpoint.json"
    assert main(["run", "--suite", "endpoint", "--resolution", "3", "--out", str(out)]) == 0
    assert "endpoint: PASS" in capsys.readouterr().out
    d = json.loads(out.read_text())
    assert d["schema"] == 1 and d["suite"] == "endpoint"
    csv = (tmp_path / "rep" / "endpoint.kappa.csv").read_text().splitlines()
    assert csv[0] == "n,kappa" and len(csv) == 8


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("suite = carleson\nresolution = 3\ntrials = 2\n")
    out = tmp_path / "c.json"
    assert main(["run", "--config", str(cfg), "--seed", "5", "--out", str(out), "--quiet"]) == 0
    d = json.loads(out.read_text())
    assert d["config"]["seed"] == 5 and d["config"]["trials"] == 2


@pytest.mark.parametrize("argv", [
    ["run", "--suite", "nope"],
    ["run", "--resolution", "12"],
    ["run", "--a", "0.5"],
    ["run", "--config", "/does/not/exist"],
    ["run", "--exponents", "0.5,0.6,0.7"],
    ["launch"],
])
def test_config_errors_exit_2(argv):
    assert main(argv) == 2


def test_failing_check_exits_1(tmp_path):
    # a negative tolerance cannot be met by any exact identity
    assert main(["run", "--suite", "identities", "--tolerance", "-1", "--quiet"]) == 1


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "tht.cli", "run", "--suite", "endpoint",
                        "--resolution", "2", "--quiet"], capture_output=True, text=True)
    assert r.returncode == 0
