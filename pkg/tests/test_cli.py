import subprocess
import sys
from pathlib import Path

import pytest

from sdbtest.cli import main
from sdbtest.config import ConfigError, campaign_from, load_config, parse_config_text

FAULT = "Covers:coord_gt=50:constant=false"


def last_line(capsys):
    return capsys.readouterr().out.strip().splitlines()[-1]


def fields(line):
    assert line.startswith("SUMMARY ")
    return dict(kv.split("=", 1) for kv in line.split()[1:])


def test_parse_config_text():
    vals = parse_config_text("# comment\nseed = 4\nfault = Covers:coord_gt=5:negate; Touches:type=POINT:negate\n"
                             "oracle_crosscheck = yes  # inline\npredicates = Covers, Within\n")
    assert vals == {"seed": 4, "fault": ("Covers:coord_gt=5:negate", "Touches:type=POINT:negate"),
                    "oracle_crosscheck": True, "predicates": ("Covers", "Within")}
    for bad in ("colour = red\n", "seed = x\n", "oracle_crosscheck = maybe\n"):
        with pytest.raises(ConfigError):
            parse_config_text(bad)


def test_load_config_precedence(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("seed = 4\nn = 7\n")
    vals = load_config(p, {"seed": 9, "n": None})
    assert vals["seed"] == 9 and vals["n"] == 7 and vals["m"] == 2
    cfg = campaign_from(vals)
    assert cfg.generator.geometry_count == 7 and cfg.seed == 9
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")
    with pytest.raises(ConfigError):
        campaign_from(dict(vals, n=0))


def run_args(out, *extra):
    return ["run", "--runs", "1", "--queries", "100", "--n", "50", "--out", str(out),
            "--seed", "0", *extra]


def test_run_clean(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("coord_max = 50\n")
    assert main(run_args(tmp_path / "r", "--config", str(cfg), "--queries", "10", "--n", "10")) == 0
    f = fields(last_line(capsys))
    assert f["status"] == "ok" and f["discrepancies"] == "0"
    assert (tmp_path / "r" / "report.json").exists()


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("campaign")
    cfg = out / "c.cfg"
    cfg.write_text("coord_max = 50\n")
    assert main(run_args(out, "--config", str(cfg), "--fault", FAULT)) == 1
    bundles = sorted(p for p in out.iterdir() if p.is_dir())
    assert bundles
    return bundles[0]


def test_replay(bundle, capsys):
    assert main(["replay", str(bundle)]) == 1
    f = fields(last_line(capsys))
    assert f["reproduced"] == "True" and f["faults"] == FAULT
    assert main(["replay", str(bundle), "--no-faults"]) == 0
    assert fields(last_line(capsys))["status"] == "ok"


def test_reduce(bundle, tmp_path, capsys):
    import shutil
    copy = tmp_path / "b"
    shutil.copytree(bundle, copy)
    assert main(["reduce", "--no-faults", str(copy)]) == 2
    assert fields(last_line(capsys))["reason"] == "not-reproducing"
    assert main(["reduce", str(copy)]) == 0
    f = fields(last_line(capsys))
    assert f["status"] == "reduced" and int(f["rows_after"]) <= int(f["rows_before"])
    assert (copy / "original" / "meta.json").exists()
    assert main(["replay", str(copy)]) == 1


def test_operational_failures(tmp_path, capsys):
    assert main(["replay", str(tmp_path / "nope")]) == 2
    assert fields(last_line(capsys))["reason"] == "FileNotFoundError"
    assert main(["run", "--target", "oracle"]) == 2
    assert main(["run", "--target", "postgis", "--command", "/nonexistent/psql", "--runs", "1",
                 "--out", str(tmp_path / "x")]) == 2
    assert fields(last_line(capsys))["status"] == "error"
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert main(["run", "--config", str(bad)]) == 2


def test_timing(capsys):
    assert main(["timing", "--ns", "1,5", "--reps", "2", "--queries", "5"]) == 0
    f = fields(last_line(capsys))
    assert f["ns"] == "1,5" and len(f["ratios"].split(",")) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sdbtest.cli", "--help"], capture_output=True,
                          text=True, cwd=Path(__file__).parent)
    assert proc.returncode == 0 and "replay" in proc.stdout
