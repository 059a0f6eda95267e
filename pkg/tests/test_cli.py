import json
import subprocess
import sys

import pytest

from tplq.chart import emit_chart, render_svg
from tplq.cli import RunConfig, main, run_pipeline, run_sweep
from tplq.datasets import example_path
from tplq.leakage import LEDGER_COLUMNS, LeakageLedger, LeakageRecord


def _cfg(tmp_path, **kw):
    base = dict(input="example:l1", scenario="certain", window=[1], epsilon=[0.01], releases=3, seed=5,
                out=str(tmp_path), emit=["csv", "json"])
    base.update(kw)
    return RunConfig(**base)


def test_l1_ledger(tmp_path):
    ledger = run_sweep(_cfg(tmp_path))[1]
    tpl = ledger.column("tpl")
    assert all(b > a for a, b in zip(tpl, tpl[1:]))
    first = ledger[0]
    assert (first.pl, first.bpl, first.fpl, first.tpl) == (0.01, 0.01, 0.01, 0.01)
    header = (tmp_path / "ledger.csv").read_text().splitlines()[0]
    assert header == ",".join(LEDGER_COLUMNS)


def test_reruns_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        main(["--input", "example:toy_claims", "--scenario", "uncertain", "--window", "2", "--seed", "9",
              "--out", str(tmp_path / name), "--emit", "csv,json,releases"])
    for rel in ("ledger.csv", "ledger.json", "releases/manifest.json", "releases/release_0003.csv"):
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()


def test_window_sweep_matches_single_runs(tmp_path):
    sweep = run_sweep(_cfg(tmp_path / "sweep", input="example:toy_claims", window=[1, 2, 3, 4], scenario="uncertain"))
    assert sorted(sweep) == [1, 2, 3, 4]
    for w in range(1, 5):
        single = run_sweep(_cfg(tmp_path / f"w{w}", input="example:toy_claims", window=[w], scenario="uncertain"))
        sub = tmp_path / "sweep" / f"window_{w}" / "ledger.csv"
        assert sub.read_bytes() == (tmp_path / f"w{w}" / "ledger.csv").read_bytes()
        assert single[w].column("tpl") == sweep[w].column("tpl")


def test_all_outputs(tmp_path):
    run_sweep(_cfg(tmp_path, emit=["csv", "json", "svg", "dot", "releases"]))
    for name in ("ledger.csv", "ledger.json", "ledger.svg", "ledger.dat", "automaton.dot", "releases/manifest.json"):
        assert (tmp_path / name).exists(), name
    manifest = json.loads((tmp_path / "releases" / "manifest.json").read_text())
    assert manifest["plan"]["seed"] == 5 and len(manifest["releases"]) == 3


def test_csv_input_and_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"input": str(example_path("l1")), "window": "1-2", "releases": 2,
                               "out": str(tmp_path / "o"), "emit": "csv"}))
    assert main(["--config", str(cfg), "--releases", "3"]) == 0
    out = capsys.readouterr().out
    assert "window 1: 3 releases" in out and "window 2" in out


def test_errors_are_single_json_line(tmp_path, capsys):
    assert main(["--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    doc = json.loads(err[0])
    assert doc["error"] == "FileNotFoundError"
    assert main(["--input", "example:l1", "--epsilon", "0", "--out", str(tmp_path)]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "ValueError"


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "tplq", "--input", "example:l1", "--releases", "2", "--out", str(tmp_path)],
        capture_output=True, text=True, env={"TPLQ_LOG_LEVEL": "info", "PATH": ""},
    )
    assert proc.returncode == 0, proc.stderr
    assert "release 2" in proc.stderr


def test_chart(tmp_path):
    one = LeakageLedger([LeakageRecord(1, 0.01, 0.01, 0.01, 0.01, 0.01)])
    svg = render_svg(one)
    assert svg.count("<polyline") == 3
    ledger = run_sweep(_cfg(tmp_path, releases=5, input="example:toy_claims"))[1]
    path = emit_chart(ledger, tmp_path / "c.svg")
    assert path.read_text().startswith("<svg")
    rows = (tmp_path / "c.dat").read_text().splitlines()[1:]
    for col in (1, 2, 3):
        vals = [float(r.split()[col]) for r in rows]
        assert vals == sorted(vals)
    with pytest.raises(ValueError):
        render_svg(LeakageLedger())
