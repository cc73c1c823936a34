import json
import os
import subprocess
import sys

import pytest

from gnch.errors import ConfigInvalid, RegimeViolation
from gnch.harness import EXPERIMENTS, parse_config, parse_text, run_experiment
from gnch.harness.cli import main
from gnch.harness.config import SCHEMA
from gnch.harness.experiments import pool_map, worker_count


def test_minimal_config_defaults_and_echo():
    cfg = parse_text("experiment.name = dispersion\n")
    assert cfg["grid.n"] == 256 and cfg["params.mu"] == 0.1
    assert set(cfg.values) == set(SCHEMA)
    again = parse_text(cfg.echo())
    assert again.echo() == cfg.echo()


@pytest.mark.parametrize("text,needle", [
    ("experiment.name = dispersion\nfoo.bar = 1\n", "foo.bar"),
    ("experiment.name = dispersion\nparams.eps = 1.5\n", "params.eps"),
    ("experiment.name = nope\n", "unknown experiment"),
    ("params.eps = 0.1\n", "experiment.name"),
    ("experiment.name = dispersion\ngrid.n = 2x\n", "grid.n"),
    ("experiment.name = dispersion\ngrid.n = 64\ngrid.n = 64\n", "duplicate"),
    ("experiment.name = dispersion\nsweep.mu_list = \n", "sweep.mu_list"),
    ("experiment.name = dispersion\njust text\n", "key = value"),
])
def test_invalid_configs(text, needle):
    with pytest.raises(ConfigInvalid) as ei:
        parse_text(text, "t.cfg")
    assert needle in str(ei.value)


def test_unknown_key_reports_line(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("# comment\nexperiment.name = time-order\n\nbogus = 3\n")
    with pytest.raises(ConfigInvalid) as ei:
        parse_config(p)
    assert ei.value.details["line"] == 4 and ei.value.details["key"] == "bogus"


def test_registry_names():
    assert {"operator-props", "expansion-residual", "dispersion", "energy-growth", "stability-twin",
            "gn-vs-cl", "time-order", "formulation-equivalence"} <= set(EXPERIMENTS)
    for exp in EXPERIMENTS.values():
        assert set(exp.defaults) <= set(SCHEMA)


def test_regime_violation_and_force(tmp_path):
    cfg = parse_text("experiment.name = operator-props\nparams.mu = 0.01\nparams.eps = 0.5\nsweep.samples = 2\n")
    with pytest.raises(RegimeViolation):
        run_experiment(cfg)
    assert run_experiment(cfg, force=True).verdicts


def test_run_writes_reports(tmp_path):
    cfg = parse_text("experiment.name = time-order\nrun.svg = true\n")
    res = run_experiment(cfg, out_dir=str(tmp_path))
    d = tmp_path / "time-order"
    for name in ("time_order.csv", "report.jsonl", "config.echo", "SCHEMA.md"):
        assert (d / name).exists()
    lines = [json.loads(x) for x in (d / "report.jsonl").read_text().splitlines()]
    assert lines[0]["kind"] == "config" and lines[-1]["passed"] == res.passed
    assert any(x["kind"] == "verdict" for x in lines)
    # reproduce bit-identically from the echoed config
    first = (d / "time_order.csv").read_bytes()
    cfg2 = parse_config(d / "config.echo")
    run_experiment(cfg2, out_dir=str(tmp_path / "again"))
    assert (tmp_path / "again" / "time-order" / "time_order.csv").read_bytes() == first


def test_thresholds_come_from_config():
    cfg = parse_text("experiment.name = time-order\nverdict.order_min = 99\n")
    res = run_experiment(cfg)
    assert not res.passed and res.verdicts[0].threshold == 99


def test_cli_exit_codes(tmp_path, capsys):
    ok = tmp_path / "ok.cfg"
    ok.write_text("experiment.name = formulation-equivalence\nsweep.samples = 3\n")
    assert main(["run", str(ok), "--out", str(tmp_path / "o")]) == 0
    bad = tmp_path / "bad.cfg"
    bad.write_text("experiment.name = formulation-equivalence\nsweep.samples = 3\nverdict.equiv_tol = 1e-30\n")
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == 1
    broken = tmp_path / "broken.cfg"
    broken.write_text("experiment.name = formulation-equivalence\nwhat = 1\n")
    assert main(["validate", str(broken)]) == 2
    assert "CONFIG_INVALID" in capsys.readouterr().err
    assert main(["validate", str(ok)]) == 0
    assert main(["list-experiments"]) == 0
    assert "gn-vs-cl" in capsys.readouterr().out
    outside = tmp_path / "outside.cfg"
    outside.write_text("experiment.name = operator-props\nparams.mu = 0.01\nparams.eps = 0.5\n")
    assert main(["run", str(outside), "--out", str(tmp_path / "o")]) == 2
    assert "REGIME_VIOLATION" in capsys.readouterr().err


def test_console_script_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "gnch.harness.cli", "list-experiments"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "dispersion" in out.stdout


def _square(x):
    return x * x


def test_worker_pool(monkeypatch):
    monkeypatch.setenv("GNCH_THREADS", "1")
    assert worker_count(5) == 1
    assert pool_map(_square, [1, 2, 3]) == [1, 4, 9]
    monkeypatch.setenv("GNCH_THREADS", "2")
    assert worker_count(5) == 2 and worker_count(1) == 1
    assert pool_map(_square, [1, 2, 3]) == [1, 4, 9]


def test_shipped_configs_validate():
    root = os.path.join(os.path.dirname(__file__), os.pardir, "configs")
    names = sorted(os.listdir(root))
    assert names
    for n in names:
        assert parse_config(os.path.join(root, n)).name in EXPERIMENTS
