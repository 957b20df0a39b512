import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rggres.harness.cli import main
from rggres.harness.config import ConfigError, ExperimentConfig, parse_config, resolve_r
from rggres.harness.experiment import load_summary, run_experiment, summarize, trial_seed
from rggres.harness.stats import wilson_interval

GOLDEN = Path(__file__).parent / "golden"

STRIP = """\
[experiment]
kind = attack-rate
trials = {trials}
seed = 3
output = {out}
[model]
n = 600
d = 2
r = zeta:8
[method]
name = strip
min_alpha = 0.4
max_component_rn = 5
"""


# -- config ---------------------------------------------------------------------

def test_r_rules():
    n = 1000
    assert resolve_r("const:0.3", n, 2) == 0.3
    assert resolve_r("scaled:2", n, 1) == pytest.approx(2 * math.log(n) / n)
    assert resolve_r("scaled:2", n, 2) == pytest.approx(2 * math.sqrt(math.log(n) / n))
    assert resolve_r("zeta:3", n, 3) == pytest.approx(3 * math.sqrt(math.log(n) / n))
    for bad in ("0.3", "wild:1", "scaled:x"):
        with pytest.raises(ValueError):
            resolve_r(bad, n, 2)


@pytest.mark.parametrize("text, line", [
    ("[experiment]\nkind = attack-rate\nbogus = 1\n", 3),
    ("[experiment\nkind = attack-rate\n", 1),
    ("kind = attack-rate\n", 1),
    ("[experiment]\nkind = attack-rate\n[nowhere]\n", 3),
    ("[experiment]\nkind = attack-rate\nkind = certify\n", 3),
    ("[experiment]\n\n# note\njust words\n", 4),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.lineno == line
    assert f":{line}:" in str(exc.value)


def test_validation_lists_fields():
    with pytest.raises(ConfigError) as exc:
        parse_config("[experiment]\nkind = attack-rate\ntrials = 0\n[model]\nn = 100\nr = const:5\n")
    assert set(exc.value.fields) == {"trials", "r", "method.name"}


def test_canonical_round_trip():
    cfg = parse_config(STRIP.format(trials=4, out="x"))
    again = parse_config(cfg.canonical())
    assert again == cfg and again.hash() == cfg.hash()
    moved = parse_config(STRIP.format(trials=4, out="elsewhere"))
    assert moved.hash() == cfg.hash()
    assert parse_config(STRIP.format(trials=5, out="x")).hash() != cfg.hash()


# -- statistics -----------------------------------------------------------------

def wilson_by_roots(k, n, z=1.959963984540054):
    # bounds are the roots of (p_hat - p)^2 = z^2 p (1 - p) / n
    ph = k / n
    a = 1 + z * z / n
    b = -(2 * ph + z * z / n)
    c = ph * ph
    lo, hi = sorted(np.roots([a, b, c]).real)
    return max(lo, 0.0), min(hi, 1.0)


def test_wilson_example():
    lo, hi = wilson_interval(5, 10)
    assert lo == pytest.approx(0.2366, abs=1e-4) and hi == pytest.approx(0.7634, abs=1e-4)
    assert wilson_interval(0, 20)[0] == 0.0
    assert wilson_interval(20, 20)[1] == 1.0


@given(st.integers(1, 500), st.data())
def test_wilson_matches_quadratic(n, data):
    k = data.draw(st.integers(0, n))
    lo, hi = wilson_interval(k, n)
    elo, ehi = wilson_by_roots(k, n)
    assert lo == pytest.approx(elo, abs=1e-9) and hi == pytest.approx(ehi, abs=1e-9)
    assert lo <= k / n <= hi


def test_wilson_rejects_bad_counts():
    with pytest.raises(ValueError):
        wilson_interval(3, 0)
    with pytest.raises(ValueError):
        wilson_interval(4, 3)


def test_trial_seeds_are_deterministic_and_distinct():
    seeds = [trial_seed(7, i) for i in range(200)]
    assert seeds == [trial_seed(7, i) for i in range(200)]
    assert len(set(seeds)) == 200


# -- runs -----------------------------------------------------------------------

def test_single_trial_run(tmp_path):
    rec = run_experiment(parse_config(STRIP.format(trials=1, out=tmp_path)))
    assert len(rec.rows) == 1
    assert rec.summary["rate"] in (0.0, 1.0)
    d = rec.directory
    assert {p.name for p in d.iterdir()} == {"config", "rows.csv", "summary", "artifacts"}
    assert (d / "artifacts" / "trial-0.attack").exists()


def test_runs_are_byte_identical(tmp_path):
    a = run_experiment(parse_config(STRIP.format(trials=3, out=tmp_path / "a")))
    b = run_experiment(parse_config(STRIP.format(trials=3, out=tmp_path / "b")))
    assert a.config_hash == b.config_hash
    assert (a.directory / "rows.csv").read_bytes() == (b.directory / "rows.csv").read_bytes()
    assert (a.directory / "summary").read_text().split("wall_clock_s")[0] == \
        (b.directory / "summary").read_text().split("wall_clock_s")[0]


def test_summary_recomputes_from_rows(tmp_path):
    rec = run_experiment(parse_config(STRIP.format(trials=4, out=tmp_path)))
    assert load_summary(rec.directory) == rec.summary
    text = (rec.directory / "summary").read_text()
    assert f"successes {rec.summary['successes']}" in text and "wall_clock_s" in text


def test_trials_are_order_independent(tmp_path):
    cfg = parse_config(STRIP.format(trials=3, out=tmp_path))
    rows = run_experiment(cfg, write=False).rows
    from rggres.harness.experiment import run_trial
    assert [run_trial(cfg, i)[0] for i in (2, 0, 1)] == [rows[2], rows[0], rows[1]]


def test_summary_fields():
    rows = [{"trial": i, "seed": i, "success": int(i % 2 == 0), "max_component": 3 + i % 2, "step": "ok"}
            for i in range(10)]
    s = summarize(rows)
    assert s["trials"] == 10 and s["successes"] == 5 and s["rate"] == 0.5
    assert s["max_component_histogram"] == {3: 5, 4: 5}
    assert s["mean_max_component"] == 3.5 and s["steps"] == {"ok": 10}


@pytest.mark.parametrize("kind, extra", [
    ("hitting-stats", "[model]\nn = 200\nd = 1\nr = const:0.5\n"),
    ("conjecture", "[method]\nn = 8\nk = 2\nmode = exhaustive\n"),
    ("certify", "[model]\nn = 300\nd = 2\nr = const:0.25\n[method]\nc = 2\ndelta = 0.4\n"),
    ("builder-rate", "[model]\nn = 300\nd = 1\nr = scaled:40\nmetric = torus\n[method]\nname = sandwich\n"),
])
def test_other_kinds_run(tmp_path, kind, extra):
    text = f"[experiment]\nkind = {kind}\ntrials = 2\noutput = {tmp_path}\n" + extra
    rec = run_experiment(parse_config(text))
    assert rec.summary["trials"] == 2
    assert load_summary(rec.directory) == rec.summary


def test_builder_rate_counts_only_verified(tmp_path):
    text = (f"[experiment]\nkind = builder-rate\ntrials = 2\noutput = {tmp_path}\n"
            "[model]\nn = 40\nd = 2\nr = const:1.4\n[method]\nname = closure\n")
    rec = run_experiment(parse_config(text))
    assert rec.summary["rate"] == 1.0
    assert all(r["verified"] == 1 for r in rec.rows)


# -- command line ---------------------------------------------------------------

def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_generate_then_verify(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, _ = run_cli(capsys, "generate", "-n", 100, "-d", 2, "-r", 0.2, "--seed", 7, "-o", "g.rgg")
    assert code == 0 and out == (GOLDEN / "generate.txt").read_text()
    code, out, _ = run_cli(capsys, "verify", "--k-connected", 1, "g.rgg")
    assert code == 0 and out == (GOLDEN / "verify_connected.txt").read_text()


def test_cli_conjecture(capsys):
    code, out, _ = run_cli(capsys, "conjecture", "--n", 8, "--k", 2, "--mode", "exhaustive")
    assert code == 0 and out == (GOLDEN / "conjecture.txt").read_text()
    assert "no counterexample" in out


def test_cli_attack_then_verify_alpha(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run_cli(capsys, "generate", "-n", 100, "-d", 2, "-r", 0.2, "--seed", 7, "-o", "g.rgg")
    code, out, _ = run_cli(capsys, "attack", "stiebitz", "g.rgg", "-o", "mask.cut")
    assert code == 0 and out.startswith("strategy stiebitz\n")
    code, out, _ = run_cli(capsys, "verify", "--alpha", 0.4, "g.rgg", "mask.cut")
    assert code == 0 and out == (GOLDEN / "verify_alpha.txt").read_text()
    code, _, _ = run_cli(capsys, "verify", "--k-connected", 1, "g.rgg", "mask.cut")
    assert code == 1


def test_cli_build_and_verify_certificate(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run_cli(capsys, "generate", "-n", 30, "-d", 2, "-r", 1.5, "-o", "k.rgg")
    code, _, _ = run_cli(capsys, "build", "closure", "k.rgg", "-o", "c.cyc")
    assert code == 0
    code, out, _ = run_cli(capsys, "verify", "--cycle", "c.cyc", "--length", 30, "k.rgg")
    assert code == 0 and out == "cycle: valid\n"


def test_cli_domain_failures_exit_one(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run_cli(capsys, "generate", "-n", 100, "-d", 2, "-r", 0.05, "--seed", 1, "-o", "s.rgg")
    assert run_cli(capsys, "build", "closure", "s.rgg")[0] == 1
    assert run_cli(capsys, "certify", "s.rgg", "--c", 3)[0] == 1


def test_cli_usage_errors_exit_two(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2
    assert run_cli(capsys, "generate", "-n", 10, "-o", "x.rgg")[0] == 2
    Path("bad.rgg").write_text("rgg\nbad\n")
    code, _, err = run_cli(capsys, "verify", "--k-connected", 1, "bad.rgg")
    assert code == 2 and "bad.rgg:1:" in err
    Path("bad.cfg").write_text("[experiment]\nkind = attack-rate\noops\n")
    code, _, err = run_cli(capsys, "experiment", "bad.cfg")
    assert code == 2 and "bad.cfg:3:" in err
    assert run_cli(capsys, "verify", "--k-connected", 1, "missing.rgg")[0] == 2


def test_cli_experiment(tmp_path, capsys):
    cfg = tmp_path / "strip.cfg"
    cfg.write_text(STRIP.format(trials=2, out=tmp_path / "runs"))
    code, out, _ = run_cli(capsys, "experiment", cfg)
    assert code == 0 and "rate " in out
    assert len(list((tmp_path / "runs").iterdir())) == 1


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "rggres.harness.cli", "conjecture", "--n", "8", "--k", "2"],
                         capture_output=True, text=True, cwd=tmp_path)
    assert res.returncode == 0 and res.stdout == (GOLDEN / "conjecture.txt").read_text()
