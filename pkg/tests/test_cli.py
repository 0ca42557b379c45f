import json
import math
import os
import subprocess
import sys
import time

import pytest
from hypothesis import given, settings, strategies as st

from zetalab import cli

ZETA2 = math.pi ** 2 / 6


def run(*args, env=None, cwd=None):
    e = dict(os.environ)
    e.update(env or {})
    return subprocess.run([sys.executable, "-m", "zetalab.cli", *args], capture_output=True, text=True,
                          env=e, cwd=cwd, timeout=600)


def test_eval_examples(capsys):
    assert cli.main(["eval", "--f", "zeta", "--s", "0.5,14.134725", "--deriv", "0"]) == 0
    v = json.loads(capsys.readouterr().out)
    assert math.hypot(*v["value"]) < 1e-5
    assert cli.main(["eval", "--f", "family", "--tau", "0", "--s", "2,0"]) == 0
    v = json.loads(capsys.readouterr().out)
    assert abs(v["value"][0] - (1 + math.sqrt(5) / 25) * ZETA2) < 1e-13


def test_exit_codes(capsys):
    assert cli.main(["eval", "--f", "zeta", "--s", "1,0"]) == cli.EXIT_DOMAIN
    assert "pole" in capsys.readouterr().err
    assert cli.main(["zeros", "--rect", "0.5,2,-1,1"]) == cli.EXIT_DOMAIN
    assert cli.main(["trace", "--rho", "2,2", "--tau-end", "0.1"]) == cli.EXIT_CONVERGENCE
    assert cli.main(["census", "--H", "12", "--margin", "2", "--h-init", "1", "--h-max", "1",
                     "--no-classify"]) == cli.EXIT_BUDGET


def test_count_prints_integer(capsys):
    assert cli.main(["count", "--f", "zeta", "--rect", "-1,2,1,50"]) == 0
    assert capsys.readouterr().out.strip() == "10"


def test_speiser_command(capsys):
    assert cli.main(["speiser", "--f", "zeta", "--T", "100", "--C", "20", "--shells", "8", "--delta", "0.1"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["equal"] is True


def test_csv_formats(capsys, tmp_path):
    out = tmp_path / "z.csv"
    assert cli.main(["zeros", "--rect", "0,1,10,30", "--format", "csv", "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip() == "3 zeros"
    rows = out.read_text().splitlines()
    assert rows[0] == "beta,gamma,multiplicity,residual,method" and len(rows) == 4
    assert cli.main(["trace", "--rho", "0.5,1.9520", "--tau-end", "0.05", "--format", "csv"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "trajectory,tau,re,im"


def test_env_override(monkeypatch, capsys, tmp_path):
    monkeypatch.setenv("ZETALAB_FORMAT", "csv")
    monkeypatch.setenv("ZETALAB_RECT", "0,1,10,30")
    assert cli.main(["zeros"]) == 0
    assert capsys.readouterr().out.startswith("beta,gamma")
    # the command line wins over the environment
    assert cli.main(["zeros", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)[0]["multiplicity"] == 1
    monkeypatch.setenv("ZETALAB_THREADS", "nope")
    with pytest.raises(SystemExit):
        cli.main(["zeros"])


def test_global_flags_after_subcommand(capsys):
    assert cli.main(["eval", "--s", "2,0", "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("re_s,im_s")


configs = st.builds(
    cli.RunConfig,
    command=st.sampled_from(["eval", "zeros", "count", "speiser", "trace", "census"]),
    function=st.sampled_from(["zeta", "lpsi5", "factor", "family"]),
    tau=st.one_of(st.none(), st.floats(0, 1)),
    tolerances=st.dictionaries(st.sampled_from(["tol", "h_init", "h_max"]), st.floats(1e-15, 1.0)),
    region=st.dictionaries(st.sampled_from(["rect", "H", "which"]),
                           st.one_of(st.floats(-10, 500), st.lists(st.floats(-5, 5), min_size=4, max_size=4),
                                     st.sampled_from(["F", "Fprime"]))),
    format=st.sampled_from(["json", "csv"]),
    out=st.one_of(st.none(), st.text("abc/._", min_size=1, max_size=8)),
    checkpoint_path=st.one_of(st.none(), st.just("ck.json")),
    threads=st.integers(1, 16),
)


@settings(max_examples=100, deadline=None)
@given(configs)
def test_config_round_trip(cfg):
    assert cli.RunConfig.from_json(cfg.to_json()) == cfg


def test_config_hash_ignores_threads_and_paths():
    a = cli.RunConfig("census", "family", region={"H": 30.0}, threads=1)
    b = cli.RunConfig("census", "family", region={"H": 30.0}, threads=8, out="x", checkpoint_path="y")
    c = cli.RunConfig("census", "family", region={"H": 31.0})
    assert a.config_hash() == b.config_hash() != c.config_hash()


def test_zeros_threads_identical(tmp_path):
    outs = []
    for n in (1, 4, 8):
        p = tmp_path / f"z{n}.json"
        assert cli.main(["zeros", "--rect", "-1,2,1,60", "--threads", str(n), "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_census_kill_and_resume(tmp_path):
    args = ["census", "--H", "30", "--margin", "4", "--checkpoint-every", "0"]
    ref = run(*args, "--out", str(tmp_path / "ref.json"), "--trajectories", str(tmp_path / "ref.jsonl"))
    assert ref.returncode == 0, ref.stderr
    ck = tmp_path / "ck.json"
    proc = subprocess.Popen([sys.executable, "-m", "zetalab.cli", *args, "--checkpoint", str(ck),
                             "--out", str(tmp_path / "x.json")])
    t0 = time.monotonic()
    while not ck.exists() and time.monotonic() - t0 < 120:
        time.sleep(0.05)
    time.sleep(0.5)
    proc.kill()
    proc.wait()
    done = len(json.loads(ck.read_text())["completed"])
    assert done >= 1
    res = run(*args, "--resume", str(ck), "--out", str(tmp_path / "res.json"),
              "--trajectories", str(tmp_path / "res.jsonl"))
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "res.json").read_bytes() == (tmp_path / "ref.json").read_bytes()
    assert (tmp_path / "res.jsonl").read_bytes() == (tmp_path / "ref.jsonl").read_bytes()


def test_zeros_resume_identical(tmp_path):
    ck = tmp_path / "ck.json"
    ref = tmp_path / "ref.csv"
    assert cli.main(["zeros", "--rect", "-1,2,1,60", "--format", "csv", "--out", str(ref)]) == 0
    # stop after a few generations by raising from the checkpoint hook
    from zetalab import zeros
    cfg = cli.RunConfig("zeros", "zeta", None, {}, {"rect": [-1.0, 2.0, 1.0, 60.0], "which": "F",
                                                   "checkpoint_every": 0.0}, "csv", None, str(ck), 1)
    calls = []

    def stop(state):
        calls.append(state)
        cli.Checkpoint(cfg.config_hash(), cfg.config_hash(), partial=state.to_dict()).save(str(ck))
        if len(calls) == 3:
            raise KeyboardInterrupt
    with pytest.raises(KeyboardInterrupt):
        zeros.scan_zeros(cfg.spec(), "F", (-1, 2, 1, 60), on_generation=stop)
    out = tmp_path / "res.csv"
    assert cli.main(["zeros", "--rect", "-1,2,1,60", "--format", "csv", "--checkpoint", str(ck),
                     "--checkpoint-every", "0", "--out", str(out)]) == 0
    assert out.read_bytes() == ref.read_bytes()
