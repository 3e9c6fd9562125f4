import subprocess
import sys

import pytest

from oracles import TABLE1
from syndromehash.alist import alist_read
from syndromehash.cli import main


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """A small triangular code plus a synthetic template set with two readings per subject."""
    d = tmp_path_factory.mktemp("cli")
    assert main(["construct", "--n", "480", "--k", "48", "--dv", "3", "--triangular", "--seed", "4", "--out", str(d / "c.alist")]) == 0
    assert main(["synth", "--subjects", "6", "--readings", "2", "--length", "480", "--intra-p", "0.01",
                 "--mask-p", "0.01", "--seed", "2", "--out", str(d / "t.ftpl")]) == 0
    assert main(["synth", "--subjects", "3", "--length", "480", "--seed", "77", "--out", str(d / "stranger.ftpl")]) == 0
    return d


def body(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "syndromehash" in capsys.readouterr().out


def test_ensemble(capsys):
    assert main(["ensemble", "--rate", "0.1", "--dv", "3"]) == 0
    out = capsys.readouterr().out
    assert "feasible: yes" in out and "rho(x) = 0.6*x^2 + 0.4*x^3" in out
    assert main(["ensemble", "--n", "100", "--k", "10", "--dv", "3"]) == 0
    assert "rows: 60 of weight 3, 30 of weight 4" in capsys.readouterr().out


def test_ensemble_infeasible(capsys):
    assert main(["ensemble", "--rate", "0.3", "--dv", "3"]) == 2
    assert capsys.readouterr().err.startswith("infeasible:")


def test_threshold(capsys):
    assert main(["threshold", "--rates", "0.1", "0.05", "--dvs", "3", "4"]) == 0
    out = capsys.readouterr().out
    assert "# master_seed: 0" in out
    rows = body(out)
    assert rows[0] == "rate,dv3,dv4"
    got = dict((r.split(",")[0], [float(x) for x in r.split(",")[1:]]) for r in rows[1:])
    assert abs(got["0.1"][0] - TABLE1[0.10][0]) <= 0.0015
    assert abs(got["0.05"][1] - TABLE1[0.05][1]) <= 0.0015


def test_construct_outputs(workdir):
    text = (workdir / "c.alist").read_text()
    h = alist_read(text)
    assert (h.n, h.r) == (480, 432)
    meta = (workdir / "c.alist.meta").read_text()
    assert "config_digest: " in meta and "master_seed: 4" in meta and "girth: " in meta


def test_construct_deterministic(workdir, tmp_path):
    main(["construct", "--n", "480", "--k", "48", "--dv", "3", "--triangular", "--seed", "4", "--out", str(tmp_path / "again.alist")])
    assert (tmp_path / "again.alist").read_bytes() == (workdir / "c.alist").read_bytes()


def test_simulate_csv(workdir, capsys):
    argv = ["simulate", "--code", str(workdir / "c.alist"), "--p", "0.01", "0.05", "--frames", "20", "--seed", "3"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv + ["--workers", "2"]) == 0
    assert capsys.readouterr().out == first
    rows = body(first)
    assert rows[0].startswith("p,frames,bit_errors") and len(rows) == 3
    assert "# channel_p: matched" in first


def test_simulate_early_stop(workdir, capsys):
    assert main(["simulate", "--code", str(workdir / "c.alist"), "--p", "0.2", "--frames", "500", "--early-stop",
                 "--min-frame-errors", "4", "--decoder", "GallagerA"]) == 0
    row = body(capsys.readouterr().out)[1].split(",")
    assert int(row[3]) == 4 and int(row[1]) < 500


def test_enroll_and_verify(workdir, capsys):
    code, tmpl, rec = str(workdir / "c.alist"), str(workdir / "t.ftpl"), str(workdir / "r.json")
    for scheme in ("fh", "fc"):
        assert main(["enroll", "--code", code, "--template", tmpl, "--index", "0", "--scheme", scheme, "--seed", "1", "--out", rec]) == 0
        assert (workdir / "r.json.meta").exists()
        # index 1 is a second reading of subject 0, index 2 is another subject
        assert main(["verify", "--code", code, "--record", rec, "--probe", tmpl, "--index", "1"]) == 0
        assert main(["verify", "--code", code, "--record", rec, "--probe", tmpl, "--index", "2"]) == 1
        assert main(["verify", "--code", code, "--record", rec, "--probe", str(workdir / "stranger.ftpl")]) == 1
    assert "denied" in capsys.readouterr().out


def test_enroll_record_is_reproducible(workdir, tmp_path):
    args = ["enroll", "--code", str(workdir / "c.alist"), "--template", str(workdir / "t.ftpl"), "--scheme", "fc", "--seed", "5"]
    main(args + ["--out", str(tmp_path / "a.json")])
    main(args + ["--out", str(tmp_path / "b.json")])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_analyze(workdir, capsys):
    prefix = workdir / "an"
    assert main(["analyze", "--templates", str(workdir / "t.ftpl"), "--code", str(workdir / "c.alist"),
                 "--pseudomask", "--out", str(prefix)]) == 0
    text = (workdir / "an_dof.csv").read_text()
    rows = body(text)
    assert rows[0] == "series,pairs,mu,sigma,dof"
    assert [r.split(",")[0] for r in rows[1:]] == ["templates_inter", "templates_intra", "syndromes_inter"]
    assert "# kept_positions: " in text
    hist = body((workdir / "an_templates_inter_hist.csv").read_text())
    assert hist[0] == "bin_low,bin_high,count" and len(hist) == 101


def test_config_file(workdir, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# simulation defaults\np = 0.02\nframes = 5\ndecoder = GallagerA\nseed = 9\n")
    assert main(["simulate", "--code", str(workdir / "c.alist"), "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "# master_seed: 9" in out and body(out)[1].split(",")[1] == "5"
    assert main(["simulate", "--code", str(workdir / "c.alist"), "--config", str(cfg), "--frames", "7"]) == 0
    assert body(capsys.readouterr().out)[1].split(",")[1] == "7"
    cfg.write_text("bogus = 1\n")
    assert main(["simulate", "--code", str(workdir / "c.alist"), "--config", str(cfg)]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--code", "/nonexistent.alist", "--p", "0.1"],
        ["construct", "--n", "100", "--k", "40", "--dv", "3", "--out", "/tmp/never.alist"],
        ["construct", "--n", "100", "--k", "10", "--dv", "3"],
        ["ensemble", "--dv", "3"],
        ["verify", "--code", "/nonexistent", "--record", "x", "--probe", "y"],
    ],
)
def test_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_malformed_inputs_exit_2(workdir, tmp_path):
    bad = tmp_path / "bad.alist"
    bad.write_text("3 2\nx\n")
    assert main(["simulate", "--code", str(bad), "--p", "0.1"]) == 2
    rec = tmp_path / "bad.json"
    rec.write_text("{}")
    assert main(["verify", "--code", str(workdir / "c.alist"), "--record", str(rec), "--probe", str(workdir / "t.ftpl")]) == 2
    assert main(["verify", "--code", str(workdir / "c.alist"), "--record", str(rec), "--probe", str(workdir / "t.ftpl"), "--index", "99"]) == 2


def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "syndromehash.cli", "ensemble", "--rate", "0.05", "--dv", "4"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "feasible: yes" in res.stdout
