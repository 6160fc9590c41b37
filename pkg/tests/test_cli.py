"""CLI: exit codes, output files, and run manifests."""

import json
import math

import pytest

from phstab import cli, phs


def run(args):
    return cli.main(args)


def test_cf_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "cf.csv"
    assert run(["cf", "--surd", "2", "--terms", "20", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,a_n,p_n,q_n"
    assert len(lines) == 22
    assert lines[1] == "0,1,1,1" and lines[2] == "1,2,3,2"
    manifest = json.loads((tmp_path / "cf.csv.manifest.json").read_text())
    assert manifest["subcommand"] == "cf"
    assert manifest["outputs"] == [str(out)]
    assert "phstab" in manifest["versions"]


def test_cf_rational_terminates_exit0(capsys):
    assert run(["cf", "--quotients", "1,2", "--terms", "5"]) == 0
    err = capsys.readouterr().err
    assert "terminated" in err


def test_cf_insufficient_precision_exit2(capsys):
    assert run(["cf", "--decimal", "1.41", "--bits", "8", "--terms", "30"]) == 2
    assert "error:" in capsys.readouterr().err


def test_construct_quotient_values(tmp_path):
    out = tmp_path / "q.csv"
    assert run(["construct", "--powerlog", "4", "0", "--bits", "1024",
                "--out", str(out)]) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[1].split(",")[1] == "1"
    assert rows[2].split(",")[1] == "20"
    header = json.loads((out.parent / "q.csv.header.json").read_text())
    assert header["f"]["kind"] == "powerlog"


def test_construct_exp_a1(tmp_path):
    out = tmp_path / "e.csv"
    assert run(["construct", "--exp", "1", "--bits", "4096",
                "--out", str(out)]) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[2].split(",")[1] == "10"


def test_construct_bad_table_exit2(tmp_path):
    cfg = tmp_path / "t.json"
    cfg.write_text(json.dumps(
        {"kind": "table", "pts": [[1.0, 0.5], [2.0, 0.9]]}))
    assert run(["construct", "--table", str(cfg)]) == 2


def test_growth_monotone_csv(tmp_path):
    out = tmp_path / "g.csv"
    assert run(["growth", "--surd", "2", "--etas", "10,100,1000",
                "--tol", "1e-2", "--out", str(out)]) == 0
    rows = [r.split(",") for r in out.read_text().strip().splitlines()[1:]]
    lows = [float(r[1]) for r in rows]
    ups = [float(r[2]) for r in rows]
    assert lows == sorted(lows) and ups == sorted(ups)
    assert all(lo <= up for lo, up in zip(lows, ups))


def test_rates_pipeline(tmp_path):
    g = tmp_path / "g.csv"
    g.write_text("eta,m_lower,m_upper\n1.0,1.0,1.0\n100.0,10000.0,10000.0\n")
    out = tmp_path / "pred.csv"
    assert run(["rates", "--curve", str(g), "--kind", "LowerBound",
                "--times", "100,10000", "--out", str(out)]) == 0
    rows = [r.split(",") for r in out.read_text().strip().splitlines()[1:]]
    # the synthetic curve is eta^2, so LowerBound gives 1/sqrt(t)
    assert float(rows[0][1]) == pytest.approx(0.1, rel=1e-6)


def test_rates_rss_without_certificate_exit2(tmp_path):
    g = tmp_path / "g.csv"
    g.write_text("eta,m_lower,m_upper\n1.0,1.0,1.0\n100.0,10000.0,10000.0\n")
    assert run(["rates", "--curve", str(g), "--kind", "RSS-upper",
                "--times", "100"]) == 2


def test_sandwich_exit0(tmp_path):
    out = tmp_path / "s.csv"
    assert run(["sandwich", "--surd", "2", "--odd-v", "1..9",
                "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("v,u,dist")
    assert len(lines) == 6  # v in {1,3,5,7,9}


def test_phs_scan_and_constants(tmp_path):
    cfg = tmp_path / "sys.json"
    cfg.write_text(phs.phsystem_to_json(phs.universal_example(1.0 / 3.0)))
    out = tmp_path / "scan.csv"
    grid = f"0:{4 * math.pi}:101"
    assert run(["phs", "--config", str(cfg), "--t-grid", grid,
                "--out", str(out)]) == 0
    consts = json.loads((tmp_path / "scan.csv.constants.json").read_text())
    assert consts["constants"]["C_tilde"] > 0
    assert consts["scan"]["verdict"] in ("invertible on grid",
                                         "grid singularity")


def test_phs_bad_config_exit2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{\"d\": 2}")
    assert run(["phs", "--config", str(cfg), "--t-grid", "0:1:2"]) == 2


def test_verify_suites(capsys):
    assert run(["verify", "rates"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    assert run(["verify", "nonsense"]) == 2
