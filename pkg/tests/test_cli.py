import json
import os

from fdoacurves.cli import main

EV = ["--v11", "0", "--v12", "1", "--v21", "0", "--v22", "1", "--d", "1/2"]


def test_check_identities_ok(tmp_path, capsys):
    code = main(["check-identities", "--n", "2", "--seed", "3",
                 "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "h-factorization" in out and "FAIL" not in out
    records = [json.loads(line) for line in
               open(tmp_path / "identities.jsonl", encoding="utf-8")]
    assert all(rec["passed"] for rec in records)


def test_check_identities_corrupt_names_identity(capsys):
    code = main(["check-identities", "--n", "1",
                 "--corrupt", "qtilde-beta-pushforward"])
    assert code == 1
    err = capsys.readouterr().err
    assert "qtilde-beta-pushforward" in err


def test_check_identities_deterministic_bytes(tmp_path):
    for sub in ("a", "b"):
        os.makedirs(tmp_path / sub)
        main(["check-identities", "--n", "1", "--seed", "11",
              "--out", str(tmp_path / sub)])
    a = open(tmp_path / "a" / "identities.jsonl", "rb").read()
    b = open(tmp_path / "b" / "identities.jsonl", "rb").read()
    assert a == b


def test_singularities_equal_velocity(tmp_path):
    code = main(["singularities"] + EV + ["--out", str(tmp_path)])
    assert code == 0
    records = [json.loads(line) for line in
               open(tmp_path / "singularities.jsonl", encoding="utf-8")]
    z_records = [r for r in records if r["variety"] == "Z"]
    assert len(z_records) == 6
    hc_records = [r for r in records if r["variety"] == "HCF"]
    assert len(hc_records) == 4
    v_records = [r for r in records if r["variety"] == "V"]
    assert sorted(r["kind"] for r in v_records) == ["Node", "Node"]


def test_singularities_d_2v_has_five(tmp_path):
    code = main(["singularities", "--v11", "0", "--v12", "1", "--v21", "0",
                 "--v22", "1", "--d", "2", "--out", str(tmp_path)])
    assert code == 0
    records = [json.loads(line) for line in
               open(tmp_path / "singularities.jsonl", encoding="utf-8")]
    assert len([r for r in records if r["variety"] == "HCF"]) == 5


def test_singularities_v0_pencil(tmp_path):
    code = main(["singularities", "--v11", "0", "--v12", "0", "--v21", "0",
                 "--v22", "0", "--d", "1", "--out", str(tmp_path)])
    assert code == 0
    rec = json.loads(open(tmp_path / "singularities.jsonl").readline())
    assert rec["pencil_case"] == "v=0"
    assert rec["factor_checks"]["plane_factorisation"]


def test_scenario_file_and_half_separation(tmp_path):
    scen = tmp_path / "scen.txt"
    scen.write_text("v11=0\nv12=1\nv21=0\nv22=1\nd=0.5\na=2\n")
    out = tmp_path / "out"
    code = main(["trace", "--scenario", str(scen), "--grid", "64", "64",
                 "--refine-depth", "1", "--out", str(out), "--csv"])
    assert code == 0
    rows = [line for line in open(out / "trace.csv") if line.strip()][1:]
    ys = [abs(float(r.split(",")[0])) for r in rows]
    # the a = 2 scaling puts vertices beyond the unit-normalised window
    assert max(ys) > 3.0


def test_trace_usage_errors(capsys):
    assert main(["trace", "--v11", "1"]) == 2
    assert main(["trace", "--alpha-sweep", "nonsense"]) == 2
    assert main(["singularities", "--v11", "1", "--v12", "0", "--v21", "0",
                 "--v22", "x", "--d", "1"]) == 2


def test_trace_alpha_sweep(tmp_path):
    code = main(["trace", "--alpha-sweep", "1/4:3/4:1/4", "--grid", "64", "64",
                 "--refine-depth", "1", "--out", str(tmp_path), "--svg"])
    assert code == 0
    files = sorted(os.listdir(tmp_path))
    assert [f for f in files if f.endswith(".svg")] == [
        "trace_alpha_0_25.svg", "trace_alpha_0_5.svg", "trace_alpha_0_75.svg"]


def test_trace_alpha_sweep_full_range_eight_plots(tmp_path):
    code = main(["trace", "--alpha-sweep", "0.25:2.0:0.25", "--grid", "48", "48",
                 "--refine-depth", "1", "--out", str(tmp_path), "--svg"])
    assert code == 0
    svgs = [f for f in sorted(os.listdir(tmp_path)) if f.endswith(".svg")]
    assert len(svgs) == 8


def test_trace_empty_window_still_writes(tmp_path):
    code = main(["trace"] + EV[:-2] + ["--d", "5/2", "--grid", "64", "64",
                 "--refine-depth", "1", "--out", str(tmp_path)])
    assert code == 0
    svg = open(tmp_path / "trace.svg").read()
    assert svg.count("<circle") == 2


def test_dump_byte_stable(tmp_path):
    for sub in ("a", "b"):
        os.makedirs(tmp_path / sub)
        code = main(["dump"] + EV + ["--out", str(tmp_path / sub)])
        assert code == 0
    a = open(tmp_path / "a" / "dump.txt", "rb").read()
    b = open(tmp_path / "b" / "dump.txt", "rb").read()
    assert a == b
    text = a.decode()
    assert "[Qtilde w]" in text and "[Vtilde]" in text
    assert "-1/2 * w0*w1" in text       # a1 coefficient visible in the dump
    fixtures = [json.loads(line) for line in
                open(tmp_path / "a" / "map_fixtures.jsonl", encoding="utf-8")]
    undef = [f for f in fixtures if f["output"] is None]
    assert len(undef) >= 3              # beta's three indeterminacy points etc.
    rho_recs = [f for f in fixtures if f["map"] == "cremona_rho"]
    assert len(rho_recs) == 8
    assert all(all(r == "0" for r in f["variety_residuals"]) for f in rho_recs)


def test_dump_zero_velocity_qtilde(capsys):
    code = main(["dump", "--v11", "0", "--v12", "0", "--v21", "0",
                 "--v22", "0", "--d", "1"])
    assert code == 0
    out = capsys.readouterr().out
    assert "[Qtilde z]     -1 * z0*z1" in out
