import json
import subprocess
import sys
from pathlib import Path

import pytest

from gateflow.bench import mac_case, partselect_case

ROOT = Path(__file__).resolve().parent.parent


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "gateflow.cli", *args],
        cwd=cwd, capture_output=True, text=True,
        env={"PYTHONPATH": str(ROOT / "src"), "PATH": "/usr/bin:/bin"},
    )


@pytest.fixture
def proj(tmp_path):
    (tmp_path / "a.sv").write_text(
        "module a(input logic x, output logic y); assign y = ~x; endmodule\n")
    (tmp_path / "b.sv").write_text(
        "module b(input logic p, output logic q);\n"
        "  a u (.x(p), .y(q));\nendmodule\n")
    (tmp_path / "manifest.json").write_text(json.dumps(
        {"files": ["b.sv", "a.sv"], "top": "b"}))
    return tmp_path


def test_about_mentions_published_numbers(proj):
    r = run_cli(["--about"], proj)
    assert r.returncode == 0
    assert "77" in r.stdout and "1.1" in r.stdout and "33" in r.stdout


def test_pickle_ok_and_deterministic(proj):
    r1 = run_cli(["pickle", "--manifest", "manifest.json", "--out", "p1.sv"],
                 proj)
    assert r1.returncode == 0, r1.stderr
    r2 = run_cli(["pickle", "--manifest", "manifest.json", "--out", "p2.sv"],
                 proj)
    assert r2.returncode == 0
    b1 = (proj / "p1.sv").read_bytes()
    assert b1 == (proj / "p2.sv").read_bytes()
    assert b1.index(b"module a") < b1.index(b"module b")


def test_pickle_missing_file_exit1(proj):
    (proj / "manifest.json").write_text(json.dumps(
        {"files": ["nope.sv"], "top": "b"}))
    r = run_cli(["pickle", "--manifest", "manifest.json"], proj)
    assert r.returncode == 1
    assert "error" in r.stderr


def test_pickle_cycle_exit1(proj):
    (proj / "c1.sv").write_text("module c1(); c2 u(); endmodule\n")
    (proj / "c2.sv").write_text("module c2(); c1 u(); endmodule\n")
    (proj / "manifest.json").write_text(json.dumps(
        {"files": ["c1.sv", "c2.sv"], "top": "c1"}))
    r = run_cli(["pickle", "--manifest", "manifest.json"], proj)
    assert r.returncode == 1
    assert "cyclic instantiation" in r.stderr
    assert "c1 -> c2 -> c1" in r.stderr


PARAM_SRC = """
module padd #(parameter W = 8) (
  input  logic [W-1:0] a, b,
  output logic [W-1:0] s
);
  localparam HALFW = W / 2;
  assign s = a + b + HALFW;
endmodule
"""


def test_elab_outputs_and_determinism(proj):
    (proj / "padd.sv").write_text(PARAM_SRC)
    args = ["elab", "padd.sv", "--top", "padd", "--param", "W=16",
            "--out", "out.v", "--map", "out.map.json"]
    r = run_cli(args, proj)
    assert r.returncode == 0, r.stderr
    text = (proj / "out.v").read_text()
    assert "parameter" not in text.replace("localparam", "")
    assert "16'd" in text or "[15:0]" in text
    side = json.loads((proj / "out.map.json").read_text())
    assert side["padd"]["params"] == {"W": 16}
    r2 = run_cli(["elab", "padd.sv", "--top", "padd", "--param", "W=16",
                  "--out", "out2.v"], proj)
    assert r2.returncode == 0
    assert (proj / "out.v").read_bytes() == (proj / "out2.v").read_bytes()


def test_elab_unknown_param_exit1(proj):
    (proj / "padd.sv").write_text(PARAM_SRC)
    r = run_cli(["elab", "padd.sv", "--top", "padd", "--param", "NOPE=1"],
                proj)
    assert r.returncode == 1


def test_synth_qor_deterministic(proj):
    name, src = partselect_case(6, 5)
    (proj / "d.sv").write_text(src)
    for out in ("q1.json", "q2.json"):
        r = run_cli(["synth", "d.sv", "--top", name, "--seed", "7",
                     "--out", "n.v", "--report", out], proj)
        assert r.returncode == 0, r.stderr
    assert (proj / "q1.json").read_bytes() == (proj / "q2.json").read_bytes()
    qor = json.loads((proj / "q1.json").read_text())
    assert qor["area_ge"] > 0
    assert qor["pass_stats"]["partselect"]["rewrites"] == 1
    assert qor["flow"]["toggles"] == {
        "partselect": True, "lms": True, "fma": True}
    assert "77" in qor["context"]


def test_synth_toggles_recorded(proj):
    name, src = partselect_case(4, 4)
    (proj / "d.sv").write_text(src)
    r = run_cli(["synth", "d.sv", "--top", name, "--no-lms",
                 "--no-partselect", "--no-fma", "--report", "q.json"], proj)
    assert r.returncode == 0, r.stderr
    qor = json.loads((proj / "q.json").read_text())
    assert qor["flow"]["toggles"] == {
        "partselect": False, "lms": False, "fma": False}
    assert "partselect" not in qor["pass_stats"]
    assert "lms_rewrite" not in qor["pass_stats"]


def test_synth_bad_input_exit1(proj):
    (proj / "bad.sv").write_text("module m(; endmodule")
    r = run_cli(["synth", "bad.sv", "--top", "m"], proj)
    assert r.returncode == 1


def test_lmsdb_build_inspect_rebuild(proj):
    r = run_cli(["lmsdb", "build", "--out", "db1.txt"], proj)
    assert r.returncode == 0, r.stderr
    r2 = run_cli(["lmsdb", "build", "--out", "db2.txt"], proj)
    assert r2.returncode == 0
    assert (proj / "db1.txt").read_bytes() == (proj / "db2.txt").read_bytes()
    text = (proj / "db1.txt").read_text()
    assert text.startswith("lmsdb v1 kmax=6")
    assert sum(1 for line in text.splitlines() if " k=3 " in line) == 14
    ri = run_cli(["lmsdb", "inspect", "--db", "db1.txt"], proj)
    assert ri.returncode == 0
    assert "k=3: 14" in ri.stdout
    assert "entries: 20" in ri.stdout


def test_lmsdb_corrupt_exit1_with_line(proj):
    run_cli(["lmsdb", "build", "--out", "db.txt"], proj)
    db = (proj / "db.txt").read_text()
    (proj / "db.txt").write_text(db + "tt=zz k=9 nodes=0 depth=0 impl=0;\n")
    r = run_cli(["lmsdb", "inspect", "--db", "db.txt"], proj)
    assert r.returncode == 1
    assert "line" in r.stderr


def test_synth_with_prebuilt_db(proj):
    run_cli(["lmsdb", "build", "--out", "db.txt"], proj)
    name, src = mac_case(4, 4, 8)
    (proj / "m.sv").write_text(src)
    r = run_cli(["synth", "m.sv", "--top", name, "--db", "db.txt",
                 "--report", "q.json"], proj)
    assert r.returncode == 0, r.stderr
    qor = json.loads((proj / "q.json").read_text())
    assert qor["pass_stats"]["lms_rewrite"]["nodes_after"] <= \
        qor["pass_stats"]["lms_rewrite"]["nodes_before"]


def test_sweep_csv(proj):
    name, src = mac_case(6, 6, 12)
    (proj / "m.sv").write_text(src)
    (proj / "sweep.json").write_text(json.dumps({"configs": [
        {"name": "min_area", "adder": {"policy": "min_area"}},
        {"name": "min_delay", "adder": {"policy": "min_delay"},
         "map": {"objective": "delay"}},
        {"name": "dup", "adder": {"policy": "min_area"}},
    ]}))
    r = run_cli(["sweep", "m.sv", "--top", name, "--configs", "sweep.json",
                 "--out", "at.csv"], proj)
    assert r.returncode == 0, r.stderr
    lines = (proj / "at.csv").read_text().strip().splitlines()
    assert lines[0] == "config,area_ge,delay_ns,pareto"
    rows = {l.split(",")[0]: l.split(",") for l in lines[1:]}
    assert rows["min_area"][1:3] == rows["dup"][1:3]
    assert float(rows["min_delay"][2]) < float(rows["min_area"][2])
    r2 = run_cli(["sweep", "m.sv", "--top", name, "--configs", "sweep.json",
                  "--out", "at2.csv"], proj)
    assert r2.returncode == 0
    assert (proj / "at.csv").read_bytes() == (proj / "at2.csv").read_bytes()


def test_sweep_failed_config_marked(proj):
    name, src = mac_case(4, 4, 8)
    (proj / "m.sv").write_text(src)
    (proj / "sweep.json").write_text(json.dumps({"configs": [
        {"name": "ok", "top": name},
        {"name": "boom", "top": "missing_module"},
    ]}))
    r = run_cli(["sweep", "m.sv", "--configs", "sweep.json",
                 "--out", "at.csv"], proj)
    # rows for both configs; the sweep as a whole still succeeds
    lines = (proj / "at.csv").read_text().strip().splitlines()
    assert r.returncode == 0
    boom = [l for l in lines if l.startswith("boom,")][0]
    assert "error" in boom


def test_config_file_with_unknown_key_exit1(proj):
    name, src = mac_case(4, 4, 8)
    (proj / "m.sv").write_text(src)
    (proj / "cfg.json").write_text(json.dumps({"typo_key": 1}))
    r = run_cli(["synth", "m.sv", "--top", name, "--config", "cfg.json"],
                proj)
    assert r.returncode == 1
    assert "unknown flow config key" in r.stderr
