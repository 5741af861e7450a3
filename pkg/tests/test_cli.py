import csv
import hashlib
import json
import math

import pytest

from incidence_hasse.cli import SCAN_COLUMNS, main


def run(*argv):
    return main([str(a) for a in argv])


def read(path):
    return json.loads(path.read_text())


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_generate_m2(tmp_path, capsys):
    out = tmp_path / "m2.json"
    assert run("generate", "--m", 2, "--out", out) == 0
    data = read(out)
    assert (len(data["points"]), len(data["lines"]), len(data["incidences"])) == (8, 8, 15)
    man = read(tmp_path / "m2.json.manifest.json")
    assert man["command"] == "generate" and man["params"]["m"] == 2
    assert man["outputs"][str(out)] == sha(out)
    assert "15 incidences" in capsys.readouterr().out


def test_generate_m1_and_m0(tmp_path):
    assert run("generate", "--m", 1, "--out", tmp_path / "m1.json") == 0
    assert len(read(tmp_path / "m1.json")["incidences"]) == 1
    assert run("generate", "--m", 0, "--out", tmp_path / "m0.json") == 2
    assert not (tmp_path / "m0.json").exists()


def test_argparse_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as err:
        run("generate")
    assert err.value.code == 2


def test_verify_pass_fail_malformed(tmp_path, capsys):
    s = tmp_path / "m3.json"
    run("generate", "--m", 3, "--out", s)
    assert run("verify", s) == 0
    assert "PASS" in capsys.readouterr().out
    tri = tmp_path / "tri.json"
    tri.write_text(json.dumps({"n": 3, "edges": [[0, 1], [1, 2], [0, 2]]}))
    assert run("verify", tri) == 3
    assert "witness [0, 1, 2]" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("verify", bad) == 2
    assert run("verify", tmp_path / "missing.json") == 2
    assert run("verify", s, "--min-girth", 5) == 3


def test_analyze_m3(tmp_path):
    s, out = tmp_path / "m3.json", tmp_path / "r.json"
    run("generate", "--m", 3, "--out", s)
    assert run("analyze", s, "--out", out) == 0
    rep = read(out)
    assert rep["n"] == 72 and rep["chi_incidence_lower"] == 2
    assert rep["alpha"] == {"status": "exact", "value": 45}
    assert rep["triangle_free"] and rep["girth"] == 4


def test_analyze_edgeless_and_budget(tmp_path):
    toy = tmp_path / "toy.json"
    toy.write_text(json.dumps({"points": [[0, 0], [1, 5]], "lines": [[0, 0], [2, 3]], "incidences": [[0, 0], [1, 1]]}))
    out = tmp_path / "r.json"
    assert run("analyze", toy, "--out", out) == 0
    assert read(out)["chi"] == {"status": "exact", "value": 1}
    big = tmp_path / "m5.json"
    run("generate", "--m", 5, "--out", big)
    assert run("analyze", big, "--budget", 1, "--out", out) == 0
    rep = read(out)
    assert rep["alpha"]["status"] == "bounded" and rep["chi"]["status"] == "bounded"


def test_sparsify_and_exhaustion(tmp_path):
    s = tmp_path / "m6.json"
    run("generate", "--m", 6, "--out", s)
    out = tmp_path / "sp.json"
    assert run("sparsify", s, "--k", 5, "--seed", 3, "--out", out) == 0
    rep = read(tmp_path / "sp.report.json")
    assert rep["girth_b"] == "inf" or rep["girth_b"] >= 8
    assert rep["girth_g"] == "inf" or rep["girth_g"] >= 5
    assert run("verify", out, "--min-girth", 5) == 0
    assert run("sparsify", s, "--q", 1e-9, "--max-attempts", 2, "--out", tmp_path / "x.json") == 4
    assert read(tmp_path / "x.report.json")["failures"] == ["empty_sample", "empty_sample"]
    assert run("sparsify", s, "--k", 4, "--out", out) == 2


def test_detect(tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({
        "points": [[0, 0], [0, 1], [1, 0], [1, 1]],
        "lines": [[-1, 1], [0, 0], [0, 1], [1, 0]],
        "incidences": [[0, 1], [0, 3], [1, 0], [1, 2], [2, 0], [2, 1], [3, 2], [3, 3]],
    }))
    out = tmp_path / "d.json"
    assert run("detect", grid, "--pattern", "grid", "--out", out) == 3
    assert read(out)["status"] == "found"
    assert run("detect", grid, "--pattern", "fan") == 0
    assert run("detect", grid, "--pattern", "grid", "--k", 1) == 2


def test_pattern_free(tmp_path):
    s = tmp_path / "m6.json"
    run("generate", "--m", 6, "--out", s)
    out = tmp_path / "pf.json"
    assert run("pattern-free", s, "--pattern", "fan", "--seed", 1, "--out", out) == 0
    assert read(tmp_path / "pf.report.json")["final_status"] == "none"
    assert run("detect", out, "--pattern", "fan") == 0


def read_csv(path):
    with path.open() as fh:
        return list(csv.DictReader(fh))


def test_scan_rows_and_header(tmp_path):
    out = tmp_path / "scan.csv"
    assert run("scan", "--m-range", "2..4", "--out", out) == 0
    assert out.read_text().splitlines()[0] == ",".join(SCAN_COLUMNS)
    rows = read_csv(out)
    assert [int(r["n"]) for r in rows] == [15, 72, 220]
    assert rows[0]["chi_incidence_lower"] == "1"
    for r in rows:
        assert int(r["chi_incidence_lower"]) == math.ceil(int(r["n"]) / (2 * int(r["N"])))
        assert int(r["chi_lb"]) <= int(r["chi_ub"])


def test_scan_empty_and_sparsified(tmp_path):
    out = tmp_path / "empty.csv"
    assert run("scan", "--m-range", "3..2", "--out", out) == 0
    assert out.read_text() == ",".join(SCAN_COLUMNS) + "\n"
    sp = tmp_path / "sp.csv"
    common = tmp_path / "sub" / "common.csv"
    assert run("scan", "--m-range", "6", "--k", 5, "--seeds", "1..2", "--out", sp, "--common-csv", common) == 0
    rows = read_csv(sp)
    assert [r["seed"] for r in rows] == ["1", "2"]
    for r in rows:
        assert r["girth_g"] == "inf" or int(r["girth_g"]) >= 5
        assert int(r["chi_incidence_lower"]) == math.ceil(int(r["n"]) / (2 * int(r["N"])))
    row = read_csv(common)[0]
    assert row["N"] == "216" and 0 <= int(row["max_common"]) <= int(row["max_degree"])
    assert run("scan", "--m-range", "a..b", "--out", out) == 2


def test_baseline(tmp_path):
    out = tmp_path / "b.json"
    assert run("baseline", "--n", 8, "--out", out) == 0
    data = read(out)
    assert data["graph"]["n"] == 28 and data["report"]["chi"] == {"status": "exact", "value": 3}
    assert run("baseline", "--n", 1, "--out", out) == 2


SEEDED = [
    ("generate", "--m", 4),
    ("sparsify", "{m6}", "--k", 5, "--seed", 9),
    ("pattern-free", "{m6}", "--pattern", "grid", "--seed", 2),
    ("scan", "--m-range", "2..4"),
    ("baseline", "--n", 6),
    ("analyze", "{m6}", "--budget", 1000),
]


@pytest.mark.parametrize("cmd", SEEDED, ids=lambda c: c[0])
def test_byte_determinism(tmp_path, cmd):
    m6 = tmp_path / "m6.json"
    run("generate", "--m", 6, "--out", m6)
    argv = [str(a).format(m6=m6) for a in cmd]
    out = tmp_path / ("o.csv" if cmd[0] == "scan" else "o.json")
    digests = []
    for _ in range(2):
        assert run(*argv, "--out", out) == 0
        files = sorted(p for p in tmp_path.iterdir() if p.name.startswith("o."))
        digests.append({p.name: sha(p) for p in files})
        for p in files:
            p.unlink()
    assert digests[0] == digests[1]
    assert any(name.endswith(".manifest.json") for name in digests[0])
