"""Acceptance criteria 1-10, one test each, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` (or ``python tests/test_acceptance.py``).
"""

import csv
import hashlib
import math
import sys
import time
from contextlib import contextmanager

import pytest

from incidence_hasse.analysis import (
    chromatic_number,
    count_cycles_bipartite,
    find_ordered_path_s,
    girth,
    independence_number,
    is_independent_set,
    is_triangle_free,
)
from incidence_hasse.cli import main as cli_main
from incidence_hasse.geometry import standard_config, standard_incidence_count
from incidence_hasse.graph import incidence_graph
from incidence_hasse.hasse import build_hasse_graph, shift_graph, to_poset, verify_no_monotone_cycle
from incidence_hasse.patterns import find_fan, find_grid, pattern_free_sparsify
from incidence_hasse.sparsifier import AttemptsExhausted, SparsifyParams, sparsify
from oracles import brute_has_fan2, brute_has_grid2, nonbacktracking_cycle_count, pair_scan_incidences
from test_patterns import random_structure


@contextmanager
def criterion(num, title, limit_s, capsys):
    """Times the body, prints one PASS/FAIL line, then fails the test if needed."""
    state = {"ok": True, "detail": ""}
    start = time.monotonic()
    try:
        yield state
    except AssertionError as exc:
        state["ok"], state["detail"] = False, str(exc).splitlines()[0] if str(exc) else "assertion failed"
    elapsed = time.monotonic() - start
    if state["ok"] and elapsed >= limit_s:
        state["ok"], state["detail"] = False, f"runtime {elapsed:.1f}s over the {limit_s}s limit"
    verdict = "PASS" if state["ok"] else "FAIL"
    with capsys.disabled():
        print(f"\n[{verdict}] criterion {num}: {title} ({elapsed:.2f}s) {state['detail']}".rstrip())
    assert state["ok"], state["detail"]


def test_criterion_01_incidence_counts(capsys):
    with criterion(1, "incidence counts 15/72/220/525", 1.0, capsys) as st:
        for m, expected in zip(range(2, 6), (15, 72, 220, 525)):
            s = standard_config(m)
            assert len(s.incidences) == expected == m**4 - (m * (m - 1) // 2) ** 2 == standard_incidence_count(m)
            assert list(s.incidences) == pair_scan_incidences(s.points, s.lines), f"m={m} pair scan differs"
        st["detail"] = "closed form and pair scan agree"


def test_criterion_02_hasse_certification(capsys):
    with criterion(2, "Hasse certification m=2..5", 60.0, capsys) as st:
        for m in range(2, 6):
            G = build_hasse_graph(standard_config(m))
            assert verify_no_monotone_cycle(G).passed, f"m={m} monotone cycle"
            assert is_triangle_free(G)[0], f"m={m} triangle"
            assert to_poset(G).covers == G.edges, f"m={m} cover graph differs"
        st["detail"] = "all four certified"


def test_criterion_03_independence_bound(capsys):
    with criterion(3, "alpha <= 2N and S-free certificate, m=2,3", 300.0, capsys) as st:
        values = []
        for m in (2, 3):
            s = standard_config(m)
            G = build_hasse_graph(s)
            res = independence_number(G)
            assert res.status == "exact", f"m={m} alpha not exact"
            assert is_independent_set(G, res.certificate)
            assert res.value <= 2 * s.num_points, f"m={m} alpha={res.value} > {2 * s.num_points}"
            J = [G.labels[v] for v in res.certificate]
            xs = [p.x for p in s.points]
            slopes = [l.slope for l in s.lines]
            assert find_ordered_path_s(s, J, xs, slopes) is None, f"m={m} certificate contains S"
            values.append(f"alpha(m={m})={res.value}<={2 * s.num_points}")
        st["detail"] = ", ".join(values)


def test_criterion_04_chromatic_lower_bound_growth(tmp_path, capsys):
    with criterion(4, "ceil(n/2N) non-decreasing and n/2N >= 3m/8, m=2..6", 60.0, capsys) as st:
        out = tmp_path / "scan.csv"
        assert cli_main(["scan", "--m-range", "2..6", "--out", str(out)]) == 0
        with out.open() as fh:
            rows = list(csv.DictReader(fh))
        assert [int(r["m"]) for r in rows] == [2, 3, 4, 5, 6]
        col = [int(r["chi_incidence_lower"]) for r in rows]
        for r, c in zip(rows, col):
            m, n, N = int(r["m"]), int(r["n"]), int(r["N"])
            assert c == math.ceil(n / (2 * N))
            assert n / (2 * N) >= 3 * m / 8, f"m={m}: {n}/{2 * N} < {3 * m / 8}"
        assert all(a <= b for a, b in zip(col, col[1:])), f"column {col} decreases"
        st["detail"] = f"column {col}"


def test_criterion_05_shift_graph_baseline(capsys):
    with criterion(5, "chi(shift graph) = 2,3,4 for N=4,8,16", 120.0, capsys) as st:
        got = []
        for N, chi in ((4, 2), (8, 3), (16, 4)):
            res = chromatic_number(shift_graph(N))
            assert res.status == "exact" and res.value == chi == math.floor(math.log2(N)), f"N={N}: {res.to_json()}"
            got.append(res.value)
        st["detail"] = f"chi={got}"


def test_criterion_06_c4_free(capsys):
    with criterion(6, "incidence graph has no 4-cycles, m=2..5", 10.0, capsys) as st:
        for m in range(2, 6):
            assert count_cycles_bipartite(incidence_graph(standard_config(m)), 2) == 0, f"m={m}"
        st["detail"] = "zero 4-cycles"


def test_criterion_07_cycle_census_oracle(capsys):
    with criterion(7, "6- and 8-cycle counts: DFS vs walk oracle, m=2,3", 120.0, capsys) as st:
        counts = []
        for m in (2, 3):
            B = incidence_graph(standard_config(m))
            for r in (3, 4):
                dfs = count_cycles_bipartite(B, r)
                if girth(B)[0] == math.inf:
                    walk = 0  # a forest has no cycles at all
                else:
                    walk = nonbacktracking_cycle_count(B.n, B.edges, 2 * r)
                assert dfs == walk, f"m={m} length {2 * r}: dfs {dfs} vs walk {walk}"
                counts.append(f"m={m} c{2 * r}={dfs}")
        st["detail"] = ", ".join(counts)


def test_criterion_08_sparsifier_girth(capsys):
    with criterion(8, "sparsifier girth guarantees (k=5: m=6,8; k=7: m=8)", 600.0, capsys) as st:
        runs = 0
        for k, m in ((5, 6), (5, 8), (7, 8)):
            base = standard_config(m)
            for seed in range(1, 11):
                try:
                    out, rep = sparsify(base, SparsifyParams(k=k, seed=seed, max_attempts=50))
                except AttemptsExhausted as exc:
                    raise AssertionError(f"k={k} m={m} seed={seed} exhausted: {exc.failures}") from None
                gb = girth(incidence_graph(out))[0]
                gg = girth(build_hasse_graph(out))[0]
                assert gb >= 2 * k - 2, f"k={k} m={m} seed={seed}: girth(B)={gb}"
                assert gg >= k, f"k={k} m={m} seed={seed}: girth(G)={gg}"
                assert rep.attempts <= 50
                runs += 1
        st["detail"] = f"{runs} runs succeeded"


def test_criterion_09_pattern_detectors(capsys):
    with criterion(9, "grid/fan detectors vs oracles; pattern-free outputs at m=6", 300.0, capsys) as st:
        for seed in range(100):
            s = random_structure(seed)
            assert (find_grid(s, 2).status == "found") == brute_has_grid2(s.points, s.lines), f"grid seed {seed}"
            assert (find_fan(s, 2).status == "found") == brute_has_fan2(s.points, s.lines), f"fan seed {seed}"
        base = standard_config(6)
        for pattern, detect in (("fan", find_fan), ("grid", find_grid)):
            out, _ = pattern_free_sparsify(base, pattern, 2, SparsifyParams(k=5 if pattern == "fan" else 6, seed=1))
            assert detect(out, 2).status == "none", f"{pattern}-free output contains a {pattern}"
        st["detail"] = "100/100 agree; both outputs pattern-free"


def _digests(directory):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(directory.iterdir())}


def test_criterion_10_determinism(tmp_path, capsys):
    with criterion(10, "seeded commands byte-reproduce outputs and manifests", 60.0, capsys) as st:
        src = tmp_path / "m6.json"
        assert cli_main(["generate", "--m", "6", "--out", str(src)]) == 0
        commands = [
            ["generate", "--m", "5"],
            ["sparsify", str(src), "--k", "5", "--seed", "4"],
            ["pattern-free", str(src), "--pattern", "fan", "--seed", "4"],
            ["scan", "--m-range", "2..6", "--k", "5", "--seeds", "1..2"],
            ["analyze", str(src), "--budget", "2000"],
            ["baseline", "--n", "8"],
            ["detect", str(src), "--pattern", "grid"],
        ]
        checked = 0
        for cmd in commands:
            runs = []
            for rep in range(2):
                d = tmp_path / f"{cmd[0]}_{rep}"
                d.mkdir()
                # the same output path in both runs so manifests can match byte for byte
                out = tmp_path / "out" / ("o.csv" if cmd[0] == "scan" else "o.json")
                cli_main(cmd + ["--out", str(out)])
                for p in sorted(out.parent.iterdir()):
                    p.rename(d / p.name)
                runs.append(_digests(d))
            assert runs[0] == runs[1], f"{cmd[0]} not reproducible"
            assert any(n.endswith(".manifest.json") for n in runs[0]), f"{cmd[0]} wrote no manifest"
            checked += 1
        st["detail"] = f"{checked} commands"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
