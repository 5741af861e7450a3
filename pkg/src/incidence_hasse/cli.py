"""Command-line entry point.

Exit codes: 0 success, 2 usage or input error, 3 property violated or
witness found, 4 sparsification attempts exhausted.  Every file output gets
a ``<out>.manifest.json`` next to it; wall time goes to stderr only so that
repeated runs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .analysis import SearchBudget, analyze_graph, girth, incidence_chi_lower, is_triangle_free
from .geometry import IncidenceStructure, collinearity_graph, max_common_neighbors, standard_config
from .graph import OrderedGraph, incidence_graph
from .hasse import build_hasse_graph, shift_graph, verify_no_monotone_cycle
from .patterns import DETECTORS, pattern_free_sparsify
from .sparsifier import AttemptsExhausted, SparsifyParams, sparsify

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_EXHAUSTED = 0, 2, 3, 4
SCAN_COLUMNS = [
    "m", "N", "n", "edges", "girth_g", "alpha_status", "alpha",
    "chi_status", "chi_lb", "chi_ub", "chi_incidence_lower", "seed",
]


class UsageError(Exception):
    pass


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _manifest(args, inputs: list[Path], outputs: list[Path], seed=None) -> None:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    params = {k: str(v) if isinstance(v, Path) else v for k, v in params.items()}
    data = {
        "command": args.command,
        "params": params,
        "seed": seed,
        "version": __version__,
        "inputs": {str(p): _digest(p) for p in inputs},
        "outputs": {str(p): _digest(p) for p in outputs},
    }
    for out in outputs[:1]:
        _write(out.with_name(out.name + ".manifest.json"), dumps(data))


def _load_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_structure(path: Path) -> IncidenceStructure:
    try:
        return IncidenceStructure.from_json(_load_json(path))
    except (ValueError, OverflowError) as exc:
        raise UsageError(str(exc)) from exc


def _load_graph_or_structure(path: Path) -> tuple[OrderedGraph, IncidenceStructure | None]:
    data = _load_json(path)
    try:
        if isinstance(data, dict) and "points" in data:
            s = IncidenceStructure.from_json(data)
            return build_hasse_graph(s), s
        return OrderedGraph.from_json(data), None
    except (ValueError, OverflowError) as exc:
        raise UsageError(str(exc)) from exc


def _fmt_girth(g) -> str:
    return "inf" if g == float("inf") else str(int(g))


def cmd_generate(args) -> int:
    if args.m < 1:
        raise UsageError("m must be a positive integer")
    try:
        s = standard_config(args.m)
    except OverflowError as exc:
        raise UsageError(str(exc)) from exc
    _write(args.out, dumps(s.to_json()))
    _manifest(args, [], [args.out])
    print(f"standard configuration m={args.m}: {s.num_points} points, {s.num_lines} lines, "
          f"{len(s.incidences)} incidences -> {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    G, s = _load_graph_or_structure(args.input)
    ok = True
    cert = verify_no_monotone_cycle(G)
    if cert.passed:
        print(f"monotone cycles: none ({G.n} vertices, {G.num_edges} edges)")
    else:
        ok = False
        print(f"monotone cycles: FAIL, witness {list(cert.witness)}")
    tf, tri = is_triangle_free(G)
    print("triangle-free: yes" if tf else f"triangle-free: NO, witness {list(tri)}")
    ok &= tf
    g, gw = girth(G)
    line = f"girth: {_fmt_girth(g)}"
    if args.min_girth is not None and g < args.min_girth:
        ok = False
        line += f" < {args.min_girth}, cycle {list(gw)}"
    print(line)
    if s is not None:
        gb, _ = girth(incidence_graph(s))
        print(f"incidence-graph girth: {_fmt_girth(gb)}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_analyze(args) -> int:
    G, s = _load_graph_or_structure(args.input)
    report = analyze_graph(G, SearchBudget(args.budget), s)
    _write(args.out, dumps(report.to_json()))
    _manifest(args, [args.input], [args.out])
    print(f"n={report.n} edges={report.edges} girth={_fmt_girth(report.girth)} "
          f"alpha={report.alpha.to_json()} chi={report.chi.to_json()} "
          f"chi_incidence_lower={report.chi_incidence_lower}")
    return EXIT_OK


def _params(args) -> SparsifyParams:
    try:
        return SparsifyParams(
            k=args.k, q=args.q, c_q=args.c_q, max_attempts=args.max_attempts,
            seed=args.seed, strict_event_a=args.strict_event_a,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_sparsify(args) -> int:
    s = _load_structure(args.input)
    params = _params(args)
    report_path = args.report or args.out.with_name(args.out.stem + ".report.json")
    try:
        out, report = sparsify(s, params)
    except AttemptsExhausted as exc:
        _write(report_path, dumps(exc.report.to_json()))
        print(f"attempts exhausted: {exc.failures}")
        return EXIT_EXHAUSTED
    _write(args.out, dumps(out.to_json()))
    _write(report_path, dumps(report.to_json()))
    _manifest(args, [args.input], [args.out, report_path], seed=args.seed)
    print(f"sparsified after {report.attempts} attempt(s): N0={report.n0}, "
          f"{report.incidences} incidences, girth(B)={_fmt_girth(report.girth_b)}, "
          f"girth(G)={_fmt_girth(report.girth_g)}")
    return EXIT_OK


def cmd_detect(args) -> int:
    s = _load_structure(args.input)
    detect, _ = DETECTORS[args.pattern]
    if args.k < 2:
        raise UsageError("k must be at least 2")
    result = detect(s, args.k)
    if args.out:
        _write(args.out, dumps(result.to_json()))
        _manifest(args, [args.input], [args.out])
    print(f"{args.pattern} k={args.k}: {result.status}")
    if result.witness is not None:
        print(json.dumps(result.witness.to_json(), sort_keys=True))
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_pattern_free(args) -> int:
    s = _load_structure(args.input)
    if args.k < 2:
        raise UsageError("k must be at least 2")
    params = _params(argparse.Namespace(**{**vars(args), "k": {"grid": 6, "fan": 5}[args.pattern]}))
    report_path = args.report or args.out.with_name(args.out.stem + ".report.json")
    try:
        out, report = pattern_free_sparsify(s, args.pattern, args.k, params)
    except AttemptsExhausted as exc:
        _write(report_path, dumps(exc.report.to_json()))
        print(f"attempts exhausted: {exc.failures}")
        return EXIT_EXHAUSTED
    _write(args.out, dumps(out.to_json()))
    _write(report_path, dumps(report.to_json()))
    _manifest(args, [args.input], [args.out, report_path], seed=args.seed)
    print(f"{args.pattern}-free structure: N0={report.n0}, {report.incidences} incidences, "
          f"detector: {report.final_status}")
    return EXIT_OK


def _parse_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc


def scan_rows(ms: list[int], k: int | None, seeds: list[int], budget: SearchBudget) -> list[dict]:
    rows = []
    for m in ms:
        base = standard_config(m)
        runs = [(base, "")] if k is None else []
        for seed in seeds if k is not None else []:
            try:
                out, _ = sparsify(base, SparsifyParams(k=k, seed=seed))
                runs.append((out, seed))
            except AttemptsExhausted:
                rows.append({**{c: "" for c in SCAN_COLUMNS}, "m": m, "N": base.num_points,
                             "alpha_status": "attempts_exhausted", "chi_status": "attempts_exhausted",
                             "seed": seed})
        for s, seed in runs:
            G = build_hasse_graph(s)
            rep = analyze_graph(G, budget, s)
            rows.append({
                "m": m,
                "N": s.num_points,
                "n": G.n,
                "edges": G.num_edges,
                "girth_g": _fmt_girth(rep.girth),
                "alpha_status": rep.alpha.status,
                "alpha": rep.alpha.lb,
                "chi_status": rep.chi.status,
                "chi_lb": rep.chi.lb,
                "chi_ub": rep.chi.ub,
                "chi_incidence_lower": incidence_chi_lower(G.n, s.num_points, s.num_lines),
                "seed": seed,
            })
    return rows


def cmd_scan(args) -> int:
    ms = _parse_range(args.m_range)
    seeds = _parse_range(args.seeds) if args.seeds else [0]
    if args.k is not None and args.k < 5:
        raise UsageError("k must be at least 5")
    if any(m < 1 for m in ms):
        raise UsageError("m values must be positive")
    rows = scan_rows(ms, args.k, seeds, SearchBudget(args.budget))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SCAN_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    outputs = [args.out]
    if args.common_csv:
        args.common_csv.parent.mkdir(parents=True, exist_ok=True)
        with args.common_csv.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["m", "N", "max_degree", "max_common", "u", "v"])
            for m in ms:
                H = collinearity_graph(standard_config(m))
                pair, count = max_common_neighbors(H)
                u, v = pair if pair else ("", "")
                w.writerow([m, m**3, H.max_degree(), count, u, v])
        outputs.append(args.common_csv)
    _manifest(args, [], outputs, seed=seeds if args.k is not None else None)
    print(f"scan: {len(rows)} rows -> {args.out}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    if args.n < 2:
        raise UsageError("shift graph order must be at least 2")
    G = shift_graph(args.n)
    report = analyze_graph(G, SearchBudget(args.budget))
    data = {"graph": G.to_json(), "report": report.to_json()}
    _write(args.out, dumps(data))
    _manifest(args, [], [args.out])
    print(f"shift graph N={args.n}: n={G.n} edges={G.num_edges} chi={report.chi.to_json()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="incidence-hasse", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write the standard configuration")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--out", type=Path, required=True)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="certify the Hasse graph of a structure (or a graph JSON)")
    v.add_argument("input", type=Path)
    v.add_argument("--min-girth", type=int)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("analyze", help="write an analysis report")
    a.add_argument("input", type=Path)
    a.add_argument("--budget", type=int, default=10**7, help="node expansions per solver")
    a.add_argument("--out", type=Path, required=True)
    a.set_defaults(func=cmd_analyze)

    def sparsify_flags(sp, with_k=True):
        if with_k:
            sp.add_argument("--k", type=int, default=5)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--q", type=float)
        sp.add_argument("--c-q", type=float, default=1.0)
        sp.add_argument("--max-attempts", type=int, default=50)
        sp.add_argument("--strict-event-a", action="store_true")
        sp.add_argument("--out", type=Path, required=True)
        sp.add_argument("--report", type=Path)

    s = sub.add_parser("sparsify", help="random high-girth sparsification")
    s.add_argument("input", type=Path)
    sparsify_flags(s)
    s.set_defaults(func=cmd_sparsify)

    d = sub.add_parser("detect", help="look for a k x k grid or a k-fan")
    d.add_argument("input", type=Path)
    d.add_argument("--pattern", choices=sorted(DETECTORS), required=True)
    d.add_argument("--k", type=int, default=2)
    d.add_argument("--out", type=Path)
    d.set_defaults(func=cmd_detect)

    f = sub.add_parser("pattern-free", help="sample a grid-free or fan-free sub-structure")
    f.add_argument("input", type=Path)
    f.add_argument("--pattern", choices=sorted(DETECTORS), required=True)
    f.add_argument("--k", type=int, default=2)
    sparsify_flags(f, with_k=False)
    f.set_defaults(func=cmd_pattern_free)

    sc = sub.add_parser("scan", help="sweep m and write one CSV row per instance")
    sc.add_argument("--m-range", required=True, help="e.g. 2..6 or 2,3,5")
    sc.add_argument("--k", type=int, help="sparsify each instance to this girth target")
    sc.add_argument("--seeds", help="seeds for sparsified runs, e.g. 1..10")
    sc.add_argument("--budget", type=int, default=10_000)
    sc.add_argument("--common-csv", type=Path, help="also write collinearity common-neighbour counts")
    sc.add_argument("--out", type=Path, required=True)
    sc.set_defaults(func=cmd_scan)

    b = sub.add_parser("baseline", help="shift graph of order n, generated and analysed")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--budget", type=int, default=10**7)
    b.add_argument("--out", type=Path, required=True)
    b.set_defaults(func=cmd_baseline)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.monotonic()
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"wall time {time.monotonic() - start:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
