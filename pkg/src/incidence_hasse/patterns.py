"""Grid and fan detection in incidence structures, and pattern-free sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

import numpy as np

from .analysis import BudgetExceeded, SearchBudget, _Meter
from .geometry import IncidenceStructure
from .sparsifier import AttemptsExhausted, SparsifyParams, default_q, n0_for, sample_subconfig, trim_to_n0

GRID_EXHAUSTIVE_LINES = 40
FAN_EXHAUSTIVE_LINES = 30
DEFAULT_PATTERN_NODES = 1_000_000
# girth target whose sampling rate is used by default for each pattern
PATTERN_GIRTH_K = {"grid": 6, "fan": 5}


@dataclass(frozen=True)
class GridWitness:
    k: int
    lines: tuple[int, ...]
    lines_prime: tuple[int, ...]
    points: tuple[tuple[int, ...], ...]  # points[i][j] lies on lines[i] and lines_prime[j]

    def verify(self, s: IncidenceStructure) -> bool:
        all_lines = self.lines + self.lines_prime
        flat = [p for row in self.points for p in row]
        if len(self.lines) != self.k or len(self.lines_prime) != self.k or len(self.points) != self.k:
            return False
        if len(set(all_lines)) != 2 * self.k or len(set(flat)) != self.k**2:
            return False
        return all(
            s.lines[self.lines[i]].contains(s.points[self.points[i][j]])
            and s.lines[self.lines_prime[j]].contains(s.points[self.points[i][j]])
            for i in range(self.k)
            for j in range(self.k)
        )

    def point_set(self) -> set[int]:
        return {p for row in self.points for p in row}

    def to_json(self) -> dict:
        return {
            "pattern": "grid",
            "k": self.k,
            "lines": list(self.lines),
            "lines_prime": list(self.lines_prime),
            "points": [list(r) for r in self.points],
        }


@dataclass(frozen=True)
class FanWitness:
    k: int
    p0: int
    points: tuple[int, ...]  # p_1..p_k
    l0: int
    lines: tuple[int, ...]  # l_1..l_k; p_0 and p_i lie on l_i, p_i lies on l_0

    def verify(self, s: IncidenceStructure) -> bool:
        if len(self.points) != self.k or len(self.lines) != self.k:
            return False
        if len({self.p0, *self.points}) != self.k + 1 or len({self.l0, *self.lines}) != self.k + 1:
            return False
        P, L = s.points, s.lines
        if L[self.l0].contains(P[self.p0]):
            return False
        return all(
            L[l].contains(P[self.p0]) and L[l].contains(P[p]) and L[self.l0].contains(P[p])
            for p, l in zip(self.points, self.lines)
        )

    def point_set(self) -> set[int]:
        return {self.p0, *self.points}

    def to_json(self) -> dict:
        return {
            "pattern": "fan",
            "k": self.k,
            "p0": self.p0,
            "points": list(self.points),
            "l0": self.l0,
            "lines": list(self.lines),
        }


@dataclass
class Detection:
    status: str  # "none" | "found" | "budget-limited"
    witness: GridWitness | FanWitness | None = None
    nodes: int = 0

    def to_json(self) -> dict:
        return {"status": self.status, "witness": None if self.witness is None else self.witness.to_json()}


def _meet(s: IncidenceStructure, a: int, b: int) -> int | None:
    common = s.points_on(a) & s.points_on(b)
    return min(common) if common else None


def iter_grids(s: IncidenceStructure, k: int, meter: _Meter) -> Iterator[GridWitness]:
    """Every k x k grid, once per (row set, column set) with rows lexicographically first."""
    if k < 2:
        raise ValueError("k must be at least 2")
    rich = [j for j in range(s.num_lines) if len(s.points_on(j)) >= k]
    for rows in combinations(rich, k):
        meter.tick()
        row_set = set(rows)
        cands = []
        for c in rich:
            if c in row_set:
                continue
            pts = [_meet(s, r, c) for r in rows]
            if None not in pts and len(set(pts)) == k:
                cands.append((c, pts))
        if len(cands) < k:
            continue

        def extend(start: int, chosen: list) -> Iterator[list]:
            meter.tick()
            if len(chosen) == k:
                yield chosen
                return
            for t in range(start, len(cands)):
                c, pts = cands[t]
                if all(pts[i] != other[1][i] for other in chosen for i in range(k)):
                    yield from extend(t + 1, chosen + [cands[t]])

        for cols in extend(0, []):
            if rows > tuple(c for c, _ in cols):
                continue  # the transposed grid is reported with these as rows
            points = tuple(tuple(cols[j][1][i] for j in range(k)) for i in range(k))
            yield GridWitness(k, rows, tuple(c for c, _ in cols), points)


def iter_fans(s: IncidenceStructure, k: int, meter: _Meter) -> Iterator[FanWitness]:
    if k < 2:
        raise ValueError("k must be at least 2")
    for p0 in range(s.num_points):
        through = sorted(s.lines_through(p0))
        if len(through) < k:
            continue
        for l0 in range(s.num_lines):
            meter.tick()
            if l0 in s.lines_through(p0):
                continue
            hits = []
            for l in through:
                q = _meet(s, l, l0)
                if q is not None:
                    hits.append((l, q))
            for combo in combinations(hits, k):
                meter.tick()
                yield FanWitness(k, p0, tuple(q for _, q in combo), l0, tuple(l for l, _ in combo))


def _detect(s, k, it, bound, budget) -> Detection:
    if budget is None:
        budget = SearchBudget(max_nodes=10**18) if s.num_lines <= bound else SearchBudget(DEFAULT_PATTERN_NODES)
    meter = _Meter(budget)
    try:
        for w in it(s, k, meter):
            return Detection("found", w, meter.nodes)
    except BudgetExceeded:
        return Detection("budget-limited", None, meter.nodes)
    return Detection("none", None, meter.nodes)


def find_grid(s: IncidenceStructure, k: int = 2, budget: SearchBudget | None = None) -> Detection:
    """First k x k grid in canonical order.

    Structures with at most 40 lines are searched without a node cap, so
    "none" is a proof of absence; larger ones use a node budget and report
    "budget-limited" if it runs out.
    """
    return _detect(s, k, iter_grids, GRID_EXHAUSTIVE_LINES, budget)


def find_fan(s: IncidenceStructure, k: int = 2, budget: SearchBudget | None = None) -> Detection:
    """First k-fan in canonical order; uncapped search up to 30 lines."""
    return _detect(s, k, iter_fans, FAN_EXHAUSTIVE_LINES, budget)


DETECTORS = {"grid": (find_grid, iter_grids), "fan": (find_fan, iter_fans)}


@dataclass
class PatternReport:
    pattern: str
    k: int
    seed: int
    q: float
    attempts: int = 0
    p_sampled: int = 0
    l_sampled: int = 0
    witnesses: int = 0
    deleted: int = 0
    n0: int = 0
    incidences: int = 0
    final_status: str = ""
    failures: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "k": self.k,
            "attempts": self.attempts,
            "sizes": {"p_sampled": self.p_sampled, "l_sampled": self.l_sampled},
            "witnesses": self.witnesses,
            "deleted": self.deleted,
            "n0": self.n0,
            "incidences": self.incidences,
            "final_status": self.final_status,
            "seed": self.seed,
            "q": self.q,
            "failures": list(self.failures),
        }


def pattern_free_sparsify(
    structure: IncidenceStructure,
    pattern: str,
    k: int,
    params: SparsifyParams | None = None,
    witness_budget: int = 2_000_000,
) -> tuple[IncidenceStructure, PatternReport]:
    """Sample, delete the smallest point of every witness, re-verify, trim to N0."""
    if pattern not in DETECTORS:
        raise ValueError(f"unknown pattern {pattern!r}")
    detect, iterate = DETECTORS[pattern]
    params = params or SparsifyParams(k=PATTERN_GIRTH_K[pattern])
    N = structure.num_points
    q = params.q if params.q is not None else default_q(N, PATTERN_GIRTH_K[pattern], params.c_q)
    rng = np.random.default_rng(params.seed)
    report = PatternReport(pattern, k, params.seed, q)
    for attempt in range(1, params.max_attempts + 1):
        report.attempts = attempt
        sub, _, _ = sample_subconfig(structure, q, rng)
        report.p_sampled, report.l_sampled = sub.num_points, sub.num_lines
        report.witnesses = report.deleted = 0
        if sub.num_points == 0 or sub.num_lines == 0:
            report.failures.append("empty_sample")
            continue
        try:
            dead: set[int] = set()
            while True:
                found = False
                for w in iterate(sub, k, _Meter(SearchBudget(witness_budget))):
                    found = True
                    report.witnesses += 1
                    pts = w.point_set()
                    if dead.isdisjoint(pts):
                        dead.add(min(pts))
                if not found:
                    break
                sub = sub.substructure([i for i in range(sub.num_points) if i not in dead], range(sub.num_lines))
                report.deleted += len(dead)
                dead = set()
        except BudgetExceeded:
            report.failures.append("witness_cap")
            continue
        n0 = n0_for(q, N)
        report.n0 = n0
        if sub.num_points < n0 or sub.num_lines < n0:
            report.failures.append("part_too_small")
            continue
        final, _, _ = trim_to_n0(sub, n0, rng)
        report.incidences = len(final.incidences)
        check = detect(final, k)
        report.final_status = check.status
        if check.status != "none":
            report.failures.append("final_check")
            continue
        return final, report
    raise AttemptsExhausted(report.failures, report)
