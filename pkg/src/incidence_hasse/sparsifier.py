"""Random sparsification of an incidence structure down to high girth.

One attempt: keep each point and line with probability q, list every cycle
of length 6..2k-4 in the sampled incidence graph, delete the smallest vertex
of each cycle still intact, delete one point per remaining Hasse-graph cycle
shorter than k, then trim both parts to N0 = ceil(3qN/16) by uniform random
subsets.  On success the incidence graph has girth >= 2k-2 and the Hasse
graph girth >= k; both are re-checked on the final structure.  Attempts are
retried until one succeeds or ``max_attempts`` is reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import CycleBudgetError, SearchBudget, enumerate_cycles, girth
from .geometry import IncidenceStructure
from .graph import OrderedGraph, incidence_graph
from .hasse import build_hasse_graph, verify_no_monotone_cycle


class AttemptsExhausted(RuntimeError):
    def __init__(self, failures: list[str], report: "SparsifyReport"):
        super().__init__(f"no successful attempt in {len(failures)} tries: {failures}")
        self.failures = failures
        self.report = report


@dataclass(frozen=True)
class SparsifyParams:
    k: int = 5
    q: float | None = None
    c_q: float = 1.0
    max_attempts: int = 50
    seed: int = 0
    strict_event_a: bool = False
    cycle_budget: int = 2_000_000
    hasse_surgery: bool = True

    def __post_init__(self) -> None:
        if self.k < 5:
            raise ValueError("k must be at least 5")
        if self.q is not None and not 0 < self.q <= 1:
            raise ValueError("q must lie in (0, 1]")
        if self.c_q <= 0:
            raise ValueError("c_q must be positive")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be positive")


@dataclass
class SparsifyReport:
    seed: int
    q: float
    attempts: int = 0
    p_sampled: int = 0
    l_sampled: int = 0
    event_a: tuple[bool, bool, bool] = (False, False, False)
    short_cycles: int = 0
    deleted: int = 0
    hasse_short_cycles: int = 0
    hasse_deleted: int = 0
    n0: int = 0
    incidences: int = 0
    girth_b: float = math.inf
    girth_g: float = math.inf
    failures: list[str] = field(default_factory=list)
    rng_draws: dict[str, int] = field(default_factory=lambda: {"sample": 0, "trim": 0})
    markov_ok: int = 0  # attempts whose short-cycle count was <= qN/64

    def to_json(self) -> dict:
        def g(v):
            return "inf" if v == math.inf else int(v)

        return {
            "attempts": self.attempts,
            "sizes": {"p_sampled": self.p_sampled, "l_sampled": self.l_sampled},
            "event_a": list(self.event_a),
            "short_cycles": self.short_cycles,
            "deleted": self.deleted,
            "hasse_short_cycles": self.hasse_short_cycles,
            "hasse_deleted": self.hasse_deleted,
            "n0": self.n0,
            "incidences": self.incidences,
            "girth_b": g(self.girth_b),
            "girth_g": g(self.girth_g),
            "seed": self.seed,
            "q": self.q,
            "failures": list(self.failures),
            "rng_draws": dict(self.rng_draws),
            "markov_fraction": self.markov_ok / self.attempts if self.attempts else 0.0,
        }


def default_q(N: int, k: int, c_q: float = 1.0) -> float:
    """c_q * N^(-(2k-7)/(6k-15)), clamped to (0, 1]."""
    if k < 5:
        raise ValueError("k must be at least 5")
    if N < 2:
        raise ValueError("N must be at least 2")
    q = c_q * N ** (-(2 * k - 7) / (6 * k - 15))
    return min(1.0, q)


def _cube_root(N: int) -> float:
    return float(np.cbrt(N))


def sample_subconfig(
    structure: IncidenceStructure, q: float, rng: np.random.Generator
) -> tuple[IncidenceStructure, list[int], list[int]]:
    """Keep each point, then each line, by an independent Bernoulli(q) draw.

    Returns the induced sub-structure and the kept source indices.
    """
    if not 0 < q <= 1:
        raise ValueError("q must lie in (0, 1]")
    kp = rng.random(structure.num_points) < q
    kl = rng.random(structure.num_lines) < q
    pts = [int(i) for i in np.flatnonzero(kp)]
    lns = [int(j) for j in np.flatnonzero(kl)]
    return structure.substructure(pts, lns), pts, lns


def check_event_a(sub: IncidenceStructure, q: float, N: int) -> tuple[bool, bool, bool]:
    """The three sampling-event conditions: part sizes, max degree, degree concentration."""
    qN = q * N
    cap = 2 * q * _cube_root(N)
    floor = q * _cube_root(N) / 4
    sizes = qN / 2 < sub.num_points < 2 * qN and qN / 2 < sub.num_lines < 2 * qN
    pdeg = [len(sub.lines_through(i)) for i in range(sub.num_points)]
    ldeg = [len(sub.points_on(j)) for j in range(sub.num_lines)]
    max_deg = all(d <= cap for d in pdeg + ldeg)
    good_p = sum(floor <= d <= cap for d in pdeg)
    good_l = sum(floor <= d <= cap for d in ldeg)
    concentrated = good_p >= qN / 4 and good_l >= qN / 4
    return sizes, max_deg, concentrated


def enumerate_short_cycles(B: OrderedGraph, maxlen: int, budget: SearchBudget | None = None) -> list[tuple[int, ...]]:
    """Cycles of length 6..maxlen in canonical form.

    Raises CycleBudgetError when the enumeration budget runs out.
    """
    if maxlen % 2 or maxlen < 6:
        raise ValueError("maxlen must be even and at least 6")
    return enumerate_cycles(B, 6, maxlen, budget)


def remove_short_cycles(B: OrderedGraph, cycles: list[tuple[int, ...]]) -> set[int]:
    """Vertices to delete: the smallest vertex of every cycle not already broken."""
    deleted: set[int] = set()
    for cyc in cycles:
        if deleted.isdisjoint(cyc):
            deleted.add(min(cyc))
    return deleted


def n0_for(q: float, N: int) -> int:
    """ceil(3qN/16), pulled inside the open window (qN/8, qN/4) when it has an integer."""
    qN = q * N
    n0 = math.ceil(3 * qN / 16)
    lo = math.floor(qN / 8) + 1
    hi = math.ceil(qN / 4) - 1
    if lo <= hi:
        n0 = min(max(n0, lo), hi)
    return max(n0, 1)


def trim_to_n0(
    structure: IncidenceStructure, n0: int, rng: np.random.Generator
) -> tuple[IncidenceStructure, list[int], list[int]]:
    """Uniform random n0-subsets of points and lines; returns kept indices too."""
    if structure.num_points < n0 or structure.num_lines < n0:
        raise ValueError("part smaller than N0")
    pts = sorted(int(i) for i in rng.choice(structure.num_points, size=n0, replace=False))
    lns = sorted(int(j) for j in rng.choice(structure.num_lines, size=n0, replace=False))
    return structure.substructure(pts, lns), pts, lns


def _remove_hasse_cycles(
    structure: IncidenceStructure, params: SparsifyParams, report: SparsifyReport
) -> IncidenceStructure:
    """Delete points until the Hasse graph has no cycle shorter than k.

    Incidence-graph girth >= 2k-2 alone does not exclude short Hasse cycles:
    two lines through a point q, each carrying an earlier point, together
    with two steeper lines through q give a 4-cycle while the incidence
    graph stays a tree.  Each short cycle loses the point of its smallest
    vertex; point deletion leaves an induced subgraph of the Hasse graph.
    """
    G = build_hasse_graph(structure)
    cycles = enumerate_cycles(G, 3, params.k - 1, SearchBudget(params.cycle_budget))
    report.hasse_short_cycles = len(cycles)
    by_point: dict[int, list[int]] = {}
    for v, (i, _) in enumerate(G.labels):
        by_point.setdefault(i, []).append(v)
    dead_vertices: set[int] = set()
    dead_points: set[int] = set()
    for cyc in cycles:
        if dead_vertices.isdisjoint(cyc):
            p = G.labels[min(cyc)][0]
            dead_points.add(p)
            dead_vertices.update(by_point[p])
    report.hasse_deleted = len(dead_points)
    return structure.substructure(
        [i for i in range(structure.num_points) if i not in dead_points],
        range(structure.num_lines),
    )


def sparsify(structure: IncidenceStructure, params: SparsifyParams) -> tuple[IncidenceStructure, SparsifyReport]:
    N = structure.num_points
    q = params.q if params.q is not None else default_q(N, params.k, params.c_q)
    rng = np.random.default_rng(params.seed)
    report = SparsifyReport(seed=params.seed, q=q)
    maxlen = 2 * params.k - 4
    need = 2 * params.k - 2
    for attempt in range(1, params.max_attempts + 1):
        report.attempts = attempt
        sub, _, _ = sample_subconfig(structure, q, rng)
        report.rng_draws["sample"] += structure.num_points + structure.num_lines
        report.p_sampled, report.l_sampled = sub.num_points, sub.num_lines
        report.event_a = check_event_a(sub, q, N)
        report.short_cycles = report.deleted = 0
        report.hasse_short_cycles = report.hasse_deleted = 0
        if sub.num_points == 0 or sub.num_lines == 0:
            report.failures.append("empty_sample")
            continue
        if params.strict_event_a and not all(report.event_a):
            report.failures.append("event_a")
            continue
        B = incidence_graph(sub)
        try:
            cycles = enumerate_short_cycles(B, maxlen, SearchBudget(params.cycle_budget))
        except CycleBudgetError:
            report.failures.append("cycle_cap")
            continue
        report.short_cycles = len(cycles)
        if len(cycles) <= q * N / 64:
            report.markov_ok += 1
        dead = remove_short_cycles(B, cycles)
        report.deleted = len(dead)
        off = sub.num_points
        cleaned = sub.substructure(
            [i for i in range(sub.num_points) if i not in dead],
            [j for j in range(sub.num_lines) if j + off not in dead],
        )
        gb, _ = girth(incidence_graph(cleaned))
        if gb < need:
            report.failures.append("girth_recheck")
            continue
        if params.hasse_surgery:
            try:
                cleaned = _remove_hasse_cycles(cleaned, params, report)
            except CycleBudgetError:
                report.failures.append("hasse_cycle_cap")
                continue
        n0 = n0_for(q, N)
        report.n0 = n0
        if cleaned.num_points < n0 or cleaned.num_lines < n0:
            report.failures.append("part_too_small")
            continue
        final, _, _ = trim_to_n0(cleaned, n0, rng)
        report.rng_draws["trim"] += 2 * n0
        report.incidences = len(final.incidences)
        report.girth_b, _ = girth(incidence_graph(final))
        G = build_hasse_graph(final)
        report.girth_g, _ = girth(G)
        if report.girth_b < need or report.girth_g < params.k or not verify_no_monotone_cycle(G).passed:
            report.failures.append("final_check")
            continue
        return final, report
    raise AttemptsExhausted(report.failures, report)
