"""Structural and chromatic analysis with checkable certificates.

Solvers run under a :class:`SearchBudget`; when it runs out the result is
downgraded to lower/upper bounds with ``status="bounded"`` rather than
returning a possibly wrong exact value.
"""

from __future__ import annotations

import math
import random
import sys
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .geometry import IncidenceStructure
from .graph import OrderedGraph

INF = math.inf
DEFAULT_NODES = 10**7


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = DEFAULT_NODES
    max_seconds: float | None = None


class BudgetExceeded(Exception):
    pass


class _Meter:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.nodes = 0
        self.start = time.monotonic()

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise BudgetExceeded
        if self.budget.max_seconds is not None and self.nodes % 1024 == 0:
            if time.monotonic() - self.start > self.budget.max_seconds:
                raise BudgetExceeded


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# -- local structure ---------------------------------------------------------

def is_triangle_free(G: OrderedGraph) -> tuple[bool, tuple[int, int, int] | None]:
    for u, v in G.edges:
        common = G.adj[u] & G.adj[v]
        if common:
            return False, tuple(sorted((u, v, min(common))))
    return True, None


def girth(G: OrderedGraph) -> tuple[float, tuple[int, ...] | None]:
    """Length of a shortest cycle (``math.inf`` for forests) and one such cycle."""
    best, witness = INF, None
    for root in range(G.n):
        dist = {root: 0}
        parent = {root: None}
        queue = deque([root])
        while queue:
            a = queue.popleft()
            if 2 * dist[a] + 1 >= best:
                break
            for b in G.adj[a]:
                if b not in dist:
                    dist[b] = dist[a] + 1
                    parent[b] = a
                    queue.append(b)
                elif b != parent[a]:
                    length = dist[a] + dist[b] + 1
                    if length < best:
                        best = length
                        witness = _close_cycle(parent, a, b)
    return best, witness


def _close_cycle(parent, a, b) -> tuple[int, ...]:
    left = [a]
    while parent[left[-1]] is not None:
        left.append(parent[left[-1]])
    right = [b]
    while parent[right[-1]] is not None:
        right.append(parent[right[-1]])
    # both end at the BFS root; drop the duplicate
    return tuple(left[::-1] + right[:-1])


def canonical_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically least rotation/reflection of a cyclic vertex sequence."""
    L = len(cycle)
    forms = []
    for seq in (list(cycle), list(cycle)[::-1]):
        for r in range(L):
            forms.append(tuple(seq[r:] + seq[:r]))
    return min(forms)


def enumerate_cycles(
    G: OrderedGraph,
    min_len: int,
    max_len: int,
    budget: SearchBudget | None = None,
) -> list[tuple[int, ...]]:
    """All simple cycles with ``min_len <= length <= max_len`` in canonical form.

    Each cycle is grown from its smallest vertex through larger vertices only
    and kept when its second vertex is smaller than its last, which yields
    exactly the canonical representative once.
    """
    meter = _Meter(budget or SearchBudget())
    out: list[tuple[int, ...]] = []
    adj = [sorted(a) for a in G.adj]
    try:
        _grow_all(G.n, adj, min_len, max_len, meter, out)
    except BudgetExceeded:
        raise CycleBudgetError(len(out)) from None
    out.sort(key=lambda c: (len(c), c))
    return out


def _grow_all(n, adj, min_len, max_len, meter, out) -> None:
    for s in range(n):
        path = [s]
        on_path = {s}

        def grow(v: int) -> None:
            meter.tick()
            depth = len(path)
            for w in adj[v]:
                if w == s:
                    if depth >= max(min_len, 3) and path[1] < path[-1]:
                        out.append(tuple(path))
                elif w > s and w not in on_path and depth < max_len:
                    path.append(w)
                    on_path.add(w)
                    grow(w)
                    path.pop()
                    on_path.discard(w)

        grow(s)


class CycleBudgetError(BudgetExceeded):
    """Enumeration stopped early; ``partial`` cycles had been found."""

    def __init__(self, partial: int):
        super().__init__(f"cycle enumeration budget exceeded after {partial} cycles")
        self.partial = partial


def count_cycles_bipartite(B: OrderedGraph, r: int, budget: SearchBudget | None = None, max_r: int = 6) -> int:
    """Exact number of cycles of length 2r."""
    if not 2 <= r <= max_r:
        raise ValueError(f"r must lie in [2, {max_r}]")
    return len(enumerate_cycles(B, 2 * r, 2 * r, budget))


# -- independence ------------------------------------------------------------

@dataclass
class AlphaResult:
    status: str  # "exact" | "bounded"
    lb: int
    ub: int
    certificate: tuple[int, ...]
    nodes: int = 0

    @property
    def value(self) -> int | None:
        return self.lb if self.status == "exact" else None

    def to_json(self) -> dict:
        if self.status == "exact":
            return {"status": "exact", "value": self.lb}
        return {"status": "bounded", "lb": self.lb, "ub": self.ub}


def is_independent_set(G: OrderedGraph, vertices: Iterable[int]) -> bool:
    vs = set(vertices)
    return all(not (G.adj[v] & vs) for v in vs)


def _clique_cover_size(cand: int, masks: list[int]) -> int:
    cliques: list[int] = []
    for v in _bits(cand):
        for k, c in enumerate(cliques):
            if c & masks[v] == c:
                cliques[k] = c | (1 << v)
                break
        else:
            cliques.append(1 << v)
    return len(cliques)


def _greedy_independent(cand: int, masks: list[int]) -> list[int]:
    chosen = []
    while cand:
        v = min(_bits(cand), key=lambda u: ((masks[u] & cand).bit_count(), u))
        chosen.append(v)
        cand &= ~(masks[v] | (1 << v))
    return chosen


def independence_number(G: OrderedGraph, budget: SearchBudget | None = None) -> AlphaResult:
    """Branch and bound with greedy clique-cover upper bounds.

    Vertices of degree <= 1 are taken without branching (some maximum
    independent set always contains them).
    """
    masks = G.adjacency_masks()
    full = (1 << G.n) - 1
    meter = _Meter(budget or SearchBudget())
    best: list[int] = _greedy_independent(full, masks)
    root_ub = _clique_cover_size(full, masks)

    def search(cand: int, chosen: list[int]) -> None:
        nonlocal best
        meter.tick()
        taken = []
        changed = True
        while changed and cand:
            changed = False
            for v in _bits(cand):
                if cand >> v & 1 and (masks[v] & cand).bit_count() <= 1:
                    taken.append(v)
                    cand &= ~(masks[v] | (1 << v))
                    changed = True
        chosen = chosen + taken
        if not cand:
            if len(chosen) > len(best):
                best = chosen
            return
        if len(chosen) + _clique_cover_size(cand, masks) <= len(best):
            return
        v = max(_bits(cand), key=lambda u: ((masks[u] & cand).bit_count(), -u))
        search(cand & ~(masks[v] | (1 << v)), chosen + [v])
        search(cand & ~(1 << v), chosen)

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * G.n + 1000))
    try:
        search(full, [])
    except BudgetExceeded:
        return AlphaResult("bounded", len(best), max(root_ub, len(best)), tuple(sorted(best)), meter.nodes)
    finally:
        sys.setrecursionlimit(old_limit)
    return AlphaResult("exact", len(best), len(best), tuple(sorted(best)), meter.nodes)


# -- colouring ---------------------------------------------------------------

@dataclass
class ChiResult:
    status: str  # "exact" | "bounded"
    lb: int
    ub: int
    coloring: tuple[int, ...]
    lb_reason: str = ""
    refuted: list[int] = field(default_factory=list)  # colour counts shown infeasible by exhaustion
    nodes: int = 0

    @property
    def value(self) -> int | None:
        return self.ub if self.status == "exact" else None

    def to_json(self) -> dict:
        if self.status == "exact":
            return {"status": "exact", "value": self.ub}
        return {"status": "bounded", "lb": self.lb, "ub": self.ub}


def is_proper_coloring(G: OrderedGraph, coloring: Sequence[int]) -> bool:
    return len(coloring) == G.n and all(coloring[u] != coloring[v] for u, v in G.edges)


def greedy_clique(G: OrderedGraph) -> list[int]:
    masks = G.adjacency_masks()
    best: list[int] = [0] if G.n else []
    for s in range(G.n):
        clique, cand = [s], masks[s]
        while cand:
            v = max(_bits(cand), key=lambda u: ((masks[u] & cand).bit_count(), -u))
            clique.append(v)
            cand &= masks[v]
        if len(clique) > len(best):
            best = clique
    return sorted(best)


def dsatur_coloring(G: OrderedGraph) -> list[int]:
    """Saturation-order greedy colouring."""
    color = [-1] * G.n
    sat = [0] * G.n
    deg = [len(a) for a in G.adj]
    for _ in range(G.n):
        v = max(
            (u for u in range(G.n) if color[u] < 0),
            key=lambda u: (sat[u].bit_count(), deg[u], -u),
        )
        c = 0
        while sat[v] >> c & 1:
            c += 1
        color[v] = c
        for w in G.adj[v]:
            sat[w] |= 1 << c
    return color


def tabu_coloring(G: OrderedGraph, k: int, seed: int = 0, max_iters: int = 20000) -> list[int] | None:
    """Tabu local search for a proper k-colouring; None if none was found.

    Only ever used to find colourings early, never to conclude infeasibility.
    """
    rng = random.Random(seed)
    n = G.n
    if n == 0:
        return []
    if k <= 0:
        return None
    adj = [sorted(a) for a in G.adj]
    col = [rng.randrange(k) for _ in range(n)]
    gamma = [[0] * k for _ in range(n)]
    for u, v in G.edges:
        gamma[u][col[v]] += 1
        gamma[v][col[u]] += 1
    bad = {v for v in range(n) if gamma[v][col[v]]}
    conflicts = sum(gamma[v][col[v]] for v in bad) // 2
    tabu: dict[tuple[int, int], int] = {}
    for it in range(max_iters):
        if conflicts == 0:
            return col
        best_delta, moves = None, []
        for v in sorted(bad):
            cv = col[v]
            for c in range(k):
                if c == cv:
                    continue
                delta = gamma[v][c] - gamma[v][cv]
                if tabu.get((v, c), -1) >= it and conflicts + delta > 0:
                    continue
                if best_delta is None or delta < best_delta:
                    best_delta, moves = delta, [(v, c)]
                elif delta == best_delta:
                    moves.append((v, c))
        if not moves:
            continue
        v, c = moves[rng.randrange(len(moves))]
        old = col[v]
        col[v] = c
        for w in adj[v]:
            gamma[w][old] -= 1
            gamma[w][c] += 1
            if gamma[w][col[w]]:
                bad.add(w)
            else:
                bad.discard(w)
        if gamma[v][c]:
            bad.add(v)
        else:
            bad.discard(v)
        conflicts += best_delta
        tabu[(v, old)] = it + int(0.6 * len(bad)) + rng.randrange(10)
    return col if conflicts == 0 else None


def _k_coloring(G: OrderedGraph, k: int, meter: _Meter) -> list[int] | None:
    """Exact k-colouring search (DSATUR branching) or None if none exists.

    New colours are opened in increasing order, so the first vertex is always
    coloured 0 and colour permutations are never revisited.
    """
    n = G.n
    adj = [sorted(a) for a in G.adj]
    deg = [len(a) for a in adj]
    color = [-1] * n
    sat = [0] * n
    full = (1 << k) - 1

    def pick() -> int:
        best, key = -1, None
        for u in range(n):
            if color[u] < 0:
                kk = (sat[u].bit_count(), deg[u], -u)
                if key is None or kk > key:
                    best, key = u, kk
        return best

    def solve(done: int, used: int) -> bool:
        meter.tick()
        if done == n:
            return True
        v = pick()
        for c in range(min(k, used + 1)):
            if sat[v] >> c & 1:
                continue
            color[v] = c
            changed = []
            dead = False
            bit = 1 << c
            for w in adj[v]:
                if color[w] < 0 and not sat[w] & bit:
                    sat[w] |= bit
                    changed.append(w)
                    if sat[w] == full:
                        dead = True
            if not dead and solve(done + 1, max(used, c + 1)):
                return True
            for w in changed:
                sat[w] &= ~bit
            color[v] = -1
        return False

    if n == 0:
        return []
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * n + 1000))
    try:
        return list(color) if solve(0, 0) else None
    finally:
        sys.setrecursionlimit(old_limit)


def chromatic_number(
    G: OrderedGraph,
    budget: SearchBudget | None = None,
    alpha: AlphaResult | None = None,
) -> ChiResult:
    """Iterative deepening on the number of colours, from the best lower bound up."""
    budget = budget or SearchBudget()
    if G.n == 0:
        return ChiResult("exact", 0, 0, ())
    upper = dsatur_coloring(G)
    ub = max(upper) + 1
    clique = len(greedy_clique(G))
    alpha_ub = alpha.ub if alpha is not None else _clique_cover_size((1 << G.n) - 1, G.adjacency_masks())
    ratio = -(-G.n // alpha_ub)
    lb = max(clique, ratio)
    reason = "clique" if clique >= ratio else "n/alpha"
    # local search only tightens the upper bound; every lower bound below
    # comes from the clique, n/alpha or an exhausted exact search
    while ub - 1 >= lb:
        found = tabu_coloring(G, ub - 1)
        if found is None:
            break
        upper, ub = found, ub - 1
    meter = _Meter(budget)
    refuted = []
    try:
        for k in range(lb, ub):
            found = _k_coloring(G, k, meter)
            if found is not None:
                upper, ub = found, k
                break
            refuted.append(k)
            lb, reason = k + 1, "exhaustion"
    except BudgetExceeded:
        return ChiResult("bounded", lb, ub, tuple(upper), reason, refuted, meter.nodes)
    return ChiResult("exact", ub, ub, tuple(upper), reason, refuted, meter.nodes)


# -- ordered path S ----------------------------------------------------------

def find_ordered_path_s(
    structure: IncidenceStructure,
    subset: Iterable[tuple[int, int]],
    point_rank: Sequence[int] | None = None,
    line_rank: Sequence[int] | None = None,
) -> tuple[int, int, int, int] | None:
    """Find p < p', l < l' with (p,l), (p',l), (p',l') all in ``subset``.

    Comparisons are strict on the supplied ranks, so tied ranks (e.g. points
    sharing an x-coordinate) are never ordered.  Ranks default to the
    canonical index order.  Returns ``(p, p', l, l')``.
    """
    prank = point_rank if point_rank is not None else range(structure.num_points)
    lrank = line_rank if line_rank is not None else range(structure.num_lines)
    J = sorted(set(subset))
    on_line: dict[int, list[int]] = {}
    top_line: dict[int, int] = {}
    for i, j in J:
        on_line.setdefault(j, []).append(i)
        if i not in top_line or lrank[j] > lrank[top_line[i]]:
            top_line[i] = j
    for l in sorted(on_line, key=lambda j: lrank[j]):
        pts = sorted(on_line[l], key=lambda i: prank[i])
        for p2 in pts[1:]:
            l2 = top_line[p2]
            if prank[p2] > prank[pts[0]] and lrank[l2] > lrank[l]:
                return (pts[0], p2, l, l2)
    return None


# -- report ------------------------------------------------------------------

@dataclass
class AnalysisReport:
    n: int
    edges: int
    triangle_free: bool
    girth: float
    alpha: AlphaResult
    chi: ChiResult
    chi_incidence_lower: int | None
    girth_witness: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "edges": self.edges,
            "triangle_free": self.triangle_free,
            "girth": "inf" if self.girth == INF else int(self.girth),
            "alpha": self.alpha.to_json(),
            "chi": self.chi.to_json(),
            "chi_incidence_lower": self.chi_incidence_lower,
        }


def incidence_chi_lower(n: int, num_points: int, num_lines: int) -> int:
    """ceil(n / (|P| + |L|)), i.e. ceil(n / 2N) when both parts have size N."""
    total = num_points + num_lines
    return -(-n // total) if total else 0


def analyze_graph(
    G: OrderedGraph,
    budget: SearchBudget | None = None,
    structure: IncidenceStructure | None = None,
) -> AnalysisReport:
    budget = budget or SearchBudget()
    tf, _ = is_triangle_free(G)
    g, gw = girth(G)
    alpha = independence_number(G, budget)
    chi = chromatic_number(G, budget, alpha)
    lower = None
    if structure is not None:
        lower = incidence_chi_lower(G.n, structure.num_points, structure.num_lines)
    return AnalysisReport(G.n, G.num_edges, tf, g, alpha, chi, lower, gw)
