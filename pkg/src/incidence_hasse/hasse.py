"""The ordered incidence graph, monotone-cycle certification, poset recovery
and the shift-graph baseline."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .geometry import IncidenceStructure
from .graph import OrderedGraph


def vertex_key(structure: IncidenceStructure, inc: tuple[int, int]) -> tuple[int, int, int, int]:
    p = structure.points[inc[0]]
    l = structure.lines[inc[1]]
    return (p.x, p.y, l.slope, l.intercept)


def build_hasse_graph(structure: IncidenceStructure) -> OrderedGraph:
    """One vertex per incidence, ordered by (x, y, slope, intercept).

    ``(p, l)`` and ``(p', l')`` are joined when ``x(p) < x(p')``,
    ``slope(l) < slope(l')`` and ``p'`` lies on ``l``.
    """
    verts = sorted(structure.incidences, key=lambda inc: vertex_key(structure, inc))
    index = {inc: k for k, inc in enumerate(verts)}
    pts, lns = structure.points, structure.lines
    edges = []
    for u, (i, j) in enumerate(verts):
        x, s = pts[i].x, lns[j].slope
        for i2 in structure.points_on(j):
            if pts[i2].x <= x:
                continue
            for j2 in structure.lines_through(i2):
                if lns[j2].slope > s:
                    v = index[(i2, j2)]
                    edges.append((u, v) if u < v else (v, u))
    return OrderedGraph(len(verts), tuple(sorted(set(edges))), tuple(verts))


@dataclass(frozen=True)
class MonotoneCycleCertificate:
    passed: bool
    witness: tuple[int, ...] | None = None
    edges_checked: int = 0

    def __bool__(self) -> bool:
        return self.passed


def _reach_masks(G: OrderedGraph) -> list[int]:
    """reach[u] = bitmask of vertices reachable from u by a forward path of length >= 1."""
    reach = [0] * G.n
    for u in range(G.n - 1, -1, -1):
        r = 0
        for v in G.adj[u]:
            if v > u:
                r |= (1 << v) | reach[v]
        reach[u] = r
    return reach


def _shortest_detour(G: OrderedGraph, u: int, w: int) -> list[int] | None:
    """Shortest forward path u -> w that does not use the edge uw directly."""
    parent = {u: None}
    queue = deque([u])
    while queue:
        a = queue.popleft()
        for b in G.forward(a):
            if b > w or b in parent or (a == u and b == w):
                continue
            parent[b] = a
            if b == w:
                path = [w]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(b)
    return None


def verify_no_monotone_cycle(G: OrderedGraph) -> MonotoneCycleCertificate:
    """PASS iff no edge ``uw`` (u < w) also has a forward path u -> w of length >= 2.

    On failure the witness is a shortest such cycle, listed in vertex order.
    """
    reach = _reach_masks(G)
    bad = []
    for u in range(G.n):
        fwd = G.forward(u)
        via = 0
        for v in fwd:
            via |= reach[v]
        bad.extend((u, w) for w in fwd if via >> w & 1)
    if not bad:
        return MonotoneCycleCertificate(True, None, G.num_edges)
    best = None
    for u, w in bad:
        path = _shortest_detour(G, u, w)
        if best is None or len(path) < len(best):
            best = path
    return MonotoneCycleCertificate(False, tuple(best), G.num_edges)


@dataclass(frozen=True)
class PosetClosure:
    """Strict order ``a < b`` iff there is a forward path from a to b."""

    n: int
    above: tuple[int, ...]  # bitmask of elements strictly above each vertex
    covers: tuple[tuple[int, int], ...]

    def less(self, a: int, b: int) -> bool:
        return bool(self.above[a] >> b & 1)

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in range(self.n) if self.above[a] >> b & 1]


class NotHasseError(ValueError):
    def __init__(self, witness):
        super().__init__(f"graph has a monotone cycle {list(witness)} under its order")
        self.witness = witness


def to_poset(G: OrderedGraph) -> PosetClosure:
    cert = verify_no_monotone_cycle(G)
    if not cert.passed:
        raise NotHasseError(cert.witness)
    above = _reach_masks(G)
    covers = []
    for a in range(G.n):
        beyond = 0
        m = above[a]
        while m:
            low = m & -m
            beyond |= above[low.bit_length() - 1]
            m ^= low
        c = above[a] & ~beyond
        while c:
            low = c & -c
            covers.append((a, low.bit_length() - 1))
            c ^= low
    return PosetClosure(G.n, tuple(above), tuple(covers))


def shift_graph(n: int) -> OrderedGraph:
    """Vertices (i, j), 1 <= i < j <= n in lexicographic order; (i, j) ~ (j, k)."""
    if n < 2:
        raise ValueError("shift graph needs n >= 2")
    verts = list(combinations(range(1, n + 1), 2))
    index = {v: k for k, v in enumerate(verts)}
    edges = [(index[(i, j)], index[(j, k)]) for i, j in verts for k in range(j + 1, n + 1)]
    return OrderedGraph.from_edges(len(verts), edges, verts)
