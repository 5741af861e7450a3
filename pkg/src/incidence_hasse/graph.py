"""Simple graphs whose vertex order is the index order."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .geometry import IncidenceStructure


@dataclass(frozen=True)
class OrderedGraph:
    """Simple graph on ``0..n-1``; the total order is the index order.

    ``edges`` holds pairs ``(u, v)`` with ``u < v``, sorted and duplicate-free.
    ``labels`` optionally tags each vertex (for incidence graphs: the
    ``(point-index, line-index)`` pair it came from).
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[tuple[int, int], ...] | None = None
    _adj: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        prev = None
        for e in self.edges:
            u, v = e
            if not 0 <= u < v < self.n:
                raise ValueError(f"edge {e} is not of the form u < v within 0..{self.n - 1}")
            if prev is not None and e <= prev:
                raise ValueError("edges must be sorted and duplicate-free")
            prev = e
            adj[u].add(v)
            adj[v].add(u)
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels must have one entry per vertex")
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], labels=None) -> "OrderedGraph":
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            norm.add((min(u, v), max(u, v)))
        return cls(n, tuple(sorted(norm)), None if labels is None else tuple(map(tuple, labels)))

    @property
    def adj(self) -> tuple[frozenset[int], ...]:
        return self._adj

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def forward(self, u: int) -> list[int]:
        """Neighbours later in the order, ascending."""
        return sorted(v for v in self._adj[u] if v > u)

    def adjacency_masks(self) -> list[int]:
        masks = []
        for a in self._adj:
            m = 0
            for v in a:
                m |= 1 << v
            masks.append(m)
        return masks

    def to_json(self) -> dict:
        data: dict = {"n": self.n, "edges": [list(e) for e in self.edges]}
        if self.labels is not None:
            data["labels"] = [list(l) for l in self.labels]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "OrderedGraph":
        try:
            n = int(data["n"])
            edges = [(int(u), int(v)) for u, v in data["edges"]]
            labels = data.get("labels")
            labels = None if labels is None else [(int(a), int(b)) for a, b in labels]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed graph: {exc}") from exc
        return cls.from_edges(n, edges, labels)


def incidence_graph(structure: IncidenceStructure) -> OrderedGraph:
    """Bipartite incidence graph: points are ``0..|P|-1``, lines follow."""
    off = structure.num_points
    return OrderedGraph.from_edges(
        structure.num_points + structure.num_lines,
        ((i, off + j) for i, j in structure.incidences),
    )
