"""Integer point-line incidence structures.

Points are integer pairs, lines are ``y = slope*x + intercept`` with integer
coefficients.  All arithmetic goes through :func:`checked` so that values
stay inside the signed 64-bit range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


def checked(value: int) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise OverflowError(f"integer {value} outside the signed 64-bit range")
    return value


class Point(NamedTuple):
    x: int
    y: int


class Line(NamedTuple):
    slope: int
    intercept: int

    def at(self, x: int) -> int:
        return checked(checked(self.slope * x) + self.intercept)

    def contains(self, p: Point) -> bool:
        return self.at(p.x) == p.y


def compute_incidences(points: Sequence[Point], lines: Sequence[Line]) -> list[tuple[int, int]]:
    """All incident (point-index, line-index) pairs, sorted.

    Each line is evaluated once per distinct x-coordinate, so the cost is
    ``O(|lines| * |distinct x|)`` rather than a full pair scan.
    """
    by_coord: dict[Point, int] = {}
    for i, p in enumerate(points):
        checked(p.x), checked(p.y)
        by_coord.setdefault(Point(p.x, p.y), i)
    xs = sorted({p.x for p in points})
    pairs = []
    for j, line in enumerate(lines):
        checked(line.slope), checked(line.intercept)
        for x in xs:
            i = by_coord.get(Point(x, line.at(x)))
            if i is not None:
                pairs.append((i, j))
    pairs.sort()
    return pairs


@dataclass(frozen=True)
class IncidenceStructure:
    points: tuple[Point, ...]
    lines: tuple[Line, ...]
    incidences: tuple[tuple[int, int], ...]
    _lines_of: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)
    _points_of: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        lines_of: list[set[int]] = [set() for _ in self.points]
        points_of: list[set[int]] = [set() for _ in self.lines]
        for i, j in self.incidences:
            lines_of[i].add(j)
            points_of[j].add(i)
        object.__setattr__(self, "_lines_of", tuple(frozenset(s) for s in lines_of))
        object.__setattr__(self, "_points_of", tuple(frozenset(s) for s in points_of))

    @classmethod
    def from_sets(cls, points: Iterable[Iterable[int]], lines: Iterable[Iterable[int]]) -> "IncidenceStructure":
        """Canonicalise (sort, dedupe) points and lines and compute incidences."""
        pts = tuple(sorted({Point(*map(int, p)) for p in points}))
        lns = tuple(sorted({Line(*map(int, l)) for l in lines}))
        return cls(pts, lns, tuple(compute_incidences(pts, lns)))

    @property
    def num_points(self) -> int:
        return len(self.points)

    @property
    def num_lines(self) -> int:
        return len(self.lines)

    def lines_through(self, i: int) -> frozenset[int]:
        return self._lines_of[i]

    def points_on(self, j: int) -> frozenset[int]:
        return self._points_of[j]

    def is_incident(self, i: int, j: int) -> bool:
        return j in self._lines_of[i]

    def validate(self) -> None:
        """Raise ValueError unless the structure is canonical, distinct and complete."""
        if list(self.points) != sorted(set(self.points)):
            raise ValueError("points must be distinct and sorted by (x, y)")
        if list(self.lines) != sorted(set(self.lines)):
            raise ValueError("lines must be distinct and sorted by (slope, intercept)")
        for i, j in self.incidences:
            if not (0 <= i < len(self.points) and 0 <= j < len(self.lines)):
                raise ValueError(f"incidence ({i}, {j}) out of range")
            if not self.lines[j].contains(self.points[i]):
                raise ValueError(f"point {self.points[i]} is not on line {self.lines[j]}")
        if list(self.incidences) != compute_incidences(self.points, self.lines):
            raise ValueError("incidence list is not the complete sorted incidence set")

    def substructure(self, point_idx: Iterable[int], line_idx: Iterable[int]) -> "IncidenceStructure":
        """Induced sub-structure on the given point and line indices."""
        keep_p = sorted(set(point_idx))
        keep_l = sorted(set(line_idx))
        new_p = {old: new for new, old in enumerate(keep_p)}
        new_l = {old: new for new, old in enumerate(keep_l)}
        inc = tuple(sorted((new_p[i], new_l[j]) for i, j in self.incidences if i in new_p and j in new_l))
        return IncidenceStructure(
            tuple(self.points[i] for i in keep_p),
            tuple(self.lines[j] for j in keep_l),
            inc,
        )

    def to_json(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "lines": [list(l) for l in self.lines],
            "incidences": [list(e) for e in self.incidences],
        }

    @classmethod
    def from_json(cls, data: dict) -> "IncidenceStructure":
        try:
            pts = tuple(Point(int(x), int(y)) for x, y in data["points"])
            lns = tuple(Line(int(a), int(b)) for a, b in data["lines"])
            inc = tuple((int(i), int(j)) for i, j in data["incidences"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed incidence structure: {exc}") from exc
        s = cls(pts, lns, inc)
        s.validate()
        return s


def standard_config(m: int) -> IncidenceStructure:
    """Points ``[0,m) x [0,m^2)`` and lines ``y = ax + b`` over the same ranges.

    N = m^3 points and lines, with m^4 - (m(m-1)/2)^2 incidences.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    checked(m**4)
    m2 = m * m
    points = tuple(Point(a, b) for a in range(m) for b in range(m2))
    lines = tuple(Line(a, b) for a in range(m) for b in range(m2))
    # line (a, b) meets column x at y = a*x + b; point index is x*m^2 + y
    inc = []
    for j, (a, b) in enumerate(lines):
        for x in range(m):
            y = checked(a * x + b)
            if y < m2:
                inc.append((x * m2 + y, j))
    inc.sort()
    return IncidenceStructure(points, lines, tuple(inc))


def standard_incidence_count(m: int) -> int:
    return m**4 - (m * (m - 1) // 2) ** 2


@dataclass(frozen=True)
class CollinearityGraph:
    n: int
    adj: tuple[frozenset[int], ...]

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)


def collinearity_graph(structure: IncidenceStructure) -> CollinearityGraph:
    adj: list[set[int]] = [set() for _ in structure.points]
    for j in range(structure.num_lines):
        for u, v in combinations(sorted(structure.points_on(j)), 2):
            adj[u].add(v)
            adj[v].add(u)
    return CollinearityGraph(structure.num_points, tuple(frozenset(a) for a in adj))


def max_common_neighbors(H: CollinearityGraph) -> tuple[tuple[int, int] | None, int]:
    """Pair of distinct vertices with the most common neighbours.

    Ties go to the lexicographically smallest pair.  Returns ``(None, 0)`` on
    graphs with fewer than two vertices.
    """
    best_pair, best = None, 0
    for u in range(H.n):
        # only pairs at distance <= 2 can share a neighbour
        counts: dict[int, int] = {}
        for w in H.adj[u]:
            for v in H.adj[w]:
                if v > u:
                    counts[v] = counts.get(v, 0) + 1
        for v in sorted(counts):
            if counts[v] > best:
                best_pair, best = (u, v), counts[v]
    if best_pair is None and H.n >= 2:
        best_pair = (0, 1)
    return best_pair, best
