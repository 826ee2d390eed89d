"""Finite posets with named shapes.

Elements are the dense integers ``0..n-1`` in a canonical order:

* ``Chain(n)``: ``0 < 1 < ... < n-1``.
* ``Grid(m, n)``: product order on ``[0,m) x [0,n)``; element ``(i, j)`` has
  id ``i*n + j`` (row-major).  The first coordinate is the "horizontal"
  factor S, the second the "vertical" factor T.
* ``TriangleRegion(m, n, c)``: the grid points with ``i + j > c``, row-major.
* ``ZigzagFence(path)``: the lattice points of a right/down staircase, in
  path order.  A right step is an arrow forwards, a down step backwards.
* ``Opposite(P)``: same ids, reversed order.
* ``Custom``: given cover relations.

Every poset keeps a ``labels`` tuple (coordinates for grid-like shapes) so
element ids can be mapped back to geometry.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import CarrierNotSubset, MalformedShape, NotAnInterval


# --- shape descriptors ---------------------------------------------------------

@dataclass(frozen=True)
class Chain:
    n: int


@dataclass(frozen=True)
class Grid:
    m: int
    n: int


@dataclass(frozen=True)
class TriangleRegion:
    m: int
    n: int
    cutoff: int


@dataclass(frozen=True)
class ZigzagPath:
    """A right/down lattice staircase inside a bounding window.

    ``steps`` is a string over ``R`` (``+(1,0)``) and ``D`` (``-(0,1)``);
    ``window`` is ``((x0, x1), (y0, y1))`` with inclusive bounds.
    """

    start: tuple[int, int]
    steps: str
    window: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(int(v) for v in self.start))
        object.__setattr__(self, "steps", "".join(self.steps).upper())
        (x0, x1), (y0, y1) = self.window
        object.__setattr__(self, "window", ((int(x0), int(x1)), (int(y0), int(y1))))
        bad = set(self.steps) - {"R", "D"}
        if bad:
            raise MalformedShape("steps", f"unknown moves {sorted(bad)}; use R and D")
        if x1 < x0 or y1 < y0:
            raise MalformedShape("window", f"empty window {self.window}")
        pts = self.points()
        sx, sy = pts[0]
        ex, ey = pts[-1]
        for x, y in pts:
            if not (x0 <= x <= x1 and y0 <= y <= y1):
                raise MalformedShape("steps", f"path leaves the window at {(x, y)}")
        if not (sy == y1 or sx == x0):
            raise MalformedShape("start", f"{self.start} is not on the top/left window boundary")
        if not (ey == y0 or ex == x1):
            raise MalformedShape("steps", f"path ends at {(ex, ey)}, not on the bottom/right boundary")

    def points(self) -> list[tuple[int, int]]:
        x, y = self.start
        out = [(x, y)]
        for s in self.steps:
            if s == "R":
                x += 1
            else:
                y -= 1
            out.append((x, y))
        return out

    @property
    def crosses_corner_to_corner(self) -> bool:
        (x0, x1), (y0, y1) = self.window
        pts = self.points()
        return pts[0] == (x0, y1) and pts[-1] == (x1, y0)

    @property
    def width(self) -> int:
        return self.window[0][1] - self.window[0][0] + 1

    @property
    def height(self) -> int:
        return self.window[1][1] - self.window[1][0] + 1


@dataclass(frozen=True)
class ZigzagFence:
    path: ZigzagPath


@dataclass(frozen=True)
class Opposite:
    base: "FinitePoset"


@dataclass(frozen=True)
class Custom:
    name: str = "custom"


Shape = Union[Chain, Grid, TriangleRegion, ZigzagFence, Opposite, Custom]


# --- the poset -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FinitePoset:
    shape: Shape
    labels: tuple
    covers: tuple[tuple[int, int], ...]
    leq: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def elements(self) -> range:
        return range(self.size)

    def __len__(self):
        return self.size

    def __eq__(self, other):
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return (self is other) or (
            self.size == other.size and self.covers == other.covers
            and self.labels == other.labels and np.array_equal(self.leq, other.leq))

    def __hash__(self):
        return hash((self.labels, self.covers))

    def le(self, a: int, b: int) -> bool:
        return bool(self.leq[a, b])

    def index(self, label) -> int:
        return self._label_index()[label]

    def _label_index(self) -> dict:
        cache = self.__dict__.get("_lab")
        if cache is None:
            cache = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_lab", cache)
        return cache

    def successors(self, x: int) -> list[int]:
        return self._adjacency()[0][x]

    def predecessors(self, x: int) -> list[int]:
        return self._adjacency()[1][x]

    def _adjacency(self):
        cache = self.__dict__.get("_adj")
        if cache is None:
            succ = [[] for _ in range(self.size)]
            pred = [[] for _ in range(self.size)]
            for a, b in self.covers:
                succ[a].append(b)
                pred[b].append(a)
            cache = ([sorted(s) for s in succ], [sorted(s) for s in pred])
            object.__setattr__(self, "_adj", cache)
        return cache

    @property
    def is_grid(self) -> bool:
        return isinstance(self.shape, Grid)

    @property
    def is_grid_like(self) -> bool:
        return isinstance(self.shape, (Grid, TriangleRegion))

    @property
    def grid_dims(self) -> tuple[int, int]:
        """Bounding grid ``(m, n)`` for Grid and TriangleRegion posets."""
        return self.shape.m, self.shape.n

    def cover_path(self, a: int, b: int) -> list[tuple[int, int]]:
        """A canonical chain of covers from ``a`` up to ``b`` (a <= b)."""
        if not self.leq[a, b]:
            raise ValueError(f"{a} is not below {b}")
        path = []
        x = a
        while x != b:
            x_next = next(s for s in self.successors(x) if self.leq[s, b])
            path.append((x, x_next))
            x = x_next
        return path


def _closure(n: int, covers: Iterable[tuple[int, int]]) -> np.ndarray:
    reach = np.eye(n, dtype=bool)
    for a, b in covers:
        reach[a, b] = True
    # Warshall on boolean matrices
    for k in range(n):
        reach |= np.outer(reach[:, k], reach[k, :])
    return reach


def _hasse(leq: np.ndarray) -> list[tuple[int, int]]:
    n = leq.shape[0]
    strict = leq & ~np.eye(n, dtype=bool)
    # a < c < b for some c  <=>  (strict @ strict)[a, b]
    two = (strict.astype(np.int64) @ strict.astype(np.int64)) > 0
    cov = strict & ~two
    return [(int(a), int(b)) for a, b in zip(*np.nonzero(cov))]


def _make(shape, labels, covers) -> FinitePoset:
    n = len(labels)
    covers = sorted({(int(a), int(b)) for a, b in covers})
    for a, b in covers:
        if not (0 <= a < n and 0 <= b < n) or a == b:
            raise MalformedShape("covers", f"bad cover {a}->{b}")
    leq = _closure(n, covers)
    if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
        raise MalformedShape("covers", "relation has a cycle (not antisymmetric)")
    if set(_hasse(leq)) != set(covers):
        redundant = sorted(set(covers) - set(_hasse(leq)))
        raise MalformedShape("covers", f"covers implied by others: {redundant}")
    leq.setflags(write=False)
    return FinitePoset(shape, tuple(labels), tuple(covers), leq)


def chain(n: int) -> FinitePoset:
    if n < 1:
        raise MalformedShape("n", f"chain length must be >= 1, got {n}")
    return _make(Chain(n), tuple(range(n)), [(i, i + 1) for i in range(n - 1)])


def grid(m: int, n: int) -> FinitePoset:
    if m < 1 or n < 1:
        raise MalformedShape("m,n", f"grid dimensions must be >= 1, got {(m, n)}")
    labels = tuple((i, j) for i in range(m) for j in range(n))
    covers = []
    for i in range(m):
        for j in range(n):
            if i + 1 < m:
                covers.append((i * n + j, (i + 1) * n + j))
            if j + 1 < n:
                covers.append((i * n + j, i * n + j + 1))
    return _make(Grid(m, n), labels, covers)


def _lattice_poset(shape, points: list[tuple[int, int]]) -> FinitePoset:
    """Induced product order on a set of lattice points, via unit steps."""
    index = {pt: k for k, pt in enumerate(points)}
    covers = []
    for (x, y), k in index.items():
        for nb in ((x + 1, y), (x, y + 1)):
            if nb in index:
                covers.append((k, index[nb]))
    return _make(shape, points, covers)


def triangle_region(m: int, n: int, cutoff: int) -> FinitePoset:
    if m < 1 or n < 1:
        raise MalformedShape("m,n", f"grid dimensions must be >= 1, got {(m, n)}")
    pts = [(i, j) for i in range(m) for j in range(n) if i + j > cutoff]
    if not pts:
        raise MalformedShape("cutoff", f"no lattice points with i + j > {cutoff}")
    return _lattice_poset(TriangleRegion(m, n, cutoff), pts)


def zigzag_fence(path: ZigzagPath) -> FinitePoset:
    pts = path.points()
    covers = []
    for k, s in enumerate(path.steps):
        covers.append((k, k + 1) if s == "R" else (k + 1, k))
    return _make(ZigzagFence(path), pts, covers)


def window_grid(path: ZigzagPath) -> FinitePoset:
    """The grid over the path's window; ``(i, j)`` is lattice point ``(x0+i, y0+j)``."""
    return grid(path.width, path.height)


def opposite(poset: FinitePoset) -> FinitePoset:
    if isinstance(poset.shape, Opposite):
        return poset.shape.base
    covers = tuple(sorted((b, a) for a, b in poset.covers))
    leq = poset.leq.T.copy()
    leq.setflags(write=False)
    return FinitePoset(Opposite(poset), poset.labels, covers, leq)


def custom(n: int, covers: Iterable[tuple[int, int]], labels=None, name="custom") -> FinitePoset:
    """A poset from arbitrary generating relations; covers become the Hasse diagram."""
    if n < 1:
        raise MalformedShape("n", f"need at least one element, got {n}")
    rel = [(int(a), int(b)) for a, b in covers]
    for a, b in rel:
        if not (0 <= a < n and 0 <= b < n):
            raise MalformedShape("covers", f"relation {a}->{b} out of range")
    leq = _closure(n, [r for r in rel if r[0] != r[1]])
    labels = tuple(range(n)) if labels is None else tuple(labels)
    return _make(Custom(name), labels, _hasse(leq))


def build_poset(shape: Shape) -> FinitePoset:
    if isinstance(shape, Chain):
        return chain(shape.n)
    if isinstance(shape, Grid):
        return grid(shape.m, shape.n)
    if isinstance(shape, TriangleRegion):
        return triangle_region(shape.m, shape.n, shape.cutoff)
    if isinstance(shape, ZigzagFence):
        return zigzag_fence(shape.path)
    if isinstance(shape, ZigzagPath):
        return zigzag_fence(shape)
    if isinstance(shape, Opposite):
        return opposite(shape.base)
    raise MalformedShape("shape", f"cannot build {shape!r} without explicit covers")


def induced_subposet(poset: FinitePoset, elements: list[int]) -> FinitePoset:
    """Subposet on ``elements`` (new ids follow the given order)."""
    idx = np.array(elements, dtype=np.int64)
    leq = poset.leq[np.ix_(idx, idx)]
    labels = tuple(poset.labels[e] for e in elements)
    covers = _hasse(leq)
    k = len(elements)
    shape: Shape = Custom("restriction")
    if all(leq[a, b] for a in range(k) for b in range(a, k)):
        shape = Chain(k)
    return _make(shape, labels, covers)


# --- subset predicates ---------------------------------------------------------

def _check_subset(poset: FinitePoset, carrier) -> frozenset[int]:
    c = frozenset(int(x) for x in carrier)
    bad = [x for x in c if not 0 <= x < poset.size]
    if bad:
        raise CarrierNotSubset(f"elements {sorted(bad)} are not in the poset")
    return c


def is_convex(poset: FinitePoset, carrier) -> bool:
    c = _check_subset(poset, carrier)
    if not c:
        return True
    ids = np.array(sorted(c))
    mask = np.zeros(poset.size, dtype=bool)
    mask[ids] = True
    # q is between two carrier points iff some p <= q and some q <= r
    above = poset.leq[ids].any(axis=0)
    below = poset.leq[:, ids].any(axis=1)
    return not np.any(above & below & ~mask)


def is_connected(poset: FinitePoset, carrier) -> bool:
    c = _check_subset(poset, carrier)
    if not c:
        return False
    comp = poset.leq | poset.leq.T
    start = next(iter(c))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in c:
            if y not in seen and comp[x, y]:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(c)


def is_interval(poset: FinitePoset, carrier) -> bool:
    c = _check_subset(poset, carrier)
    return bool(c) and is_convex(poset, c) and is_connected(poset, c)


def is_ideal(poset: FinitePoset, carrier) -> bool:
    c = _check_subset(poset, carrier)
    return all(y in c for x in c for y in np.flatnonzero(poset.leq[:, x]))


def is_filter(poset: FinitePoset, carrier) -> bool:
    c = _check_subset(poset, carrier)
    return all(y in c for x in c for y in np.flatnonzero(poset.leq[x]))


def is_directed(poset: FinitePoset, carrier) -> bool:
    c = sorted(_check_subset(poset, carrier))
    return all(any(poset.leq[a, u] and poset.leq[b, u] for u in c) for a in c for b in c)


def connected_components(poset: FinitePoset, carrier) -> list[frozenset[int]]:
    remaining = set(_check_subset(poset, carrier))
    comp = poset.leq | poset.leq.T
    out = []
    while remaining:
        start = min(remaining)
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in list(remaining):
                if y not in seen and comp[x, y]:
                    seen.add(y)
                    queue.append(y)
        remaining -= seen
        out.append(frozenset(seen))
    return out


def down_closure(poset: FinitePoset, elements) -> frozenset[int]:
    ids = list(elements)
    if not ids:
        return frozenset()
    return frozenset(int(x) for x in np.flatnonzero(poset.leq[:, ids].any(axis=1)))


def up_closure(poset: FinitePoset, elements) -> frozenset[int]:
    ids = list(elements)
    if not ids:
        return frozenset()
    return frozenset(int(x) for x in np.flatnonzero(poset.leq[ids].any(axis=0)))


@dataclass(frozen=True)
class Interval:
    """A non-empty convex connected subset of a poset."""

    poset: FinitePoset = field(repr=False)
    carrier: frozenset

    @classmethod
    def of(cls, poset: FinitePoset, carrier) -> "Interval":
        c = _check_subset(poset, carrier)
        if not is_interval(poset, c):
            raise NotAnInterval(f"{sorted(c)} is not a non-empty convex connected subset")
        return cls(poset, c)

    def __iter__(self):
        return iter(sorted(self.carrier))

    def __len__(self):
        return len(self.carrier)


# --- blocks --------------------------------------------------------------------

BLOCK_TAGS = ("db", "bb", "vb", "hb")


def classify_block(carrier, poset: FinitePoset) -> frozenset[str] | None:
    """Block types of ``carrier`` on a Grid or TriangleRegion, or None.

    On a TriangleRegion a block means (block of the bounding grid) ∩ region.
    For each type the smallest block of that type containing the carrier is
    built from its coordinate projections; the carrier is of that type iff
    this candidate meets the region exactly in the carrier.
    """
    if not poset.is_grid_like:
        raise MalformedShape("shape", "blocks are only defined on Grid/TriangleRegion posets")
    c = _check_subset(poset, carrier)
    if not c:
        return None
    m, n = poset.grid_dims
    pts = {poset.labels[x] for x in c}
    region = set(poset.labels)
    i_lo = min(i for i, _ in pts)
    i_hi = max(i for i, _ in pts)
    j_lo = min(j for _, j in pts)
    j_hi = max(j for _, j in pts)
    candidates = {
        "db": ((0, i_hi), (0, j_hi)),
        "bb": ((i_lo, m - 1), (j_lo, n - 1)),
        "vb": ((i_lo, i_hi), (0, n - 1)),
        "hb": ((0, m - 1), (j_lo, j_hi)),
    }
    tags = set()
    for tag, ((a, b), (u, v)) in candidates.items():
        block = {(i, j) for i in range(a, b + 1) for j in range(u, v + 1)} & region
        if block == pts:
            tags.add(tag)
    return frozenset(tags) if tags else None


def block_carrier(poset: FinitePoset, irange: tuple[int, int], jrange: tuple[int, int]) -> frozenset[int]:
    """Element ids of the rectangle ``irange x jrange`` (inclusive) inside the poset."""
    (a, b), (u, v) = irange, jrange
    return frozenset(k for k, (i, j) in enumerate(poset.labels) if a <= i <= b and u <= j <= v)


def region_split(path: ZigzagPath) -> dict[tuple[int, int], str]:
    """Label each window lattice point ``"Z"`` (on the path), ``"U"`` or ``"L"``.

    ``U`` points dominate some path point, ``L`` points are dominated by one.
    """
    pts = path.points()
    on_path = set(pts)
    (x0, x1), (y0, y1) = path.window
    labels = {}
    for x in range(x0, x1 + 1):
        for y in range(y0, y1 + 1):
            if (x, y) in on_path:
                labels[(x, y)] = "Z"
            elif any(px <= x and py <= y for px, py in pts):
                labels[(x, y)] = "U"
            elif any(x <= px and y <= py for px, py in pts):
                labels[(x, y)] = "L"
            else:
                raise MalformedShape("window", f"point {(x, y)} is not separated by the path")
    return labels
