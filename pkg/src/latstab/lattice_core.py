"""Finite subsets of Z^d, boxes, cubes, projections and edge boundaries.

Coordinates are 1-based in every public signature (``g = {1, 3}`` keeps the
first and third coordinates); tuples are 0-indexed internally.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

import numpy as np

Point = tuple[int, ...]


def normalize_coords(g: Iterable[int], dim: int) -> tuple[int, ...]:
    """Validate a 1-based coordinate subset and return it as sorted 0-based indices."""
    try:
        idx = sorted(set(int(i) for i in g))
    except TypeError:
        idx = [int(g)]  # a bare integer
    if not idx:
        raise ValueError("coordinate subset must be nonempty")
    if idx[0] < 1 or idx[-1] > dim:
        raise ValueError(f"coordinate subset {idx} out of range for dimension {dim}")
    return tuple(i - 1 for i in idx)


class PointSet:
    """An immutable finite subset of Z^d.

    Points are stored in a hashed set for O(1) membership; iteration is in
    lexicographic order.
    """

    __slots__ = ("_dim", "_points", "_sorted", "_counts")

    def __init__(self, dim: int, points: Iterable[Sequence[int]] = ()):
        if int(dim) < 1:
            raise ValueError(f"dimension must be positive, got {dim}")
        self._dim = int(dim)
        pts = set()
        for p in points:
            t = tuple(int(c) for c in p)
            if len(t) != self._dim:
                raise ValueError(f"point {t} does not have {self._dim} coordinates")
            pts.add(t)
        self._points = frozenset(pts)
        self._sorted: tuple[Point, ...] | None = None
        self._counts: dict[tuple[int, ...], Counter] = {}

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def points(self) -> frozenset[Point]:
        return self._points

    def __len__(self) -> int:
        return len(self._points)

    def __contains__(self, x) -> bool:
        return tuple(x) in self._points

    def __iter__(self) -> Iterator[Point]:
        return iter(self.sorted_points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self._dim == other._dim and self._points == other._points

    def __hash__(self) -> int:
        return hash((self._dim, self._points))

    def __repr__(self) -> str:
        return f"PointSet(dim={self._dim}, size={len(self)})"

    @property
    def sorted_points(self) -> tuple[Point, ...]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._points))
        return self._sorted

    def projection_counts(self, coords0: tuple[int, ...]) -> Counter:
        """Fibre sizes over the projection onto 0-based ``coords0``.

        Maps each projected tuple to the number of points above it. Cached,
        since marginals are requested repeatedly by the stability routines.
        """
        c = self._counts.get(coords0)
        if c is None:
            c = Counter(tuple(p[i] for i in coords0) for p in self._points)
            self._counts[coords0] = c
        return c

    def coordinate_values(self, i: int) -> tuple[int, ...]:
        """Sorted values taken by 1-based coordinate ``i``."""
        (i0,) = normalize_coords([i], self._dim)
        return tuple(sorted(k[0] for k in self.projection_counts((i0,))))

    def bounding_box(self) -> tuple[Point, Point]:
        if not self._points:
            raise ValueError("empty point set has no bounding box")
        mins = tuple(min(p[i] for p in self._points) for i in range(self._dim))
        maxs = tuple(max(p[i] for p in self._points) for i in range(self._dim))
        return mins, maxs


class LatticeBox:
    """Cartesian product R_1 x ... x R_d of finite subsets of Z."""

    __slots__ = ("_edges",)

    def __init__(self, edges: Iterable[Iterable[int]]):
        self._edges = tuple(frozenset(int(v) for v in e) for e in edges)
        if not self._edges:
            raise ValueError("a box needs at least one edge")

    @property
    def dim(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> tuple[frozenset[int], ...]:
        return self._edges

    def __len__(self) -> int:
        return math.prod(len(e) for e in self._edges)

    def is_empty(self) -> bool:
        return any(not e for e in self._edges)

    def __contains__(self, x) -> bool:
        return len(x) == self.dim and all(c in e for c, e in zip(x, self._edges))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeBox):
            return NotImplemented
        if self.is_empty() and other.is_empty():
            return self.dim == other.dim
        return self._edges == other._edges

    def __hash__(self) -> int:
        return hash(self._edges) if not self.is_empty() else hash(("empty", self.dim))

    def __repr__(self) -> str:
        parts = []
        for e in self._edges:
            s = sorted(e)
            if s and s == list(range(s[0], s[-1] + 1)) and len(s) > 2:
                parts.append(f"[{s[0]}..{s[-1]}]")
            else:
                parts.append("{" + ",".join(map(str, s)) + "}")
        return "LatticeBox(" + " x ".join(parts) + ")"

    def iter_points(self) -> Iterator[Point]:
        return itertools.product(*(sorted(e) for e in self._edges))

    def to_pointset(self) -> PointSet:
        return PointSet(self.dim, self.iter_points())

    def projection_size(self, g: Iterable[int]) -> int:
        return math.prod(len(self._edges[i]) for i in normalize_coords(g, self.dim))

    @classmethod
    def interval(cls, lows: Sequence[int], highs: Sequence[int]) -> "LatticeBox":
        """Box of integer intervals [lows[i], highs[i]] (inclusive)."""
        return cls(range(lo, hi + 1) for lo, hi in zip(lows, highs))


class CubeSpec(NamedTuple):
    """Cube of side ``side`` with minimum corner ``corner``."""

    dim: int
    corner: Point
    side: int

    def to_box(self) -> LatticeBox:
        if self.side < 1:
            raise ValueError("cube side must be positive")
        return LatticeBox(range(c, c + self.side) for c in self.corner)

    def __contains__(self, x) -> bool:
        return all(c <= v < c + self.side for c, v in zip(self.corner, x))


Region = Union[PointSet, LatticeBox, CubeSpec]


def project(S: PointSet | LatticeBox, g: Iterable[int]) -> PointSet:
    """Projection of S onto the 1-based coordinates in ``g`` (kept in increasing order)."""
    if isinstance(S, LatticeBox):
        S = S.to_pointset()
    coords = normalize_coords(g, S.dim)
    return PointSet(len(coords), S.projection_counts(coords).keys())


def _as_box(X: Region) -> LatticeBox | None:
    if isinstance(X, CubeSpec):
        return X.to_box()
    return X if isinstance(X, LatticeBox) else None


def intersection_size(A: Region, B: Region) -> int:
    ba, bb = _as_box(A), _as_box(B)
    if ba is not None and bb is not None:
        return math.prod(len(x & y) for x, y in zip(ba.edges, bb.edges))
    if ba is not None:
        A, B = B, A
        bb = ba
    # A is now a PointSet
    if bb is not None:
        return sum(1 for p in A.points if p in bb)
    small, big = (A, B) if len(A) <= len(B) else (B, A)
    return sum(1 for p in small.points if p in big.points)


def sym_diff_size(A: Region, B: Region) -> int:
    """|A \\ B| + |B \\ A| for point sets, boxes or cubes of equal dimension."""
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    size_a = len(_as_box(A) or A)
    size_b = len(_as_box(B) or B)
    return size_a + size_b - 2 * intersection_size(A, B)


class Boundary(NamedTuple):
    per_direction: tuple[int, ...]
    total: int


def edge_boundary(S: PointSet) -> Boundary:
    """Edges {x, x + e_i} of the lattice graph with exactly one endpoint in S."""
    pts = S.points
    counts = []
    for i in range(S.dim):
        n = 0
        for p in pts:
            lo = p[:i] + (p[i] - 1,) + p[i + 1:]
            hi = p[:i] + (p[i] + 1,) + p[i + 1:]
            n += (lo not in pts) + (hi not in pts)
        counts.append(n)
    return Boundary(tuple(counts), sum(counts))


# -- generators ---------------------------------------------------------------


def annulus(a: int, a_inner: int, d: int) -> PointSet:
    """[a]^d minus [a_inner]^d, with [n] = {1, ..., n}."""
    if not (a > a_inner >= 0) or d < 1:
        raise ValueError(f"annulus needs a > a_inner >= 0 and d >= 1, got {a}, {a_inner}, {d}")
    side = range(1, a + 1)
    return PointSet(d, (p for p in itertools.product(side, repeat=d) if max(p) > a_inner))


def cuboid(a: int, b: int, d: int) -> PointSet:
    """[a]^(d-1) x [b]."""
    if not (b >= a >= 1) or d < 1:
        raise ValueError(f"cuboid needs b >= a >= 1 and d >= 1, got {a}, {b}, {d}")
    return LatticeBox([range(1, a + 1)] * (d - 1) + [range(1, b + 1)]).to_pointset()


def notched_cube(a: int, d: int, r: int) -> PointSet:
    """[a]^d with the corner simplex {x : sum(x_i - 1) < r} removed.

    For r < a no axis-parallel line is emptied, so the edge boundary stays at
    2d a^(d-1) while |S| drops by C(r+d-1, d): a near-extremal set for the
    edge-isoperimetric inequality.
    """
    if not (0 <= r < a) or d < 1:
        raise ValueError(f"notched_cube needs 0 <= r < a, got a={a}, r={r}")
    side = range(1, a + 1)
    return PointSet(d, (p for p in itertools.product(side, repeat=d) if sum(p) - d >= r))


def perturbed_box(edges: Sequence[int | Iterable[int]], flip_count: int, seed: int) -> PointSet:
    """A box with ``flip_count`` distinct lattice points toggled.

    Each edge is either a length n (meaning {1..n}) or an explicit set of
    integers. Toggled points are drawn uniformly without replacement from the
    bounding region inflated to twice its span in every coordinate.
    """
    sets = [range(1, e + 1) if isinstance(e, (int, np.integer)) else sorted(set(e)) for e in edges]
    box = LatticeBox(sets)
    if box.is_empty():
        raise ValueError("perturbed_box needs nonempty edges")
    if not 0 <= flip_count <= len(box):
        raise ValueError(f"flip_count must lie in [0, {len(box)}]")
    lows, spans = [], []
    for e in box.edges:
        lo, hi = min(e), max(e)
        n = hi - lo + 1
        lows.append(lo - n // 2)
        spans.append(2 * n)
    region = math.prod(spans)
    rng = np.random.default_rng(seed)
    picks = rng.choice(region, size=flip_count, replace=False)
    pts = set(box.iter_points())
    for flat in sorted(int(k) for k in picks):
        x = []
        for lo, n in zip(reversed(lows), reversed(spans)):
            flat, r = divmod(flat, n)
            x.append(lo + r)
        pts ^= {tuple(reversed(x))}
    return PointSet(box.dim, pts)


GENERATORS = {
    "annulus": annulus,
    "cuboid": cuboid,
    "notched_cube": notched_cube,
    "perturbed_box": perturbed_box,
}


def make_generator(family: str, d: int, **params) -> PointSet:
    """Build a named test family in dimension d."""
    if family == "annulus":
        return annulus(params["a"], params["a_inner"], d)
    if family == "cuboid":
        return cuboid(params["a"], params["b"], d)
    if family == "notched_cube":
        return notched_cube(params["a"], d, params.get("r", 1))
    if family == "perturbed_box":
        edges = params["edges"]
        if len(edges) != d:
            raise ValueError(f"perturbed_box got {len(edges)} edges for d={d}")
        return perturbed_box(edges, params["flip_count"], params["seed"])
    raise ValueError(f"unknown family {family!r}; expected one of {sorted(GENERATORS)}")
