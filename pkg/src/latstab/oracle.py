"""Brute-force ground truth at desk scale.

optimal_box
    Exact minimum of |S delta (E_1 x ... x E_d)|. Two reductions keep the
    search finite and small, and neither discards an optimum:

    * Edges may be taken inside the projections: a box value v outside
      pi_i(S) contributes only points outside S, so dropping v never
      increases the symmetric difference.
    * With all other edges fixed, whether a value v of coordinate i belongs
      to E_i depends only on the slice {y : (v, y) in S}. Values with equal
      slices can therefore be decided together, so it is enough to try unions
      of slice classes on every axis but one, and on that last axis include
      exactly the values whose inclusion strictly lowers the cost.

optimal_cube
    Exhaustive over side lengths and corners, counting |S cap C| with a
    d-dimensional prefix sum.

recompute_direct
    Naive re-implementations of hole-weight, entropy, mutual information and
    edge boundary that share no code with the primary modules.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from latstab.lattice_core import CubeSpec, LatticeBox, PointSet

ENV_PREFIX = "LATSTAB_BUDGET_"


class BudgetExceeded(Exception):
    """The instance is too large for exhaustive search under the budget."""

    def __init__(self, reason: str, required: dict):
        super().__init__(reason)
        self.reason = reason
        self.required = required


@dataclass(frozen=True)
class OracleBudget:
    max_projection_size: Optional[int] = None  # per enumerated axis; None -> 14 (d=2) or 8
    max_cube_side: int = 512
    max_candidates: int = 1 << 22
    max_grid: int = 20_000_000
    time_hint: Optional[float] = None

    def projection_cap(self, d: int) -> int:
        if self.max_projection_size is not None:
            return self.max_projection_size
        return 14 if d <= 2 else 8

    @classmethod
    def from_env(cls, **overrides) -> "OracleBudget":
        """Read defaults from LATSTAB_BUDGET_MAX_PROJECTION_SIZE and friends."""
        kw = {}
        for name, conv in [("max_projection_size", int), ("max_cube_side", int),
                           ("max_candidates", int), ("max_grid", int), ("time_hint", float)]:
            raw = os.environ.get(ENV_PREFIX + name.upper())
            if raw:
                kw[name] = conv(raw)
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)


def _grid(S: PointSet, budget: OracleBudget):
    """Dense 0/1 array of S over prod_i pi_i(S), plus sorted values per axis."""
    d = S.dim
    values = [sorted({p[i] for p in S.points}) for i in range(d)]
    cells = math.prod(len(v) for v in values)
    if cells > budget.max_grid:
        raise BudgetExceeded("projection grid too large",
                             {"grid": cells, "max_grid": budget.max_grid})
    index = [{v: k for k, v in enumerate(vals)} for vals in values]
    A = np.zeros([len(v) for v in values], dtype=np.int64)
    for p in S.points:
        A[tuple(index[i][p[i]] for i in range(d))] = 1
    return A, values


def _slice_classes(A: np.ndarray, axis: int) -> list[list[int]]:
    """Group indices along ``axis`` whose slices of A coincide; ordered by first member."""
    moved = np.moveaxis(A, axis, 0).reshape(A.shape[axis], -1)
    groups: dict[bytes, list[int]] = {}
    for k in range(moved.shape[0]):
        groups.setdefault(moved[k].tobytes(), []).append(k)
    return sorted(groups.values(), key=lambda g: g[0])


def _subset_matrix(t: int) -> np.ndarray:
    masks = np.arange(1 << t, dtype=np.int64)
    return ((masks[:, None] >> np.arange(t)) & 1).astype(np.int64)


def _encoding(edge_idx) -> int:
    return sum(1 << k for k in edge_idx)


def optimal_box(S: PointSet, budget: Optional[OracleBudget] = None,
                greedy_axis: Optional[int] = None) -> tuple[LatticeBox, int]:
    """Box minimising |S delta B|; ties go to the smallest edge encoding.

    An edge E_i is encoded as sum of 2^k over the ranks k (within pi_i(S)) of
    its values, and boxes are compared by their tuple of encodings. The
    smallest-encoding optimum is always among the visited candidates: values
    of one slice class have equal marginal gain, so an optimum that splits a
    class (gain zero) or includes a zero-gain value can drop those values at
    equal cost and smaller encoding. The answer therefore does not depend on
    ``greedy_axis`` (1-based), the axis solved in closed form; by default the
    one with the most slice classes.
    """
    budget = budget or OracleBudget()
    d = S.dim
    n = len(S)
    if n == 0:
        return LatticeBox([()] * d), 0
    A, values = _grid(S, budget)
    classes = [_slice_classes(A, i) for i in range(d)]
    if greedy_axis is None:
        g = max(range(d), key=lambda i: (len(classes[i]), i))
    else:
        g = greedy_axis - 1
        if not 0 <= g < d:
            raise ValueError(f"greedy_axis {greedy_axis} out of range")
    enum_axes = [i for i in range(d) if i != g]
    cap = budget.projection_cap(d)
    widths = [len(classes[i]) for i in enum_axes]
    candidates = math.prod(1 << w for w in widths) * A.shape[g]
    if any(w > cap for w in widths) or candidates > budget.max_candidates:
        raise BudgetExceeded(
            "box enumeration exceeds budget",
            {"slice_classes": widths, "max_projection_size": cap,
             "candidates": candidates, "max_candidates": budget.max_candidates},
        )

    # K[m_1, ..., m_{d-1}, y] = |S cap (E_1 x ... x {y} x ...)| for class-union masks m
    K = np.moveaxis(A, g, -1)
    sizes = []
    for pos, i in enumerate(enum_axes):
        member = np.zeros((len(classes[i]), A.shape[i]), dtype=np.int64)
        for t, cls in enumerate(classes[i]):
            member[t, cls] = 1
        B = _subset_matrix(len(classes[i])) @ member  # (2^T, n_i) indicator of E_i
        sizes.append(B.sum(axis=1))
        K = np.moveaxis(np.tensordot(B, K, axes=([1], [pos])), 0, pos)
    P = np.ones([len(s) for s in sizes], dtype=np.int64) if sizes else np.int64(1)
    for pos, s in enumerate(sizes):
        shape = [1] * len(sizes)
        shape[pos] = len(s)
        P = P * s.reshape(shape)
    gain = 2 * K - np.asarray(P)[..., None]
    cost = n - np.clip(gain, 0, None).sum(axis=-1)

    best = int(cost.min())
    winners = np.argwhere(cost == best)
    best_key = best_edges = None
    for w in winners:
        idx = tuple(int(v) for v in w)
        edges = [None] * d
        for pos, i in enumerate(enum_axes):
            mask = idx[pos]
            edges[i] = sorted(k for t, cls in enumerate(classes[i]) if mask >> t & 1 for k in cls)
        edges[g] = [k for k in range(A.shape[g]) if gain[idx + (k,)] > 0]
        key = tuple(_encoding(e) for e in edges)
        if best_key is None or key < best_key:
            best_key, best_edges = key, edges
    box = LatticeBox([values[i][k] for k in best_edges[i]] for i in range(d))
    return box, best


def optimal_cube(S: PointSet, budget: Optional[OracleBudget] = None) -> tuple[Optional[CubeSpec], int]:
    """Cube minimising |S delta C|; ties go to the smallest side, then corner."""
    budget = budget or OracleBudget()
    d, n = S.dim, len(S)
    if n == 0:
        return None, 0
    mins = [min(p[i] for p in S.points) for i in range(d)]
    maxs = [max(p[i] for p in S.points) for i in range(d)]
    ext = [hi - lo + 1 for lo, hi in zip(mins, maxs)]
    top = max(ext)
    work = sum(math.prod(e + L - 1 for e in ext) for L in range(1, top + 1)) << d
    if top > budget.max_cube_side or work > budget.max_candidates * 64:
        raise BudgetExceeded("cube enumeration exceeds budget",
                             {"side": top, "max_cube_side": budget.max_cube_side, "work": work})
    grid = np.zeros(ext, dtype=np.int64)
    for p in S.points:
        grid[tuple(p[i] - mins[i] for i in range(d))] = 1
    prefix = np.pad(grid, [(1, 0)] * d)
    for ax in range(d):
        prefix = np.cumsum(prefix, axis=ax)

    best = None
    for L in range(1, top + 1):
        lo = [np.arange(-L + 1, e) for e in ext]
        ends = [(np.clip(l, 0, e), np.clip(l + L, 0, e)) for l, e in zip(lo, ext)]
        inter = np.zeros([len(l) for l in lo], dtype=np.int64)
        for bits in itertools.product((0, 1), repeat=d):
            sel = np.ix_(*(ends[i][b] for i, b in enumerate(bits)))
            sign = -1 if (d - sum(bits)) % 2 else 1
            inter += sign * prefix[sel]
        cost = n + L ** d - 2 * inter
        k = int(cost.argmin())
        c = int(cost.flat[k])
        if best is None or c < best[0]:
            pos = np.unravel_index(k, cost.shape)
            corner = tuple(int(mins[i] + lo[i][pos[i]]) for i in range(d))
            best = (c, CubeSpec(d, corner, L))
    return best[1], best[0]


# -- naive recomputation -------------------------------------------------------


def _naive_marginal(points, coords, n):
    m = defaultdict(int)
    for p in points:
        m[tuple(p[i] for i in coords)] += 1
    return {k: Fraction(v, n) for k, v in m.items()}


def recompute_direct(quantity: str, S: PointSet, params: Optional[dict] = None,
                     budget: Optional[OracleBudget] = None):
    """Naive value of ``quantity`` in {'hole_weight', 'entropy', 'mi', 'boundary'}.

    params: ``blocks`` (list of 1-based coordinate lists) for hole_weight,
    ``g`` (1-based coordinate list) for mi.
    """
    budget = budget or OracleBudget()
    params = params or {}
    pts = list(S.points)
    n, d = len(pts), S.dim
    if quantity == "boundary":
        if n == 0:
            return 0
        lo = [min(p[i] for p in pts) - 1 for i in range(d)]
        hi = [max(p[i] for p in pts) + 1 for i in range(d)]
        cells = math.prod(h - l + 1 for l, h in zip(lo, hi))
        if cells > budget.max_grid:
            raise BudgetExceeded("boundary window too large", {"cells": cells})
        members = set(pts)
        total = 0
        for x in itertools.product(*(range(l, h + 1) for l, h in zip(lo, hi))):
            for i in range(d):
                if x[i] == hi[i]:
                    continue
                y = list(x)
                y[i] += 1
                if (x in members) != (tuple(y) in members):
                    total += 1
        return total
    if n == 0:
        raise ValueError("distribution quantities need a nonempty set")
    if quantity == "entropy":
        h = 0.0
        for _ in pts:
            h += (1.0 / n) * math.log(n, 2)
        return h
    if quantity == "mi":
        g = [i - 1 for i in sorted(params["g"])]
        h = [i for i in range(d) if i not in g]
        pa = _naive_marginal(pts, g, n)
        pb = _naive_marginal(pts, h, n)
        total = 0.0
        for p in pts:
            a = tuple(p[i] for i in g)
            b = tuple(p[i] for i in h)
            total += (1.0 / n) * math.log((1.0 / n) / (float(pa[a]) * float(pb[b])), 2)
        return total
    if quantity == "hole_weight":
        blocks = [[i - 1 for i in sorted(b)] for b in params["blocks"]]
        margs = [_naive_marginal(pts, b, n) for b in blocks]
        cells = math.prod(len(m) for m in margs)
        if cells > budget.max_grid:
            raise BudgetExceeded("hole grid too large", {"cells": cells})
        members = set(pts)
        total = Fraction(0)
        for combo in itertools.product(*(list(m.items()) for m in margs)):
            x = [0] * d
            mass = Fraction(1)
            for b, (vals, q) in zip(blocks, combo):
                for i, v in zip(b, vals):
                    x[i] = v
                mass *= q
            if tuple(x) not in members:
                total += mass
        return total
    raise ValueError(f"unknown quantity {quantity!r}")
