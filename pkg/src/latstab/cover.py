"""Cover families over [d], their statistics m, sigma, rho, and tightness of the
uniform-cover inequality |S|^m <= prod_g |pi_g(S)|."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import mpmath

from latstab.lattice_core import PointSet, normalize_coords

# bits of working precision for rational powers of projection products
PRECISION_BITS = 128


@dataclass(frozen=True)
class CoverFamily:
    """Multiset of nonempty coordinate subsets of {1..dim}, optionally weighted.

    ``weights is None`` means the unweighted family (every set counts once).
    """

    dim: int
    sets: tuple[frozenset[int], ...]
    weights: Optional[tuple[Fraction, ...]] = None

    def __init__(self, dim: int, sets: Iterable[Iterable[int]], weights: Optional[Sequence] = None):
        sets = tuple(frozenset(int(i) for i in g) for g in sets)
        for g in sets:
            if not g:
                raise ValueError("cover members must be nonempty")
            normalize_coords(g, dim)
        if weights is not None:
            weights = tuple(Fraction(w) for w in weights)
            if len(weights) != len(sets):
                raise ValueError("weights and sets differ in length")
            if any(w < 0 for w in weights):
                raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "weights", weights)

    @property
    def is_weighted(self) -> bool:
        return self.weights is not None

    def weight_list(self) -> tuple[Fraction, ...]:
        return self.weights if self.weights is not None else (Fraction(1),) * len(self.sets)

    def with_weights(self, weights: Sequence) -> "CoverFamily":
        return CoverFamily(self.dim, self.sets, weights)


def loomis_whitney_cover(d: int) -> CoverFamily:
    """All (d-1)-subsets of [d]; the i-th member omits coordinate i."""
    if d < 2:
        raise ValueError("the Loomis-Whitney family needs d >= 2")
    return CoverFamily(d, [[j for j in range(1, d + 1) if j != i] for i in range(1, d + 1)])


@dataclass(frozen=True)
class CoverStats:
    m: Fraction
    sigma: Fraction
    rho: Optional[Fraction]
    convention: str  # "unweighted" (rho = m/sigma) or "weighted" (rho = 1/sigma)


def _use_weighted(G: CoverFamily, weighted: Optional[bool]) -> bool:
    return G.is_weighted if weighted is None else weighted


def coverage(G: CoverFamily, weighted: Optional[bool] = None) -> Fraction:
    """min over coordinates i of the (weighted) number of sets containing i."""
    w = G.weight_list() if _use_weighted(G, weighted) else (Fraction(1),) * len(G.sets)
    return min(sum((wg for g, wg in zip(G.sets, w) if i in g), Fraction(0))
               for i in range(1, G.dim + 1))


def cover_stats(G: CoverFamily, weighted: Optional[bool] = None) -> CoverStats:
    """m(G), sigma(G) and rho(G).

    sigma ranges over ordered pairs (i, j), i != j, counting sets that contain
    i but not j. Unweighted rho is m/sigma; the weighted convention uses
    1/sigma. ``weighted`` defaults to whether the family carries weights.
    """
    if G.dim < 2:
        raise ValueError("cover statistics need d >= 2 (sigma ranges over ordered pairs)")
    use_w = _use_weighted(G, weighted)
    w = G.weight_list() if use_w else (Fraction(1),) * len(G.sets)
    m = coverage(G, use_w)
    sigma = min(
        sum((wg for g, wg in zip(G.sets, w) if i in g and j not in g), Fraction(0))
        for i in range(1, G.dim + 1)
        for j in range(1, G.dim + 1)
        if i != j
    )
    if sigma > 0:
        rho = 1 / sigma if use_w else m / sigma
    else:
        rho = None
    return CoverStats(m, sigma, rho, "weighted" if use_w else "unweighted")


def is_uniform_cover(G: CoverFamily) -> Optional[int]:
    """The m for which every coordinate lies in exactly m sets, or None."""
    if G.is_weighted and any(w != 1 for w in G.weights):
        raise ValueError("is_uniform_cover is defined for unweighted families")
    counts = {sum(1 for g in G.sets if i in g) for i in range(1, G.dim + 1)}
    if len(counts) == 1:
        (m,) = counts
        return m if m > 0 else None
    return None


@dataclass(frozen=True)
class Tightness:
    """Relative gap of |S| below the uniform-cover right-hand side.

    ``rhs ** root == power`` holds exactly, which lets callers decide
    comparisons against epsilon in rational arithmetic.
    """

    epsilon: float
    raw_epsilon: float
    rhs: float
    size: int
    root: int
    power: int
    convention: str
    hypothesis_ok: bool

    def _exact(self) -> tuple[int, int, int]:
        return self.size, self.root, self.power

    def scaled_epsilon_at_least(self, k, c) -> bool:
        """Exactly decide k <= c * epsilon for rational c >= 0 and k >= 0."""
        c, k = Fraction(c), Fraction(k)
        n, D, P = self._exact()
        if c - k < 0:
            return False
        return (c * n) ** D <= (c - k) ** D * P

    def epsilon_below(self, t) -> bool:
        """Exactly decide epsilon < t."""
        t = Fraction(t)
        n, D, P = self._exact()
        if 1 - t <= 0:
            return True
        return Fraction(n) ** D > (1 - t) ** D * P

    def epsilon_at_most(self, t) -> bool:
        t = Fraction(t)
        n, D, P = self._exact()
        if 1 - t <= 0:
            return True
        return Fraction(n) ** D >= (1 - t) ** D * P


def uc_tightness(S: PointSet, G: CoverFamily, weighted: Optional[bool] = None) -> Tightness:
    """Tightness of the (weighted) uniform-cover inequality for S.

    Unweighted: rhs = (prod_g |pi_g S|)^(1/m). Weighted: rhs = prod_g
    |pi_g S|^w(g), valid when every coordinate has cover weight >= 1.
    epsilon = 1 - |S|/rhs, clamped to [0, 1].
    """
    if len(S) == 0:
        raise ValueError("tightness is undefined for the empty set")
    if S.dim != G.dim:
        raise ValueError(f"dimension mismatch: set {S.dim}, cover {G.dim}")
    use_w = _use_weighted(G, weighted)
    m = coverage(G, use_w)
    if m <= 0:
        raise ValueError("the cover leaves some coordinate uncovered (m(G) = 0)")
    if use_w:
        exps = list(G.weight_list())
    else:
        exps = [Fraction(1, int(m))] * len(G.sets)
    root = math.lcm(*(e.denominator for e in exps)) if exps else 1
    sizes = [len(S.projection_counts(normalize_coords(g, S.dim))) for g in G.sets]
    power = math.prod(s ** int(e * root) for s, e in zip(sizes, exps))
    with mpmath.workprec(PRECISION_BITS):
        log_rhs = mpmath.fsum(mpmath.mpf(e.numerator) / e.denominator * mpmath.log(s)
                              for s, e in zip(sizes, exps))
        rhs = mpmath.exp(log_rhs)
        raw = 1 - mpmath.mpf(len(S)) / rhs
        raw_f = float(raw)
        rhs_f = float(rhs)
    eps = min(max(raw_f, 0.0), 1.0)
    return Tightness(
        epsilon=eps,
        raw_epsilon=raw_f,
        rhs=rhs_f,
        size=len(S),
        root=root,
        power=power,
        convention="weighted" if use_w else "unweighted",
        hypothesis_ok=(m >= 1) if use_w else True,
    )
