"""Exact lattice distributions and the information quantities used by the
stability proofs: entropy, KL divergence, mutual information, hole-weight,
the telescoping identity for total correlation, and Pinsker's bound.

Masses and hole-weights are exact ``Fraction`` values; logarithms (base 2)
are taken in double precision.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from latstab.cover import CoverFamily, cover_stats, uc_tightness
from latstab.lattice_core import PointSet, normalize_coords

# slack for comparing double-precision information quantities
TOL = 1e-9


class _Infinite:
    """Tagged infinity for divergences with supp(p) not inside supp(q)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()

Real = Union[float, _Infinite]


def is_infinite(x) -> bool:
    return x is INFINITE


def log2_fraction(q: Fraction) -> float:
    """log2 of a positive rational, accurate even for huge numerators/denominators."""
    return math.log2(q.numerator) - math.log2(q.denominator)


class LatticeDistribution:
    """Finitely supported probability distribution on Z^d with exact rational masses."""

    __slots__ = ("_dim", "_mass")

    def __init__(self, dim: int, mass: Mapping[Sequence[int], Fraction], *, _check: bool = True):
        self._dim = int(dim)
        m = {}
        for x, v in mass.items():
            x = tuple(int(c) for c in x)
            v = Fraction(v)
            if _check:
                if len(x) != self._dim:
                    raise ValueError(f"point {x} does not have {self._dim} coordinates")
                if v <= 0:
                    raise ValueError(f"mass at {x} must be positive, got {v}")
            m[x] = m.get(x, Fraction(0)) + v
        if _check and sum(m.values(), Fraction(0)) != 1:
            raise ValueError("masses must sum to exactly 1")
        self._mass = m

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def mass(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._mass)

    def __getitem__(self, x) -> Fraction:
        return self._mass.get(tuple(x), Fraction(0))

    def support(self) -> frozenset:
        return frozenset(self._mass)

    def items(self):
        return self._mass.items()

    def __len__(self) -> int:
        return len(self._mass)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeDistribution):
            return NotImplemented
        return self._dim == other._dim and self._mass == other._mass

    def __repr__(self) -> str:
        return f"LatticeDistribution(dim={self._dim}, support={len(self._mass)})"


@dataclass(frozen=True)
class PartitionSpec:
    """Ordered partition (g_1, ..., g_r) of {1..d} into nonempty blocks."""

    blocks: tuple[frozenset[int], ...]

    def __init__(self, blocks: Iterable[Iterable[int]]):
        blocks = tuple(frozenset(int(i) for i in g) for g in blocks)
        if not blocks or any(not g for g in blocks):
            raise ValueError("a partition needs nonempty blocks")
        union = frozenset().union(*blocks)
        if sum(len(g) for g in blocks) != len(union):
            raise ValueError("partition blocks overlap")
        if union != frozenset(range(1, len(union) + 1)):
            raise ValueError(f"partition blocks must cover 1..{len(union)} exactly")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self) -> int:
        return sum(len(g) for g in self.blocks)

    @classmethod
    def split(cls, d: int, g: Iterable[int]) -> "PartitionSpec":
        g = frozenset(int(i) for i in g)
        return cls([g, frozenset(range(1, d + 1)) - g])

    @classmethod
    def singletons(cls, d: int) -> "PartitionSpec":
        return cls([[i] for i in range(1, d + 1)])


def _check_part(part: PartitionSpec, d: int) -> list[tuple[int, ...]]:
    if part.dim != d:
        raise ValueError(f"partition of [{part.dim}] used in dimension {d}")
    return [normalize_coords(g, d) for g in part.blocks]


def uniform_on(S: PointSet) -> LatticeDistribution:
    if len(S) == 0:
        raise ValueError("no uniform distribution on the empty set")
    q = Fraction(1, len(S))
    return LatticeDistribution(S.dim, {x: q for x in S.points}, _check=False)


def marginal(p: LatticeDistribution, g: Iterable[int]) -> LatticeDistribution:
    """Marginal p_g on the 1-based coordinates g (kept in increasing order)."""
    coords = normalize_coords(g, p.dim)
    acc: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for x, v in p.items():
        acc[tuple(x[i] for i in coords)] += v
    return LatticeDistribution(len(coords), acc, _check=False)


def product_distribution(p: LatticeDistribution, part: PartitionSpec) -> LatticeDistribution:
    """The product of block marginals prod_j p_{g_j}, as a distribution on Z^d."""
    blocks = _check_part(part, p.dim)
    margs = [list(marginal(p, [i + 1 for i in b]).items()) for b in blocks]
    out: dict[tuple[int, ...], Fraction] = {}

    def rec(j: int, coords: list, mass: Fraction):
        if j == len(blocks):
            x = [0] * p.dim
            for b, vals in zip(blocks, coords):
                for i, v in zip(b, vals):
                    x[i] = v
            out[tuple(x)] = mass
            return
        for vals, v in margs[j]:
            coords.append(vals)
            rec(j + 1, coords, mass * v)
            coords.pop()

    rec(0, [], Fraction(1))
    return LatticeDistribution(p.dim, out, _check=False)


def entropy(p: LatticeDistribution) -> float:
    """Shannon entropy in bits."""
    by_mass: dict[Fraction, int] = defaultdict(int)
    for v in p._mass.values():
        by_mass[v] += 1
    return math.fsum(float(v * k) * -log2_fraction(v) for v, k in by_mass.items())


def kl_divergence(p: LatticeDistribution, q: LatticeDistribution) -> Real:
    """D(p || q) in bits; INFINITE unless supp(p) is inside supp(q)."""
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    terms = []
    for x, v in p.items():
        w = q[x]
        if w == 0:
            return INFINITE
        terms.append(float(v) * log2_fraction(v / w))
    return max(math.fsum(terms), 0.0)


def divergence_from_product(p: LatticeDistribution, part: PartitionSpec) -> float:
    """D(p || prod_j p_{g_j}) summed over supp(p) only; never infinite."""
    blocks = _check_part(part, p.dim)
    margs = [marginal(p, [i + 1 for i in b]) for b in blocks]
    terms = []
    for x, v in p.items():
        prod = Fraction(1)
        for b, mg in zip(blocks, margs):
            prod *= mg[tuple(x[i] for i in b)]
        terms.append(float(v) * log2_fraction(v / prod))
    return max(math.fsum(terms), 0.0)


def mutual_information(p: LatticeDistribution, g: Iterable[int]) -> float:
    """I(p_g ; p_{g^c}) in bits.

    Computed both as H(p_g) + H(p_{g^c}) - H(p) and as D(p || p_g p_{g^c});
    the two must agree to within 1e-9.
    """
    part = PartitionSpec.split(p.dim, g)  # rejects empty or full g
    g1, g2 = (sorted(b) for b in part.blocks)
    via_entropy = entropy(marginal(p, g1)) + entropy(marginal(p, g2)) - entropy(p)
    via_div = divergence_from_product(p, part)
    if abs(via_entropy - via_div) > TOL:
        raise ArithmeticError(f"mutual information disagrees: {via_entropy} vs {via_div}")
    return max(via_div, 0.0)


def hole_weight(S: PointSet, part: PartitionSpec) -> Fraction:
    """Sum over x not in S of prod_j p_{g_j}(x), for p uniform on S.

    The product of marginals has total mass 1 on the grid of block
    supports, so the sum over holes is 1 minus its mass on S.
    """
    if len(S) == 0:
        raise ValueError("hole-weight is undefined for the empty set")
    blocks = _check_part(part, S.dim)
    counts = [S.projection_counts(b) for b in blocks]
    on_s = 0
    for x in S.points:
        prod = 1
        for b, c in zip(blocks, counts):
            prod *= c[tuple(x[i] for i in b)]
        on_s += prod
    n = len(S)
    return 1 - Fraction(on_s, n ** len(blocks))


def hole_weight_split(S: PointSet, i: int) -> Fraction:
    """Hole_i(S): hole-weight for the partition ({i}, [d] minus {i})."""
    if S.dim == 1:
        return Fraction(0)
    return hole_weight(S, PartitionSpec.split(S.dim, [i]))


def telescope_check(p: LatticeDistribution) -> tuple[float, list[float]]:
    """Both sides of D(p || prod_i p_i) = sum_{i>=2} D(p_[i] || p_[i-1] p_i)."""
    d = p.dim
    if d < 2:
        raise ValueError("the telescoping identity needs d >= 2")
    lhs = divergence_from_product(p, PartitionSpec.singletons(d))
    terms = []
    for i in range(2, d + 1):
        head = marginal(p, range(1, i + 1))
        terms.append(divergence_from_product(head, PartitionSpec.split(i, range(1, i))))
    return lhs, terms


class PinskerResult(NamedTuple):
    l1: float
    bound: Real
    holds: bool


def pinsker_bound(p: LatticeDistribution, q: LatticeDistribution) -> PinskerResult:
    """||p - q||_1 against sqrt(2 ln 2 * D(p || q))."""
    keys = set(p.support()) | set(q.support())
    l1 = float(sum((abs(p[x] - q[x]) for x in keys), Fraction(0)))
    D = kl_divergence(p, q)
    if D is INFINITE:
        return PinskerResult(l1, INFINITE, True)
    bound = math.sqrt(2 * math.log(2) * D)
    return PinskerResult(l1, bound, l1 <= bound + TOL)


@dataclass(frozen=True)
class CoordinateInfo:
    coordinate: int
    mutual_information: float
    info_ok: bool
    hole: Fraction
    divergence: float
    hole_ok: bool


@dataclass(frozen=True)
class InfoBoundReport:
    applicable: bool
    reason: str
    epsilon: float
    rho: Optional[Fraction]
    bound: Optional[float]
    coordinates: list[CoordinateInfo] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        # precondition failures are not violations
        return all(c.hole_ok and (c.info_ok or not self.applicable) for c in self.coordinates)


def tight_to_info_check(S: PointSet, G: CoverFamily) -> InfoBoundReport:
    """Compare I(p_i ; p_rest) with 2 rho epsilon and Hole_i with D(p || p_i p_rest)."""
    d = S.dim
    tight = uc_tightness(S, G)
    reasons = []
    rho = bound = None
    if d < 2:
        reasons.append("d < 2")
    else:
        stats = cover_stats(G)
        if stats.m <= 0 or stats.sigma <= 0:
            reasons.append("m(G) or sigma(G) is zero")
        else:
            rho = stats.rho
            bound = 2 * float(rho) * tight.epsilon
    if tight.epsilon > 0.5:
        reasons.append("epsilon > 1/2")
    applicable = not reasons
    p = uniform_on(S)
    coords = []
    for i in range(1, d + 1) if d >= 2 else ():
        part = PartitionSpec.split(d, [i])
        mi = mutual_information(p, [i])
        hole = hole_weight(S, part)
        div = divergence_from_product(p, part)
        coords.append(CoordinateInfo(
            coordinate=i,
            mutual_information=mi,
            info_ok=bound is not None and mi <= bound + TOL,
            hole=hole,
            divergence=div,
            hole_ok=float(hole) <= div + TOL,
        ))
    return InfoBoundReport(applicable, "; ".join(reasons) or "ok", tight.epsilon, rho, bound, coords)
