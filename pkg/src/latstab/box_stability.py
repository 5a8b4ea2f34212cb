"""Fibre trimming and the approximating-box construction for nearly tight
uniform-cover inequalities.

``trim`` repeatedly discards values of one coordinate block whose fibre
mass is at most a (1 - alpha) fraction of the current average; the kept
values form an edge of the box. ``approximate_box`` trims every coordinate
with alpha = 1/d and multiplies the edges together.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from latstab.cover import CoverFamily, cover_stats, loomis_whitney_cover, uc_tightness
from latstab.entropy_info import PartitionSpec, hole_weight
from latstab.lattice_core import LatticeBox, PointSet, normalize_coords


def box_constant(d: int) -> int:
    """b(d) = 4d^2 + 64d."""
    return 4 * d * d + 64 * d


@dataclass(frozen=True)
class TrimRound:
    removed: frozenset
    mass: Fraction


@dataclass(frozen=True)
class TrimResult:
    """Outcome of trimming S along the coordinate block ``coords`` (1-based).

    ``kept`` and the removed sets hold projected tuples. ``rounds`` ends with
    the first round that removes nothing.
    """

    coords: tuple[int, ...]
    alpha: Fraction
    kept: frozenset
    removed_mass: Fraction
    rounds: tuple[TrimRound, ...]
    fibre_mass: dict
    hole: Fraction
    support: frozenset

    @property
    def removed(self) -> frozenset:
        return frozenset().union(*(r.removed for r in self.rounds))

    def mass_bound_ok(self) -> bool:
        """removed mass <= 2 Hole / alpha."""
        return self.removed_mass <= 2 * self.hole / self.alpha

    def fibre_bound_ok(self) -> bool:
        """Every kept x has p(x) >= (1 - 2 Hole/alpha)(1 - alpha)/|kept|."""
        if not self.kept:
            return True
        floor = (1 - 2 * self.hole / self.alpha) * (1 - self.alpha) / len(self.kept)
        return all(self.fibre_mass[x] >= floor for x in self.kept)

    def small_b1_ok(self) -> bool:
        """alpha * sum_j eps_j (1 - sum_{r<j} eps_r) <= Hole."""
        acc, before = Fraction(0), Fraction(0)
        for r in self.rounds:
            acc += r.mass * (1 - before)
            before += r.mass
        return self.alpha * acc <= self.hole

    def partition_ok(self) -> bool:
        parts = [self.kept] + [r.removed for r in self.rounds]
        return (sum(len(p) for p in parts) == len(self.support)
                and frozenset().union(*parts) == self.support
                and self.removed_mass == sum((r.mass for r in self.rounds), Fraction(0)))


def trim(S: PointSet, block: int | Iterable[int], alpha) -> TrimResult:
    """Iteratively remove low-mass fibres of S viewed as X_1 x X_2.

    X_1 is the projection onto ``block`` (a 1-based coordinate or a set of
    them) and X_2 the projection onto the remaining coordinates. Round j
    removes every x in the current R with p(x)/p(R) <= (1 - alpha)/|R|,
    compared exactly.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if len(S) == 0:
        raise ValueError("cannot trim the empty set")
    if isinstance(block, int):
        block = [block]
    coords0 = normalize_coords(block, S.dim)
    fibres = S.projection_counts(coords0)
    n = len(S)

    rest = [i for i in range(1, S.dim + 1) if i - 1 not in coords0]
    hole = hole_weight(S, PartitionSpec([[i + 1 for i in coords0], rest])) if rest else Fraction(0)

    alive = set(fibres)
    total = n
    rounds = []
    while alive:
        size = len(alive)
        cut = (1 - alpha) * total
        T = frozenset(x for x in alive if fibres[x] * size <= cut)
        removed = sum(fibres[x] for x in T)
        rounds.append(TrimRound(T, Fraction(removed, n)))
        if not T:
            break
        alive -= T
        total -= removed
    return TrimResult(
        coords=tuple(i + 1 for i in coords0),
        alpha=alpha,
        kept=frozenset(alive),
        removed_mass=Fraction(n - total, n),
        rounds=tuple(rounds),
        fibre_mass={x: Fraction(c, n) for x, c in fibres.items()},
        hole=hole,
        support=frozenset(fibres),
    )


@dataclass(frozen=True)
class BoxStabilityReport:
    epsilon: float
    rho: Fraction
    convention: str
    constructed_box: LatticeBox
    size: int
    s_minus_r: int
    r_minus_s: int
    sym_diff_ratio: Fraction
    theoretical_bound: float
    satisfied: bool
    vacuous: bool
    s_minus_r_ok: bool
    r_minus_s_ok: bool
    r_minus_s_refined_ok: Optional[bool]
    fibre_floor_ok: bool
    holes: tuple[Fraction, ...]
    holes_ok: Optional[bool]
    per_coordinate_trims: tuple[TrimResult, ...] = field(repr=False)

    @property
    def sym_diff(self) -> int:
        return self.s_minus_r + self.r_minus_s


def approximate_box(S: PointSet, G: CoverFamily, weighted: Optional[bool] = None) -> BoxStabilityReport:
    """Construct R = R_1 x ... x R_d by trimming each coordinate with alpha = 1/d.

    Bounds are decided exactly: |S delta R| <= b(d) rho eps |S| with
    b(d) = 4d^2 + 64d, and separately |S minus R| <= 4d^2 rho eps |S| and
    |R minus S| <= 64 d rho eps |S|. When eps >= 1/(b(d) rho) the report
    is flagged vacuous but the box is still built.
    """
    d = S.dim
    stats = cover_stats(G, weighted)
    if stats.rho is None:
        raise ValueError("sigma(G) = 0, so rho(G) is undefined")
    if len(S) == 0:
        raise ValueError("cannot approximate the empty set")
    tight = uc_tightness(S, G, weighted)
    rho, n, b = stats.rho, len(S), box_constant(d)
    alpha = Fraction(1, d)

    trims = tuple(trim(S, i, alpha) for i in range(1, d + 1))
    box = LatticeBox([x[0] for x in t.kept] for t in trims)

    inside = sum(1 for p in S.points if p in box)
    s_minus_r = n - inside
    r_minus_s = len(box) - inside
    k = s_minus_r + r_minus_s

    vacuous = not tight.epsilon_below(1 / (b * rho))
    refined = None
    c32 = 32 * d * rho
    if tight.epsilon_below(1 / c32):
        # |R minus S| <= c eps/(1 - c eps) |S|  <=>  |R minus S| <= c eps (|S| + |R minus S|)
        refined = tight.scaled_epsilon_at_least(r_minus_s, c32 * (n + r_minus_s))

    # proof-level fibre floor, guaranteed only outside the vacuous regime
    floor_ok = all(
        t.fibre_mass[x] * len(t.kept) >= (1 - alpha) ** 2 for t in trims for x in t.kept
    )
    holes = tuple(t.hole for t in trims)
    holes_ok = None
    if tight.epsilon_at_most(Fraction(1, 2)):
        holes_ok = all(tight.scaled_epsilon_at_least(h, 2 * rho) for h in holes)

    return BoxStabilityReport(
        epsilon=tight.epsilon,
        rho=rho,
        convention=stats.convention,
        constructed_box=box,
        size=n,
        s_minus_r=s_minus_r,
        r_minus_s=r_minus_s,
        sym_diff_ratio=Fraction(k, n),
        theoretical_bound=b * float(rho) * tight.epsilon,
        satisfied=tight.scaled_epsilon_at_least(k, b * rho * n),
        vacuous=vacuous,
        s_minus_r_ok=tight.scaled_epsilon_at_least(s_minus_r, 4 * d * d * rho * n),
        r_minus_s_ok=tight.scaled_epsilon_at_least(r_minus_s, 64 * d * rho * n),
        r_minus_s_refined_ok=refined,
        fibre_floor_ok=floor_ok,
        holes=holes,
        holes_ok=holes_ok,
        per_coordinate_trims=trims,
    )


@dataclass(frozen=True)
class RectangleReport:
    hole: Fraction
    vacuous_branch: bool
    s_minus_r: int
    r_minus_s: int
    sym_diff: int
    bound: Fraction
    satisfied: bool
    s_minus_r_ok: bool
    r_minus_s_ok: bool


def rectangle_2d(S: PointSet, block: int | Iterable[int] = 1):
    """Rectangle R_1 x R_2 with |S delta R| <= 20 Hole(S) |S|.

    S is split as X_1 x X_2 with X_1 the projection onto ``block``. When
    Hole(S) >= 1/20 the empty rectangle already meets the bound and is
    returned. Returns ``(R_1, R_2, report)`` with R_j sets of projected tuples.
    """
    if len(S) == 0:
        raise ValueError("cannot approximate the empty set")
    if isinstance(block, int):
        block = [block]
    g1 = [i + 1 for i in normalize_coords(block, S.dim)]
    g2 = [i for i in range(1, S.dim + 1) if i not in g1]
    if not g2:
        raise ValueError("the block must be a proper subset of the coordinates")
    n = len(S)
    hole = hole_weight(S, PartitionSpec([g1, g2]))
    bound = 20 * hole * n
    if hole >= Fraction(1, 20):
        r1 = r2 = frozenset()
        s_minus_r, r_minus_s = n, 0
        vac = True
    else:
        half = Fraction(1, 2)
        r1 = trim(S, g1, half).kept
        r2 = trim(S, g2, half).kept
        c1 = [i - 1 for i in g1]
        c2 = [i - 1 for i in g2]
        inside = sum(1 for p in S.points
                     if tuple(p[i] for i in c1) in r1 and tuple(p[i] for i in c2) in r2)
        s_minus_r = n - inside
        r_minus_s = len(r1) * len(r2) - inside
        vac = False
    k = s_minus_r + r_minus_s
    report = RectangleReport(
        hole=hole,
        vacuous_branch=vac,
        s_minus_r=s_minus_r,
        r_minus_s=r_minus_s,
        sym_diff=k,
        bound=bound,
        satisfied=k <= bound,
        s_minus_r_ok=vac or s_minus_r <= 8 * hole * n,
        r_minus_s_ok=vac or r_minus_s <= 12 * hole * n,
    )
    return r1, r2, report


def is_loomis_whitney(G: CoverFamily) -> bool:
    if G.dim < 2 or (G.is_weighted and any(w != 1 for w in G.weights)):
        return False
    return sorted(map(sorted, G.sets)) == sorted(map(sorted, loomis_whitney_cover(G.dim).sets))


@dataclass(frozen=True)
class Certification:
    constructed_ratio: Fraction
    theoretical_bound: float
    within_bound: bool
    vacuous: bool
    oracle_ratio: Optional[Fraction]
    oracle_refusal: Optional[str]
    oracle_le_constructed: Optional[bool]
    lw_constant: Optional[int]
    lw_constant_ok: Optional[bool]

    @property
    def passed(self) -> bool:
        checks = [self.within_bound or self.vacuous, self.oracle_le_constructed, self.lw_constant_ok]
        return all(c is not False for c in checks)


def certify_bound(S: PointSet, G: CoverFamily, report: BoxStabilityReport, budget=None) -> Certification:
    """Combine the constructed box with the brute-force optimum and, for the
    Loomis-Whitney family, the constant c(d) = (d-1) b(d) <= 36 d^3."""
    from latstab.oracle import BudgetExceeded, optimal_box

    d = S.dim
    oracle_ratio = refusal = cmp = None
    try:
        _, best = optimal_box(S, budget)
        oracle_ratio = Fraction(best, len(S))
        cmp = oracle_ratio <= report.sym_diff_ratio
    except BudgetExceeded as exc:
        refusal = str(exc)
    lw = lw_ok = None
    if is_loomis_whitney(G):
        lw = (d - 1) * box_constant(d)
        lw_ok = lw <= 36 * d ** 3
    return Certification(
        constructed_ratio=report.sym_diff_ratio,
        theoretical_bound=report.theoretical_bound,
        within_bound=report.satisfied,
        vacuous=report.vacuous,
        oracle_ratio=oracle_ratio,
        oracle_refusal=refusal,
        oracle_le_constructed=cmp,
        lw_constant=lw,
        lw_constant_ok=lw_ok,
    )
