"""Edge-isoperimetric deficit on Z^d and the cube construction for sets of
nearly minimal edge boundary.

The pipeline: approximate S by a box R (Loomis-Whitney family), drop the
light values of each edge of R, and take the cube anchored at the minimum
corner of what is left with side the largest remaining span.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from latstab.box_stability import approximate_box
from latstab.cover import loomis_whitney_cover, uc_tightness
from latstab.lattice_core import (
    CubeSpec,
    LatticeBox,
    PointSet,
    annulus,
    cuboid,
    edge_boundary,
    sym_diff_size,
)

REL_TOL = 1e-12


def iso_deficit(S: PointSet) -> float:
    """epsilon with |boundary S| = (1 + epsilon) 2d |S|^((d-1)/d), clamped at 0."""
    if len(S) == 0:
        raise ValueError("the deficit is undefined for the empty set")
    d = S.dim
    total = edge_boundary(S).total
    with mpmath.workprec(128):
        floor = 2 * d * mpmath.power(len(S), mpmath.mpf(d - 1) / d)
        eps = float(total / floor - 1)
    return max(eps, 0.0)


@dataclass(frozen=True)
class AmGmReport:
    applicable: bool
    reason: str
    epsilon: float
    geo_mean: float
    lower: float
    upper: float
    per_index_ok: tuple[bool, ...]
    max_upper_proof: float  # (1 + 4 sqrt(d eps)) G, the bound the proof derives for max z
    max_ok_proof: bool

    @property
    def holds(self) -> bool:
        return all(self.per_index_ok) and self.max_ok_proof


def am_gm_stability_check(z: Sequence[float], epsilon: Optional[float] = None) -> AmGmReport:
    """Check (1 - 2d sqrt(d eps)) G <= z_i <= (1 + 2 sqrt(d eps)) G.

    The hypothesis mean(z) <= (1 + eps) G is verified here; when ``epsilon``
    is omitted the smallest admissible value mean(z)/G - 1 is used. Outside
    the hypothesis (or for eps > 1/(16d)) the report is not applicable.
    """
    z = [float(v) for v in z]
    d = len(z)
    if d == 0 or any(v <= 0 for v in z):
        raise ValueError("z must be a nonempty list of positive reals")
    G = math.exp(math.fsum(math.log(v) for v in z) / d)
    mean = math.fsum(z) / d
    tight = max(mean / G - 1, 0.0)
    eps = tight if epsilon is None else float(epsilon)
    reasons = []
    if mean > (1 + eps) * G * (1 + REL_TOL):
        reasons.append("mean exceeds (1+eps) * geometric mean")
    if eps > 1 / (16 * d):
        reasons.append("eps > 1/(16d)")
    r = math.sqrt(d * eps)
    lower = (1 - 2 * d * r) * G
    upper = (1 + 2 * r) * G
    slack = REL_TOL * G
    ok = tuple(lower - slack <= v <= upper + slack for v in z)
    proof_upper = (1 + 4 * r) * G
    return AmGmReport(
        applicable=not reasons,
        reason="; ".join(reasons) or "ok",
        epsilon=eps,
        geo_mean=G,
        lower=lower,
        upper=upper,
        per_index_ok=ok,
        max_upper_proof=proof_upper,
        max_ok_proof=max(z) <= proof_upper + slack,
    )


@dataclass(frozen=True)
class FilterResult:
    box: LatticeBox
    light: tuple[frozenset[int], ...]

    @property
    def removed_counts(self) -> tuple[int, ...]:
        return tuple(len(x) for x in self.light)


def heavy_light_filter(S: PointSet, R: LatticeBox) -> FilterResult:
    """Keep c in R_i when the slice {x in R : x_i = c} holds >= 7|Q_i|/8 points of S,
    where Q_i is the product of the other edges."""
    if R.is_empty():
        raise ValueError("heavy/light filtering needs a nonempty box")
    d = R.dim
    slice_counts = [dict.fromkeys(e, 0) for e in R.edges]
    for p in S.points:
        if p in R:
            for i in range(d):
                slice_counts[i][p[i]] += 1
    heavy, light = [], []
    for i in range(d):
        q = math.prod(len(R.edges[j]) for j in range(d) if j != i)
        h = frozenset(c for c, k in slice_counts[i].items() if 8 * k >= 7 * q)
        heavy.append(h)
        light.append(R.edges[i] - h)
    return FilterResult(LatticeBox(heavy), tuple(light))


@dataclass(frozen=True)
class IsoReport:
    epsilon_iso: float
    delta: float
    a: float
    geo_mean: float
    box: LatticeBox
    filtered_box: LatticeBox
    cube: Optional[CubeSpec]
    sym_diff: Optional[int]
    sym_diff_ratio: Optional[Fraction]
    theoretical_bound: float
    proof_bound: float
    satisfied: Optional[bool]
    vacuous: bool
    degenerate: bool
    light_ok: bool
    size_claim_ok: bool
    interval_claim_ok: bool
    box_sym_diff: int

    @property
    def claims_ok(self) -> bool:
        return self.light_ok and self.size_claim_ok and self.interval_claim_ok


def iso_threshold(d: int) -> Fraction:
    """Largest deficit for which the cube bound is claimed: 1/(72^2 d^5)."""
    return Fraction(1, 72 ** 2 * d ** 5)


def approximate_cube(S: PointSet) -> IsoReport:
    """Cube C with |S delta C| compared against 72 d^(5/2) sqrt(eps) |S|.

    The construction always runs; ``vacuous`` marks eps > 1/(72^2 d^5), and
    the three intermediate claims (light-value count, edge sizes near a,
    edges filling their intervals) are evaluated as proof checks.
    """
    d, n = S.dim, len(S)
    if n == 0:
        raise ValueError("cannot approximate the empty set")
    if d < 2:
        raise ValueError("the cube construction needs d >= 2")
    eps = iso_deficit(S)
    delta = math.sqrt(d * eps)
    a = n ** (1.0 / d)
    lw = loomis_whitney_cover(d)
    codim_sizes = [len(S.projection_counts(tuple(j - 1 for j in g))) for g in lw.sets]
    geo = math.exp(math.fsum(math.log(s) for s in codim_sizes) / d)
    vacuous = eps > float(iso_threshold(d))

    box_report = approximate_box(S, lw)
    R = box_report.constructed_box
    slack = 1e-9
    if R.is_empty():
        filt = FilterResult(R, tuple(frozenset() for _ in range(d)))
    else:
        filt = heavy_light_filter(S, R)
    light_ok = all(len(l) <= 16 * delta * len(e) + slack for l, e in zip(filt.light, R.edges))
    size_ok = all((1 - 7 * delta) * a - slack <= len(e) <= (1 + 14 * d * delta) * a + slack
                  for e in R.edges)
    Rp = filt.box
    degenerate = Rp.is_empty()
    interval_ok = not degenerate and all(
        max(ep) - min(ep) + 1 - len(e) <= 8 * delta * len(e) + slack
        for ep, e in zip(Rp.edges, R.edges)
    )

    bound = 72 * d ** 2.5 * math.sqrt(eps)
    proof_bound = 60 * d ** 2.5 * math.sqrt(eps)
    cube = k = ratio = satisfied = None
    if not degenerate:
        L = max(max(e) - min(e) + 1 for e in Rp.edges)
        cube = CubeSpec(d, tuple(min(e) for e in Rp.edges), L)
        k = sym_diff_size(S, cube)
        ratio = Fraction(k, n)
        satisfied = k <= bound * n * (1 + REL_TOL)
    return IsoReport(
        epsilon_iso=eps,
        delta=delta,
        a=a,
        geo_mean=geo,
        box=R,
        filtered_box=Rp,
        cube=cube,
        sym_diff=k,
        sym_diff_ratio=ratio,
        theoretical_bound=bound,
        proof_bound=proof_bound,
        satisfied=satisfied,
        vacuous=vacuous,
        degenerate=degenerate,
        light_ok=light_ok,
        size_claim_ok=size_ok,
        interval_claim_ok=interval_ok,
        box_sym_diff=box_report.sym_diff,
    )


@dataclass(frozen=True)
class SharpnessResult:
    family: str
    params: dict
    d: int
    epsilon: float
    oracle_sym_diff: int
    oracle_ratio: Fraction
    scale: float  # eps for boxes, sqrt(eps) for cubes
    ratio_over_scale: float
    theoretical_bound: float
    ratio_over_bound: float
    lower_bound: Optional[float]  # cuboids: (1/2) sqrt(2 d eps)


def sharpness_probe(family: str, params: dict, d: int, budget=None) -> SharpnessResult:
    """Measure how close the extremal families come to the stability bounds.

    ``annulus`` (params a, a_inner): uniform-cover tightness with the
    Loomis-Whitney family against the optimal box. ``cuboid`` (params a, b):
    isoperimetric deficit against the optimal cube.
    """
    from latstab.box_stability import box_constant
    from latstab.oracle import optimal_box, optimal_cube

    if family == "annulus":
        S = annulus(params["a"], params["a_inner"], d)
        eps = uc_tightness(S, loomis_whitney_cover(d)).epsilon
        _, k = optimal_box(S, budget)
        scale = eps
        bound = box_constant(d) * (d - 1) * eps
        lower = None
    elif family == "cuboid":
        S = cuboid(params["a"], params["b"], d)
        eps = iso_deficit(S)
        _, k = optimal_cube(S, budget)
        scale = math.sqrt(eps)
        bound = 72 * d ** 2.5 * scale
        lower = 0.5 * math.sqrt(2 * d * eps)
    else:
        raise ValueError(f"unknown sharpness family {family!r}")
    ratio = Fraction(k, len(S))
    return SharpnessResult(
        family=family,
        params=dict(params),
        d=d,
        epsilon=eps,
        oracle_sym_diff=k,
        oracle_ratio=ratio,
        scale=scale,
        ratio_over_scale=float(ratio) / scale if scale > 0 else math.nan,
        theoretical_bound=bound,
        ratio_over_bound=float(ratio) / bound if bound > 0 else math.nan,
        lower_bound=lower,
    )
