"""Hypothesis checks of the structural invariants of each module."""

import math
from fractions import Fraction

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from latstab import (
    CoverFamily,
    LatticeBox,
    PartitionSpec,
    PointSet,
    approximate_box,
    approximate_cube,
    cover_stats,
    edge_boundary,
    entropy,
    hole_weight,
    is_uniform_cover,
    kl_divergence,
    mutual_information,
    optimal_box,
    optimal_cube,
    pinsker_bound,
    project,
    rectangle_2d,
    sym_diff_size,
    telescope_check,
    tight_to_info_check,
    trim,
    uc_tightness,
    uniform_on,
)
from latstab.box_stability import box_constant
from latstab.cover import coverage
from latstab.entropy_info import divergence_from_product, product_distribution
from latstab.fileformats import format_cover, format_pts, parse_cover, parse_pts
from latstab.iso_stability import iso_deficit

SETTINGS = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def point_sets(draw, dims=(1, 2, 3, 4), min_size=1, max_size=40, span=5):
    d = draw(st.sampled_from(dims))
    coord = st.integers(-span // 2, span - span // 2)
    pts = draw(st.lists(st.tuples(*[coord] * d), min_size=min_size, max_size=max_size))
    return PointSet(d, pts)


@st.composite
def covers(draw, d, weighted=False):
    subset = st.sets(st.integers(1, d), min_size=1)
    sets = draw(st.lists(subset, min_size=1, max_size=2 * d + 1))
    missing = set(range(1, d + 1)) - set().union(*sets)
    if missing:
        sets.append(missing)
    if weighted:
        w = draw(st.lists(st.fractions(0, 2, max_denominator=6), min_size=len(sets), max_size=len(sets)))
        return CoverFamily(d, sets, w)
    return CoverFamily(d, sets)


@st.composite
def set_with_cover(draw, dims=(2, 3, 4)):
    S = draw(point_sets(dims=dims))
    return S, draw(covers(S.dim))


@st.composite
def set_with_partition(draw, dims=(2, 3, 4)):
    S = draw(point_sets(dims=dims))
    labels = draw(st.lists(st.integers(0, S.dim - 1), min_size=S.dim, max_size=S.dim))
    blocks = {}
    for i, lab in enumerate(labels, start=1):
        blocks.setdefault(lab, []).append(i)
    return S, PartitionSpec(list(blocks.values()))


@st.composite
def boxes(draw, dims=(1, 2, 3)):
    d = draw(st.sampled_from(dims))
    edges = draw(st.lists(st.sets(st.integers(-4, 4), min_size=1, max_size=4), min_size=d, max_size=d))
    return LatticeBox(edges)


# -- lattice_core -------------------------------------------------------------


@SETTINGS
@given(point_sets(), st.data())
def test_projection_shrinks_and_is_idempotent(S, data):
    g = data.draw(st.sets(st.integers(1, S.dim), min_size=1))
    P = project(S, g)
    assert len(P) <= len(S)
    assert project(P, range(1, P.dim + 1)) == P


@SETTINGS
@given(boxes(), st.data())
def test_box_projection_equality_for_uniform_covers(B, data):
    d = B.dim
    m = data.draw(st.integers(1, 3))
    # m copies of a random partition form a uniform m-cover
    labels = data.draw(st.lists(st.integers(0, d - 1), min_size=d, max_size=d))
    blocks = {}
    for i, lab in enumerate(labels, start=1):
        blocks.setdefault(lab, []).append(i)
    G = CoverFamily(d, list(blocks.values()) * m)
    assert is_uniform_cover(G) == m
    if d > 1:
        assert cover_stats(G).m == m
    assert len(B) ** m == math.prod(len(project(B, g)) for g in G.sets)


@SETTINGS
@given(point_sets(dims=(2,), max_size=15), point_sets(dims=(2,), max_size=15), point_sets(dims=(2,), max_size=15))
def test_sym_diff_is_a_metric(A, B, C):
    assert (sym_diff_size(A, B) == 0) == (A == B)
    assert sym_diff_size(A, B) == sym_diff_size(B, A)
    assert sym_diff_size(A, C) <= sym_diff_size(A, B) + sym_diff_size(B, C)


# -- cover --------------------------------------------------------------------


@SETTINGS
@given(set_with_cover())
def test_uniform_cover_inequality(pair):
    S, G = pair
    t = uc_tightness(S, G)
    assert t.raw_epsilon >= -1e-12
    assert len(S) ** t.root <= t.power  # exact form


@SETTINGS
@given(set_with_cover(), st.data())
def test_enlarging_a_set_never_lowers_projection_product(pair, data):
    # the product prod_g |pi_g S| is monotone; its m-th root need not be,
    # since enlarging g can raise m
    S, G = pair
    k = data.draw(st.integers(0, len(G.sets) - 1))
    extra = data.draw(st.sets(st.integers(1, S.dim)))
    bigger = list(G.sets)
    bigger[k] = bigger[k] | extra
    a, b = uc_tightness(S, G), uc_tightness(S, CoverFamily(S.dim, bigger))
    # unweighted: root == m, so power is the bare product
    assert b.power >= a.power
    if b.root == a.root:
        assert b.rhs >= a.rhs * (1 - 1e-12)


@SETTINGS
@given(st.integers(2, 4).flatmap(lambda d: covers(d)))
def test_unit_weights_match_unweighted_stats(G):
    u = cover_stats(G)
    w = cover_stats(G.with_weights([1] * len(G.sets)))
    assert (u.m, u.sigma) == (w.m, w.sigma)
    if u.sigma:
        assert u.rho == u.m / u.sigma and w.rho == 1 / w.sigma


@SETTINGS
@given(point_sets(dims=(2, 3)), st.data())
def test_weighted_inequality_under_coverage(S, data):
    G = data.draw(covers(S.dim, weighted=True))
    assume(coverage(G) > 0)
    t = uc_tightness(S, G)
    if t.hypothesis_ok:
        assert t.raw_epsilon >= -1e-12


# -- entropy_info -------------------------------------------------------------


@SETTINGS
@given(point_sets())
def test_entropy_of_uniform(S):
    h = entropy(uniform_on(S))
    assert abs(h - math.log2(len(S))) <= 1e-12
    if len(S) & (len(S) - 1) == 0:
        assert h == math.log2(len(S))


@SETTINGS
@given(set_with_partition())
def test_entropy_bounded_by_support(pair):
    S, part = pair
    q = product_distribution(uniform_on(S), part)
    assert entropy(q) <= math.log2(len(q)) + 1e-12


@SETTINGS
@given(set_with_partition())
def test_divergence_nonnegative_and_zero_iff_equal(pair):
    S, part = pair
    p = uniform_on(S)
    q = product_distribution(p, part)
    D = kl_divergence(p, q)
    assert D >= 0
    if p == q:
        assert D == 0
    else:
        assert D > 0
    assert kl_divergence(p, p) == 0


@SETTINGS
@given(point_sets(dims=(2, 3, 4)), st.data())
def test_mutual_information_symmetric(S, data):
    g = data.draw(st.sets(st.integers(1, S.dim), min_size=1, max_size=S.dim - 1))
    rest = set(range(1, S.dim + 1)) - g
    p = uniform_on(S)
    assert abs(mutual_information(p, g) - mutual_information(p, rest)) <= 1e-9


@SETTINGS
@given(set_with_partition())
def test_hole_weight_below_divergence(pair):
    S, part = pair
    assume(len(part.blocks) > 1)
    assert float(hole_weight(S, part)) <= divergence_from_product(uniform_on(S), part) + 1e-9


@SETTINGS
@given(point_sets(dims=(2, 3, 4)))
def test_telescope_identity(S):
    lhs, terms = telescope_check(uniform_on(S))
    assert abs(lhs - math.fsum(terms)) <= 1e-9


@SETTINGS
@given(set_with_partition())
def test_pinsker(pair):
    S, part = pair
    p = uniform_on(S)
    assert pinsker_bound(p, product_distribution(p, part)).holds


@SETTINGS
@given(set_with_cover())
def test_tight_to_info(pair):
    S, G = pair
    r = tight_to_info_check(S, G)
    assert r.passed
    if r.applicable:
        assert all(c.info_ok for c in r.coordinates)


# -- box_stability ------------------------------------------------------------


@SETTINGS
@given(point_sets(dims=(2, 3, 4)), st.data())
def test_trim_postconditions(S, data):
    choices = [Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1, S.dim)]
    alpha = data.draw(st.sampled_from(choices))
    block = data.draw(st.sets(st.integers(1, S.dim), min_size=1, max_size=S.dim - 1))
    t = trim(S, block, alpha)
    assert t.mass_bound_ok() and t.fibre_bound_ok() and t.small_b1_ok() and t.partition_ok()
    assert t.kept  # a round never removes everything
    assert len(t.rounds) - 1 <= len(t.support)
    assert all(r.removed for r in t.rounds[:-1]) and not t.rounds[-1].removed


@SETTINGS
@given(st.integers(2, 4), st.data())
def test_box_bound_near_boxes(d, data):
    sides = data.draw(st.lists(st.integers(3, {2: 16, 3: 8, 4: 5}[d]), min_size=d, max_size=d))
    B = LatticeBox([range(s) for s in sides])
    pts = sorted(B.iter_points())
    drop = data.draw(st.sets(st.integers(0, len(pts) - 1), max_size=3))
    S = PointSet(d, [p for k, p in enumerate(pts) if k not in drop])
    assume(len(S) > 0)
    from latstab import loomis_whitney_cover

    r = approximate_box(S, loomis_whitney_cover(d))
    if not r.vacuous:
        assert r.satisfied and r.s_minus_r_ok and r.r_minus_s_ok and r.r_minus_s_refined_ok
        assert r.fibre_floor_ok and r.holes_ok
        assert r.sym_diff <= box_constant(d) * float(r.rho) * r.epsilon * len(S) * (1 + 1e-12)


@SETTINGS
@given(point_sets(dims=(2,), max_size=60, span=8))
def test_rectangle_bound(S):
    _, _, rep = rectangle_2d(S)
    assert rep.satisfied and rep.s_minus_r_ok and rep.r_minus_s_ok


# -- iso_stability ------------------------------------------------------------


@SETTINGS
@given(point_sets(dims=(2, 3, 4)))
def test_isoperimetric_chain(S):
    d = S.dim
    b = edge_boundary(S)
    codim = [len(project(S, [j for j in range(1, d + 1) if j != i])) for i in range(1, d + 1)]
    for i in range(d):
        assert b.per_direction[i] >= 2 * codim[i]
    link2 = 2 * d * math.exp(math.fsum(math.log(c) for c in codim) / d)
    assert b.total >= 2 * sum(codim)
    assert 2 * sum(codim) >= link2 * (1 - 1e-12)
    assert link2 >= 2 * d * len(S) ** ((d - 1) / d) * (1 - 1e-12)
    assert iso_deficit(S) >= 0


@SETTINGS
@given(point_sets(dims=(2, 3), max_size=25))
def test_oracles_never_beaten(S):
    from latstab import loomis_whitney_cover

    _, kb = optimal_box(S)
    assert kb <= approximate_box(S, loomis_whitney_cover(S.dim)).sym_diff
    _, kc = optimal_cube(S)
    rep = approximate_cube(S)
    if rep.sym_diff is not None:
        assert kc <= rep.sym_diff


@SETTINGS
@given(point_sets(dims=(2, 3), max_size=25), st.randoms(use_true_random=False))
def test_oracle_order_independent(S, rnd):
    box, k = optimal_box(S)
    shuffled = list(S.points)
    rnd.shuffle(shuffled)
    assert optimal_box(PointSet(S.dim, shuffled)) == (box, k)
    for g in range(1, S.dim + 1):
        assert optimal_box(S, greedy_axis=g) == (box, k)
    assert optimal_cube(PointSet(S.dim, shuffled)) == optimal_cube(S)


# -- file formats -------------------------------------------------------------


@SETTINGS
@given(point_sets(min_size=0, span=2000))
def test_pts_round_trip(S):
    text = format_pts(S)
    assert parse_pts(text) == S
    assert format_pts(parse_pts(text)) == text


@SETTINGS
@given(st.integers(1, 5).flatmap(lambda d: st.one_of(covers(d), covers(d, weighted=True))))
def test_cover_round_trip(G):
    assert parse_cover(format_cover(G)) == G
