import math

import numpy as np
import pytest

from geoprox.analysis import (DivergenceSignal, MinProblem, Regime, asymptotic_center_estimate,
                              check_solution_pair, classify_alternating, delta_convergence_proxy, phi)
from geoprox.convex_sets import Ball, GeodesicLine, grid_set_distance, grid_minimize
from geoprox.geometry import DomainError, Euclidean, HalfPlane, MetricTree
from geoprox.iteration import AlternatingProblem, run_alternating
from geoprox.operators import HalfSqDistTo, Indicator, Projection
from geoprox.suites import DEMO_TREE

H = HalfPlane()
E1 = Euclidean(1)
A = GeodesicLine.vertical(H, 0.0)


def _run(B, start, **kw):
    return run_alternating(AlternatingProblem(Projection(B), Projection(A), start, stop_tol=1e-13,
                                              max_steps=100_000, **kw))


def test_phi_values():
    L = Ball(H, H.point(0.0, 1.0), 1.0)
    prob = MinProblem(Indicator(L), Indicator(L), 0.5)
    x, y = H.point(0.0, 1.0), H.point(0.1, 1.1)
    assert phi(prob, x, y) == pytest.approx(H.distance(x, y) ** 2)
    assert phi(prob, H.point(5.0, 1.0), y) == math.inf
    a, b = H.point(0.0, 1.0), H.point(1.0, 1.0)
    prob = MinProblem(HalfSqDistTo(a), HalfSqDistTo(b), 2.0)
    assert phi(prob, a, b) == pytest.approx(H.distance(a, b) ** 2 / 4)


def test_solution_pair_on_the_line():
    # x = J_f(J_g(x)) with J_g(x) = (x + 1)/2 and J_f(y) = y/2 gives x = 1/3
    prob = MinProblem(HalfSqDistTo(E1.point(0.0)), HalfSqDistTo(E1.point(1.0)), 1.0)
    ok, pair = check_solution_pair(prob, E1.point(1 / 3))
    assert ok
    val, xy = grid_minimize(lambda v: phi(prob, E1.point(v[0]), E1.point(v[1])), [-1, -1], [2, 2])
    assert phi(prob, *pair) == pytest.approx(val, abs=1e-9)
    assert not check_solution_pair(prob, E1.point(1.0))[0]


def test_solution_pair_common_set():
    L = GeodesicLine.semicircle(H, 0.0, 2.0)
    prob = MinProblem(Indicator(L), Indicator(L), 1.0)
    assert check_solution_pair(prob, H.point(0.0, 2.0))[0]


def test_center_of_constant_and_two_point_tails():
    z = H.point(0.2, 0.9)
    c, r = asymptotic_center_estimate([z] * 5)
    assert c == z and r == 0.0
    a, b = H.point(-1.0, 1.0), H.point(1.0, 3.0)
    c, r = asymptotic_center_estimate([a, b])
    assert r == pytest.approx(H.distance(a, b) / 2, abs=1e-8)
    assert H.distance(c, H.geodesic(a, b, 0.5)) < 1e-4


def test_center_in_tree_is_exact():
    T = MetricTree(DEMO_TREE)
    pts = [T.vertex(v) for v in ("c", "e", "g", "f")]
    c, r = asymptotic_center_estimate(pts)
    assert r == pytest.approx(max(T.distance(p, q) for p in pts for q in pts) / 2)


def test_center_of_random_cloud_beats_perturbations():
    rng = np.random.default_rng(4)
    pts = [H.sample(rng) for _ in range(50)]
    c, r = asymptotic_center_estimate(pts)
    for _ in range(50):
        q = H.perturb(c, 1e-3, rng)
        assert max(H.distance(q, p) for p in pts) >= r - 1e-9


def test_unbounded_tail_signals_divergence():
    with pytest.raises(DivergenceSignal):
        asymptotic_center_estimate([H.point(0.0, 1.0), H.point(0.0, 1e30)])


def test_converged_tail_center_near_final_iterate():
    tr = _run(GeodesicLine.semicircle(H, 1.0, 2.0), H.point(3.0, 1.0))
    c, r = asymptotic_center_estimate(tr.points[len(tr.points) // 2:])
    assert H.distance(c, tr.final) < 1e-4
    tail = tr.points[len(tr.points) // 2:]
    assert r <= 2 * max(H.distance(p, q) for p in tail for q in tail) + 1e-15
    assert delta_convergence_proxy(tr.points, 1e-4)


def test_three_regimes():
    v = classify_alternating(_run(GeodesicLine.semicircle(H, 1.0, 2.0), H.point(3.0, 1.0)), A, None)
    assert v.regime is Regime.COMMON_FIXED_POINT
    assert A.is_member(v.pair[0], 1e-5) and v.value < 1e-5

    B = GeodesicLine.semicircle(H, 5.0, 1.0)
    v = classify_alternating(_run(B, H.point(3.0, 1.0)), A, B)
    assert v.regime is Regime.BEST_APPROXIMATION_PAIR
    assert v.value == pytest.approx(grid_set_distance(A, B)[0], abs=1e-6)

    B = GeodesicLine.semicircle(H, 1.0, 1.0)
    tr = _run(B, H.point(0.0, 1e20))
    v = classify_alternating(tr, A, B)
    assert v.regime is Regime.DIVERGENT
    esc = tr.escape_distances()[-101:]
    assert all(b > a for a, b in zip(esc, esc[1:]))


def test_max_steps_is_inconclusive():
    B = GeodesicLine.semicircle(H, 5.0, 1.0)
    tr = run_alternating(AlternatingProblem(Projection(B), Projection(A), H.point(3.0, 1.0), max_steps=2,
                                            stop_tol=1e-13))
    assert classify_alternating(tr, A, B).inconclusive


def test_tolerance_must_exceed_stop_tol():
    tr = _run(GeodesicLine.semicircle(H, 5.0, 1.0), H.point(3.0, 1.0))
    with pytest.raises(DomainError):
        classify_alternating(tr, A, None, tol=1e-13)
