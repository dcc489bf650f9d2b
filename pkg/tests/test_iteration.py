import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geoprox.convex_sets import Ball, GeodesicLine, grid_set_distance
from geoprox.geometry import DomainError, Euclidean, HalfPlane, distance
from geoprox.iteration import (AlternatingProblem, CyclicProblem, Explicit, Geometric, PowerLaw,
                               Termination, Zero, read_csv, run_alternating, run_cyclic,
                               schedule_value)
from geoprox.operators import Composition, Projection

H = HalfPlane()
E = Euclidean(2)
X_AXIS = GeodesicLine.through(E.point(0.0, 0.0), E.point(1.0, 0.0))
DIAG = GeodesicLine.through(E.point(0.0, 0.0), E.point(1.0, 1.0))


# -- schedules --------------------------------------------------------------------

def test_schedule_values():
    assert schedule_value(Zero(), 17) == 0.0
    assert schedule_value(Geometric(1.0, 0.5), 3) == 0.125
    assert schedule_value(Explicit((0.1, 0.2)), 1) == 0.2
    assert schedule_value(Explicit((0.1, 0.2)), 5) == 0.0


def test_powerlaw_partial_sums_below_zeta():
    s = PowerLaw(1.0, 2.0)
    partial = float(np.sum(1.0 / np.arange(1, 10 ** 6 + 1, dtype=float) ** 2))
    assert partial < math.pi ** 2 / 6 + 1e-6
    assert s.total() == pytest.approx(math.pi ** 2 / 6, rel=1e-14)
    assert s.tail_sum(10) == pytest.approx(s.total() - s.partial_sum(10), rel=1e-10)


def test_geometric_tail_closed_form():
    s = Geometric(2.0, 0.25)
    assert s.tail_sum(3) == pytest.approx(s.total() - s.partial_sum(3), rel=1e-14)


@pytest.mark.parametrize("bad", [lambda: PowerLaw(1.0, 1.0), lambda: Geometric(1.0, 1.0),
                                 lambda: Explicit((-0.1,)), lambda: PowerLaw(-1.0, 2.0)])
def test_non_summable_schedules_rejected(bad):
    with pytest.raises(DomainError):
        bad()


# -- cyclic -----------------------------------------------------------------------

def test_start_in_set_stops_at_once():
    tr = run_cyclic(CyclicProblem((Projection(X_AXIS),), E.point(3.0, 0.0)))
    assert tr.termination is Termination.STEP_TOL
    assert tr.steps == [0.0]


def test_lines_through_origin_contract_by_cosine():
    tr = run_cyclic(CyclicProblem((Projection(DIAG), Projection(X_AXIS)), E.point(0.0, 1.0),
                                  stop_tol=1e-14, max_steps=500))
    assert tr.final.coords == pytest.approx((0.0, 0.0), abs=1e-13)
    # each projection shrinks the step by cos(pi/4)
    s = tr.steps[:12]
    assert all(b < a for a, b in zip(s, s[1:]))
    assert s[5] / s[4] == pytest.approx(math.cos(math.pi / 4), rel=1e-9)


def test_halfplane_intersecting_lines_converge_to_crossing():
    A, B = GeodesicLine.vertical(H, 0.0), GeodesicLine.semicircle(H, 1.0, 2.0)
    tr = run_cyclic(CyclicProblem((Projection(A), Projection(B)), H.point(3.0, 1.0), stop_tol=1e-10))
    assert distance(tr.final, H.point(0.0, math.sqrt(3.0))) < 1e-8


def test_trace_bookkeeping():
    A, B = GeodesicLine.vertical(H, 0.0), GeodesicLine.semicircle(H, 1.0, 2.0)
    tr = run_cyclic(CyclicProblem((Projection(A), Projection(B)), H.point(3.0, 1.0), max_steps=40,
                                  reference=H.point(0.0, math.sqrt(3.0)), stop_tol=0.0))
    assert len(tr.points) == len(tr.steps) + 1 == len(tr.residuals) == len(tr.fejer)
    for n, s in enumerate(tr.steps):
        assert s == distance(tr.points[n], tr.points[n + 1])


def test_thinning_keeps_scalar_columns():
    tr = run_cyclic(CyclicProblem((Projection(X_AXIS), Projection(DIAG)), E.point(0.0, 1.0),
                                  max_steps=10, stop_tol=0.0, thin=3))
    assert len(tr.steps) == 10
    assert len(tr.points) == 5  # indices 0, 3, 6, 9 and the final 10
    rows = read_csv(io.StringIO(tr.to_csv()))
    assert rows["n"] == [0, 3, 6, 9, 10]


def test_escape_radius_for_cyclic_runs():
    A, B = GeodesicLine.vertical(H, 0.0), GeodesicLine.semicircle(H, 1.0, 1.0)
    tr = run_cyclic(CyclicProblem((Projection(B), Projection(A)), H.point(0.0, 1e20), max_steps=100_000,
                                  escape_radius=50.0))
    assert tr.termination is Termination.ESCAPED


@given(st.integers(0, 100_000), st.sampled_from([0.0, 0.05]))
def test_fejer_monotone_up_to_errors(seed, amp):
    rng = np.random.default_rng(seed)
    q = H.sample(rng)
    sets = [Ball(H, H.geodesic(q, H.sample(rng), 0.5), 1.0) for _ in range(2)]
    sets = [s for s in sets if s.is_member(q)] + [GeodesicLine.through(q, H.sample(rng))]
    errs = PowerLaw(amp, 2.0) if amp else Zero()
    tr = run_cyclic(CyclicProblem([Projection(s) for s in sets], H.sample(rng), errs, max_steps=200,
                                  reference=q, seed=seed, stop_tol=0.0))
    for n in range(tr.n_steps):
        assert tr.fejer[n + 1] <= tr.fejer[n] + errs.value(n) + 1e-12


def test_cyclic_zero_errors_matches_picard_orbit():
    A, B = GeodesicLine.vertical(H, 0.0), GeodesicLine.semicircle(H, 1.0, 2.0)
    C = Ball(H, H.point(0.5, 1.5), 0.8)
    maps = (Projection(A), Projection(B), Projection(C))
    tr = run_cyclic(CyclicProblem(maps, H.point(3.0, 1.0), max_steps=30, stop_tol=0.0))
    # x_{kr} = (T_r o ... o T_1)^k x_0 : T_1 acts first, so reverse for Composition
    picard = Composition(maps[::-1])
    x = tr.points[0]
    for k in range(10):
        assert x == tr.points[3 * k]
        x = picard(x)


# -- alternating ------------------------------------------------------------------

def test_same_set_converges_in_one_round():
    T = Projection(GeodesicLine.vertical(H, 0.0))
    tr = run_alternating(AlternatingProblem(T, T, H.point(2.0, 1.0)))
    assert tr.termination is Termination.STEP_TOL
    assert tr.steps[1:] == [0.0, 0.0]


def test_ultraparallel_pair_matches_grid_oracle():
    A, B = GeodesicLine.vertical(H, 0.0), GeodesicLine.semicircle(H, 5.0, 1.0)
    tr = run_alternating(AlternatingProblem(Projection(B), Projection(A), H.point(3.0, 1.0), stop_tol=1e-13))
    assert tr.termination is Termination.STEP_TOL
    assert distance(tr.points[-2], tr.ys[-1]) == pytest.approx(grid_set_distance(A, B)[0], abs=1e-6)


def test_asymptotic_pair_escapes():
    A, B = GeodesicLine.vertical(H, 0.0), GeodesicLine.semicircle(H, 1.0, 1.0)
    tr = run_alternating(AlternatingProblem(Projection(B), Projection(A), H.point(0.0, 1e20), max_steps=100_000))
    assert tr.termination is Termination.ESCAPED
    esc = tr.escape_distances()
    assert esc[-1] > 50
    assert all(b > a for a, b in zip(esc[-101:], esc[-100:]))


@given(st.integers(0, 100_000))
def test_alternating_composition_residual(seed):
    rng = np.random.default_rng(seed)
    A = Ball(H, H.sample(rng), 0.7)
    B = GeodesicLine.through(H.sample(rng), H.sample(rng))
    eps, delta = PowerLaw(0.1, 1.5), Geometric(0.05, 0.9)
    T1, T2 = Projection(B), Projection(A)
    tr = run_alternating(AlternatingProblem(T1, T2, H.sample(rng), eps, delta, max_steps=60, seed=seed))
    for n in range(tr.n_steps):
        target = T2(T1(tr.points[n]))
        assert distance(tr.points[n + 1], target) <= eps.value(n) + delta.value(n) + 1e-12


def test_csv_columns():
    tr = run_alternating(AlternatingProblem(Projection(DIAG), Projection(X_AXIS), E.point(0.0, 1.0),
                                            max_steps=3, stop_tol=0.0, reference=E.point(0.0, 0.0)))
    head = tr.to_csv().splitlines()[0]
    assert head == "n,x_1,x_2,y_1,y_2,step,residual_1,residual_2,fejer"
