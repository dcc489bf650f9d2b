import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geoprox.geometry import (DomainError, Euclidean, HalfPlane, MetricTree, SpaceMismatchError,
                              SphericalCap, TreeSpec, UnsupportedSpaceError, check_puc,
                              check_reshetnyak, distance, geodesic_point, sample_point)

H = HalfPlane()
coord = st.floats(-3, 3, allow_nan=False)
height = st.floats(0.05, 20, allow_nan=False)
unit = st.floats(0, 1)


def hp_points():
    return st.builds(lambda x, y: H.point(x, y), coord, height)


def hp_distance_reference(a, b):
    # textbook form, independent of the asinh form used by the library
    (x1, y1), (x2, y2) = a.coords, b.coords
    u = ((x1 - x2) ** 2 + (y1 - y2) ** 2) / (2 * y1 * y2)
    # acosh(1 + u) written via log1p so nearby points keep their precision
    return math.log1p(u + math.sqrt(u * (u + 2)))


# -- known values ---------------------------------------------------------------

def test_halfplane_horizontal_pair():
    assert distance(H.point(-1.0, 1.0), H.point(1.0, 1.0)) == pytest.approx(math.acosh(3), rel=1e-14)


def test_halfplane_vertical_distance_is_log_ratio():
    assert distance(H.point(0.0, 1.0), H.point(0.0, math.e ** 2)) == pytest.approx(2.0, rel=1e-14)


def test_halfplane_midpoints():
    m = geodesic_point(H.point(-1.0, 1.0), H.point(1.0, 1.0), 0.5)
    assert m.coords[0] == pytest.approx(0.0, abs=1e-14)
    assert m.coords[1] == pytest.approx(math.sqrt(2), rel=1e-13)
    m = geodesic_point(H.point(0.0, 1.0), H.point(0.0, math.e ** 2), 0.5)
    assert m.coords == pytest.approx((0.0, math.e), abs=1e-13)


def test_euclidean_geodesic_is_affine():
    E = Euclidean(3)
    p = geodesic_point(E.point(0, 0, 0), E.point(2, 4, 6), 0.25)
    assert p.coords == pytest.approx((0.5, 1.0, 1.5))


def test_sphere_distance_is_scaled_angle():
    S = SphericalCap(4.0, 0.7)
    a, b = S.point_at(0.3, 0.0), S.point_at(0.3, math.pi)
    assert distance(a, b) == pytest.approx(0.6, rel=1e-12)


def test_tree_distance_goes_through_branch_vertex():
    T = MetricTree(TreeSpec(("a", "b", "c", "d"), (("a", "b", 1.0), ("b", "c", 2.0), ("b", "d", 3.0))))
    c, d = T.vertex("c"), T.vertex("d")
    assert distance(c, d) == pytest.approx(5.0)
    mid_edge = T.point(1, 0.5)  # on b-c, 0.5 from b
    assert distance(mid_edge, d) == pytest.approx(3.5)
    assert distance(T.vertex("b"), geodesic_point(c, d, 0.4)) == pytest.approx(0.0, abs=1e-12)


# -- errors -------------------------------------------------------------------------

def test_geodesic_parameter_outside_unit_interval():
    with pytest.raises(DomainError):
        geodesic_point(H.point(0.0, 1.0), H.point(1.0, 1.0), 1.5)


def test_mixed_spaces_rejected():
    with pytest.raises(SpaceMismatchError):
        distance(H.point(0.0, 1.0), Euclidean(2).point(0.0, 1.0))


def test_halfplane_rejects_boundary_points():
    with pytest.raises(DomainError):
        H.point(0.0, 0.0)


def test_sphere_cap_bounds():
    with pytest.raises(DomainError):
        SphericalCap(1.0, 2.0)
    S = SphericalCap(1.0, 1.0)
    with pytest.raises(DomainError):
        S.point_at(0.9, 0.0)
    with pytest.raises(UnsupportedSpaceError):
        check_reshetnyak(*(S.point_at(0.1 * k, k) for k in range(4)))


def test_tree_spec_must_be_a_tree():
    with pytest.raises(DomainError):
        TreeSpec(("a", "b", "c"), (("a", "b", 1.0), ("a", "b", 1.0)))
    with pytest.raises(DomainError):
        TreeSpec(("a", "b"), (("a", "b", -1.0),))


# -- properties -----------------------------------------------------------------------

@given(hp_points(), hp_points())
def test_halfplane_distance_matches_textbook_formula(a, b):
    assert distance(a, b) == pytest.approx(hp_distance_reference(a, b), rel=1e-9, abs=1e-9)


@given(hp_points(), hp_points(), unit)
def test_halfplane_geodesic_splits_distance(a, b, t):
    m = geodesic_point(a, b, t)
    d = distance(a, b)
    assert distance(a, m) == pytest.approx(t * d, rel=1e-8, abs=1e-9)
    assert distance(m, b) == pytest.approx((1 - t) * d, rel=1e-8, abs=1e-9)


@given(hp_points(), hp_points(), hp_points())
def test_halfplane_triangle_inequality(a, b, c):
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


@given(st.integers(0, 10_000))
def test_sampled_spaces_are_metric_and_uniformly_convex(seed):
    for sp in (Euclidean(2), H, MetricTree(TreeSpec(("a", "b", "c"), (("a", "b", 1.0), ("a", "c", 2.0)))),
               SphericalCap(1.0, 1.2)):
        rng = np.random.default_rng(seed)
        x, y, z = (sp.sample(rng) for _ in range(3))
        t = float(rng.random())
        assert distance(x, y) == pytest.approx(distance(y, x), abs=1e-12)
        assert distance(x, x) == pytest.approx(0.0, abs=1e-7)
        assert check_puc(sp, x, y, z, t) >= -1e-8
        m = geodesic_point(x, y, t)
        assert distance(x, m) == pytest.approx(t * distance(x, y), abs=1e-8)


@given(st.integers(0, 10_000))
def test_reshetnyak_in_cat0_models(seed):
    for sp in (Euclidean(3), H):
        rng = np.random.default_rng(seed)
        assert check_reshetnyak(*(sp.sample(rng) for _ in range(4))) >= -1e-8


def test_sphere_constant_below_two():
    S = SphericalCap(1.0, 1.2)
    assert 0 < S.c < 2
    assert not S.cat0


def test_sample_point_is_deterministic():
    assert sample_point(H, 7) == sample_point(H, 7)
    assert sample_point(H, 7) != sample_point(H, 8)


@pytest.mark.parametrize("eps", [1e-6, 0.1, 1.0])
def test_perturb_moves_exactly_eps(space, eps):
    rng = np.random.default_rng(1)
    if isinstance(space, SphericalCap):
        a = space.point_at(0.1, 0.3)
        eps = min(eps, 0.4)
    elif isinstance(space, MetricTree):
        a = space.vertex("b")
    else:
        a = space.sample(rng)
    q = space.perturb(a, eps, rng)
    assert distance(a, q) == pytest.approx(eps, rel=1e-7)
