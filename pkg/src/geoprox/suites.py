"""Randomized falsifier suites for the defining inequalities.

Each suite draws ``samples`` random instances from a seeded generator and
reports the worst slack as a :class:`~geoprox.operators.PropertyReport`.
"""
from __future__ import annotations


import numpy as np

from .convex_sets import AffineSet, Ball, GeodesicLine, GeodesicSegment, HalfSpace, Subtree
from .geometry import (Euclidean, HalfPlane, MetricTree, SphericalCap, TreeSpec, check_puc,
                       check_reshetnyak)
from .operators import (CoordinateMap, DistTo, HalfSqDistTo, Indicator, Projection, PropertyReport,
                        Resolvent, Scaled, check_firm_nonexpansive, check_p1, check_p2,
                        check_resolvent_inequality)

DEMO_TREE = TreeSpec(
    ("a", "b", "c", "d", "e", "f", "g"),
    (("a", "b", 1.0), ("b", "c", 0.5), ("b", "d", 2.0), ("d", "e", 1.5), ("d", "f", 0.7), ("a", "g", 1.2)),
)


def cat0_spaces():
    return [Euclidean(2), HalfPlane(), MetricTree(DEMO_TREE)]


def all_spaces():
    return cat0_spaces() + [SphericalCap(1.0, 1.2)]


def _pt(sp, rng):
    """Test point drawn from a wider region than the sets, so most lie outside them."""
    if isinstance(sp, HalfPlane):
        return sp.sample(rng, (-2.0, 2.0, 0.25, 4.0))
    if isinstance(sp, Euclidean):
        return sp.sample(rng, (-2.0, 2.0))
    return sp.sample(rng)


def random_set(sp, rng):
    """A random closed convex set of ``sp`` (lines, segments, balls, ...)."""
    if isinstance(sp, MetricTree):
        if rng.random() < 0.5:
            return GeodesicSegment(sp, sp.sample(rng), sp.sample(rng))
        names = list(sp.tree.vertices)
        adj = {v: [] for v in names}
        for u, v, _ in sp.tree.edges:
            adj[u].append(v)
            adj[v].append(u)
        grow = {names[rng.integers(len(names))]}
        for _ in range(rng.integers(0, 4)):
            frontier = sorted({w for v in grow for w in adj[v]} - grow)
            if frontier:
                grow.add(frontier[rng.integers(len(frontier))])
        return Subtree(sp, frozenset(grow))
    if isinstance(sp, SphericalCap):
        k = rng.integers(3)
        if k == 0:
            r = 0.25 * sp.cap_radius
            return Ball(sp, sp.sample(rng, r), float(rng.uniform(0.05, sp.cap_radius - r)))
        a, b = sp.sample(rng), sp.sample(rng)
        return GeodesicSegment(sp, a, b) if k == 1 else GeodesicLine.through(a, b)
    kinds = 3 if isinstance(sp, HalfPlane) else 5
    k = rng.integers(kinds)
    bounds = None if isinstance(sp, HalfPlane) else (-1.0, 1.0)
    a, b = sp.sample(rng, bounds), sp.sample(rng, bounds)
    if k == 0:
        return GeodesicLine.through(a, b)
    if k == 1:
        return GeodesicSegment(sp, a, b)
    if k == 2:
        return Ball(sp, a, float(rng.uniform(0.05, 0.6)))
    if k == 3:
        return HalfSpace(sp, tuple(rng.normal(size=sp.dim)), float(rng.normal()))
    return AffineSet(sp, a, (tuple(rng.normal(size=sp.dim)),))


def random_function(sp, rng):
    """A random function with a closed-form resolvent."""
    k = rng.integers(5)
    a = sp.sample(rng)
    if k == 0:
        return Indicator(random_set(sp, rng))
    if k == 1:
        return DistTo(a)
    if k == 2:
        return HalfSqDistTo(a)
    if k == 3:
        return Scaled(DistTo(a), float(rng.uniform(0.2, 3.0)))
    return Scaled(HalfSqDistTo(a), float(rng.uniform(0.2, 3.0)))


def random_mapping(sp, rng, kind):
    if kind == "projection":
        return Projection(random_set(sp, rng))
    return Resolvent(random_function(sp, rng), float(rng.uniform(0.1, 3.0)))


def _fixed_point(T, sp, rng):
    """A fixed point of a projection or closed-form resolvent."""
    if isinstance(T, Projection):
        return T.set.project(_pt(sp, rng))
    f = T.f
    while isinstance(f, Scaled):
        f = f.inner
    if isinstance(f, Indicator):
        return f.set.project(_pt(sp, rng))
    return f.anchor


def _report(name, values, witnesses, tol, **params):
    k = int(np.argmin(values))
    worst = float(values[k])
    return PropertyReport(name, len(values), worst, witnesses[k] if worst < -tol else None, params, tol)


def suite_puc(sp, samples=1000, seed=0, tol=1e-8):
    rng = np.random.default_rng(seed)
    vals, wit = [], []
    for _ in range(samples):
        x, y, z = _pt(sp, rng), _pt(sp, rng), _pt(sp, rng)
        t = float(rng.random())
        vals.append(check_puc(sp, x, y, z, t))
        wit.append((x, y, z, t))
    return _report("puc", vals, wit, tol, space=sp.name)


def suite_reshetnyak(sp, samples=1000, seed=0, tol=1e-8):
    rng = np.random.default_rng(seed)
    vals, wit = [], []
    for _ in range(samples):
        pts = tuple(_pt(sp, rng) for _ in range(4))
        vals.append(check_reshetnyak(*pts))
        wit.append(pts)
    return _report("reshetnyak", vals, wit, tol, space=sp.name)


def suite_firm_nonexpansive(sp, kind="projection", samples=1000, seed=0, tol=1e-8):
    rng = np.random.default_rng(seed)
    vals, wit = [], []
    for _ in range(samples):
        T = random_mapping(sp, rng, kind)
        x, y = _pt(sp, rng), _pt(sp, rng)
        rep = check_firm_nonexpansive(T, x, y, [float(rng.random())], tol)
        vals.append(rep.worst)
        wit.append((T, x, y))
    return _report("firm_nonexpansive", vals, wit, tol, space=sp.name, mapping=kind)


def suite_p1(sp, kind="projection", samples=1000, seed=0, tol=1e-8, l=2.0, beta=1.0):
    rng = np.random.default_rng(seed)
    vals, wit = [], []
    for _ in range(samples):
        T = random_mapping(sp, rng, kind)
        u = _fixed_point(T, sp, rng)
        x = _pt(sp, rng)
        vals.append(check_p1(T, u, x, l, beta, fix_tol=1e-9))
        wit.append((T, u, x))
    return _report("p1", vals, wit, tol, space=sp.name, mapping=kind, l=l, beta=beta)


def suite_p2(sp, kind="projection", samples=1000, seed=0, tol=1e-8):
    rng = np.random.default_rng(seed)
    vals, wit = [], []
    for _ in range(samples):
        T = random_mapping(sp, rng, kind)
        x, y = _pt(sp, rng), _pt(sp, rng)
        vals.append(check_p2(T, x, y))
        wit.append((T, x, y))
    return _report("p2", vals, wit, tol, space=sp.name, mapping=kind)


def suite_resolvent_inequality(sp, samples=1000, seed=0, tol=1e-8):
    rng = np.random.default_rng(seed)
    vals, wit = [], []
    for _ in range(samples):
        f = random_function(sp, rng)
        lam = float(rng.uniform(0.1, 3.0))
        x, y = _pt(sp, rng), _pt(sp, rng)
        if isinstance(f, Indicator):
            # f(y) = inf makes the inequality vacuous; test against points of the set
            y = f.set.project(y)
        vals.append(check_resolvent_inequality(f, lam, x, y))
        wit.append((f, lam, x, y))
    return _report("resolvent_inequality", vals, wit, tol, space=sp.name)


def square_map():
    """``x -> 2 x^2`` on the real line, a (P1) but not (P2) mapping on [-1/4, 1/3]."""
    E = Euclidean(1)
    return E, CoordinateMap(E, lambda c: (2.0 * c[0] ** 2,), "2x^2")


def counterexample_reports(grid=1000, tol=1e-8):
    """Reports for the square map: (P2) at (-1/4, 0) and (P1) with l=2, beta=1/3 on a grid.

    The first report is expected to fail, the second to pass.
    """
    E, T = square_map()
    x, y = E.point(-0.25), E.point(0.0)
    p2 = check_p2(T, x, y)
    r_p2 = PropertyReport("p2", 1, p2, (x, y) if p2 < -tol else None, {"map": "2x^2"}, tol)
    u = E.point(0.0)
    xs = np.linspace(-0.25, 1.0 / 3.0, grid)
    vals = [check_p1(T, u, E.point(float(v)), 2.0, 1.0 / 3.0) for v in xs]
    r_p1 = _report("p1", vals, [(E.point(float(v)),) for v in xs], tol, map="2x^2", l=2.0, beta="1/3")
    return r_p2, r_p1


def run_all(samples=1000, seed=0, tol=1e-8):
    """Every suite on every applicable space; returns a list of reports."""
    out = []
    for sp in all_spaces():
        out.append(suite_puc(sp, samples, seed, tol))
    for sp in cat0_spaces():
        out.append(suite_reshetnyak(sp, samples, seed, tol))
        for kind in ("projection", "resolvent"):
            out.append(suite_firm_nonexpansive(sp, kind, samples, seed, tol))
            out.append(suite_p1(sp, kind, samples, seed, tol))
            out.append(suite_p2(sp, kind, samples, seed, tol))
        out.append(suite_resolvent_inequality(sp, samples, seed, tol))
    return out
