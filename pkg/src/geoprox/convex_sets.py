"""Closed convex sets with metric projections.

Every set offers ``project`` (closed form), an independent membership test
``is_member`` and a bounded parameterization used by the brute-force oracle
:func:`numeric_project`.  Intersections are deliberately not a set type;
feasibility problems go through :mod:`geoprox.iteration`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .geometry import (
    DomainError,
    Euclidean,
    HalfPlane,
    MetricTree,
    Point,
    SphericalCap,
    UnsupportedSpaceError,
    _cross,
    _dot,
    _unit,
    same_space,
)


class ConvexSet:
    """Base class.  Subclasses are frozen dataclasses with a ``space`` field."""

    kind = "set"

    def project(self, z: Point) -> Point:
        raise NotImplementedError

    def is_member(self, z: Point, tol: float = 1e-9) -> bool:
        raise NotImplementedError

    def base_point(self) -> Point:
        """Some point of the set."""
        raise NotImplementedError

    def region(self, z: Point):
        """Bounded search region containing the projection of ``z``.

        Returns ``(lo, hi, to_point)`` where ``to_point`` maps a parameter
        vector to a point or ``None`` when it falls outside the set.  Sets in
        metric trees return ``None`` and are searched edge by edge.
        """
        raise UnsupportedSpaceError(f"no search region for {self.kind}")

    def curve(self, window: float):
        """1-D arc-length parameterization ``(lo, hi, to_point)`` of a geodesic set."""
        raise UnsupportedSpaceError(f"{self.kind} is not a geodesic")

    def _check(self, z):
        same_space(self, z)


def _box_region(space, center, radius, member):
    lo = center - radius
    hi = center + radius

    def to_point(v):
        q = space.point(*v)
        return q if member(q) else None

    return lo, hi, to_point


# -- half-plane geodesics -----------------------------------------------------
# A complete geodesic is either {x = a} or the semicircle |z - c| = R.  Both are
# sent to the imaginary axis by an isometry; there, arc length is log(Im w).


def _hp_to_axis(form, z: complex) -> complex:
    if form[0] == "vertical":
        return z - form[1]
    _, c, r = form
    p, q = c - r, c + r
    return (z - p) / (q - z)


def _hp_from_axis(form, w: complex) -> complex:
    if form[0] == "vertical":
        return w + form[1]
    _, c, r = form
    p, q = c - r, c + r
    return (q * w + p) / (w + 1)


def hp_form_through(a: Point, b: Point):
    """Canonical form of the half-plane geodesic through two distinct points."""
    (x1, y1), (x2, y2) = a.coords, b.coords
    if abs(x1 - x2) <= 1e-12 * max(1.0, abs(x1), abs(x2)):
        if y1 == y2:
            raise DomainError("a geodesic line needs two distinct anchors")
        return ("vertical", 0.5 * (x1 + x2))
    c = ((x2 * x2 + y2 * y2) - (x1 * x1 + y1 * y1)) / (2.0 * (x2 - x1))
    return ("semicircle", c, math.hypot(x1 - c, y1))


def _hp_point(space, w: complex, form) -> Point:
    z = _hp_from_axis(form, w)
    return space.point(z.real, z.imag)


def _hp_arclength(form, z: Point) -> float:
    return math.log(abs(_hp_to_axis(form, complex(*z.coords))))


# -- sphere great-circle arcs -------------------------------------------------


def _sphere_clamp_to_arc(space: SphericalCap, a: Point, b: Point, z: Point) -> Point:
    u, v = a.coords, b.coords
    n = _unit(_cross(u, v))
    t = _cross(n, u)
    zc = z.coords
    phi = math.atan2(_dot(zc, t), _dot(zc, u))
    phib = math.atan2(_dot(v, t), _dot(v, u))
    if 0.0 <= phi <= phib:
        foot = tuple(math.cos(phi) * p + math.sin(phi) * q for p, q in zip(u, t))
        return space.point(*foot)
    return a if space.distance(z, a) <= space.distance(z, b) else b


def _sphere_arc_point(space, a, b, s):
    """Point at arc length ``s`` from ``a`` toward ``b`` on their great circle."""
    u = a.coords
    t = _cross(_unit(_cross(u, b.coords)), u)
    ang = s * math.sqrt(space.kappa)
    return space.clamp(tuple(math.cos(ang) * p + math.sin(ang) * q for p, q in zip(u, t)))


@dataclass(frozen=True)
class GeodesicLine(ConvexSet):
    """Complete geodesic through two anchors.

    In the half-plane the line may instead be given by its canonical
    ``form``: ``("vertical", a)`` or ``("semicircle", center, radius)``.
    In a spherical cap the set is the great-circle arc inside the cap.
    """

    space: object
    anchors: tuple = None
    form: tuple = None

    kind = "line"

    def __post_init__(self):
        sp = self.space
        if isinstance(sp, MetricTree):
            raise UnsupportedSpaceError("finite trees contain no complete geodesics; use GeodesicSegment")
        if self.form is not None:
            if not isinstance(sp, HalfPlane):
                raise UnsupportedSpaceError("canonical line forms exist only in the half-plane")
            form = tuple(self.form)
            if form[0] == "vertical" and len(form) == 2:
                form = ("vertical", float(form[1]))
            elif form[0] == "semicircle" and len(form) == 3 and form[2] > 0:
                form = ("semicircle", float(form[1]), float(form[2]))
            else:
                raise DomainError(f"bad half-plane line form {self.form}")
            object.__setattr__(self, "form", form)
            return
        if self.anchors is None or len(self.anchors) != 2:
            raise DomainError("GeodesicLine needs two anchors or a form")
        a, b = self.anchors
        same_space(self, a, b)
        if sp.distance(a, b) == 0:
            raise DomainError("a geodesic line needs two distinct anchors")

    @classmethod
    def vertical(cls, space, a):
        return cls(space, form=("vertical", a))

    @classmethod
    def semicircle(cls, space, center, radius):
        return cls(space, form=("semicircle", center, radius))

    @classmethod
    def through(cls, a: Point, b: Point):
        if isinstance(a.space, HalfPlane):
            return cls(a.space, form=hp_form_through(a, b))
        return cls(a.space, anchors=(a, b))

    @cached_property
    def hp_form(self):
        return self.form if self.form is not None else hp_form_through(*self.anchors)

    @cached_property
    def _arc(self):
        # endpoints of great circle ∩ cap
        sp = self.space
        a, b = self.anchors
        n = _unit(_cross(a.coords, b.coords))
        N = sp.center
        m = tuple(p - _dot(N, n) * q for p, q in zip(N, n))
        m = _unit(m)
        alpha = math.acos(min(1.0, _dot(m, N)))
        rho = sp.cap_radius * math.sqrt(sp.kappa)
        beta = math.acos(min(1.0, math.cos(rho) / math.cos(alpha)))
        t = _cross(n, m)
        ends = [tuple(math.cos(beta) * p + s * math.sin(beta) * q for p, q in zip(m, t)) for s in (-1, 1)]
        return sp.clamp(ends[0]), sp.clamp(ends[1])

    def base_point(self):
        if isinstance(self.space, HalfPlane):
            return _hp_point(self.space, 1j, self.hp_form)
        return self.anchors[0]

    def project(self, z):
        self._check(z)
        sp = self.space
        if isinstance(sp, HalfPlane):
            w = _hp_to_axis(self.hp_form, complex(*z.coords))
            return _hp_point(sp, 1j * abs(w), self.hp_form)
        if isinstance(sp, Euclidean):
            a, b = (q.array for q in self.anchors)
            u = (b - a) / np.linalg.norm(b - a)
            x = z.array
            return sp.point(*(a + np.dot(x - a, u) * u))
        return _sphere_clamp_to_arc(sp, *self._arc, z)

    def is_member(self, z, tol=1e-9):
        sp = self.space
        if isinstance(sp, HalfPlane):
            w = _hp_to_axis(self.hp_form, complex(*z.coords))
            # sinh(dist to the imaginary axis) = |Re w| / Im w
            return math.asinh(abs(w.real) / w.imag) <= tol if w.imag > 0 else False
        if isinstance(sp, Euclidean):
            a, b = (q.array for q in self.anchors)
            x = z.array
            u, v = b - a, x - a
            res = v - np.dot(v, u) / np.dot(u, u) * u
            return float(np.linalg.norm(res)) <= tol
        a, b = self._arc
        return sp.distance(a, z) + sp.distance(z, b) <= sp.distance(a, b) + tol

    def curve(self, window):
        sp = self.space
        if isinstance(sp, HalfPlane):
            form = self.hp_form
            if form[0] == "vertical":
                return -window, window, lambda s: sp.point(form[1], math.exp(s))
            _, c, r = form

            def on_circle(s):
                th = 2.0 * math.atan(math.exp(s))
                return sp.point(c + r * math.cos(th), r * math.sin(th))

            return -window, window, on_circle
        if isinstance(sp, Euclidean):
            a, b = (q.array for q in self.anchors)
            u = (b - a) / np.linalg.norm(b - a)
            return -window, window, lambda s: sp.point(*(a + s * u))
        a, b = self._arc
        return 0.0, sp.distance(a, b), lambda s: _sphere_arc_point(sp, a, b, s)

    def region(self, z):
        sp = self.space
        if isinstance(sp, SphericalCap):
            lo, hi, f = self.curve(0.0)
        else:
            # the projection lies within 2 d(z, base) of the base point,
            # which sits at curve parameter 0
            lo, hi, f = self.curve(2.0 * sp.distance(z, self.base_point()) + 1.0)
        return np.array([lo]), np.array([hi]), lambda v: f(v[0])


@dataclass(frozen=True)
class GeodesicSegment(ConvexSet):
    """Geodesic segment between two endpoints."""

    space: object
    start: Point = None
    end: Point = None

    kind = "segment"

    def __post_init__(self):
        same_space(self, self.start, self.end)

    def base_point(self):
        return self.start

    @cached_property
    def _form(self):
        return hp_form_through(self.start, self.end)

    def project(self, z):
        self._check(z)
        sp = self.space
        a, b = self.start, self.end
        if sp.distance(a, b) == 0:
            return a
        if isinstance(sp, HalfPlane):
            form = self._form
            sa, sb = _hp_arclength(form, a), _hp_arclength(form, b)
            s = math.log(abs(_hp_to_axis(form, complex(*z.coords))))
            s = min(max(s, min(sa, sb)), max(sa, sb))
            if s == sa:
                return a
            if s == sb:
                return b
            return _hp_point(sp, 1j * math.exp(s), form)
        if isinstance(sp, Euclidean):
            x0, x1 = a.array, b.array
            u = x1 - x0
            t = float(np.clip(np.dot(z.array - x0, u) / np.dot(u, u), 0.0, 1.0))
            return sp.geodesic(a, b, t)
        if isinstance(sp, MetricTree):
            # the projection is the branch point of the tripod a, b, z
            d = sp.distance
            dab = d(a, b)
            s = 0.5 * (d(a, z) + dab - d(b, z))
            return sp.geodesic(a, b, min(max(s / dab, 0.0), 1.0))
        return _sphere_clamp_to_arc(sp, a, b, z)

    def is_member(self, z, tol=1e-9):
        d = self.space.distance
        return d(self.start, z) + d(z, self.end) <= d(self.start, self.end) + tol

    def curve(self, window=None):
        sp = self.space
        a, b = self.start, self.end
        L = sp.distance(a, b)
        if isinstance(sp, HalfPlane):
            form = self._form
            sa, sb = _hp_arclength(form, a), _hp_arclength(form, b)
            lo_s = min(sa, sb)
            lo, hi, f = GeodesicLine(sp, form=form).curve(1.0)
            if form[0] == "vertical":
                return lo_s, lo_s + L, f
            # GeodesicLine.curve runs from the right end; axis parameter runs from the left
            return -(lo_s + L), -lo_s, f
        if isinstance(sp, Euclidean):
            x0, x1 = a.array, b.array
            u = (x1 - x0) / L
            return 0.0, L, lambda s: sp.point(*(x0 + s * u))
        if isinstance(sp, SphericalCap):
            return 0.0, L, lambda s: _sphere_arc_point(sp, a, b, s)
        raise UnsupportedSpaceError("tree segments are searched edge by edge")

    def region(self, z):
        if isinstance(self.space, MetricTree):
            return None
        lo, hi, f = self.curve()
        return np.array([lo]), np.array([hi]), lambda v: f(v[0])


@dataclass(frozen=True)
class Ball(ConvexSet):
    """Closed geodesic ball."""

    space: object
    center: Point = None
    radius: float = 1.0

    kind = "ball"

    def __post_init__(self):
        same_space(self, self.center)
        if not self.radius > 0:
            raise DomainError(f"ball radius must be positive, got {self.radius}")
        sp = self.space
        if isinstance(sp, SphericalCap):
            reach = sp.distance(sp.point(*sp.center), self.center) + self.radius
            if reach > sp.cap_radius + 1e-12:
                raise DomainError(f"ball reaches {reach} from the cap center, beyond the cap radius {sp.cap_radius}")

    def base_point(self):
        return self.center

    def project(self, z):
        self._check(z)
        d = self.space.distance(self.center, z)
        if d <= self.radius:
            return z
        return self.space.geodesic(self.center, z, self.radius / d)

    def is_member(self, z, tol=1e-9):
        return self.space.distance(self.center, z) <= self.radius + tol

    def region(self, z):
        sp = self.space
        if isinstance(sp, HalfPlane):
            # hyperbolic ball = Euclidean disk with shifted center
            x0, y0 = self.center.coords
            cy, er = y0 * math.cosh(self.radius), y0 * math.sinh(self.radius)

            def disk(v):
                rho, phi = v
                y = cy + rho * math.sin(phi)
                if y <= 0:
                    return None
                return sp.point(x0 + rho * math.cos(phi), y)

            a = math.atan2(z.coords[1] - cy, z.coords[0] - x0)
            return np.array([0.0, a - math.pi]), np.array([er, a + math.pi]), disk
        if isinstance(sp, Euclidean):
            c = self.center.array
            if sp.dim == 1:
                return c - self.radius, c + self.radius, lambda v: sp.point(*v)
            if sp.dim == 2:
                # centre the angular window on z so the optimum never sits on the seam
                a = math.atan2(z.coords[1] - c[1], z.coords[0] - c[0])
                return (np.array([0.0, a - math.pi]), np.array([self.radius, a + math.pi]),
                        lambda v: sp.point(c[0] + v[0] * math.cos(v[1]), c[1] + v[0] * math.sin(v[1])))
            return _box_region(sp, c, self.radius, lambda q: self.is_member(q, 1e-12))
        if isinstance(sp, SphericalCap):
            c = self.center.coords
            e1 = _unit(_cross(c, (1.0, 0.0, 0.0)) if abs(c[0]) < 0.9 else _cross(c, (0.0, 1.0, 0.0)))
            e2 = _cross(c, e1)
            sk = math.sqrt(sp.kappa)

            def polar(v):
                rho, phi = v
                a = rho * sk
                d = tuple(math.cos(phi) * p + math.sin(phi) * q for p, q in zip(e1, e2))
                w = tuple(math.cos(a) * p + math.sin(a) * q for p, q in zip(c, d))
                w = _unit(w)
                ang = math.atan2(math.hypot(w[0], w[1]), w[2])
                if ang > sp.cap_radius * sk:
                    return None
                return sp.point(*w)

            a = math.atan2(_dot(z.coords, e2), _dot(z.coords, e1))
            return np.array([0.0, a - math.pi]), np.array([self.radius, a + math.pi]), polar
        return None


@dataclass(frozen=True)
class HalfSpace(ConvexSet):
    """Euclidean half-space ``{y : <normal, y> <= offset}``."""

    space: object
    normal: tuple = None
    offset: float = 0.0

    kind = "halfspace"

    def __post_init__(self):
        if not isinstance(self.space, Euclidean):
            raise UnsupportedSpaceError("half-spaces live in Euclidean space")
        object.__setattr__(self, "normal", tuple(float(v) for v in self.normal))
        if len(self.normal) != self.space.dim or not any(self.normal):
            raise DomainError("half-space normal must be a nonzero vector of the space dimension")

    @property
    def _n(self):
        return np.asarray(self.normal)

    def base_point(self):
        n = self._n
        return self.space.point(*(self.offset * n / np.dot(n, n)))

    def project(self, z):
        self._check(z)
        n = self._n
        viol = np.dot(n, z.array) - self.offset
        if viol <= 0:
            return z
        return self.space.point(*(z.array - viol / np.dot(n, n) * n))

    def is_member(self, z, tol=1e-9):
        n = self._n
        return (np.dot(n, z.array) - self.offset) / np.linalg.norm(n) <= tol

    def region(self, z):
        sp = self.space
        if sp.dim > 3:
            raise UnsupportedSpaceError("grid search is limited to dimension <= 3")
        # coordinates: position along the boundary hyperplane, then depth inside
        y0 = self.base_point()
        r = 2.0 * sp.distance(z, y0) + 1.0
        n = self._n / np.linalg.norm(self._n)
        frame = np.linalg.svd(n[None, :])[2][1:]
        o = y0.array
        lo = np.r_[-r * np.ones(sp.dim - 1), 0.0]
        hi = r * np.ones(sp.dim)
        return lo, hi, lambda v: sp.point(*(o + v[:-1] @ frame - v[-1] * n))


@dataclass(frozen=True)
class AffineSet(ConvexSet):
    """Euclidean affine set ``origin + span(basis)``."""

    space: object
    origin: Point = None
    basis: tuple = ()

    kind = "affine"

    def __post_init__(self):
        if not isinstance(self.space, Euclidean):
            raise UnsupportedSpaceError("affine sets live in Euclidean space")
        same_space(self, self.origin)
        basis = tuple(tuple(float(v) for v in b) for b in self.basis)
        object.__setattr__(self, "basis", basis)
        if any(len(b) != self.space.dim for b in basis):
            raise DomainError("basis vectors must match the space dimension")

    @cached_property
    def _q(self):
        if not self.basis:
            return np.zeros((self.space.dim, 0))
        q, r = np.linalg.qr(np.asarray(self.basis).T)
        keep = np.abs(np.diag(r)) > 1e-12
        return q[:, keep]

    def base_point(self):
        return self.origin

    def project(self, z):
        self._check(z)
        o = self.origin.array
        q = self._q
        return self.space.point(*(o + q @ (q.T @ (z.array - o))))

    def is_member(self, z, tol=1e-9):
        return self.space.distance(z, self.project(z)) <= tol

    def region(self, z):
        b = np.asarray(self.basis).T
        k = b.shape[1]
        if k == 0:
            return np.zeros(1), np.zeros(1), lambda v: self.origin
        if k > 2:
            raise UnsupportedSpaceError("grid search is limited to affine sets of dimension <= 2")
        smin = np.linalg.svd(b, compute_uv=False).min()
        r = 2.0 * self.space.distance(z, self.origin) / smin + 1.0
        o = self.origin.array
        return -r * np.ones(k), r * np.ones(k), lambda v: self.space.point(*(o + b @ v))


@dataclass(frozen=True)
class Subtree(ConvexSet):
    """Subtree of a metric tree spanned by a connected vertex set."""

    space: object
    vertices: frozenset = field(default_factory=frozenset)

    kind = "subtree"

    def __post_init__(self):
        if not isinstance(self.space, MetricTree):
            raise UnsupportedSpaceError("subtrees live in metric trees")
        vs = frozenset(self.vertices)
        object.__setattr__(self, "vertices", vs)
        names = set(self.space.tree.vertices)
        if not vs or not vs <= names:
            raise DomainError(f"subtree vertices {sorted(vs)} must be a nonempty subset of the tree")
        inside = [(u, v) for u, v, _ in self.space.tree.edges if u in vs and v in vs]
        if len(inside) != len(vs) - 1:
            raise DomainError(f"vertices {sorted(vs)} do not span a connected subtree")

    def base_point(self):
        return self.space.vertex(sorted(self.vertices)[0])

    def is_member(self, z, tol=1e-9):
        sp = self.space
        k, s = z.coords
        u, v, w = sp.tree.edges[k]
        if u in self.vertices and v in self.vertices:
            return True
        if u in self.vertices and s <= tol:
            return True
        return v in self.vertices and w - s <= tol

    def project(self, z):
        self._check(z)
        if self.is_member(z, 0.0):
            return z
        sp = self.space
        best = min(sorted(self.vertices), key=lambda v: sp.distance(z, sp.vertex(v)))
        return sp.vertex(best)

    def region(self, z):
        return None


# -- public operations --------------------------------------------------------


def project(s: ConvexSet, z: Point) -> Point:
    """Metric projection of ``z`` onto ``s``."""
    return s.project(z)


def set_distance_to_point(s: ConvexSet, z: Point) -> float:
    return s.space.distance(z, s.project(z))


def contains(s: ConvexSet, z: Point, tol: float = 1e-9) -> bool:
    """True iff ``dist(z, s) <= tol``."""
    same_space(s, z)
    return set_distance_to_point(s, z) <= tol


def grid_minimize(fn, lo, hi, n=41, tol=1e-9, max_rounds=200):
    """Grid search with zoom refinement over a box.

    ``fn`` may return ``inf`` for infeasible parameters.  Each round evaluates
    an ``n``-point grid per axis and recentres a box of six grid cells on the
    best point, so the best value never increases.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    glo, ghi = lo.copy(), hi.copy()
    best_v, best_x = math.inf, 0.5 * (lo + hi)
    for _ in range(max_rounds):
        axes = [np.linspace(a, b, n) for a, b in zip(lo, hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        for x in np.stack([m.ravel() for m in mesh], axis=1):
            v = fn(x)
            if v < best_v:
                best_v, best_x = v, x
        h = (hi - lo) / (n - 1)
        if np.all(h <= tol) or not math.isfinite(best_v):
            break
        lo = np.maximum(best_x - 3 * h, glo)
        hi = np.minimum(best_x + 3 * h, ghi)
    return best_v, best_x


def numeric_project(s: ConvexSet, z: Point, tol: float = 1e-9) -> Point:
    """Brute-force nearest point of ``s`` to ``z`` (test oracle for :func:`project`)."""
    same_space(s, z)
    sp = s.space
    reg = s.region(z)
    if reg is None:
        best = (math.inf, None)
        for k, (_, _, w) in enumerate(sp.tree.edges):

            def on_edge(v, k=k):
                q = sp.point(k, v[0])
                return sp.distance(z, q) if s.is_member(q, 1e-12) else math.inf

            val, x = grid_minimize(on_edge, [0.0], [w], tol=tol)
            if val < best[0]:
                best = (val, sp.point(k, x[0]))
        if best[1] is None:
            raise DomainError("search found no point of the set")
        return best[1]

    lo, hi, f = reg

    def obj(v):
        q = f(v)
        return math.inf if q is None else sp.distance(z, q)

    val, x = grid_minimize(obj, lo, hi, tol=tol)
    if not math.isfinite(val):
        raise DomainError("search found no point of the set")
    return f(x)


class SetDistance(NamedTuple):
    value: float
    pair: tuple
    attained: bool
    iterations: int


def set_distance(A: ConvexSet, B: ConvexSet, tol: float = 1e-9, escape_radius: float = 50.0,
                 max_iter: int = 1_000_000) -> SetDistance:
    """``dist(A, B)`` by alternating projections from a point of ``A``.

    Stops once a full round moves less than ``tol / 10``.  When the iterates
    leave the ball of radius ``escape_radius`` around the start the infimum
    is not attained and the last gap is reported with ``attained=False``.
    """
    sp = same_space(A, B)
    x0 = x = A.base_point()
    for k in range(1, max_iter + 1):
        y = B.project(x)
        xn = A.project(y)
        step = sp.distance(x, xn)
        x = xn
        if step < tol / 10:
            y = B.project(x)
            return SetDistance(sp.distance(x, y), (x, y), True, k)
        if sp.distance(x0, x) > escape_radius:
            y = B.project(x)
            return SetDistance(sp.distance(x, y), (x, y), False, k)
    y = B.project(x)
    return SetDistance(sp.distance(x, y), (x, y), False, max_iter)


def grid_set_distance(A: ConvexSet, B: ConvexSet, window: float = 10.0, tol: float = 1e-10):
    """Independent oracle for the distance between two geodesic sets.

    Minimizes ``d(a(s), b(t))`` over both arc-length parameters by grid
    search; lines are searched within ``window`` of their base points.
    Returns ``(value, (a, b))``.
    """
    sp = same_space(A, B)
    la, ha, fa = A.curve(window)
    lb, hb, fb = B.curve(window)
    val, x = grid_minimize(lambda v: sp.distance(fa(v[0]), fb(v[1])), [la, lb], [ha, hb], n=41, tol=tol)
    return val, (fa(x[0]), fb(x[1]))
