"""Firmly nonexpansive type mappings and falsifiers for their inequalities.

Mappings are immutable and callable as ``T(z, n=0)``; the step index ``n``
only matters for :class:`WithError`, whose perturbation is a deterministic
function of ``(seed, n)``.

The ``check_*`` functions return the slack of an inequality (nonnegative
when it holds).  They are sample-based falsifiers: passing means no
violation was found at the points tried.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .convex_sets import ConvexSet, contains
from .geometry import DomainError, MetricTree, Point, UnsupportedSpaceError, same_space


class PreconditionError(ValueError):
    """A documented precondition of a checker does not hold."""


# -- functions ----------------------------------------------------------------


class FunctionSpec:
    """Convex, lower semi-continuous, proper function on a model space."""

    def __call__(self, z: Point) -> float:
        raise NotImplementedError

    @property
    def space(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Indicator(FunctionSpec):
    """0 on ``set``, +inf elsewhere."""

    set: ConvexSet
    tol: float = 1e-9

    @property
    def space(self):
        return self.set.space

    def __call__(self, z):
        return 0.0 if contains(self.set, z, self.tol) else math.inf


@dataclass(frozen=True)
class DistTo(FunctionSpec):
    anchor: Point

    @property
    def space(self):
        return self.anchor.space

    def __call__(self, z):
        return self.anchor.space.distance(z, self.anchor)


@dataclass(frozen=True)
class HalfSqDistTo(FunctionSpec):
    anchor: Point

    @property
    def space(self):
        return self.anchor.space

    def __call__(self, z):
        return 0.5 * self.anchor.space.distance(z, self.anchor) ** 2


@dataclass(frozen=True)
class Scaled(FunctionSpec):
    inner: FunctionSpec
    weight: float

    def __post_init__(self):
        if not self.weight > 0:
            raise DomainError(f"weight must be positive, got {self.weight}")

    @property
    def space(self):
        return self.inner.space

    def __call__(self, z):
        v = self.inner(z)
        return math.inf if v == math.inf else self.weight * v


@dataclass(frozen=True)
class Sum(FunctionSpec):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise DomainError("Sum needs at least one term")
        same_space(*self.terms)

    @property
    def space(self):
        return self.terms[0].space

    def __call__(self, z):
        return sum(t(z) for t in self.terms)


# -- resolvents ---------------------------------------------------------------


def _closed_form_resolvent(f, lam, z):
    while isinstance(f, Scaled) and not isinstance(f.inner, Sum):
        f, lam = f.inner, lam * f.weight
    if isinstance(f, Indicator):
        return f.set.project(z)
    sp = z.space
    if isinstance(f, HalfSqDistTo):
        return sp.geodesic(z, f.anchor, lam / (1.0 + lam))
    if isinstance(f, DistTo):
        d = sp.distance(z, f.anchor)
        return f.anchor if d <= lam else sp.geodesic(z, f.anchor, lam / d)
    return None


def _start_points(f, z):
    pts = [z]
    if isinstance(f, Scaled):
        return _start_points(f.inner, z)
    if isinstance(f, Sum):
        for t in f.terms:
            pts += _start_points(t, z)[1:]
    elif isinstance(f, Indicator):
        pts.append(f.set.project(z))
    elif isinstance(f, (DistTo, HalfSqDistTo)):
        pts.append(f.anchor)
    return pts


def numeric_resolvent(f: FunctionSpec, lam: float, z: Point, tol: float = 1e-8) -> Point:
    """Minimize ``f(q) + d(z, q)^2 / (2 lam)`` without closed forms.

    In spaces with a global chart this runs coordinate-wise bounded Brent
    searches inside a trust region that doubles until it brackets the
    minimum, alternating over coordinates until no coordinate moves more
    than ``tol``; a Nelder-Mead pass then polishes kinks that coordinate
    moves cannot cross.  In metric trees each edge is searched separately
    (the objective is convex along every edge).
    """
    sp = z.space

    def F(q):
        return f(q) + sp.distance(z, q) ** 2 / (2.0 * lam)

    if isinstance(sp, MetricTree):
        best = (math.inf, None)
        for k, (_, _, w) in enumerate(sp.tree.edges):
            r = minimize_scalar(lambda s: F(sp.point(k, s)), bounds=(0.0, w), method="bounded",
                                options={"xatol": tol})
            for s in (0.0, w, r.x):
                v = F(sp.point(k, s))
                if v < best[0]:
                    best = (v, sp.point(k, s))
        return best[1]

    def G(v):
        try:
            return F(sp.unchart(v))
        except DomainError:
            return math.inf

    starts = [sp.chart(q) for q in _start_points(f, z)]
    x = min(starts, key=G).astype(float)
    if not math.isfinite(G(x)):
        raise DomainError("objective is +inf at every starting point; is f proper?")
    scale = max(1.0, float(np.max(np.abs(np.array(starts) - x))))
    for _ in range(200):
        moved = 0.0
        for i in range(len(x)):
            def line(t, i=i):
                y = x.copy()
                y[i] += t
                return G(y)

            h = scale
            g0 = line(0.0)
            while line(h) < g0 or line(-h) < g0:
                h *= 2.0
            r = minimize_scalar(line, bounds=(-h, h), method="bounded", options={"xatol": tol / 10})
            if r.fun < g0:
                x[i] += r.x
                moved = max(moved, abs(r.x))
        scale = max(moved, tol)
        if moved <= tol:
            break
    r = minimize(G, x, method="Nelder-Mead", options={"xatol": tol / 10, "fatol": 1e-15, "maxiter": 20000})
    if r.fun < G(x):
        x = r.x
    return sp.unchart(x)


def resolve(f: FunctionSpec, lam: float, z: Point) -> Point:
    """Resolvent ``argmin_q f(q) + d(z, q)^2 / (2 lam)``."""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    same_space(f, z)
    q = _closed_form_resolvent(f, lam, z)
    return q if q is not None else numeric_resolvent(f, lam, z)


# -- mappings -----------------------------------------------------------------


class Mapping:
    def __call__(self, z: Point, n: int = 0) -> Point:
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(Mapping):
    space: object

    def __call__(self, z, n=0):
        return z


@dataclass(frozen=True)
class Projection(Mapping):
    set: ConvexSet

    @property
    def space(self):
        return self.set.space

    def __call__(self, z, n=0):
        return self.set.project(z)


@dataclass(frozen=True)
class Resolvent(Mapping):
    f: FunctionSpec
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")

    @property
    def space(self):
        return self.f.space

    def __call__(self, z, n=0):
        return resolve(self.f, self.lam, z)


@dataclass(frozen=True)
class Composition(Mapping):
    """``T_1 o ... o T_r``: the last mapping is applied first."""

    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise DomainError("empty composition")

    @property
    def space(self):
        return self.maps[0].space

    def __call__(self, z, n=0):
        for T in reversed(self.maps):
            z = T(z, n)
        return z


@dataclass(frozen=True)
class WithError(Mapping):
    """``inner`` followed by a displacement of exactly ``schedule.value(n)``."""

    inner: Mapping
    schedule: object
    seed: int = 0

    @property
    def space(self):
        return self.inner.space

    def __call__(self, z, n=0):
        q = self.inner(z, n)
        eps = self.schedule.value(n)
        if eps == 0:
            return q
        return q.space.perturb(q, eps, np.random.default_rng((self.seed, 2, n)))


@dataclass(frozen=True)
class CoordinateMap(Mapping):
    """Arbitrary map given on coordinates, e.g. ``x -> 2 x^2`` on the line."""

    space: object
    fn: Callable = field(compare=False)
    name: str = "map"

    def __call__(self, z, n=0):
        return self.space.point(*self.fn(z.coords))


def apply(T: Mapping, z: Point, n: int = 0) -> Point:
    return T(z, n)


# -- property checkers ----------------------------------------------------------


@dataclass
class PropertyReport:
    """Outcome of a sampled inequality check."""

    property: str
    samples: int
    worst: float
    witness: Optional[tuple] = None
    params: dict = field(default_factory=dict)
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.worst >= -self.tol

    def line(self) -> str:
        extra = "".join(f" {k}={v}" for k, v in self.params.items())
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.property}{extra} samples={self.samples} worst={self.worst:.3e}"


def check_firm_nonexpansive(T: Mapping, x: Point, y: Point, lam_grid=None, tol: float = 1e-9) -> PropertyReport:
    """Worst slack of ``d((1-l)x + l Tx, (1-l)y + l Ty) - d(Tx, Ty)`` over ``l`` in ``lam_grid``."""
    sp = same_space(x, y)
    lam_grid = np.linspace(0.0, 0.99, 12) if lam_grid is None else lam_grid
    tx, ty = T(x), T(y)
    dt = sp.distance(tx, ty)
    worst, witness = math.inf, None
    for lam in lam_grid:
        if not 0.0 <= lam < 1.0:
            raise DomainError(f"lambda grid must lie in [0, 1), got {lam}")
        r = sp.distance(sp.geodesic(x, tx, lam), sp.geodesic(y, ty, lam)) - dt
        if r < worst:
            worst = r
            witness = (x, y, float(lam))
    return PropertyReport("firm_nonexpansive", len(lam_grid), worst, witness if worst < -tol else None, tol=tol)


def check_p1(T: Mapping, u: Point, x: Point, l: float, beta: float, fix_tol: float = 1e-10) -> float:
    """Slack of ``d(Tx,u)^l <= d(x,u)^l - beta d(Tx,x)^l`` at a fixed point ``u``."""
    sp = same_space(u, x)
    if sp.distance(T(u), u) > fix_tol:
        raise PreconditionError(f"{u} is not a fixed point of the mapping")
    tx = T(x)
    return sp.distance(x, u) ** l - beta * sp.distance(tx, x) ** l - sp.distance(tx, u) ** l


def check_p2(T: Mapping, x: Point, y: Point) -> float:
    """Slack of ``2d(Tx,Ty)^2 <= d(x,Ty)^2 + d(y,Tx)^2 - d(x,Tx)^2 - d(y,Ty)^2``."""
    sp = same_space(x, y)
    tx, ty = T(x), T(y)
    d = sp.distance
    return d(x, ty) ** 2 + d(y, tx) ** 2 - d(x, tx) ** 2 - d(y, ty) ** 2 - 2 * d(tx, ty) ** 2


def check_resolvent_inequality(f: FunctionSpec, lam: float, x: Point, y: Point) -> float:
    """Slack of the variational inequality satisfied by ``J = resolve(f, lam, x)``:

    f(J) + d(J,x)^2/(2 lam) <= f(y) + d(x,y)^2/(2 lam) - d(J,y)^2/(2 lam).
    """
    sp = same_space(x, y)
    if not sp.cat0:
        raise UnsupportedSpaceError("the resolvent inequality is stated for CAT(0) spaces")
    j = resolve(f, lam, x)
    d = sp.distance
    k = 1.0 / (2.0 * lam)
    return f(y) + k * d(x, y) ** 2 - k * d(j, y) ** 2 - f(j) - k * d(j, x) ** 2


def check_fix_equivalence(mappings, x: Point, witness: Point, tol: float = 1e-8, tol_each: float = None):
    """``(fixes_composition, fixes_each)`` for a candidate ``x``.

    ``witness`` must be a common fixed point of all mappings.  When every
    mapping satisfies (P1) the fixed points of the composition are exactly
    the common fixed points, so both flags should agree.
    """
    tol_each = tol if tol_each is None else tol_each
    sp = same_space(x, witness)
    for T in mappings:
        if sp.distance(T(witness), witness) > tol:
            raise PreconditionError("witness is not a common fixed point")
    comp = Composition(tuple(mappings))
    fixes_comp = sp.distance(comp(x), x) <= tol
    fixes_each = all(sp.distance(T(x), x) <= tol_each for T in mappings)
    return fixes_comp, fixes_each
