"""Post-hoc analysis of traces.

Asymptotic-center estimates, the three-regime classification of
alternating projections, and the objective of the two-function
minimization problem solved by alternating resolvents.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .convex_sets import ConvexSet, set_distance
from .geometry import DomainError, MetricTree, Point, same_space
from .iteration import IterationTrace, Termination
from .operators import FunctionSpec, resolve


class DivergenceSignal(RuntimeError):
    """The points handed to an estimator are not plausibly bounded."""


@dataclass(frozen=True)
class MinProblem:
    """Minimize ``Phi(x, y) = f(x) + g(y) + d(x, y)^2 / (2 lam)``."""

    f: FunctionSpec
    g: FunctionSpec
    lam: float
    m: Optional[float] = None

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        same_space(self.f, self.g)

    @property
    def space(self):
        return self.f.space


def phi(prob: MinProblem, x: Point, y: Point) -> float:
    fx = prob.f(x)
    gy = prob.g(y)
    if math.isinf(fx) or math.isinf(gy):
        return math.inf
    return fx + gy + x.space.distance(x, y) ** 2 / (2.0 * prob.lam)


def check_solution_pair(prob: MinProblem, xstar: Point, tol: float = 1e-8):
    """``(ok, pair)``: whether ``xstar`` is fixed by ``J_f o J_g`` within ``tol``.

    When it is, ``pair = (xstar, J_g xstar)`` minimizes ``Phi``.
    """
    y = resolve(prob.g, prob.lam, xstar)
    x1 = resolve(prob.f, prob.lam, y)
    ok = xstar.space.distance(xstar, x1) <= tol
    return ok, ((xstar, y) if ok else None)


# -- asymptotic centers -------------------------------------------------------


def _max_dist(sp, c, pts):
    return max(sp.distance(c, x) for x in pts)


def asymptotic_center_estimate(tail, tol: float = 1e-10, escape_radius: float = 50.0):
    """Approximate the minimizer of ``y -> max_n d(y, x_n)`` over a finite tail.

    Geodesic averaging toward the farthest point gives a start; in spaces
    with a chart a Nelder-Mead refinement follows, run on an active set of
    far points that grows until it contains the true farthest point.  In
    metric trees the midpoint of a diametral pair is exact.

    Returns ``(center, radius)`` with radius the achieved maximum.
    """
    pts = list(tail)
    if not pts:
        raise DomainError("empty tail")
    sp = same_space(*pts)
    x0 = pts[0]
    far = max(pts, key=lambda x: sp.distance(x0, x))
    a = max(pts, key=lambda x: sp.distance(far, x))
    # d(far, a) is within a factor 2 of the diameter (exact in trees)
    if sp.distance(far, a) > escape_radius:
        raise DivergenceSignal(f"tail spreads beyond {escape_radius}")
    if isinstance(sp, MetricTree):
        c = sp.geodesic(far, a, 0.5)
        return c, _max_dist(sp, c, pts)

    c = x0
    for k in range(1, 200):
        far = max(pts, key=lambda x: sp.distance(c, x))
        c = sp.geodesic(c, far, 1.0 / (k + 1))
    if not sp.has_chart:
        return c, _max_dist(sp, c, pts)

    def refine(c, active):
        def obj(v):
            try:
                q = sp.unchart(v)
            except DomainError:
                return math.inf
            return _max_dist(sp, q, active)

        best = sp.chart(c)
        for _ in range(4):
            r = minimize(obj, best, method="Nelder-Mead",
                         options={"xatol": tol, "fatol": tol, "maxiter": 4000, "adaptive": True})
            if r.fun >= obj(best) - tol:
                break
            best = r.x
        return sp.unchart(best)

    order = sorted(pts, key=lambda x: -sp.distance(c, x))
    active = order[:32]
    for _ in range(20):
        c2 = refine(c, active)
        far = max(pts, key=lambda x: sp.distance(c2, x))
        if _max_dist(sp, c2, pts) <= _max_dist(sp, c2, active) + tol:
            if _max_dist(sp, c2, pts) <= _max_dist(sp, c, pts):
                c = c2
            break
        active.append(far)
        c = c2 if _max_dist(sp, c2, pts) <= _max_dist(sp, c, pts) else c
    return c, _max_dist(sp, c, pts)


def delta_convergence_proxy(points, tol: float = 1e-6) -> bool:
    """True when the asymptotic-center estimates of the two halves of the
    last half of ``points`` lie within ``tol`` of each other.

    This is evidence, not a decision procedure.
    """
    pts = list(points)
    tail = pts[len(pts) // 2:]
    h = len(tail) // 2
    if h == 0:
        return False
    c1, _ = asymptotic_center_estimate(tail[:h])
    c2, _ = asymptotic_center_estimate(tail[h:])
    return c1.space.distance(c1, c2) <= tol


# -- regime classification ----------------------------------------------------


class Regime(str, enum.Enum):
    COMMON_FIXED_POINT = "CommonFixedPoint"
    BEST_APPROXIMATION_PAIR = "BestApproximationPair"
    DIVERGENT = "Divergent"


@dataclass
class RegimeVerdict:
    regime: Regime
    pair: Optional[tuple] = None
    value: Optional[float] = None
    inconclusive: bool = False
    evidence: dict = field(default_factory=dict)

    def line(self) -> str:
        s = f"regime={self.regime.value}"
        if self.value is not None:
            s += f" value={self.value!r}"
        if self.inconclusive:
            s += " inconclusive=true"
        return s + "".join(f" {k}={v!r}" for k, v in self.evidence.items())


def classify_alternating(trace: IterationTrace, A: ConvexSet, B: ConvexSet, tol: float = 1e-5,
                         oracle: bool = False) -> RegimeVerdict:
    """Sort an alternating-projection run (``T1 = P_B``, ``T2 = P_A``) into
    common fixed point, best approximation pair, or divergence.

    ``tol`` separates the consistent case from a positive gap and must be
    at least ten times the run's ``stop_tol``.  A run that hit ``max_steps``
    is still classified from its last pair but flagged inconclusive.  With
    ``oracle=True`` the independent set-distance value is added to the
    evidence.
    """
    if tol < 10 * trace.stop_tol:
        raise DomainError(f"tol={tol} must be at least 10 * stop_tol={trace.stop_tol}")
    if trace.ys is None:
        raise DomainError("classification needs an alternating trace")
    sp = trace.space
    x0, xn = trace.points[0], trace.points[-1]
    ev = {
        "termination": trace.termination.value,
        "steps": trace.n_steps,
        "final_step": trace.steps[-1] if trace.steps else 0.0,
        "escape_distance": sp.distance(x0, xn),
    }
    if trace.termination is Termination.ESCAPED:
        return RegimeVerdict(Regime.DIVERGENT, evidence=ev)
    if not trace.ys:
        # started on a fixed point
        gap = trace.residuals[-1][0]
        pair = (xn, B.project(xn))
    else:
        if trace.thin != 1:
            raise DomainError("classification needs an unthinned trace")
        pair = (trace.points[-2], trace.ys[-1])
        gap = sp.distance(*pair)
    ev["gap"] = gap
    if oracle:
        ev["oracle"] = set_distance(A, B).value
    inconclusive = trace.termination is Termination.MAX_STEPS
    if gap <= tol:
        return RegimeVerdict(Regime.COMMON_FIXED_POINT, pair, gap, inconclusive, ev)
    return RegimeVerdict(Regime.BEST_APPROXIMATION_PAIR, pair, gap, inconclusive, ev)
