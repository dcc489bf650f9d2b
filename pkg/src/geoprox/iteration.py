"""Cyclic inexact iteration and the two-operator alternating scheme.

Both runners record a full :class:`IterationTrace`: iterates, consecutive
step lengths, the residuals ``d(x_n, T_i x_n)`` and optionally the distance
to a reference point (typically a known common fixed point).
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import zeta

from .geometry import DomainError, Point, same_space


# -- error schedules ----------------------------------------------------------


class ErrorSchedule:
    """Summable sequence of error magnitudes ``eps_0, eps_1, ...``."""

    def value(self, n: int) -> float:
        raise NotImplementedError

    def total(self) -> float:
        raise NotImplementedError

    def tail_sum(self, n: int) -> float:
        """``sum_{k >= n} eps_k``."""
        return self.total() - self.partial_sum(n)

    def partial_sum(self, n: int) -> float:
        """``sum_{k < n} eps_k``."""
        return math.fsum(self.value(k) for k in range(n))

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True)
class Zero(ErrorSchedule):
    def value(self, n):
        return 0.0

    def total(self):
        return 0.0

    def partial_sum(self, n):
        return 0.0

    @property
    def is_zero(self):
        return True


@dataclass(frozen=True)
class PowerLaw(ErrorSchedule):
    """``eps_n = a (n + 1)^(-q)`` with ``q > 1``."""

    a: float
    q: float

    def __post_init__(self):
        if self.a < 0:
            raise DomainError(f"amplitude must be >= 0, got {self.a}")
        if not self.q > 1:
            raise DomainError(f"exponent must be > 1 for summability, got {self.q}")

    def value(self, n):
        return self.a * (n + 1.0) ** (-self.q)

    def total(self):
        return self.a * float(zeta(self.q, 1))

    def tail_sum(self, n):
        # Hurwitz zeta: sum_{k>=n} (k+1)^-q
        return self.a * float(zeta(self.q, n + 1))

    @property
    def is_zero(self):
        return self.a == 0


@dataclass(frozen=True)
class Geometric(ErrorSchedule):
    """``eps_n = a rho^n`` with ``0 <= rho < 1``."""

    a: float
    rho: float

    def __post_init__(self):
        if self.a < 0:
            raise DomainError(f"amplitude must be >= 0, got {self.a}")
        if not 0 <= self.rho < 1:
            raise DomainError(f"ratio must lie in [0, 1), got {self.rho}")

    def value(self, n):
        return self.a * self.rho ** n

    def total(self):
        return self.a / (1.0 - self.rho)

    def tail_sum(self, n):
        return self.a * self.rho ** n / (1.0 - self.rho)

    @property
    def is_zero(self):
        return self.a == 0


@dataclass(frozen=True)
class Explicit(ErrorSchedule):
    """Finite list of magnitudes, zero afterwards."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if any(v < 0 or not math.isfinite(v) for v in self.values):
            raise DomainError("explicit errors must be finite and nonnegative")

    def value(self, n):
        return self.values[n] if n < len(self.values) else 0.0

    def total(self):
        return math.fsum(self.values)

    def partial_sum(self, n):
        return math.fsum(self.values[:n])

    @property
    def is_zero(self):
        return not any(self.values)


def schedule_value(s: ErrorSchedule, n: int) -> float:
    return s.value(n)


# -- problems and traces ------------------------------------------------------


class Termination(str, enum.Enum):
    STEP_TOL = "StepTol"
    MAX_STEPS = "MaxSteps"
    ESCAPED = "Escaped"


@dataclass(frozen=True)
class CyclicProblem:
    """``x_{n+1}`` within ``eps_n`` of ``T_{n mod r + 1} x_n``."""

    mappings: tuple
    start: Point
    errors: ErrorSchedule = Zero()
    max_steps: int = 10000
    stop_tol: float = 1e-12
    escape_radius: Optional[float] = None
    reference: Optional[Point] = None
    seed: int = 0
    thin: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mappings", tuple(self.mappings))
        if not self.mappings:
            raise DomainError("need at least one mapping")
        _check_common(self.mappings, self.start, self.reference)
        _check_budget(self.max_steps, self.stop_tol, self.thin)


@dataclass(frozen=True)
class AlternatingProblem:
    """``y_n`` within ``eps_n`` of ``T1 x_n``, ``x_{n+1}`` within ``delta_n`` of ``T2 y_n``."""

    T1: object
    T2: object
    start: Point
    eps: ErrorSchedule = Zero()
    delta: ErrorSchedule = Zero()
    max_steps: int = 10000
    stop_tol: float = 1e-12
    escape_radius: float = 50.0
    reference: Optional[Point] = None
    seed: int = 0
    thin: int = 1

    def __post_init__(self):
        _check_common((self.T1, self.T2), self.start, self.reference)
        _check_budget(self.max_steps, self.stop_tol, self.thin)
        if not self.escape_radius > 0:
            raise DomainError(f"escape_radius must be positive, got {self.escape_radius}")


def _check_common(mappings, start, reference):
    for T in mappings:
        sp = getattr(T, "space", None)
        if sp is not None and sp != start.space:
            raise DomainError(f"mapping {T!r} lives in {sp}, start in {start.space}")
    if reference is not None:
        same_space(start, reference)


def _check_budget(max_steps, stop_tol, thin):
    if max_steps < 0:
        raise DomainError(f"max_steps must be >= 0, got {max_steps}")
    if stop_tol < 0:
        raise DomainError(f"stop_tol must be >= 0, got {stop_tol}")
    if thin < 1:
        raise DomainError(f"thin must be >= 1, got {thin}")


@dataclass
class IterationTrace:
    """Recorded run.

    ``steps[n] = d(x_n, x_{n+1})``; ``residuals[n][i] = d(x_n, T_{i+1} x_n)``
    and ``fejer[n] = d(x_n, reference)`` are recorded for every iterate
    including the last.  With ``thin > 1`` only every ``thin``-th iterate is
    kept in ``points`` (and ``ys``); the scalar columns are always complete.
    """

    space: object
    mode: str
    points: list
    steps: list
    residuals: list
    fejer: Optional[list]
    termination: Termination
    ys: Optional[list] = None
    stop_tol: float = 0.0
    escape_radius: Optional[float] = None
    exact: bool = True
    thin: int = 1
    r: int = 1

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> Point:
        return self.points[-1]

    def escape_distances(self) -> list:
        x0 = self.points[0]
        return [self.space.distance(x0, x) for x in self.points]

    def write_csv(self, fh) -> None:
        """Columns: n, x_*, [y_*], step, residual_1..r, fejer."""
        dim = len(self.points[0].coords)
        hdr = ["n"] + [f"x_{k + 1}" for k in range(dim)]
        if self.ys is not None:
            hdr += [f"y_{k + 1}" for k in range(dim)]
        hdr += ["step"] + [f"residual_{i + 1}" for i in range(self.r)] + ["fejer"]
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(hdr)
        for j, x in enumerate(self.points):
            n = min(j * self.thin, len(self.steps))
            row = [n] + [_fmt(c) for c in x.coords]
            if self.ys is not None:
                row += [_fmt(c) for c in self.ys[j].coords] if j < len(self.ys) else [""] * dim
            row.append(_fmt(self.steps[n]) if n < len(self.steps) else "")
            row += [_fmt(v) for v in self.residuals[n]]
            row.append(_fmt(self.fejer[n]) if self.fejer is not None else "")
            w.writerow(row)

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _fmt(v):
    return str(int(v)) if isinstance(v, (int, np.integer)) else repr(float(v))


def read_csv(fh) -> dict:
    """Parse a trace CSV into ``{"x": array, "y": array or None, ...}`` columns."""
    rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise DomainError("trace CSV has no iterates")
    hdr, body = rows[0], rows[1:]

    def cols(prefix):
        idx = [k for k, h in enumerate(hdr) if h.startswith(prefix)]
        if not idx:
            return None
        vals = [[float(r[k]) for k in idx] for r in body if r[idx[0]] != ""]
        return np.array(vals)

    return {"n": [int(r[0]) for r in body], "x": cols("x_"), "y": cols("y_"), "header": hdr}


# -- runners ------------------------------------------------------------------


def _rng(seed, stream, n):
    return np.random.default_rng((seed, stream, n))


def _nudge(q, eps, seed, stream, n):
    if eps == 0:
        return q
    return q.space.perturb(q, eps, _rng(seed, stream, n))


def run_cyclic(problem: CyclicProblem) -> IterationTrace:
    """Run the cyclic scheme ``x_{n+1} ~ T_{n mod r + 1}(x_n)``.

    Stops after ``r`` consecutive steps below ``stop_tol`` (a single short
    step inside a cycle does not mean the cycle has settled), when
    ``d(x_0, x_n)`` exceeds ``escape_radius`` (if set), or at ``max_steps``.
    """
    pr = problem
    sp = pr.start.space
    maps, r = pr.mappings, len(pr.mappings)
    dist = sp.distance
    x = pr.start
    points, steps, residuals = [x], [], []
    fejer = [] if pr.reference is not None else None
    quiet = 0
    term = Termination.MAX_STEPS
    for n in range(pr.max_steps + 1):
        images = [T(x) for T in maps]
        residuals.append(tuple(dist(x, t) for t in images))
        if fejer is not None:
            fejer.append(dist(x, pr.reference))
        if n == pr.max_steps:
            break
        x_new = _nudge(images[n % r], pr.errors.value(n), pr.seed, 0, n)
        step = dist(x, x_new)
        steps.append(step)
        x = x_new
        if (n + 1) % pr.thin == 0:
            points.append(x)
        quiet = quiet + 1 if step < pr.stop_tol else 0
        if quiet >= r:
            term = Termination.STEP_TOL
        elif pr.escape_radius is not None and dist(pr.start, x) > pr.escape_radius:
            term = Termination.ESCAPED
        else:
            continue
        images = [T(x) for T in maps]
        residuals.append(tuple(dist(x, t) for t in images))
        if fejer is not None:
            fejer.append(dist(x, pr.reference))
        break
    if len(steps) % pr.thin and points[-1] is not x:
        points.append(x)
    return IterationTrace(sp, "cyclic", points, steps, residuals, fejer, term, None, pr.stop_tol,
                          pr.escape_radius, pr.errors.is_zero, pr.thin, r)


def run_alternating(problem: AlternatingProblem) -> IterationTrace:
    """Run ``y_n ~ T1(x_n)``, ``x_{n+1} ~ T2(y_n)`` with mandatory escape detection.

    ``steps`` are the ``x``-steps; StepTol needs two consecutive short
    ``x``-steps.  ``ys[n]`` pairs with ``points[n]``; the last iterate has
    no partner.
    """
    pr = problem
    sp = pr.start.space
    dist = sp.distance
    x = pr.start
    points, ys, steps, residuals = [x], [], [], []
    fejer = [] if pr.reference is not None else None
    quiet = 0
    term = Termination.MAX_STEPS
    n = 0
    while True:
        t1 = pr.T1(x, n)
        residuals.append((dist(x, t1), dist(x, pr.T2(x, n))))
        if fejer is not None:
            fejer.append(dist(x, pr.reference))
        if n == pr.max_steps or term is not Termination.MAX_STEPS:
            break
        y = _nudge(t1, pr.eps.value(n), pr.seed, 0, n)
        x_new = _nudge(pr.T2(y, n), pr.delta.value(n), pr.seed, 1, n)
        step = dist(x, x_new)
        steps.append(step)
        keep = n % pr.thin == 0
        if keep:
            ys.append(y)
        x = x_new
        n += 1
        if n % pr.thin == 0:
            points.append(x)
        quiet = quiet + 1 if step < pr.stop_tol else 0
        if quiet >= 2:
            term = Termination.STEP_TOL
        elif dist(pr.start, x) > pr.escape_radius:
            term = Termination.ESCAPED
    if n % pr.thin and points[-1] is not x:
        points.append(x)
    exact = pr.eps.is_zero and pr.delta.is_zero
    return IterationTrace(sp, "alternating", points, steps, residuals, fejer, term, ys, pr.stop_tol,
                          pr.escape_radius, exact, pr.thin, 2)
