"""Explicit rates of asymptotic regularity and their validation on traces.

Brackets in the rate formulas are floors.  The formulas are evaluated in
exact rational arithmetic on the decimal value of each input (``0.1`` is
read as ``1/10``), so boundary cases such as ``theta_min(0.1, 1, 0, 0.5)``
come out as the integer a hand evaluation gives rather than one less.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .geometry import DomainError, Point
from .iteration import IterationTrace, Termination
from .operators import PreconditionError


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"non-finite input {x}")
    return Fraction(repr(x))


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise DomainError(f"{k} must be positive, got {v}")


def _floor_pow(base: Fraction, p) -> int:
    """``floor(base^p)`` exactly when ``p`` is an integer, else via floats."""
    pq = _q(p)
    if pq.denominator == 1:
        return math.floor(base ** pq.numerator)
    v = float(base) ** float(p)
    k = math.floor(v)
    # guard against v landing just below an integer it equals exactly
    return k + 1 if math.isclose(v, k + 1, rel_tol=1e-15, abs_tol=0) else k


def _scaled_bound(eps, b, c, p, k):
    """``floor((2/c) (k p b^p / (c eps^p))^p)`` with ``k`` the leading factor."""
    e, bq, cq, pq = _q(eps), _q(b), _q(c), _q(p)
    if pq.denominator == 1:
        inner = k * pq * bq ** pq.numerator / (cq * e ** pq.numerator)
        return math.floor(Fraction(2) / cq * inner ** pq.numerator)
    inner = float(k * pq / cq) * (float(b) / float(eps)) ** float(p)
    return _floor_pow(Fraction(2) / cq * _q(inner ** float(p)), 1)


def theta2(eps: float, b: float, c: float, p: float) -> int:
    """Rate for two mappings: ``d(x_n, x_{n+1}) <= eps`` for ``n >= theta2``.

    Returns ``2 floor((2/c) (4 p b^p / (c eps^p))^p)`` if ``eps < 2b`` and
    0 otherwise.
    """
    _positive(eps=eps, b=b, c=c)
    if not p > 1:
        raise DomainError(f"p must be > 1, got {p}")
    if _q(eps) >= 2 * _q(b):
        return 0
    return 2 * _scaled_bound(eps, b, c, p, 4)


def theta_tilde2(eps, b, c, p) -> int:
    """Residual rate for two mappings, ``1 + theta2``."""
    return 1 + theta2(eps, b, c, p)


def theta_r(eps, b, c, p, r: int) -> int:
    """Rate for ``r`` mappings: ``r floor((2/c) (2 r p b^p / (c eps^p))^p)``, 0 if ``eps >= 2b``."""
    _positive(eps=eps, b=b, c=c)
    if not p > 1:
        raise DomainError(f"p must be > 1, got {p}")
    if int(r) != r or r < 1:
        raise DomainError(f"r must be a positive integer, got {r}")
    r = int(r)
    if _q(eps) >= 2 * _q(b):
        return 0
    return r * _scaled_bound(eps, b, c, p, 2 * r)


def theta_tilde_r(eps, b, c, p, r: int) -> int:
    """Residual rate for ``r`` mappings: ``floor(r/2) + theta2(eps / (2 ceil(r/2) - 1), b, c, p)``."""
    if int(r) != r or r < 1:
        raise DomainError(f"r must be a positive integer, got {r}")
    r = int(r)
    _positive(eps=eps)
    return r // 2 + theta2(_q(eps) / (2 * ((r + 1) // 2) - 1), b, c, p)


def theta_min(eps, b, m, lam) -> int:
    """Rate for alternating resolvents: ``floor(2 lam (b - m) / eps^2) + 1``."""
    _positive(eps=eps, lam=lam)
    if _q(b) < _q(m):
        raise DomainError(f"need b >= m, got b={b}, m={m}")
    return math.floor(2 * _q(lam) * (_q(b) - _q(m)) / _q(eps) ** 2) + 1


KINDS = {
    "theta2": (theta2, ("eps", "b", "c", "p")),
    "theta-tilde2": (theta_tilde2, ("eps", "b", "c", "p")),
    "theta-r": (theta_r, ("eps", "b", "c", "p", "r")),
    "theta-tilde-r": (theta_tilde_r, ("eps", "b", "c", "p", "r")),
    "theta-min": (theta_min, ("eps", "b", "m", "lam")),
}


@dataclass(frozen=True)
class RateCertificate:
    kind: str
    inputs: dict
    bound: int

    @classmethod
    def make(cls, kind: str, **inputs) -> "RateCertificate":
        if kind not in KINDS:
            raise DomainError(f"unknown certificate kind {kind!r}; choose from {sorted(KINDS)}")
        fn, names = KINDS[kind]
        missing = [k for k in names if k not in inputs]
        if missing:
            raise DomainError(f"{kind} needs {', '.join(missing)}")
        return cls(kind, {k: inputs[k] for k in names}, fn(*(inputs[k] for k in names)))


@dataclass
class CertificateReport:
    kind: str
    bound: int
    holds: bool
    inconclusive: bool = False
    first_violation: Optional[int] = None
    checked: int = 0
    worst: float = 0.0
    notes: list = field(default_factory=list)

    def line(self) -> str:
        state = "INCONCLUSIVE" if self.inconclusive else ("HOLDS" if self.holds else "VIOLATED")
        s = f"{self.kind} bound={self.bound} {state} checked={self.checked} worst={self.worst:.3e}"
        if self.first_violation is not None:
            s += f" first_violation={self.first_violation}"
        return s


def _scan(kind, bound, values, eps, trace, start=None) -> CertificateReport:
    start = bound if start is None else start
    rep = CertificateReport(kind, bound, True)
    tail = list(enumerate(values))[start:]
    rep.checked = len(tail)
    rep.worst = max((v for _, v in tail), default=0.0)
    for n, v in tail:
        if v > eps:
            rep.holds = False
            rep.first_violation = n
            break
    if len(values) <= start and trace.termination is not Termination.STEP_TOL:
        rep.inconclusive = True
        rep.notes.append(f"trace has {len(values)} values, bound needs index {start}")
    elif len(values) <= start or trace.termination is Termination.STEP_TOL:
        # a converged run stands in for its own tail; its last value must already comply
        last = values[-1] if values else 0.0
        if last > eps or trace.stop_tol > eps:
            rep.inconclusive = rep.holds
            rep.notes.append("run stopped before the bound with a final value above eps")
    return rep


def validate_certificate(cert: RateCertificate, trace: IterationTrace, eps: float,
                         fixed_point: Optional[Point] = None, min_problem=None,
                         minimizer: Optional[Point] = None, phi_star: Optional[float] = None
                         ) -> CertificateReport:
    """Check a trace against a rate certificate at accuracy ``eps``.

    Step-rate kinds (``theta2``, ``theta-r``) check ``d(x_n, x_{n+1}) <= eps``
    for ``n >= bound``; residual kinds (``theta-tilde*``) check every
    ``d(x_n, T_i x_n) <= eps`` from the bound on.  These need an exact trace
    and a ``fixed_point`` u with ``d(x_0, u) <= b``.

    ``theta-min`` needs ``min_problem`` and checks both its step rate and
    ``Phi(x_n, y_n) <= Phi* + eps`` for
    ``n >= 1 + theta_min(eps lam / d(x_0, x*), b, m, lam)`` where ``x*`` is
    ``minimizer`` and ``Phi*`` is ``phi_star``.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    if not trace.exact:
        raise PreconditionError("rate certificates assume exact evaluation (zero error schedules)")
    if cert.kind == "theta-min":
        return _validate_min(cert, trace, eps, min_problem, minimizer, phi_star)
    if fixed_point is None:
        raise PreconditionError("a fixed point u certifying b is required")
    sp = trace.space
    d0 = sp.distance(trace.points[0], fixed_point)
    if d0 > cert.inputs["b"]:
        raise PreconditionError(f"b={cert.inputs['b']} does not bound d(x0, u)={d0}")
    if cert.kind in ("theta2", "theta-r"):
        return _scan(cert.kind, cert.bound, trace.steps, eps, trace)
    worst = [max(r) for r in trace.residuals]
    return _scan(cert.kind, cert.bound, worst, eps, trace)


def _validate_min(cert, trace, eps, prob, xstar, phi_star):
    from .analysis import phi

    if prob is None or trace.ys is None:
        raise PreconditionError("theta-min needs a MinProblem and an alternating trace")
    if trace.thin != 1:
        raise PreconditionError("theta-min validation needs an unthinned trace")
    b, m, lam = cert.inputs["b"], cert.inputs["m"], cert.inputs["lam"]
    if lam != prob.lam:
        raise PreconditionError(f"certificate lambda {lam} differs from the problem's {prob.lam}")
    if len(trace.points) > 1:
        b_obs = phi(prob, trace.points[1], trace.ys[0])
        if b_obs > b:
            raise PreconditionError(f"b={b} does not bound Phi(x1, y0)={b_obs}")
    rep = _scan("theta-min", cert.bound, trace.steps, eps, trace)
    if xstar is None or phi_star is None:
        return rep
    d0 = trace.space.distance(trace.points[0], xstar)
    start = 1 if d0 == 0 else 1 + theta_min(_q(eps) * _q(lam) / _q(d0), b, m, lam)
    vals = [phi(prob, x, y) - phi_star for x, y in zip(trace.points, trace.ys)]
    rep2 = _scan("theta-min/phi", start, vals, eps, trace)
    rep2.notes.append(f"step-rate part: {rep.line()}")
    rep2.holds = rep2.holds and rep.holds
    rep2.inconclusive = rep2.inconclusive or rep.inconclusive
    if rep2.first_violation is None:
        rep2.first_violation = rep.first_violation
    return rep2
