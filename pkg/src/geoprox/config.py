"""Experiment files.

An experiment is an INI file read with :mod:`configparser`.  Sections:

``[experiment]``
    ``mode`` (``cyclic``, ``alternating`` or ``minimize``), ``seed``.
``[space]``
    ``kind`` = ``euclidean`` (``dim``), ``halfplane``, ``sphere``
    (``kappa``, ``diameter``) or ``tree`` (``vertices`` = space separated
    names, ``edges`` = comma separated ``u-v:length``).
``[set.NAME]``
    ``kind`` = ``vertical`` (``a``), ``semicircle`` (``center``,
    ``radius``), ``line`` (``through``), ``segment`` (``start``, ``end``),
    ``ball`` (``center``, ``radius``), ``halfspace`` (``normal``,
    ``offset``), ``affine`` (``origin``, ``basis``) or ``subtree``
    (``vertices``).
``[function.NAME]``
    ``kind`` = ``indicator`` (``set``), ``dist`` / ``halfsq``
    (``anchor``), ``scaled`` (``inner``, ``weight``) or ``sum`` (``terms``).
``[problem]``
    ``start``; ``mappings`` (cyclic) or ``T1``, ``T2`` (alternating), each a
    mapping term ``P:SET`` or ``J:FUNCTION:LAMBDA``, comma separated for a
    list; ``f``, ``g``, ``lambda``, ``m`` (minimize, where ``T1 = J:g``
    and ``T2 = J:f``); ``errors`` / ``delta`` schedules (``zero``,
    ``powerlaw A Q``, ``geometric A RHO``, ``explicit E0 E1 ...``);
    ``max_steps``, ``stop_tol``, ``escape_radius``, ``reference``,
    ``thin``.
``[certificate.NAME]``
    ``kind`` plus the inputs of that rate (``eps``, ``b``, ``c``, ``p``,
    ``r``, ``m``, ``lam``); ``check_eps`` defaults to ``eps``;
    ``fixed_point`` or ``minimizer`` and ``phi_star`` as evidence.
``[classify]``
    ``A``, ``B`` (set names, ``T1 = P:B`` and ``T2 = P:A``), ``tol``,
    ``oracle``.
``[output]``
    ``trace``, ``summary``: file names relative to the output directory.
``[plot]``
    ``xmin``, ``xmax``, ``ymin``, ``ymax``, ``svg``, ``title``.

Points are written as space separated coordinates; in a tree they are
``EDGE OFFSET`` or ``@VERTEX``.  Multiple points are separated by ``;``.
"""
from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import MinProblem
from .certificates import KINDS, RateCertificate
from .convex_sets import AffineSet, Ball, GeodesicLine, GeodesicSegment, HalfSpace, Subtree
from .geometry import Euclidean, GeometryError, HalfPlane, MetricTree, SphericalCap, TreeSpec
from .iteration import AlternatingProblem, CyclicProblem, Explicit, Geometric, PowerLaw, Zero
from .operators import (DistTo, HalfSqDistTo, Indicator, Projection, Resolvent, Scaled, Sum)


class ConfigError(ValueError):
    """Invalid experiment file; ``field`` names the offending entry."""

    def __init__(self, fld: str, msg: str):
        super().__init__(f"{fld}: {msg}")
        self.field = fld


@dataclass
class ExperimentConfig:
    """Parsed but uninterpreted experiment: ``{section: {key: value}}``."""

    sections: dict = field(default_factory=dict)

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section, key):
        v = self.get(section, key)
        if v is None or v == "":
            raise ConfigError(f"{section}.{key}", "missing")
        return v

    def named(self, prefix):
        return {s.split(".", 1)[1]: kv for s, kv in self.sections.items() if s.startswith(prefix + ".")}

    def serialize(self) -> str:
        cp = _parser()
        for s, kv in self.sections.items():
            cp[s] = kv
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _parser():
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    cp.optionxform = str
    return cp


def parse(text: str) -> ExperimentConfig:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError("file", str(e).splitlines()[0]) from None
    return ExperimentConfig({s: {k: v.strip() for k, v in cp[s].items()} for s in cp.sections()})


def load(path) -> ExperimentConfig:
    return parse(Path(path).read_text())


# -- interpretation -----------------------------------------------------------


@dataclass
class Experiment:
    config: ExperimentConfig
    mode: str
    seed: int
    space: object
    sets: dict
    functions: dict
    problem: object
    min_problem: MinProblem = None
    certificates: list = field(default_factory=list)
    classify: dict = None


def _num(fld, v, *, positive=False, nonneg=False, integer=False):
    try:
        x = int(v) if integer else float(v)
    except (TypeError, ValueError):
        raise ConfigError(fld, f"expected a number, got {v!r}") from None
    if not integer and not math.isfinite(x):
        raise ConfigError(fld, f"must be finite, got {v}")
    if positive and not x > 0:
        raise ConfigError(fld, f"must be positive, got {v}")
    if nonneg and x < 0:
        raise ConfigError(fld, f"must be nonnegative, got {v}")
    return x


def _space(cfg):
    kind = cfg.require("space", "kind")
    if kind == "euclidean":
        return Euclidean(_num("space.dim", cfg.get("space", "dim", "2"), positive=True, integer=True))
    if kind == "halfplane":
        return HalfPlane()
    if kind == "sphere":
        k = _num("space.kappa", cfg.require("space", "kappa"), positive=True)
        D = _num("space.diameter", cfg.require("space", "diameter"), positive=True)
        try:
            return SphericalCap(k, D)
        except GeometryError as e:
            raise ConfigError("space.diameter", str(e)) from None
    if kind == "tree":
        verts = cfg.require("space", "vertices").split()
        edges = []
        for item in cfg.require("space", "edges").split(","):
            try:
                uv, w = item.strip().rsplit(":", 1)
                u, v = uv.split("-")
                edges.append((u.strip(), v.strip(), float(w)))
            except ValueError:
                raise ConfigError("space.edges", f"expected u-v:length, got {item.strip()!r}") from None
        try:
            return MetricTree(TreeSpec(tuple(verts), tuple(edges)))
        except GeometryError as e:
            raise ConfigError("space.edges", str(e)) from None
    raise ConfigError("space.kind", f"unknown space {kind!r}")


def _point(sp, fld, text):
    text = text.strip()
    try:
        if isinstance(sp, MetricTree):
            if text.startswith("@"):
                return sp.vertex(text[1:])
            e, off = text.split()
            return sp.point(int(e), float(off))
        return sp.point(*(float(t) for t in text.split()))
    except (ValueError, TypeError, KeyError, GeometryError) as e:
        raise ConfigError(fld, f"bad point {text!r} ({e})") from None


def _points(sp, fld, text):
    return [_point(sp, fld, t) for t in text.split(";") if t.strip()]


def _set(sp, name, kv):
    fld = f"set.{name}"
    kind = kv.get("kind")

    def req(k):
        if k not in kv:
            raise ConfigError(f"{fld}.{k}", "missing")
        return kv[k]

    try:
        if kind == "vertical":
            return GeodesicLine.vertical(sp, _num(f"{fld}.a", req("a")))
        if kind == "semicircle":
            return GeodesicLine.semicircle(sp, _num(f"{fld}.center", req("center")),
                                           _num(f"{fld}.radius", req("radius"), positive=True))
        if kind == "line":
            pts = _points(sp, f"{fld}.through", req("through"))
            if len(pts) != 2:
                raise ConfigError(f"{fld}.through", "needs exactly two points")
            return GeodesicLine.through(*pts)
        if kind == "segment":
            return GeodesicSegment(sp, _point(sp, f"{fld}.start", req("start")), _point(sp, f"{fld}.end", req("end")))
        if kind == "ball":
            return Ball(sp, _point(sp, f"{fld}.center", req("center")),
                        _num(f"{fld}.radius", req("radius"), positive=True))
        if kind == "halfspace":
            return HalfSpace(sp, tuple(float(t) for t in req("normal").split()), _num(f"{fld}.offset", req("offset")))
        if kind == "affine":
            basis = tuple(tuple(float(t) for t in b.split()) for b in req("basis").split(";") if b.strip())
            return AffineSet(sp, _point(sp, f"{fld}.origin", req("origin")), basis)
        if kind == "subtree":
            return Subtree(sp, frozenset(req("vertices").split()))
    except GeometryError as e:
        raise ConfigError(fld, str(e)) from None
    raise ConfigError(f"{fld}.kind", f"unknown set kind {kind!r}")


def _functions(sp, cfg, sets):
    raw = cfg.named("function")
    out = {}

    def build(name, stack=()):
        if name in out:
            return out[name]
        if name not in raw:
            raise ConfigError(f"function.{name}", "undefined function")
        if name in stack:
            raise ConfigError(f"function.{name}", "cyclic definition")
        kv, fld = raw[name], f"function.{name}"
        kind = kv.get("kind")
        try:
            if kind == "indicator":
                s = kv.get("set")
                if s not in sets:
                    raise ConfigError(f"{fld}.set", f"unknown set {s!r}")
                f = Indicator(sets[s])
            elif kind in ("dist", "halfsq"):
                a = _point(sp, f"{fld}.anchor", kv.get("anchor", ""))
                f = DistTo(a) if kind == "dist" else HalfSqDistTo(a)
            elif kind == "scaled":
                f = Scaled(build(kv.get("inner", ""), stack + (name,)),
                           _num(f"{fld}.weight", kv.get("weight"), positive=True))
            elif kind == "sum":
                f = Sum(tuple(build(t.strip(), stack + (name,)) for t in kv.get("terms", "").split(",")))
            else:
                raise ConfigError(f"{fld}.kind", f"unknown function kind {kind!r}")
        except GeometryError as e:
            raise ConfigError(fld, str(e)) from None
        out[name] = f
        return f

    for name in raw:
        build(name)
    return out


def _mapping(fld, term, sets, functions):
    parts = [p.strip() for p in term.split(":")]
    if parts[0] == "P" and len(parts) == 2:
        if parts[1] not in sets:
            raise ConfigError(fld, f"unknown set {parts[1]!r}")
        return Projection(sets[parts[1]])
    if parts[0] == "J" and len(parts) == 3:
        if parts[1] not in functions:
            raise ConfigError(fld, f"unknown function {parts[1]!r}")
        return Resolvent(functions[parts[1]], _num(f"{fld}.lambda", parts[2], positive=True))
    raise ConfigError(fld, f"expected P:SET or J:FUNCTION:LAMBDA, got {term!r}")


def _schedule(fld, text):
    if not text:
        return Zero()
    kind, *args = text.split()
    try:
        vals = [float(a) for a in args]
        if kind == "zero" and not vals:
            return Zero()
        if kind == "powerlaw" and len(vals) == 2:
            return PowerLaw(*vals)
        if kind == "geometric" and len(vals) == 2:
            return Geometric(*vals)
        if kind == "explicit":
            return Explicit(tuple(vals))
    except (ValueError, GeometryError) as e:
        raise ConfigError(fld, str(e)) from None
    raise ConfigError(fld, f"bad error schedule {text!r}")


def build(cfg: ExperimentConfig, seed_override=None) -> Experiment:
    """Interpret a parsed config; raises :class:`ConfigError` naming the bad field."""
    mode = cfg.require("experiment", "mode")
    if mode not in ("cyclic", "alternating", "minimize"):
        raise ConfigError("experiment.mode", f"unknown mode {mode!r}")
    seed = _num("experiment.seed", cfg.get("experiment", "seed", "0"), nonneg=True, integer=True)
    if seed_override is not None:
        seed = seed_override
    sp = _space(cfg)
    sets = {name: _set(sp, name, kv) for name, kv in cfg.named("set").items()}
    functions = _functions(sp, cfg, sets)
    P = "problem"
    start = _point(sp, "problem.start", cfg.require(P, "start"))
    common = dict(
        max_steps=_num("problem.max_steps", cfg.get(P, "max_steps", "10000"), nonneg=True, integer=True),
        stop_tol=_num("problem.stop_tol", cfg.get(P, "stop_tol", "1e-12"), nonneg=True),
        seed=seed,
        thin=_num("problem.thin", cfg.get(P, "thin", "1"), positive=True, integer=True),
    )
    ref = cfg.get(P, "reference")
    if ref:
        common["reference"] = _point(sp, "problem.reference", ref)
    esc = cfg.get(P, "escape_radius")
    if esc:
        common["escape_radius"] = _num("problem.escape_radius", esc, positive=True)
    errors = _schedule("problem.errors", cfg.get(P, "errors", ""))
    min_problem = None
    if mode == "cyclic":
        terms = [t for t in cfg.require(P, "mappings").split(",") if t.strip()]
        maps = [_mapping("problem.mappings", t, sets, functions) for t in terms]
        problem = CyclicProblem(tuple(maps), start, errors, **common)
    else:
        delta = _schedule("problem.delta", cfg.get(P, "delta", ""))
        if mode == "alternating":
            T1 = _mapping("problem.T1", cfg.require(P, "T1"), sets, functions)
            T2 = _mapping("problem.T2", cfg.require(P, "T2"), sets, functions)
        else:
            lam = _num("problem.lambda", cfg.require(P, "lambda"), positive=True)
            fn = {}
            for k in ("f", "g"):
                name = cfg.require(P, k)
                if name not in functions:
                    raise ConfigError(f"problem.{k}", f"unknown function {name!r}")
                fn[k] = functions[name]
            m = cfg.get(P, "m")
            min_problem = MinProblem(fn["f"], fn["g"], lam, _num("problem.m", m) if m else None)
            T1, T2 = Resolvent(fn["g"], lam), Resolvent(fn["f"], lam)
        problem = AlternatingProblem(T1, T2, start, errors, delta, **common)

    certs = []
    for name, kv in cfg.named("certificate").items():
        fld = f"certificate.{name}"
        kind = kv.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"{fld}.kind", f"unknown certificate {kind!r}")
        inputs = {}
        for k in KINDS[kind][1]:
            if k not in kv:
                raise ConfigError(f"{fld}.{k}", "missing")
            inputs[k] = _num(f"{fld}.{k}", kv[k], integer=(k == "r"))
        try:
            cert = RateCertificate.make(kind, **inputs)
        except GeometryError as e:
            raise ConfigError(fld, str(e)) from None
        extra = {"check_eps": _num(f"{fld}.check_eps", kv.get("check_eps", kv["eps"]), positive=True)}
        for k in ("fixed_point", "minimizer"):
            if kv.get(k):
                extra[k] = _point(sp, f"{fld}.{k}", kv[k])
        if kv.get("phi_star"):
            extra["phi_star"] = _num(f"{fld}.phi_star", kv["phi_star"])
        certs.append((name, cert, extra))

    classify = None
    if "classify" in cfg.sections:
        kv = cfg.sections["classify"]
        for k in ("A", "B"):
            if kv.get(k) not in sets:
                raise ConfigError(f"classify.{k}", f"unknown set {kv.get(k)!r}")
        classify = {
            "A": sets[kv["A"]], "B": sets[kv["B"]],
            "tol": _num("classify.tol", kv.get("tol", "1e-5"), positive=True),
            "oracle": kv.get("oracle", "false").lower() in ("1", "true", "yes"),
        }
        if mode != "alternating":
            raise ConfigError("classify", "classification applies to alternating runs")
        if classify["tol"] < 10 * problem.stop_tol:
            raise ConfigError("classify.tol", "must be at least 10 * problem.stop_tol")
    return Experiment(cfg, mode, seed, sp, sets, functions, problem, min_problem, certs, classify)
