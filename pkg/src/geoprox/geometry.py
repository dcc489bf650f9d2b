"""Model geodesic spaces.

Four models are provided, each a uniquely geodesic space satisfying the
p-uniform convexity inequality

    d(z, (1-t)x + ty)^p <= (1-t) d(z,x)^p + t d(z,y)^p - (c/2) t(1-t) d(x,y)^p

for its exponent ``p`` and parameter ``c``:

* :class:`Euclidean` -- R^n, p = 2, c = 2.
* :class:`HalfPlane` -- Poincare upper half-plane (curvature -1), p = 2, c = 2.
* :class:`MetricTree` -- a finite metric tree, p = 2, c = 2.
* :class:`SphericalCap` -- a cap of the round sphere of curvature kappa whose
  diameter is at most ``diameter`` < pi / (2 sqrt(kappa)); p = 2 and ``c`` is
  Ohta's constant for the largest admissible margin.

Points are immutable and carry the space they live in.
"""
from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

DEFAULT_TOL = 1e-9


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class SpaceMismatchError(GeometryError):
    """Raised when objects from different spaces are combined."""


class DomainError(GeometryError):
    """Raised when an argument lies outside the domain of an operation."""


class UnsupportedSpaceError(GeometryError):
    """Raised when an operation is not available for a model space."""


@dataclass(frozen=True)
class Point:
    """A point of a model space.

    ``coords`` is model dependent: a coordinate vector for Euclidean space,
    ``(x, y)`` with ``y > 0`` for the half-plane, ``(edge, offset)`` for a
    metric tree and a unit vector of R^3 for a spherical cap.  Use
    ``space.point(...)`` rather than calling the constructor directly.
    """

    space: "Space"
    coords: tuple

    def __post_init__(self):
        self.space.validate(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __repr__(self):
        return f"Point({', '.join(repr(c) for c in self.coords)})"


def same_space(*objs) -> "Space":
    """Return the common space of ``objs`` or raise :class:`SpaceMismatchError`."""
    space = objs[0].space
    for obj in objs[1:]:
        if obj.space is not space and obj.space != space:
            raise SpaceMismatchError(f"{obj.space} differs from {space}")
    return space


class Space:
    """Interface shared by the model spaces."""

    p = 2.0
    c = 2.0
    #: Whether the model is CAT(0) (Reshetnyak's inequality holds).
    cat0 = True
    name = "space"

    def point(self, *coords) -> Point:
        return Point(self, tuple(float(v) for v in coords))

    def validate(self, coords):
        raise NotImplementedError

    def distance(self, a: Point, b: Point) -> float:
        raise NotImplementedError

    def geodesic(self, a: Point, b: Point, t: float) -> Point:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, bounds=None) -> Point:
        raise NotImplementedError

    def perturb(self, a: Point, eps: float, rng: np.random.Generator) -> Point:
        """Move ``a`` by (at most, and generically exactly) ``eps`` in a random direction."""
        raise NotImplementedError

    # Optional global chart used by numeric minimizers; trees have none.
    has_chart = True

    def chart(self, a: Point) -> np.ndarray:
        raise UnsupportedSpaceError(f"{self.name} has no global chart")

    def unchart(self, v) -> Point:
        raise UnsupportedSpaceError(f"{self.name} has no global chart")


@dataclass(frozen=True)
class Euclidean(Space):
    dim: int = 2

    name = "euclidean"

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dim must be a positive integer, got {self.dim}")

    def validate(self, coords):
        if len(coords) != self.dim:
            raise DomainError(f"expected {self.dim} coordinates, got {len(coords)}")
        if not all(math.isfinite(v) for v in coords):
            raise DomainError(f"non-finite coordinates {coords}")

    def distance(self, a, b):
        return math.dist(a.coords, b.coords)

    def geodesic(self, a, b, t):
        return Point(self, tuple((1.0 - t) * u + t * v for u, v in zip(a.coords, b.coords)))

    def sample(self, rng, bounds=None):
        lo, hi = (0.0, 1.0) if bounds is None else bounds
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (self.dim,))
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (self.dim,))
        if np.any(hi < lo):
            raise DomainError(f"empty sampling box [{lo}, {hi}]")
        return self.point(*rng.uniform(lo, hi))

    def perturb(self, a, eps, rng):
        if eps == 0:
            return a
        v = rng.standard_normal(self.dim)
        v *= eps / np.linalg.norm(v)
        return self.point(*(a.array + v))

    def chart(self, a):
        return a.array

    def unchart(self, v):
        return self.point(*v)


def _to_disk(x0: float, y0: float, z: complex) -> complex:
    # Isometry of the half-plane sending x0 + i y0 to i, followed by the
    # Cayley transform onto the unit disk (i -> 0).
    w = (z - x0) / y0
    return (w - 1j) / (w + 1j)


def _from_disk(x0: float, y0: float, w: complex) -> complex:
    z = 1j * (1 + w) / (1 - w)
    return x0 + y0 * z


@dataclass(frozen=True)
class HalfPlane(Space):
    """Poincare upper half-plane ``{(x, y) : y > 0}`` with curvature -1."""

    name = "halfplane"

    def validate(self, coords):
        if len(coords) != 2:
            raise DomainError("half-plane points have two coordinates")
        x, y = coords
        if not (math.isfinite(x) and math.isfinite(y)) or y <= 0:
            raise DomainError(f"half-plane point needs finite x and y > 0, got {coords}")

    def distance(self, a, b):
        (x1, y1), (x2, y2) = a.coords, b.coords
        # 2 asinh(|z1 - z2| / (2 sqrt(y1 y2))) == arccosh(1 + |z1-z2|^2/(2 y1 y2)),
        # but keeps precision for nearby points.
        return 2.0 * math.asinh(math.hypot(x1 - x2, y1 - y2) / (2.0 * math.sqrt(y1 * y2)))

    def geodesic(self, a, b, t):
        if t == 0.0:
            return a
        if t == 1.0:
            return b
        x0, y0 = a.coords
        wb = _to_disk(x0, y0, complex(*b.coords))
        r = abs(wb)
        if r == 0.0:
            return a
        # |w| = tanh(d/2) on the disk, so the point at fraction t has
        # |w_t| = tanh(t * atanh(|w_b|)).
        w = math.tanh(t * math.atanh(r)) * (wb / r)
        z = _from_disk(x0, y0, w)
        return self.point(z.real, z.imag)

    def sample(self, rng, bounds=None):
        xmin, xmax, ymin, ymax = (-1.0, 1.0, 0.5, 2.0) if bounds is None else bounds
        if xmax < xmin or ymax < ymin or ymax <= 0:
            raise DomainError(f"empty half-plane region {bounds}")
        ymin = max(ymin, 1e-300)
        return self.point(rng.uniform(xmin, xmax), math.exp(rng.uniform(math.log(ymin), math.log(ymax))))

    def perturb(self, a, eps, rng):
        if eps == 0:
            return a
        x0, y0 = a.coords
        w = math.tanh(eps / 2.0) * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        z = _from_disk(x0, y0, w)
        return self.point(z.real, z.imag)

    def chart(self, a):
        return np.array([a.coords[0], math.log(a.coords[1])])

    def unchart(self, v):
        return self.point(v[0], math.exp(v[1]))


def _unit(v):
    n = math.sqrt(sum(c * c for c in v))
    return tuple(c / n for c in v)


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


@dataclass(frozen=True)
class SphericalCap(Space):
    """Cap of the sphere of curvature ``kappa`` around the north pole.

    The cap has geodesic radius ``diameter / 2`` so that its diameter never
    exceeds ``diameter``, which must be below ``pi / (2 sqrt(kappa))``.
    """

    kappa: float = 1.0
    diameter: float = 1.0

    cat0 = False
    name = "sphere"
    center = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")
        if not 0 < self.diameter < math.pi / (2 * math.sqrt(self.kappa)):
            raise DomainError(
                f"diameter must lie in (0, pi/(2 sqrt(kappa))) = (0, {math.pi / (2 * math.sqrt(self.kappa))}), "
                f"got {self.diameter}"
            )

    @property
    def eps(self) -> float:
        """Largest admissible margin pi/(2 sqrt(kappa)) - diameter."""
        return math.pi / (2 * math.sqrt(self.kappa)) - self.diameter

    @property
    def c(self) -> float:
        sk = math.sqrt(self.kappa)
        return (math.pi - 2 * sk * self.eps) * math.tan(sk * self.eps)

    @property
    def cap_radius(self) -> float:
        return self.diameter / 2.0

    def point(self, *coords):
        if len(coords) == 3:
            coords = _unit(coords)
        return Point(self, tuple(float(v) for v in coords))

    def point_at(self, radius: float, azimuth: float) -> Point:
        """Point at geodesic distance ``radius`` from the cap center."""
        a = radius * math.sqrt(self.kappa)
        return self.point(math.sin(a) * math.cos(azimuth), math.sin(a) * math.sin(azimuth), math.cos(a))

    def validate(self, coords):
        if len(coords) != 3:
            raise DomainError("sphere points are unit vectors of R^3")
        if abs(math.sqrt(_dot(coords, coords)) - 1.0) > 1e-12:
            raise DomainError(f"sphere point {coords} is not a unit vector")
        ang = math.atan2(math.hypot(coords[0], coords[1]), coords[2])
        if ang > self.cap_radius * math.sqrt(self.kappa) + 1e-12:
            raise DomainError(f"point {coords} lies outside the cap of radius {self.cap_radius}")

    def _angle(self, u, v):
        w = _cross(u, v)
        return math.atan2(math.sqrt(_dot(w, w)), _dot(u, v))

    def distance(self, a, b):
        return self._angle(a.coords, b.coords) / math.sqrt(self.kappa)

    def _slerp(self, u, v, t):
        om = self._angle(u, v)
        if om < 1e-8:
            w = tuple((1 - t) * p + t * q for p, q in zip(u, v))
        else:
            s0, s1 = math.sin((1 - t) * om), math.sin(t * om)
            w = tuple(s0 * p + s1 * q for p, q in zip(u, v))
        return _unit(w)

    def geodesic(self, a, b, t):
        if t == 0.0:
            return a
        if t == 1.0:
            return b
        return self.point(*self._slerp(a.coords, b.coords, t))

    def clamp(self, coords) -> Point:
        """Nearest point of the cap to a unit vector of the sphere."""
        coords = _unit(coords)
        ang = math.atan2(math.hypot(coords[0], coords[1]), coords[2])
        rmax = self.cap_radius * math.sqrt(self.kappa)
        if ang <= rmax:
            return self.point(*coords)
        return self.point(*self._slerp(self.center, coords, rmax / ang))

    def exp(self, a: Point, direction, length: float) -> tuple:
        """Unit vector reached from ``a`` along tangent ``direction`` (need not be unit)."""
        u = a.coords
        d = np.asarray(direction, dtype=float)
        d = d - _dot(d, u) * np.asarray(u)
        d /= np.linalg.norm(d)
        th = length * math.sqrt(self.kappa)
        return tuple(math.cos(th) * np.asarray(u) + math.sin(th) * d)

    def sample(self, rng, bounds=None):
        rmax = self.cap_radius if bounds is None else float(bounds)
        if rmax < 0:
            raise DomainError(f"negative sampling radius {bounds}")
        rmax = min(rmax, self.cap_radius)
        # area-uniform on the cap: cos(angle) uniform
        amax = rmax * math.sqrt(self.kappa)
        ang = math.acos(rng.uniform(math.cos(amax), 1.0))
        return self.point_at(ang / math.sqrt(self.kappa), rng.uniform(0.0, 2.0 * math.pi))

    def perturb(self, a, eps, rng):
        if eps == 0:
            return a
        return self.clamp(self.exp(a, rng.standard_normal(3), eps))

    def chart(self, a):
        # gnomonic chart from the center; geodesics are straight lines
        x, y, z = a.coords
        return np.array([x / z, y / z])

    def unchart(self, v):
        return self.clamp((v[0], v[1], 1.0))


@dataclass(frozen=True)
class TreeSpec:
    """A finite tree: named vertices and ``(u, v, length)`` edges."""

    vertices: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple((u, v, float(w)) for u, v, w in self.edges))
        names = set(self.vertices)
        if len(names) != len(self.vertices):
            raise DomainError("duplicate vertex names")
        if not self.vertices:
            raise DomainError("a tree needs at least one vertex")
        for u, v, w in self.edges:
            if u not in names or v not in names:
                raise DomainError(f"edge ({u}, {v}) uses an unknown vertex")
            if not w > 0:
                raise DomainError(f"edge ({u}, {v}) has non-positive length {w}")
        if len(self.edges) != len(self.vertices) - 1:
            raise DomainError("a tree on n vertices has n - 1 edges")
        adj = {v: [] for v in self.vertices}
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen, todo = {self.vertices[0]}, [self.vertices[0]]
        while todo:
            for nb in adj[todo.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        if len(seen) != len(self.vertices):
            raise DomainError("tree is not connected")


@dataclass(frozen=True)
class MetricTree(Space):
    """Geodesic metric space underlying a :class:`TreeSpec`.

    A point is ``(edge index, offset from the edge's first vertex)``.
    Vertices are stored canonically on their lowest-index incident edge.
    """

    tree: TreeSpec = None

    has_chart = False
    name = "tree"

    def __post_init__(self):
        if not isinstance(self.tree, TreeSpec):
            raise DomainError("MetricTree needs a TreeSpec")
        if not self.tree.edges:
            raise DomainError("MetricTree needs at least one edge")

    @cached_property
    def _index(self):
        return {v: i for i, v in enumerate(self.tree.vertices)}

    @cached_property
    def _tables(self):
        """All-pairs vertex distances and next hops."""
        n = len(self.tree.vertices)
        adj = [[] for _ in range(n)]
        for k, (u, v, w) in enumerate(self.tree.edges):
            i, j = self._index[u], self._index[v]
            adj[i].append((j, w, k))
            adj[j].append((i, w, k))
        dist = np.zeros((n, n))
        nxt = np.full((n, n), -1, dtype=int)
        for s in range(n):
            q = deque([s])
            seen = {s}
            while q:
                a = q.popleft()
                for b, w, _ in adj[a]:
                    if b not in seen:
                        seen.add(b)
                        dist[s, b] = dist[s, a] + w
                        nxt[b, s] = a  # from b, step toward s
                        q.append(b)
        return adj, dist, nxt

    @cached_property
    def _edge_of(self):
        return {frozenset((self._index[u], self._index[v])): k for k, (u, v, _) in enumerate(self.tree.edges)}

    def _ends(self, k):
        u, v, w = self.tree.edges[k]
        return self._index[u], self._index[v], w

    def vertex(self, name) -> Point:
        i = self._index[name]
        for k, (u, v, w) in enumerate(self.tree.edges):
            if u == name:
                return Point(self, (k, 0.0))
            if v == name:
                return Point(self, (k, w))
        raise DomainError(f"vertex {name} has no incident edge")  # pragma: no cover

    def _vertex_by_index(self, i) -> Point:
        return self.vertex(self.tree.vertices[i])

    def point(self, edge, offset):
        k = int(edge)
        if not 0 <= k < len(self.tree.edges):
            raise DomainError(f"no edge {edge}")
        u, v, w = self.tree.edges[k]
        offset = float(offset)
        if offset <= 0.0:
            return self.vertex(u) if offset > -1e-12 else self._bad(edge, offset)
        if offset >= w:
            return self.vertex(v) if offset < w + 1e-12 else self._bad(edge, offset)
        return Point(self, (k, offset))

    def _bad(self, edge, offset):
        raise DomainError(f"offset {offset} outside edge {edge}")

    def validate(self, coords):
        if len(coords) != 2:
            raise DomainError("tree points are (edge, offset)")
        k, s = coords
        if not (isinstance(k, (int, np.integer)) and 0 <= k < len(self.tree.edges)):
            raise DomainError(f"bad edge index {k}")
        if not 0.0 <= s <= self.tree.edges[k][2]:
            raise DomainError(f"offset {s} outside edge {k}")

    def vertex_index(self, a: Point):
        """Index of the vertex ``a`` sits on, or ``None`` for interior points."""
        k, s = a.coords
        i, j, w = self._ends(k)
        if s == 0.0:
            return i
        if s == w:
            return j
        return None

    def _exits(self, a):
        """``[(vertex index, distance)]`` for the ways out of ``a``'s edge."""
        k, s = a.coords
        i, j, w = self._ends(k)
        return [(i, s), (j, w - s)]

    def _route(self, a, b):
        """Length and exit/entry vertices of the path from ``a`` to ``b``."""
        ka, sa = a.coords
        kb, sb = b.coords
        if ka == kb:
            return abs(sa - sb), None, None
        dist = self._tables[1]
        best = None
        for i, di in self._exits(a):
            for j, dj in self._exits(b):
                d = di + dist[i, j] + dj
                if best is None or d < best[0]:
                    best = (d, i, j)
        return best

    def distance(self, a, b):
        return float(self._route(a, b)[0])

    def path_vertices(self, i, j):
        nxt = self._tables[2]
        path = [i]
        while path[-1] != j:
            path.append(int(nxt[path[-1], j]))
        return path

    def _walk_from(self, a, i, j, b, length):
        """Point at ``length`` along a -> vertex i -> ... -> vertex j -> b."""
        k, s = a.coords
        vi = self._ends(k)
        first = s if vi[0] == i else vi[2] - s
        if length <= first:
            return self.point(k, s - length if vi[0] == i else s + length)
        length -= first
        path = self.path_vertices(i, j)
        dist = self._tables[1]
        for p, q in zip(path, path[1:]):
            w = dist[p, q]
            if length <= w:
                e = self._edge_of[frozenset((p, q))]
                u, _, _ = self._ends(e)
                return self.point(e, length if u == p else w - length)
            length -= w
        kb, sb = b.coords
        u, _, w = self._ends(kb)
        return self.point(kb, min(length, sb) if u == j else max(w - length, sb))

    def geodesic(self, a, b, t):
        if t == 0.0:
            return a
        if t == 1.0:
            return b
        d, i, j = self._route(a, b)
        if i is None:
            return self.point(a.coords[0], (1 - t) * a.coords[1] + t * b.coords[1])
        return self._walk_from(a, i, j, b, t * d)

    def sample(self, rng, bounds=None):
        lengths = np.array([w for _, _, w in self.tree.edges])
        k = int(rng.choice(len(lengths), p=lengths / lengths.sum()))
        return self.point(k, rng.uniform(0.0, lengths[k]))

    def perturb(self, a, eps, rng):
        if eps == 0:
            return a
        targets = [self._vertex_by_index(i) for i in range(len(self.tree.vertices))]
        dists = [self.distance(a, v) for v in targets]
        far = [v for v, d in zip(targets, dists) if d >= eps]
        if far:
            v = far[int(rng.integers(len(far)))]
            return self.geodesic(a, v, eps / self.distance(a, v))
        v = targets[int(np.argmax(dists))]
        return v


def distance(a: Point, b: Point) -> float:
    """Geodesic distance between two points of the same space."""
    return same_space(a, b).distance(a, b)


def geodesic_point(a: Point, b: Point, t: float) -> Point:
    """The point ``(1-t) a + t b`` at distance ``t d(a, b)`` from ``a``."""
    space = same_space(a, b)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t}")
    return space.geodesic(a, b, t)


def check_puc(space: Space, x: Point, y: Point, z: Point, t: float) -> float:
    """Slack in the p-uniform convexity inequality; nonnegative in valid spaces."""
    same_space(x, y, z)
    p, c = space.p, space.c
    m = geodesic_point(x, y, t)
    return (
        (1 - t) * distance(z, x) ** p
        + t * distance(z, y) ** p
        - 0.5 * c * t * (1 - t) * distance(x, y) ** p
        - distance(z, m) ** p
    )


def check_reshetnyak(x: Point, y: Point, u: Point, v: Point) -> float:
    """Slack in the CAT(0) four-point inequality

    d(x,y)^2 + d(u,v)^2 <= d(x,v)^2 + d(y,u)^2 + 2 d(x,u) d(y,v).
    """
    space = same_space(x, y, u, v)
    if not space.cat0:
        raise UnsupportedSpaceError(f"four-point inequality needs a CAT(0) model, got {space.name}")
    d = space.distance
    return d(x, v) ** 2 + d(y, u) ** 2 + 2 * d(x, u) * d(y, v) - d(x, y) ** 2 - d(u, v) ** 2


def sample_point(space: Space, rng_seed, bounds=None) -> Point:
    """Deterministic random point of ``space``.

    ``bounds`` is model specific: ``(lo, hi)`` for Euclidean space,
    ``(xmin, xmax, ymin, ymax)`` for the half-plane, a maximal radius from the
    center for a cap, and is ignored for trees.
    """
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return space.sample(rng, bounds)
