"""Hand-written SVG rendering of planar runs.

Half-plane objects are drawn in the naive Euclidean picture of the upper
half-plane: vertical geodesics as lines, the others as semicircles.
"""
from __future__ import annotations

import math

import numpy as np

from .convex_sets import Ball, GeodesicLine, GeodesicSegment, HalfSpace
from .geometry import Euclidean, HalfPlane, UnsupportedSpaceError

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


def _set_paths(s, window):
    """Polylines (lists of (x, y)) approximating ``s`` in the plane."""
    sp = s.space
    xmin, xmax, ymin, ymax = window
    if isinstance(s, Ball):
        if isinstance(sp, HalfPlane):
            x0, y0 = s.center.coords
            cx, cy, rad = x0, y0 * math.cosh(s.radius), y0 * math.sinh(s.radius)
        else:
            (cx, cy), rad = s.center.coords, s.radius
        th = np.linspace(0, 2 * math.pi, 241)
        return [list(zip(cx + rad * np.cos(th), cy + rad * np.sin(th)))]
    if isinstance(s, GeodesicLine) and isinstance(sp, HalfPlane):
        form = s.hp_form
        if form[0] == "vertical":
            return [[(form[1], 0.0), (form[1], ymax)]]
        _, c, r = form
        th = np.linspace(0, math.pi, 361)
        return [list(zip(c + r * np.cos(th), r * np.sin(th)))]
    if isinstance(s, (GeodesicLine, GeodesicSegment)):
        span = max(xmax - xmin, ymax - ymin)
        lo, hi, f = s.curve(3 * span + 10) if isinstance(s, GeodesicLine) else s.curve()
        if isinstance(sp, HalfPlane):
            # geodesic arc length grows like log of Euclidean length; sample densely
            ts = np.linspace(lo, hi, 801)
        else:
            ts = np.linspace(lo, hi, 2)
        return [[tuple(f(float(t)).coords) for t in ts]]
    if isinstance(s, HalfSpace) and isinstance(sp, Euclidean):
        n = np.array(s.normal)
        p0 = n * s.offset / n.dot(n)
        d = np.array([-n[1], n[0]]) / np.linalg.norm(n)
        L = 3 * max(xmax - xmin, ymax - ymin) + 10
        return [[tuple(p0 - L * d), tuple(p0 + L * d)]]
    return []


def render_svg(xs, ys, sets, window=None, width=640, height=480, title="") -> str:
    """SVG of an iterate polyline ``xs`` (and optional partners ``ys``) over ``sets``.

    ``xs``/``ys`` are arrays of planar coordinates; ``sets`` maps names to
    convex sets of a half-plane or 2-d Euclidean space.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        raise ValueError("empty trace")
    if xs.ndim != 2 or xs.shape[1] != 2:
        raise UnsupportedSpaceError("only planar traces can be drawn")
    for s in sets.values():
        if not isinstance(s.space, (HalfPlane, Euclidean)) or (
                isinstance(s.space, Euclidean) and s.space.dim != 2):
            raise UnsupportedSpaceError(f"cannot draw sets of {s.space.name}")
    if window is None:
        pts = xs if ys is None or len(ys) == 0 else np.vstack([xs, ys])
        lo, hi = np.percentile(pts, 2, axis=0), np.percentile(pts, 98, axis=0)
        pad = 0.15 * max(hi[0] - lo[0], hi[1] - lo[1], 1.0)
        window = (lo[0] - pad, hi[0] + pad, lo[1] - pad, hi[1] + pad)
    xmin, xmax, ymin, ymax = (float(v) for v in window)
    sx, sy = width / (xmax - xmin), height / (ymax - ymin)
    big = 10 * max(width, height)

    def px(p):
        u = (p[0] - xmin) * sx
        v = height - (p[1] - ymin) * sy
        # keep far-away points finite for renderers
        return f"{min(max(u, -big), big):.3f},{min(max(v, -big), big):.3f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<title>{title}</title>')
    if ymin <= 0 <= ymax:
        out.append(f'<line x1="0" y1="{px((xmin, 0)).split(",")[1]}" x2="{width}" '
                   f'y2="{px((xmin, 0)).split(",")[1]}" stroke="#999" stroke-width="1"/>')
    for k, (name, s) in enumerate(sets.items()):
        color = COLORS[k % len(COLORS)]
        for path in _set_paths(s, (xmin, xmax, ymin, ymax)):
            out.append(f'<polyline class="set" data-name="{name}" fill="none" stroke="{color}" '
                       f'stroke-width="2" points="{" ".join(px(p) for p in path)}"/>')
    if ys is not None and len(ys):
        seq = []
        for a, b in zip(xs, ys):
            seq += [a, b]
        seq.append(xs[len(ys)] if len(xs) > len(ys) else ys[-1])
    else:
        seq = list(xs)
    out.append(f'<polyline class="iterates" fill="none" stroke="black" stroke-width="1" '
               f'points="{" ".join(px(p) for p in seq)}"/>')
    out.append(f'<circle class="start" cx="{px(xs[0]).split(",")[0]}" cy="{px(xs[0]).split(",")[1]}" '
               f'r="4" fill="green"/>')
    out.append(f'<circle class="final" cx="{px(xs[-1]).split(",")[0]}" cy="{px(xs[-1]).split(",")[1]}" '
               f'r="4" fill="orange"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
