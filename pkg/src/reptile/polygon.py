"""Exact convex-polygon predicates over rational points.

Polygons are sequences of points with Fraction coordinates.  Degenerate
polygons (all vertices collinear) are treated as segments.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import NotConvex
from .exact_affine import Vec2Q

Point = Sequence[Fraction]


def cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list:
    """Andrew's monotone chain; counterclockwise, collinear points dropped."""
    pts = sorted(set((p[0], p[1]) for p in points))
    if len(pts) <= 2:
        return [Vec2Q(*p) for p in pts]
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return [Vec2Q(*p) for p in hull]


def signed_area2(poly) -> Fraction:
    n = len(poly)
    return sum(
        (poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1] for i in range(n)),
        Fraction(0),
    )


def is_degenerate(poly) -> bool:
    if len(poly) < 3:
        return True
    o = poly[0]
    return all(cross(o, poly[1], p) == 0 for p in poly[2:])


def normalize_convex(poly) -> list:
    """Return the polygon counterclockwise, raising NotConvex if it is not convex.

    Degenerate input comes back as its two extreme points.
    """
    pts = [Vec2Q(Fraction(p[0]), Fraction(p[1])) for p in poly]
    if not pts:
        raise NotConvex("empty polygon")
    if is_degenerate(pts):
        return convex_hull(pts)
    if signed_area2(pts) < 0:
        pts.reverse()
    n = len(pts)
    for i in range(n):
        if cross(pts[i], pts[(i + 1) % n], pts[(i + 2) % n]) < 0:
            raise NotConvex(f"polygon turns clockwise at vertex {(i + 1) % n}")
    return pts


def contains_point(poly, q) -> bool:
    """Closed containment test for a normalized convex polygon or segment."""
    n = len(poly)
    if n == 1:
        return poly[0][0] == q[0] and poly[0][1] == q[1]
    if n == 2:
        a, b = poly
        if cross(a, b, q) != 0:
            return False
        return min(a[0], b[0]) <= q[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= q[1] <= max(
            a[1], b[1]
        )
    return all(cross(poly[i], poly[(i + 1) % n], q) >= 0 for i in range(n))


def strictly_inside(poly, q) -> bool:
    n = len(poly)
    return n >= 3 and all(cross(poly[i], poly[(i + 1) % n], q) > 0 for i in range(n))


def contains_polygon(outer, inner) -> bool:
    return all(contains_point(outer, q) for q in inner)


def _edges(poly):
    n = len(poly)
    return [(poly[i], poly[(i + 1) % n]) for i in range(n)]


def _separated_by_edge(poly, other) -> bool:
    # some edge line of poly has every vertex of other on its closed outer side
    for a, b in _edges(poly):
        if all(cross(a, b, q) <= 0 for q in other):
            return True
    return False


def _segment_clip(seg, poly):
    """Clip a segment to a closed convex polygon; return parameter interval or None."""
    p, q = seg
    lo, hi = Fraction(0), Fraction(1)
    for a, b in _edges(poly):
        # inside means cross(a, b, x) >= 0 for x = p + s (q - p)
        c0 = cross(a, b, p)
        c1 = cross(a, b, q) - c0
        if c1 == 0:
            if c0 < 0:
                return None
            continue
        s = -c0 / c1
        if c1 > 0:
            lo = max(lo, s)
        else:
            hi = min(hi, s)
        if lo > hi:
            return None
    return lo, hi


def interiors_disjoint(p1, p2) -> bool:
    """True when two normalized convex polygons have disjoint interiors.

    For segments the relative interior is used, so two half-edges meeting at a
    common endpoint count as disjoint while overlapping collinear pieces do not.
    """
    d1, d2 = len(p1) < 3, len(p2) < 3
    if not d1 and not d2:
        return _separated_by_edge(p1, p2) or _separated_by_edge(p2, p1)
    if d1 and d2:
        if len(p1) < 2 or len(p2) < 2:
            return True
        a, b = p1
        c, d = p2
        if cross(a, b, c) == 0 and cross(a, b, d) == 0:
            # collinear: overlap length along the common line
            axis = (b[0] - a[0], b[1] - a[1])

            def proj(v):
                return v[0] * axis[0] + v[1] * axis[1]

            lo = max(min(proj(a), proj(b)), min(proj(c), proj(d)))
            hi = min(max(proj(a), proj(b)), max(proj(c), proj(d)))
            return hi <= lo
        # proper crossing in both relative interiors
        s1, s2 = cross(a, b, c), cross(a, b, d)
        s3, s4 = cross(c, d, a), cross(c, d, b)
        return not (s1 * s2 < 0 and s3 * s4 < 0)
    seg, poly = (p1, p2) if d1 else (p2, p1)
    if len(seg) < 2:
        return True
    clip = _segment_clip(seg, poly)
    if clip is None or clip[0] >= clip[1]:
        return True
    mid = (clip[0] + clip[1]) / 2
    p, q = seg
    m = (p[0] + mid * (q[0] - p[0]), p[1] + mid * (q[1] - p[1]))
    return not strictly_inside(poly, m)


def max_dist_sq(points) -> Fraction:
    pts = list(points)
    best = Fraction(0)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            dx, dy = pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]
            best = max(best, dx * dx + dy * dy)
    return best
