"""Exact planar predicates for polylines.

Coordinates are converted to Fractions before any test, so orientation
signs are exact; floats enter only as their exact binary values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Point = Tuple[Fraction, Fraction]
Segment = Tuple[Point, Point]


def exact(p) -> Point:
    return Fraction(p[0]), Fraction(p[1])


def orientation(p: Point, q: Point, r: Point) -> int:
    val = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (val > 0) - (val < 0)


def _on_segment(p: Point, q: Point, r: Point) -> bool:
    # q collinear with p-r; is it inside the bounding box?
    return min(p[0], r[0]) <= q[0] <= max(p[0], r[0]) and min(p[1], r[1]) <= q[1] <= max(p[1], r[1])


def segments_intersect(s1: Segment, s2: Segment) -> bool:
    p1, q1 = s1
    p2, q2 = s2
    o1 = orientation(p1, q1, p2)
    o2 = orientation(p1, q1, q2)
    o3 = orientation(p2, q2, p1)
    o4 = orientation(p2, q2, q1)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    if o1 == 0 and _on_segment(p1, p2, q1):
        return True
    if o2 == 0 and _on_segment(p1, q2, q1):
        return True
    if o3 == 0 and _on_segment(p2, p1, q2):
        return True
    if o4 == 0 and _on_segment(p2, q1, q2):
        return True
    return False


def _adjacent_ok(s1: Segment, s2: Segment) -> bool:
    """Consecutive segments s1 = (a, b), s2 = (b, c) may only share b."""
    a, b = s1
    _, c = s2
    if orientation(a, b, c) != 0:
        return True
    # collinear: fine only if the path keeps going forward through b
    d1 = (b[0] - a[0], b[1] - a[1])
    d2 = (c[0] - b[0], c[1] - b[1])
    return d1[0] * d2[0] + d1[1] * d2[1] > 0


def find_self_intersection(vertices: Sequence, closed: bool = True) -> Optional[Tuple[int, int]]:
    """Return indices (i, j) of two crossing segments, or None if simple.

    Segment i joins vertex i to vertex i+1.  A sweep over x keeps only
    segments whose x-extent overlaps the current one before the exact test.
    """
    pts = [exact(p) for p in vertices]
    n = len(pts)
    if n < 2:
        return None
    for i in range(n - 1 if not closed else n):
        if pts[i] == pts[(i + 1) % n]:
            return (i, i)
    segs: List[Segment] = [(pts[i], pts[i + 1]) for i in range(n - 1)]
    if closed:
        segs.append((pts[-1], pts[0]))
    m = len(segs)

    def adjacent(i, j):
        if abs(i - j) == 1:
            return True
        return closed and {i, j} == {0, m - 1}

    order = sorted(range(m), key=lambda i: min(segs[i][0][0], segs[i][1][0]))
    active: List[int] = []
    for i in order:
        xlo = min(segs[i][0][0], segs[i][1][0])
        active = [j for j in active if max(segs[j][0][0], segs[j][1][0]) >= xlo]
        ylo = min(segs[i][0][1], segs[i][1][1])
        yhi = max(segs[i][0][1], segs[i][1][1])
        for j in active:
            if max(segs[j][0][1], segs[j][1][1]) < ylo or min(segs[j][0][1], segs[j][1][1]) > yhi:
                continue
            if adjacent(i, j):
                a, b = (i, j) if (j == i + 1 or (closed and i == m - 1 and j == 0)) else (j, i)
                if not _adjacent_ok(segs[a], segs[b]):
                    return (min(i, j), max(i, j))
                continue
            if segments_intersect(segs[i], segs[j]):
                return (min(i, j), max(i, j))
        active.append(i)
    return None


def winding_number(vertices: Sequence, point) -> int:
    """Winding number of a closed polyline around a point not on it."""
    pts = [exact(p) for p in vertices]
    px, py = exact(point)
    wn = 0
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        if a[1] <= py:
            if b[1] > py and orientation(a, b, (px, py)) > 0:
                wn += 1
        else:
            if b[1] <= py and orientation(a, b, (px, py)) < 0:
                wn -= 1
    return wn


def point_on_polyline(vertices: Sequence, point, closed: bool = True) -> bool:
    pts = [exact(p) for p in vertices]
    p = exact(point)
    n = len(pts)
    last = n if closed else n - 1
    for i in range(last):
        a, b = pts[i], pts[(i + 1) % n]
        if orientation(a, b, p) == 0 and _on_segment(a, p, b):
            return True
    return False
