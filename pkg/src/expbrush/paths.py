"""Paths in the model plane that avoid every non-escaping brush point.

Vertices have a float potential and a height that is either an exact
rational (off every hair) or an address (on that hair).  Horizontal runs
at rational heights and vertical runs at negative potential never touch
the brush; every other contact is certified by the escape checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from .address import ExternalAddress, height_in, same_address
from .boxes import Rect
from .brush import EscapeState, ModelPoint, SubBrush, classify_point
from .curve import Height, _cmp_heights, assemble_jordan, build_curve, height_approx

PathVertex = Tuple[float, Height]
Endpoint = Union[ModelPoint, Tuple[float, Fraction]]


class PathError(RuntimeError):
    pass


@dataclass(frozen=True)
class PathContact:
    x: float
    s: ExternalAddress
    state: EscapeState

    def to_json(self):
        return {"x": self.x, "address": str(self.s), "state": self.state.value}


@dataclass(frozen=True)
class ModelPath:
    vertices: Tuple[PathVertex, ...]
    contacts: Tuple[PathContact, ...]

    @property
    def certified(self) -> bool:
        return all(c.state is EscapeState.CERTIFIED_ESCAPING for c in self.contacts)

    def to_json(self):
        def fmt(y):
            return str(y) if isinstance(y, ExternalAddress) else f"{y.numerator}/{y.denominator}"

        return {
            "vertices": [[x, fmt(y)] for x, y in self.vertices],
            "contacts": [c.to_json() for c in self.contacts],
            "certified": self.certified,
        }


def _as_vertex(p: Endpoint) -> PathVertex:
    if isinstance(p, ModelPoint):
        t = p.t if isinstance(p.t, float) else p.potential.value()
        return (t, p.s)
    t, y = p
    if isinstance(y, float):
        raise TypeError("complement heights must be exact rationals")
    return (float(t), Fraction(y))


def _segment_contacts(p: PathVertex, q: PathVertex, sb: SubBrush) -> List[Tuple[float, ExternalAddress]]:
    """Sub-brush points on the closed segment pq; the leftmost one per hair for horizontals."""
    (x0, y0), (x1, y1) = p, q
    if x0 == x1:
        lo, hi = (y0, y1) if _cmp_heights(y0, y1) <= 0 else (y1, y0)
        out = []
        for s in sb:
            if sb.tip_of(s) > x0:
                continue
            if _cmp_heights(lo, s) <= 0 <= _cmp_heights(hi, s):
                out.append((x0, s))
        return out
    if isinstance(y0, ExternalAddress):
        if not (isinstance(y1, ExternalAddress) and same_address(y0, y1)):
            raise PathError("segments must be axis-aligned")
        # points right of an escaping point on the same hair escape too
        return [(min(x0, x1), y0)]
    if y0 != y1:
        raise PathError("segments must be axis-aligned")
    return []


def certify_path(vertices: Sequence[PathVertex], sb: SubBrush, kmax: int = 6) -> ModelPath:
    seen = {}
    for p, q in zip(vertices, vertices[1:]):
        for x, s in _segment_contacts(p, q, sb):
            key = (x, str(s))
            if key not in seen:
                state, _, _ = classify_point(ModelPoint(x, s), kmax)
                seen[key] = PathContact(x, s, state)
    return ModelPath(tuple(vertices), tuple(seen.values()))


def _dedupe(vertices: Sequence[PathVertex]) -> List[PathVertex]:
    out: List[PathVertex] = []
    for v in vertices:
        if not out or out[-1][0] != v[0] or _cmp_heights(out[-1][1], v[1]) != 0:
            out.append(v)
    return out


def _complement_route(p: PathVertex, q: PathVertex, sb: SubBrush) -> List[PathVertex]:
    (x0, y0), (x1, y1) = p, q
    if y0 == y1:
        return [p, q]
    if x0 == x1 and not _segment_contacts(p, q, sb):
        return [p, q]
    corner = (x1, y0)
    if not _segment_contacts(corner, q, sb):
        return _dedupe([p, corner, q])
    left = min(x0, x1, 0.0) - 1.0
    return _dedupe([p, (left, y0), (left, y1), q])


def _escaping_route(p: PathVertex, target: ModelPoint, sb: SubBrush, kmax: int) -> List[PathVertex]:
    """Complement point p to an escaping point via a closed curve around target."""
    t1, s1 = _as_vertex(target)
    n = math.ceil(max(abs(t1), abs(height_approx(s1)), abs(p[0]), abs(float(p[1])), 1.0)) + 1
    seed = Rect.square(n)
    arc = build_curve(sb, kmax, 0, seed)
    assemble_jordan(arc, seed)  # raises if the closed curve is not simple
    corner = (seed.x0, Fraction(seed.y1))
    head = _complement_route(p, corner, sb)
    # walk beta backwards from the top-left corner until the hair of s1 crosses
    arc_v = list(arc.vertices)
    walk: List[PathVertex] = []
    crossing = None
    for i in range(len(arc_v) - 1, 0, -1):
        a, b = arc_v[i], arc_v[i - 1]
        walk.append(a)
        if a[0] == b[0] and height_in(s1, min(a[1], b[1]), max(a[1], b[1])):
            crossing = (a[0], s1)
            break
    if crossing is None:
        raise PathError(f"hair {s1} does not cross the closed curve")
    if crossing[0] < sb.tip_of(s1):
        raise PathError("crossing point lies left of the tip")
    return _dedupe(head + walk + [crossing, (t1, s1)])


def path_between(x0: Endpoint, x1: Endpoint, sb: SubBrush, kmax: int = 3, cert_kmax: int = 6) -> ModelPath:
    """A polyline from x0 to x1 whose brush contacts are all certified escaping.

    Endpoints are either ``(t, Fraction)`` complement points or ModelPoints
    on hairs of the sub-brush.
    """
    for e in (x0, x1):
        if isinstance(e, ModelPoint):
            if not any(same_address(e.s, s) for s in sb):
                raise PathError(f"address {e.s} is not in the sub-brush")
            state, _, _ = classify_point(e, cert_kmax)
            if state is not EscapeState.CERTIFIED_ESCAPING:
                raise PathError(f"endpoint <{e.potential.value()}, {e.s}> is not certified escaping ({state.value})")
    p, q = _as_vertex(x0), _as_vertex(x1)
    esc0, esc1 = isinstance(x0, ModelPoint), isinstance(x1, ModelPoint)
    if p[0] == q[0] and _cmp_heights(p[1], q[1]) == 0:
        contacts = (PathContact(p[0], p[1], EscapeState.CERTIFIED_ESCAPING),) if esc0 else ()
        return ModelPath((p,), contacts)
    if not esc0 and not esc1:
        verts = _complement_route(p, q, sb)
    elif esc1 and not esc0:
        verts = _escaping_route(p, x1, sb, kmax)
    elif esc0 and not esc1:
        verts = list(reversed(_escaping_route(q, x0, sb, kmax)))
    else:
        hub = (-1.0, Fraction(0))
        first = list(reversed(_escaping_route(hub, x0, sb, kmax)))
        second = _escaping_route(hub, x1, sb, kmax)
        verts = _dedupe(first + second[1:])
    path = certify_path(verts, sb, cert_kmax)
    if not path.certified:
        bad = [c for c in path.contacts if c.state is not EscapeState.CERTIFIED_ESCAPING]
        raise PathError(f"{len(bad)} brush contacts are not certified escaping")
    return path
