"""Detour curves g_k, the closed curve beta, and its escape witnesses.

g_0 is the right side of the seed rectangle traversed upward.  g_k replaces
each left edge {a} x [c, d] of a level-k box by the walk along the box's
bottom, right and top sides (or top, right, bottom when g runs downward).
The walk is parametrized proportionally to arclength, which fixes both
corners and gives the measured deviation between g_k and g_{k-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from .address import (
    ExternalAddress,
    compare_height,
    embed_point,
    height_float,
    height_in,
    lex_cmp,
    same_address,
)
from .boxes import Box, BoxFamily, Rect, box_width, build_families, seed_family
from .brush import ModelPoint, SubBrush, double_square_check, orbit_lower_bounds
from .geometry import find_self_intersection, winding_number
from .tower import OrbitLeftDomain, inverse_orbit

Vertex = Tuple[float, Fraction]


class CurveInvariantError(RuntimeError):
    pass


class SelfIntersection(RuntimeError):
    def __init__(self, message: str, pair: Tuple[int, int]):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True)
class Polyline:
    vertices: Tuple[Vertex, ...]
    level: int = 0
    cauchy_bound: float = math.inf
    deviations: Tuple[float, ...] = ()
    families: Tuple[BoxFamily, ...] = ()

    def __len__(self):
        return len(self.vertices)

    def to_json(self):
        return [[x, _fs(y)] for x, y in self.vertices]


def _fs(y: Fraction) -> str:
    return f"{y.numerator}/{y.denominator}"


def seed_right_edge(seed: Rect) -> Polyline:
    """g_0: the right side of the seed, bottom to top."""
    return Polyline(((seed.x1, Fraction(seed.y0)), (seed.x1, Fraction(seed.y1))), level=0)


def detour_deviation(box: Box) -> float:
    """sup |h_B(p) - p| over the left edge, for the arclength walk.

    Both maps are piecewise linear in the edge parameter, so the distance is
    convex on each piece and peaks at the walk's two inner corners.
    """
    w = box.b - box.a
    hgt = float(box.d - box.c)
    length = 2 * w + hgt
    s1 = w / length
    s2 = (w + hgt) / length
    return max(math.hypot(w, s1 * hgt), math.hypot(w, (1 - s2) * hgt))


def _detour(box: Box, upward: bool) -> List[Vertex]:
    a, b, c, d = box.a, box.b, box.c, box.d
    if upward:
        return [(a, c), (b, c), (b, d), (a, d)]
    return [(a, d), (b, d), (b, c), (a, c)]


def refine_curve(g_prev: Polyline, fam: BoxFamily) -> Polyline:
    """g_k from g_{k-1}: detour around every box of level k."""
    if not fam.boxes:
        return Polyline(g_prev.vertices, fam.k, g_prev.cauchy_bound, g_prev.deviations + (0.0,), g_prev.families)
    verts = list(g_prev.vertices)
    for v in verts:
        for bx in fam.boxes:
            if bx.a < v[0] < bx.b and bx.c < v[1] < bx.d:
                raise CurveInvariantError(f"vertex {v} lies inside a level-{fam.k} box")
    used = set()
    out: List[Vertex] = [verts[0]]
    for p, q in zip(verts, verts[1:]):
        if p[0] == q[0]:
            x = p[0]
            lo, hi = min(p[1], q[1]), max(p[1], q[1])
            upward = q[1] > p[1]
            hits = [i for i, bx in enumerate(fam.boxes) if bx.a == x and lo <= bx.c and bx.d <= hi]
            hits.sort(key=lambda i: fam.boxes[i].c, reverse=not upward)
            for i in hits:
                used.add(i)
                for v in _detour(fam.boxes[i], upward):
                    if v != out[-1]:
                        out.append(v)
        if q != out[-1]:
            out.append(q)
    missing = [fam.boxes[i] for i in range(len(fam.boxes)) if i not in used]
    if missing:
        raise CurveInvariantError(f"{len(missing)} level-{fam.k} boxes have no full left edge on g_{fam.k - 1}")
    dev = max(detour_deviation(bx) for bx in fam.boxes)
    return Polyline(tuple(out), fam.k, g_prev.cauchy_bound, g_prev.deviations + (dev,), g_prev.families)


def cauchy_tail(kmax: int, offset: int = 0) -> float:
    """sum_{k > kmax} 5 / (offset + k)^2."""
    n = offset + kmax
    return 5.0 * (math.pi ** 2 / 6 - math.fsum(1.0 / j ** 2 for j in range(1, n + 1)))


def build_curve(sb: SubBrush, kmax: int, offset: int = 0, seed: Rect | None = None) -> Polyline:
    """Iterate box families and refinements up to level kmax."""
    seed = seed or Rect.square(1)
    fams = build_families(seed, sb, kmax, offset)
    g = seed_right_edge(seed)
    for fam in fams[1:]:
        g = refine_curve(g, fam)
    return Polyline(g.vertices, g.level, cauchy_tail(kmax, offset), g.deviations, tuple(fams))


def curve_levels(seed: Rect, fams: Sequence[BoxFamily]) -> List[Polyline]:
    """g_0, g_1, ..., one per family after the seed."""
    out = [seed_right_edge(seed)]
    for fam in fams[1:]:
        out.append(refine_curve(out[-1], fam))
    return out


def right_edge_recurrence(seed: Rect, kmax: int, offset: int = 0) -> List[float]:
    """seed.x1 + sum_{i<=k} F^{-(offset+i)^2}(1), summed in one pass."""
    out = [seed.x1]
    for k in range(1, kmax + 1):
        out.append(out[-1] + box_width(k, offset))
    return out


@dataclass(frozen=True)
class JordanCurve:
    seed: Rect
    arc: Polyline
    vertices: Tuple[Vertex, ...]
    winding: int

    @property
    def square_sides(self) -> Tuple[Tuple[Vertex, Vertex], ...]:
        s = self.seed
        tl, bl = (s.x0, s.y1), (s.x0, s.y0)
        return (((s.x1, s.y1), tl), (tl, bl), (bl, (s.x1, s.y0)))


def assemble_jordan(arc: Polyline, seed: Rect) -> JordanCurve:
    """Close the arc with the seed's top, left and bottom sides and check simplicity."""
    start, end = arc.vertices[0], arc.vertices[-1]
    if start != (seed.x1, seed.y0) or end != (seed.x1, seed.y1):
        raise ValueError("arc must run from the seed's bottom-right to its top-right corner")
    verts = tuple(arc.vertices) + ((seed.x0, seed.y1), (seed.x0, seed.y0))
    pair = find_self_intersection(verts, closed=True)
    if pair is not None:
        raise SelfIntersection(f"segments {pair[0]} and {pair[1]} cross", pair)
    wn = winding_number(verts, seed.center)
    return JordanCurve(seed, arc, verts, wn)


# --- escape soundness ------------------------------------------------------

@dataclass(frozen=True)
class WitnessCheck:
    j: int
    witness: ExternalAddress
    witness_passed: bool
    direct_passed: bool

    @property
    def passed(self) -> bool:
        return self.witness_passed and self.direct_passed


@dataclass(frozen=True)
class CurveContact:
    """A sub-brush point lying on beta."""

    x: float
    s: ExternalAddress
    checks: Tuple[WitnessCheck, ...]
    on_final_edge: bool

    @property
    def passed(self) -> bool:
        return self.on_final_edge and all(c.passed for c in self.checks)

    def to_json(self):
        return {
            "x": self.x,
            "address": str(self.s),
            "on_final_edge": self.on_final_edge,
            "checks": [
                {"j": c.j, "witness": str(c.witness), "witness_pass": c.witness_passed, "direct_pass": c.direct_passed}
                for c in self.checks
            ],
        }


def _double_square_ok(point: ModelPoint, j: int) -> bool:
    try:
        bounds = orbit_lower_bounds(point, 2 * j * j)
    except OrbitLeftDomain:
        return False
    return double_square_check(bounds, j).passed


def curve_contacts(vertices: Sequence[Vertex], sb: SubBrush, closed: bool = True) -> List[Tuple[float, ExternalAddress]]:
    """All (x, s) with the hair of s crossing a segment of the polyline."""
    n = len(vertices)
    out = []
    last = n if closed else n - 1
    for i in range(last):
        p, q = vertices[i], vertices[(i + 1) % n]
        if p[0] == q[0]:
            lo, hi = min(p[1], q[1]), max(p[1], q[1])
            for s in sb:
                if sb.tip_of(s) <= p[0] and height_in(s, lo, hi):
                    out.append((p[0], s))
        elif p[1] == q[1]:
            # rational height: no hair lives there
            continue
        else:
            raise CurveInvariantError("curve segments must be axis-aligned")
    return out


def escape_witnesses(jc: JordanCurve, sb: SubBrush) -> List[CurveContact]:
    """Witness-pair checks for every sub-brush point on beta.

    For a contact x at height h(s) and each level k (j = l + k), take the
    level-k box B containing h(s), a sub-brush hair s' meeting its left edge
    (y), and z = <b, s'> on its right edge.  Then T(z) - T(y) = width, and
    the double-square inequality T(F^{2j^2}(z)) >= F^{j^2}(1) is checked on
    z (witness) and on x itself (direct).
    """
    fams = [f for f in jc.arc.families if f.boxes]
    offset = jc.arc.families[0].offset if jc.arc.families else 0
    final_x = fams[-1].right_edge if len(fams) > 1 else jc.seed.x1
    out = []
    for x, s in curve_contacts(jc.vertices, sb):
        checks = []
        for fam in fams[1:]:
            j = offset + fam.k
            box = next((bx for bx in fam.boxes if height_in(s, bx.c, bx.d)), None)
            if box is None:
                checks.append(WitnessCheck(j, s, False, False))
                continue
            wit = next((t for t in sb if sb.tip_of(t) <= box.a and height_in(t, box.c, box.d)), None)
            if wit is None:
                checks.append(WitnessCheck(j, s, False, False))
                continue
            checks.append(
                WitnessCheck(j, wit, _double_square_ok(ModelPoint(box.b, wit), j), _double_square_ok(ModelPoint(x, s), j))
            )
        out.append(CurveContact(x, s, tuple(checks), x == final_x))
    return out


# --- localized build -------------------------------------------------------

def choose_offset(eps: float) -> int:
    """Least l with sum_{k>=1} F^{-(l+k)^2}(1) < eps/2 (bounded via F^{-n}(1) < 3/n)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    extra = max(64, math.ceil(24 / eps))
    l = 0
    while True:
        m = l + extra
        orbit = inverse_orbit(m * m)
        total = math.fsum(orbit[j * j] for j in range(l + 1, m + 1)) + 3.0 / m
        if total < eps / 2:
            return l
        l += 1


Height = Union[Fraction, ExternalAddress]


def _cmp_heights(u: Height, v: Height) -> int:
    if isinstance(u, ExternalAddress) and isinstance(v, ExternalAddress):
        return lex_cmp(u, v)
    if isinstance(u, ExternalAddress):
        return compare_height(u, v)
    if isinstance(v, ExternalAddress):
        return -compare_height(v, u)
    return (u > v) - (u < v)


def rational_between(lower: Height, upper: Height) -> Fraction:
    """A rational strictly between two heights (addresses or rationals)."""
    if _cmp_heights(lower, upper) >= 0:
        raise ValueError("heights not in increasing order")
    if not isinstance(lower, ExternalAddress) and not isinstance(upper, ExternalAddress):
        return (lower + upper) / 2
    depth = 1
    while True:
        lo_iv = embed_point(lower, depth) if isinstance(lower, ExternalAddress) else None
        hi_iv = embed_point(upper, depth) if isinstance(upper, ExternalAddress) else None
        lo_top = lo_iv.hi if lo_iv else lower
        hi_bot = hi_iv.lo if hi_iv else upper
        if lo_top < hi_bot:
            return (lo_top + hi_bot) / 2
        depth += 1


def height_approx(y: Height) -> float:
    return height_float(y) if isinstance(y, ExternalAddress) else float(y)


@dataclass(frozen=True)
class LocalizedCurve:
    center: Tuple[float, Height]
    eps: float
    offset: int
    seed: Rect
    arc: Polyline
    jordan: JordanCurve

    def max_distance(self) -> float:
        cx, cy = self.center[0], height_approx(self.center[1])
        return max(math.hypot(x - cx, float(y) - cy) for x, y in self.jordan.vertices)

    def encloses_center(self) -> bool:
        return abs(winding_number(self.jordan.vertices, (self.center[0], self.interior_height()))) == 1

    def interior_height(self) -> Fraction:
        y = self.center[1]
        if isinstance(y, ExternalAddress):
            # any rational close enough is in the same complementary component
            iv = embed_point(y, 40)
            return (iv.lo + iv.hi) / 2
        return y


def localized_seed(center: Tuple[float, Height], eps: float, sb: SubBrush) -> Rect:
    """A rational box inside B(center, eps/2) whose left, top and bottom miss the sub-brush."""
    t0, y0 = center
    half = eps / 4
    a, b = t0 - half, t0 + half
    yf = Fraction(height_approx(y0)).limit_denominator(10 ** 9)
    hf = Fraction(half).limit_denominator(10 ** 9)
    c, d = yf - hf * Fraction(9, 10), yf + hf * Fraction(9, 10)
    if not (_cmp_heights(c, y0) < 0 < _cmp_heights(d, y0)):
        raise ValueError("eps too small to place a rational seed around the center")
    for s in sb:
        if sb.tip_of(s) > a or not height_in(s, c, d):
            continue
        if isinstance(y0, ExternalAddress) and same_address(s, y0):
            raise ValueError(f"center lies on hair {s} more than eps/4 past its tip; no seed avoids it")
        if _cmp_heights(s, y0) < 0:
            c = rational_between(s, y0)
        else:
            d = rational_between(y0, s)
    return Rect(a, b, c, d)


def localized_curve(center: Tuple[float, Height], eps: float, sb: SubBrush, kmax: int = 3) -> LocalizedCurve:
    """Closed curve within eps of center, enclosing it, built with level offset l."""
    seed = localized_seed(center, eps, sb)
    seed_family(seed, sb)
    l = choose_offset(eps)
    arc = build_curve(sb, kmax, l, seed)
    jc = assemble_jordan(arc, seed)
    return LocalizedCurve(center, eps, l, seed, arc, jc)
