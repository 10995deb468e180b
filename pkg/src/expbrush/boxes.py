"""Box families B_0, B_1, ... around a finite sub-brush.

Boxes are [a, b] x [c, d] with float horizontal sides (potentials) and
rational vertical sides (embedding heights).  Level k boxes have width
F^{-(l+k)^2}(1), sit on the common right edge of level k-1, and each one
stays inside a single cylinder of depth 2(l+k)^2.

Everything the original construction quantifies over the whole brush is
checked here against the user's finite sub-brush only.
"""

from __future__ import annotations

import math
from functools import cmp_to_key
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .address import (
    ExternalAddress,
    compare_height,
    cylinder_interval,
    embed_point,
    frac_str,
    height_in,
    lex_cmp,
    rational_above,
    rational_digits,
)
from .brush import SubBrush
from .tower import f_inv_iter


def box_width(k: int, offset: int = 0) -> float:
    """F^{-(offset+k)^2}(1), the single shared float used for level k."""
    return f_inv_iter((offset + k) ** 2, 1.0)


def cylinder_depth(k: int, offset: int = 0) -> int:
    return 2 * (offset + k) ** 2


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle [x0, x1] x [y0, y1] with rational y sides."""

    x0: float
    x1: float
    y0: Fraction
    y1: Fraction

    @classmethod
    def square(cls, half: int = 1) -> "Rect":
        return cls(float(-half), float(half), Fraction(-half), Fraction(half))

    @property
    def center(self) -> Tuple[Fraction, Fraction]:
        return (Fraction(self.x0) + Fraction(self.x1)) / 2, (self.y0 + self.y1) / 2

    def to_json(self):
        return {"x0": self.x0, "x1": self.x1, "y0": frac_str(self.y0), "y1": frac_str(self.y1)}


@dataclass(frozen=True)
class Box:
    a: float
    b: float
    c: Fraction
    d: Fraction
    k: int

    def to_json(self):
        return {"a": self.a, "b": self.b, "c": frac_str(self.c), "d": frac_str(self.d), "k": self.k}

    @classmethod
    def from_json(cls, obj) -> "Box":
        return cls(float(obj["a"]), float(obj["b"]), Fraction(obj["c"]), Fraction(obj["d"]), int(obj["k"]))


@dataclass(frozen=True)
class BoxFamily:
    k: int
    boxes: Tuple[Box, ...]
    parent_right_edge: float
    right_edge: float
    offset: int = 0

    def __len__(self):
        return len(self.boxes)

    def to_json(self):
        return {
            "k": self.k,
            "offset": self.offset,
            "parent_right_edge": self.parent_right_edge,
            "right_edge": self.right_edge,
            "boxes": [b.to_json() for b in self.boxes],
        }

    @classmethod
    def from_json(cls, obj) -> "BoxFamily":
        return cls(
            int(obj["k"]),
            tuple(Box.from_json(b) for b in obj["boxes"]),
            float(obj["parent_right_edge"]),
            float(obj["right_edge"]),
            int(obj.get("offset", 0)),
        )


class SeedRejected(ValueError):
    def __init__(self, message: str, address: ExternalAddress | None = None):
        super().__init__(message)
        self.address = address


def hair_meets_vertical(sb: SubBrush, s: ExternalAddress, x: float, lo: Fraction, hi: Fraction) -> bool:
    """Does the hair [t_s, inf) x {h(s)} meet {x} x [lo, hi]?"""
    return sb.tip_of(s) <= x and height_in(s, lo, hi)


def seed_family(rect: Rect, sb: SubBrush, offset: int = 0) -> BoxFamily:
    """Level-0 family {rect}.

    The left side and the top and bottom of rect must miss the sub-brush.
    Top and bottom are rational heights, which no hair has, but they are
    still checked.
    """
    for v in (rect.y0, rect.y1):
        if not isinstance(v, (Fraction, int)):
            raise SeedRejected(f"vertical side {v!r} is not an exact rational")
    y0, y1 = Fraction(rect.y0), Fraction(rect.y1)
    if not (rect.x0 < rect.x1 and y0 < y1):
        raise SeedRejected("degenerate seed rectangle")
    for s in sb:
        if hair_meets_vertical(sb, s, rect.x0, y0, y1):
            raise SeedRejected(f"left side of seed meets hair {s}", s)
        if sb.tip_of(s) <= rect.x1 and (compare_height(s, y0) == 0 or compare_height(s, y1) == 0):
            raise SeedRejected(f"top or bottom of seed meets hair {s}", s)
    box = Box(rect.x0, rect.x1, y0, y1, 0)
    return BoxFamily(0, (box,), rect.x0, rect.x1, offset)


def right_edge_points(prev: BoxFamily, sb: SubBrush) -> List[Tuple[ExternalAddress, Box]]:
    """The set K: sub-brush points on right edges of prev, with their box."""
    out = []
    for s in sb:
        for bp in prev.boxes:
            if hair_meets_vertical(sb, s, bp.b, bp.c, bp.d):
                out.append((s, bp))
                break
    return out


def _by_height(addrs: Sequence[ExternalAddress]) -> List[ExternalAddress]:
    # h is an order embedding, so lexicographic order is height order
    return sorted(addrs, key=cmp_to_key(lex_cmp))


def _subdivide(lo: Fraction, hi: Fraction, width: Fraction) -> List[Fraction]:
    n = max(1, math.ceil((hi - lo) / width))
    return [lo + (hi - lo) * i / n for i in range(n + 1)]


def next_family(prev: BoxFamily, sb: SubBrush, k: int | None = None, offset: int | None = None) -> BoxFamily:
    """Build level k from level k-1.

    1. K = sub-brush points on the right edges {b'} x [c', d'].
    2. Cover K by the depth-2(l+k)^2 cylinders of its own addresses.
    3. Cut each parent edge at all parent and cylinder endpoints, then
       subdivide until every piece has height <= the level width.
    4. Where two adjacent pieces are both occupied, pull the top of the
       lower one down to a cylinder endpoint just above its highest point,
       so boxes never touch.
    5. Emit [b', b' + w] x piece for every occupied piece.
    """
    if k is None:
        k = prev.k + 1
    if offset is None:
        offset = prev.offset
    if k != prev.k + 1:
        raise ValueError(f"level {k} does not follow level {prev.k}")
    if len(sb) == 0:
        raise ValueError("sub-brush is empty")
    a = prev.right_edge
    w = box_width(k, offset)
    b = a + w
    wf = Fraction(w)
    depth = cylinder_depth(k, offset)

    K = right_edge_points(prev, sb)
    boxes: List[Box] = []
    for bp in prev.boxes:
        pts = _by_height([s for s, owner in K if owner is bp])
        if not pts:
            continue
        cuts = {bp.c, bp.d}
        for s in pts:
            iv = embed_point(s, depth)
            for e in (iv.lo, iv.hi):
                if bp.c < e < bp.d:
                    cuts.add(e)
        cuts = sorted(cuts)
        pieces: List[List[Fraction]] = []
        for lo, hi in zip(cuts, cuts[1:]):
            grid = _subdivide(lo, hi, wf)
            pieces.extend([u, v] for u, v in zip(grid, grid[1:]))

        occupants: List[List[ExternalAddress]] = [[] for _ in pieces]
        j = 0
        for s in pts:
            while compare_height(s, pieces[j][1]) > 0:
                j += 1
            occupants[j].append(s)

        for i in range(len(pieces) - 1):
            if occupants[i] and occupants[i + 1]:
                top = occupants[i][-1]
                pieces[i][1] = rational_above(top, pieces[i][1])

        for piece, occ in zip(pieces, occupants):
            if occ:
                boxes.append(Box(a, b, piece[0], piece[1], k))
    return BoxFamily(k, tuple(boxes), a, b, offset)


def build_families(seed: Rect, sb: SubBrush, kmax: int, offset: int = 0) -> List[BoxFamily]:
    """B_0 .. B_kmax; stops early (shorter list) when a level comes out empty."""
    fams = [seed_family(seed, sb, offset)]
    for k in range(1, kmax + 1):
        fam = next_family(fams[-1], sb, k, offset)
        fams.append(fam)
        if not fam.boxes:
            break
    return fams


# --- validation ------------------------------------------------------------

CONDITION_NAMES = {
    1: "rational vertical sides, a<b, c<d",
    2: "width equals F^{-(l+k)^2}(1)",
    3: "height at most F^{-(l+k)^2}(1)",
    4: "left edge inside a parent right edge",
    5: "left edge meets the sub-brush",
    6: "boxes pairwise disjoint",
    7: "inside one depth-2(l+k)^2 cylinder",
    8: "sub-brush points on parent right edges are covered",
}


@dataclass
class ConditionResult:
    number: int
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class ValidationReport:
    """Per-condition results; conditions 5 and 8 are relative to the sub-brush."""

    conditions: Dict[int, ConditionResult]
    relative_to: str = "sub-brush"

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def failed(self) -> List[int]:
        return sorted(n for n, c in self.conditions.items() if not c.passed)

    def lines(self) -> List[str]:
        out = []
        for n in sorted(self.conditions):
            c = self.conditions[n]
            status = "PASS" if c.passed else "FAIL"
            out.append(f"condition ({n}) {CONDITION_NAMES[n]}: {status}")
            out.extend(f"    {msg}" for msg in c.failures[:10])
        return out

    def to_json(self):
        return {
            "relative_to": self.relative_to,
            "ok": self.ok,
            "conditions": {
                str(n): {"name": CONDITION_NAMES[n], "pass": c.passed, "failures": c.failures}
                for n, c in sorted(self.conditions.items())
            },
        }


def _box_str(bx: Box) -> str:
    return f"B_{bx.k}[{bx.a!r},{bx.b!r}]x[{frac_str(bx.c)},{frac_str(bx.d)}]"


def _inside_one_cylinder(c: Fraction, d: Fraction, depth: int) -> bool:
    digits, _ = rational_digits((c + d) / 2)
    if len(digits) < depth + 1:
        # midpoint is an endpoint of a cylinder of depth <= depth
        return False
    iv = cylinder_interval(digits[:depth])
    return iv.lo <= c and d <= iv.hi


def validate_family(families: Sequence[BoxFamily], sb: SubBrush, offset: int | None = None) -> ValidationReport:
    """Check conditions (1)-(8) for every level k >= 1 in ``families``."""
    if offset is None:
        offset = families[0].offset if families else 0
    res = {n: ConditionResult(n) for n in range(1, 9)}
    for prev, fam in zip(families, families[1:]):
        k = fam.k
        w = box_width(k, offset)
        wf = Fraction(w)
        depth = cylinder_depth(k, offset)
        for bx in fam.boxes:
            tag = _box_str(bx)
            if not (isinstance(bx.c, Fraction) and isinstance(bx.d, Fraction) and bx.a < bx.b and bx.c < bx.d):
                res[1].failures.append(tag)
                continue
            if bx.b != bx.a + w:
                res[2].failures.append(f"{tag}: b-a={bx.b - bx.a!r} vs width {w!r}")
            if bx.d - bx.c > wf:
                res[3].failures.append(f"{tag}: d-c={float(bx.d - bx.c)!r} > {w!r}")
            if not any(bp.b == bx.a and bp.c <= bx.c and bx.d <= bp.d for bp in prev.boxes):
                res[4].failures.append(tag)
            if not any(hair_meets_vertical(sb, s, bx.a, bx.c, bx.d) for s in sb):
                res[5].failures.append(tag)
            if not _inside_one_cylinder(bx.c, bx.d, depth):
                res[7].failures.append(f"{tag}: depth {depth}")
        boxes = fam.boxes
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                p, r = boxes[i], boxes[j]
                if p.a <= r.b and r.a <= p.b and p.c <= r.d and r.c <= p.d:
                    res[6].failures.append(f"{_box_str(p)} meets {_box_str(r)}")
        for s, bp in right_edge_points(prev, sb):
            x = bp.b
            if not any(bx.a <= x <= bx.b and height_in(s, bx.c, bx.d) for bx in fam.boxes):
                res[8].failures.append(f"address {s} on {_box_str(bp)} right edge not covered at level {k}")
    return ValidationReport(res)
