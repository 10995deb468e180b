"""Orbit classification and rendering for f_a(z) = e^z + a, a <= -1.

Escape verdicts here are heuristic: nothing in the complex plane carries a
tower certificate.  The Fatou verdict uses a trap that is exact up to
float rounding: if Re z < 0 then |e^z| < 1, so f_a(z) lands in the disk
D(a, 1), which f_a maps into itself and which lies in the basin of the
attracting (a < -1) or parabolic (a = -1) fixed point.
"""

from __future__ import annotations

import cmath
import enum
import io
import math
from dataclasses import dataclass
from typing import List, Tuple

from PIL import Image
from PIL.PngImagePlugin import PngInfo

DEFAULT_ESCAPE_RADIUS = 50.0
DEFAULT_EPS_ATTRACT = 1e-8
DEFAULT_MAX_STEPS = 512


@dataclass(frozen=True)
class ExpParameter:
    a: float = -1.0

    def __post_init__(self):
        if not self.a <= -1:
            raise ValueError(f"parameter a must be <= -1, got {self.a}")

    def f(self, z: complex) -> complex:
        return cmath.exp(z) + self.a


def find_fixed_point(p: ExpParameter) -> float:
    """The real fixed point in [a, 0], by bisection on e^x + a - x."""
    a = p.a
    if a == -1:
        return 0.0
    lo, hi = a, 0.0  # g(lo) = e^a > 0, g(hi) = 1 + a < 0
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if math.exp(mid) + a - mid > 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(math.exp(lo) + a - lo) <= abs(math.exp(hi) + a - hi) else hi


def multiplier(p: ExpParameter) -> float:
    return math.exp(find_fixed_point(p))


class OrbitClass(enum.Enum):
    FATOU_ATTRACTED = "FATOU_ATTRACTED"
    ESCAPING_HEURISTIC = "ESCAPING_HEURISTIC"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class OrbitVerdict:
    kind: OrbitClass
    steps: int
    witness: complex
    overflow: bool = False

    def to_json(self):
        return {
            "class": self.kind.value,
            "steps": self.steps,
            "witness": [self.witness.real, self.witness.imag],
            "overflow": self.overflow,
        }


def classify_orbit(
    z: complex,
    p: ExpParameter,
    max_steps: int = DEFAULT_MAX_STEPS,
    escape_radius: float = DEFAULT_ESCAPE_RADIUS,
    eps_attract: float = DEFAULT_EPS_ATTRACT,
    fixed_point: float | None = None,
) -> OrbitVerdict:
    """Iterate until the orbit is trapped, runs off to the right, or the budget ends.

    The witness is the last orbit value.  ``steps`` counts iterations
    applied; a trap hit at z_n reports n + 1 since the disk is entered on
    the next step.
    """
    if max_steps < 0 or escape_radius <= 0 or eps_attract <= 0:
        raise ValueError("need max_steps >= 0, escape_radius > 0, eps_attract > 0")
    pstar = find_fixed_point(p) if fixed_point is None else fixed_point
    z = complex(z)
    n = 0
    while True:
        if abs(z - pstar) < eps_attract:
            return OrbitVerdict(OrbitClass.FATOU_ATTRACTED, n, z)
        if n >= max_steps:
            return OrbitVerdict(OrbitClass.UNKNOWN, n, z)
        if z.real < 0:
            return OrbitVerdict(OrbitClass.FATOU_ATTRACTED, n + 1, z)
        if z.real > escape_radius:
            return OrbitVerdict(OrbitClass.ESCAPING_HEURISTIC, n, z)
        try:
            z = p.f(z)
        except OverflowError:
            return OrbitVerdict(OrbitClass.ESCAPING_HEURISTIC, n + 1, z, overflow=True)
        n += 1


@dataclass(frozen=True)
class Viewport:
    x0: float = -4.0
    x1: float = 4.0
    y0: float = -4.0
    y1: float = 4.0

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("viewport needs x0 < x1 and y0 < y1")

    def pixel_center(self, i: int, j: int, w: int, h: int) -> complex:
        """Column i, row j (row 0 at the top)."""
        x = self.x0 + (i + 0.5) * (self.x1 - self.x0) / w
        y = self.y1 - (j + 0.5) * (self.y1 - self.y0) / h
        return complex(x, y)


# verdict -> base colour; luminance falls with the step count
PALETTE = {
    OrbitClass.FATOU_ATTRACTED: (40, 90, 220),
    OrbitClass.ESCAPING_HEURISTIC: (240, 150, 30),
    OrbitClass.UNKNOWN: (0, 0, 0),
}
LUMINANCE_STEPS = 64

LEGEND = (
    "FATOU_ATTRACTED=blue (40,90,220); ESCAPING_HEURISTIC=orange (240,150,30); "
    "UNKNOWN=black; brightness = 1 - 0.75*min(steps,64)/64"
)


def pixel_colour(v: OrbitVerdict) -> Tuple[int, int, int]:
    base = PALETTE[v.kind]
    scale = 1.0 - 0.75 * min(v.steps, LUMINANCE_STEPS) / LUMINANCE_STEPS
    return tuple(int(round(c * scale)) for c in base)


@dataclass(frozen=True)
class RasterImage:
    width: int
    height: int
    viewport: Viewport
    param: ExpParameter
    verdicts: Tuple[Tuple[OrbitClass, int], ...]  # row-major

    def verdict_at(self, i: int, j: int) -> Tuple[OrbitClass, int]:
        return self.verdicts[j * self.width + i]

    def counts(self):
        out = {k: 0 for k in OrbitClass}
        for k, _ in self.verdicts:
            out[k] += 1
        return out

    def to_image(self) -> Image.Image:
        buf = bytearray()
        for kind, steps in self.verdicts:
            buf.extend(pixel_colour(OrbitVerdict(kind, steps, 0j)))
        return Image.frombytes("RGB", (self.width, self.height), bytes(buf))

    def png_bytes(self) -> bytes:
        info = PngInfo()
        info.add_text("legend", LEGEND)
        vp = self.viewport
        info.add_text("parameters", f"a={self.param.a!r}; viewport={vp.x0!r},{vp.x1!r},{vp.y0!r},{vp.y1!r}")
        out = io.BytesIO()
        self.to_image().save(out, format="PNG", pnginfo=info)
        return out.getvalue()


def render(
    p: ExpParameter,
    viewport: Viewport = Viewport(),
    width: int = 256,
    height: int = 256,
    max_steps: int = DEFAULT_MAX_STEPS,
    escape_radius: float = DEFAULT_ESCAPE_RADIUS,
    eps_attract: float = DEFAULT_EPS_ATTRACT,
) -> RasterImage:
    if width < 1 or height < 1:
        raise ValueError("image needs at least one pixel")
    pstar = find_fixed_point(p)
    cells: List[Tuple[OrbitClass, int]] = []
    for j in range(height):
        for i in range(width):
            v = classify_orbit(viewport.pixel_center(i, j, width, height), p, max_steps, escape_radius, eps_attract, pstar)
            cells.append((v.kind, v.steps))
    return RasterImage(width, height, viewport, p, tuple(cells))
