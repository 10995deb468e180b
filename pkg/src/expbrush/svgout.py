"""SVG drawings of model-space objects: hairs, boxes, detour curves, beta, paths.

The plane-to-pixel map is a single affine transform, written into the
header comment so drawings can be read back quantitatively.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple
from xml.sax.saxutils import escape

from .address import ExternalAddress, height_float
from .boxes import BoxFamily
from .brush import SubBrush

LEVEL_COLOURS = ("#888888", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22")


def _y(v) -> float:
    return height_float(v) if isinstance(v, ExternalAddress) else float(v)


@dataclass(frozen=True)
class PlaneTransform:
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    width: int
    height: int
    margin: int = 20

    @property
    def sx(self) -> float:
        return (self.width - 2 * self.margin) / (self.xmax - self.xmin)

    @property
    def sy(self) -> float:
        return (self.height - 2 * self.margin) / (self.ymax - self.ymin)

    def __call__(self, x: float, y) -> Tuple[float, float]:
        return self.margin + self.sx * (x - self.xmin), self.margin + self.sy * (self.ymax - _y(y))

    def describe(self) -> str:
        return (
            f"affine transform: X = {self.margin} + {self.sx!r} * (t - {self.xmin!r}); "
            f"Y = {self.margin} + {self.sy!r} * ({self.ymax!r} - y); "
            "t = potential, y = rational embedding height"
        )


def fit_transform(points: Iterable[Tuple[float, object]], width: int = 900, height: int = 600, pad: float = 0.05) -> PlaneTransform:
    xs, ys = [], []
    for x, y in points:
        xs.append(float(x))
        ys.append(_y(y))
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    dx = (xmax - xmin) or 1.0
    dy = (ymax - ymin) or 1.0
    return PlaneTransform(xmin - pad * dx, xmax + pad * dx, ymin - pad * dy, ymax + pad * dy, width, height)


class SvgCanvas:
    def __init__(self, tf: PlaneTransform, title: str = ""):
        self.tf = tf
        self.title = title
        self.items: List[str] = []

    def group(self, name: str, body: Sequence[str]):
        self.items.append(f'<g id="{escape(name)}">')
        self.items.extend(body)
        self.items.append("</g>")

    def polyline(self, pts, stroke: str, width: float = 1.0, closed: bool = False, extra: str = "") -> str:
        coords = " ".join(f"{X:.3f},{Y:.3f}" for X, Y in (self.tf(x, y) for x, y in pts))
        tag = "polygon" if closed else "polyline"
        return f'<{tag} points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width}"{extra}/>'

    def render(self) -> str:
        tf = self.tf
        head = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f"<!-- {tf.describe()} -->",
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{tf.width}" height="{tf.height}" '
            f'viewBox="0 0 {tf.width} {tf.height}">',
        ]
        if self.title:
            head.append(f"<title>{escape(self.title)}</title>")
        head.append(f'<rect x="0" y="0" width="{tf.width}" height="{tf.height}" fill="white"/>')
        return "\n".join(head + self.items + ["</svg>", ""])


def hair_lines(canvas: SvgCanvas, sb: SubBrush) -> List[str]:
    out = []
    for s in sb:
        t = sb.tip_of(s)
        if t > canvas.tf.xmax:
            continue
        out.append(canvas.polyline([(max(t, canvas.tf.xmin), s), (canvas.tf.xmax, s)], "#d62728", 0.8, f' data-address="{escape(str(s))}"'))
        X, Y = canvas.tf(t, s)
        out.append(f'<circle cx="{X:.3f}" cy="{Y:.3f}" r="1.8" fill="#d62728"/>')
    return out


def box_rects(canvas: SvgCanvas, fams: Sequence[BoxFamily]) -> List[str]:
    out = []
    for fam in fams[1:]:
        colour = LEVEL_COLOURS[fam.k % len(LEVEL_COLOURS)]
        for bx in fam.boxes:
            out.append(canvas.polyline([(bx.a, bx.c), (bx.b, bx.c), (bx.b, bx.d), (bx.a, bx.d)], colour, 0.5, True))
    return out


def curve_svg(sb: SubBrush, fams: Sequence[BoxFamily], levels: Sequence[Sequence], beta: Sequence, title: str = "") -> str:
    """Hairs, boxes per level, g_0..g_k (thin, by level) and beta (thick)."""
    pts = list(beta) + [(sb.tip_of(s), s) for s in sb]
    tf = fit_transform(pts)
    cv = SvgCanvas(tf, title)
    cv.group("hairs", hair_lines(cv, sb))
    cv.group("boxes", box_rects(cv, fams))
    cv.group(
        "detour-curves",
        [cv.polyline(g, LEVEL_COLOURS[k % len(LEVEL_COLOURS)], 1.0, extra=f' data-level="{k}"') for k, g in enumerate(levels)],
    )
    cv.group("beta", [cv.polyline(beta, "black", 2.0, closed=True)])
    return cv.render()


def path_svg(sb: SubBrush, path_vertices: Sequence, title: str = "") -> str:
    pts = list(path_vertices) + [(sb.tip_of(s), s) for s in sb]
    tf = fit_transform(pts)
    cv = SvgCanvas(tf, title)
    cv.group("hairs", hair_lines(cv, sb))
    cv.group("path", [cv.polyline(path_vertices, "black", 2.0)])
    return cv.render()
