"""Plain SVG rendering of F1 curves and query scatters"""

from typing import Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from app.modules.level_set.core.schemas.experiment_schemas import SummaryRow
from app.modules.level_set.core.schemas.problem_schemas import GroundTruth
from app.shared.schemas import DomainBounds

WIDTH = 640
HEIGHT = 420
MARGIN = 56
MAX_BACKGROUND_POINTS = 2500

SUPER_FILL = "#f4c7a1"
SUB_FILL = "#c9d9ee"
QUERY_FILL = "#b22222"
INITIAL_FILL = "#333333"
LINE_COLOR = "#1f4e9c"
BAND_COLOR = "#9fb8e0"


class SVGBuilder:
    """Accumulates SVG elements into one document string"""

    def __init__(self, width: int = WIDTH, height: int = HEIGHT):
        self.width = width
        self.height = height
        self.svg = (
            f'<svg version="1.1" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" xmlns="http://www.w3.org/2000/svg">\n'
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n'
        )

    def line(self, x1, y1, x2, y2, stroke="black", width=1.0):
        self.svg += (
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="{stroke}" stroke-width="{width}"/>\n'
        )

    def polyline(self, points: Sequence[Tuple[float, float]], stroke, width=2.0):
        coords = " ".join(f"{x:.1f},{y:.1f}" for x, y in points)
        self.svg += f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width}"/>\n'

    def polygon(self, points: Sequence[Tuple[float, float]], fill, opacity=0.5):
        coords = " ".join(f"{x:.1f},{y:.1f}" for x, y in points)
        self.svg += f'<polygon points="{coords}" fill="{fill}" fill-opacity="{opacity}" stroke="none"/>\n'

    def circle(self, cx, cy, r, fill, extra=""):
        self.svg += f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="{r}" fill="{fill}" {extra}/>\n'

    def text(self, x, y, string, size=12, anchor="middle", extra=""):
        self.svg += (
            f'<text x="{x:.1f}" y="{y:.1f}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}" {extra}>{escape(str(string))}</text>\n'
        )

    def get_svg(self) -> str:
        return f"{self.svg}</svg>\n"


class _Axes:
    """Linear map from data coordinates to the plot area"""

    def __init__(self, x_range: Tuple[float, float], y_range: Tuple[float, float],
                 width: int = WIDTH, height: int = HEIGHT):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.left, self.right = MARGIN, width - MARGIN / 2
        self.top, self.bottom = MARGIN / 2, height - MARGIN

    def px(self, x: float) -> float:
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y: float) -> float:
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)

    def draw_frame(self, svg: SVGBuilder, x_label: str, y_label: str, ticks: int = 5):
        svg.line(self.left, self.bottom, self.right, self.bottom)
        svg.line(self.left, self.bottom, self.left, self.top)
        for value in np.linspace(self.x0, self.x1, ticks):
            svg.line(self.px(value), self.bottom, self.px(value), self.bottom + 4)
            svg.text(self.px(value), self.bottom + 18, f"{value:.3g}", size=10)
        for value in np.linspace(self.y0, self.y1, ticks):
            svg.line(self.left - 4, self.py(value), self.left, self.py(value))
            svg.text(self.left - 8, self.py(value) + 4, f"{value:.3g}", size=10, anchor="end")
        svg.text((self.left + self.right) / 2, self.bottom + 38, x_label)
        svg.text(
            16, (self.top + self.bottom) / 2, y_label,
            extra=f'transform="rotate(-90 16 {(self.top + self.bottom) / 2:.1f})"',
        )


def render_f1_curve(summary: Sequence[SummaryRow], title: str = "") -> str:
    """Mean macro F1 against iteration with a +-1 std band"""
    svg = SVGBuilder()
    if not summary:
        svg.text(WIDTH / 2, HEIGHT / 2, "no completed runs")
        return svg.get_svg()

    iterations = [row.iteration for row in summary]
    axes = _Axes((min(iterations), max(iterations)), (0.0, 1.0))
    upper = [(axes.px(r.iteration), axes.py(min(1.0, r.f1_mean + r.f1_std))) for r in summary]
    lower = [(axes.px(r.iteration), axes.py(max(0.0, r.f1_mean - r.f1_std))) for r in summary]
    svg.polygon(upper + lower[::-1], BAND_COLOR)
    svg.polyline([(axes.px(r.iteration), axes.py(r.f1_mean)) for r in summary], LINE_COLOR)
    axes.draw_frame(svg, "iteration", "macro F1")
    if title:
        svg.text(WIDTH / 2, 16, title, size=13)
    return svg.get_svg()


def render_query_scatter(bounds: DomainBounds, truth: GroundTruth, queries: Sequence[Sequence[float]],
                         initial_points: Optional[Sequence[Sequence[float]]] = None,
                         title: str = "") -> str:
    """Queried points over the truth labels of a 2-D problem"""
    if bounds.dim != 2:
        raise ValueError("query scatter needs a 2-D problem")
    svg = SVGBuilder(WIDTH, WIDTH)
    axes = _Axes((bounds.lower[0], bounds.upper[0]), (bounds.lower[1], bounds.upper[1]), WIDTH, WIDTH)

    step = max(1, int(np.ceil(len(truth) / MAX_BACKGROUND_POINTS)))
    for point, is_super in zip(truth.points[::step], truth.is_super[::step]):
        svg.circle(axes.px(point[0]), axes.py(point[1]), 2.5, SUPER_FILL if is_super else SUB_FILL)
    for point in initial_points or []:
        svg.circle(axes.px(point[0]), axes.py(point[1]), 3.5, INITIAL_FILL)
    for point in queries:
        svg.circle(axes.px(point[0]), axes.py(point[1]), 3.5, QUERY_FILL, 'fill-opacity="0.8"')

    axes.draw_frame(svg, "x1", "x2")
    if title:
        svg.text(WIDTH / 2, 16, title, size=13)
    return svg.get_svg()
