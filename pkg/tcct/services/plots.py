"""Self-contained SVG rendering of power curves and Beta-shape power heatmaps.

Coordinates are written with fixed two-decimal formatting and elements in a
fixed order, so identical inputs give byte-identical files.
"""

from pathlib import Path
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape

from loguru import logger

from tcct.models.pvalues import Method
from tcct.models.scenarios import PowerCurve, PowerHeatmap

SERIES_COLOURS = {Method.TCCT: "#c0392b", Method.CCT: "#2c6fbb"}
POWER_RAMP = ("#f7fbff", "#08306b")
GAIN_RAMP = ("#2166ac", "#f7f7f7", "#b2182b")
FONT = "Helvetica, Arial, sans-serif"


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _hex_to_rgb(colour: str) -> Tuple[int, int, int]:
    return tuple(int(colour[i : i + 2], 16) for i in (1, 3, 5))  # type: ignore[return-value]


def _blend(a: str, b: str, t: float) -> str:
    ra, rb = _hex_to_rgb(a), _hex_to_rgb(b)
    return "#" + "".join(f"{round(x + (y - x) * t):02x}" for x, y in zip(ra, rb))


def power_colour(v: float) -> str:
    return _blend(*POWER_RAMP, min(max(v, 0.0), 1.0))


def gain_colour(v: float) -> str:
    """Diverging ramp over [-1, 1], white at 0."""
    v = min(max(v, -1.0), 1.0)
    low, mid, high = GAIN_RAMP
    return _blend(mid, high, v) if v >= 0.0 else _blend(mid, low, -v)


class SvgCanvas:
    """Append-only SVG document builder."""

    def __init__(self, width: int, height: int) -> None:
        self.width = width
        self.height = height
        self.parts: List[str] = []

    def rect(self, x: float, y: float, w: float, h: float, fill: str, stroke: str = "none") -> None:
        self.parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str = "#000000", dash: str = "") -> None:
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="1"{dash_attr}/>'
        )

    def polyline(self, points: Sequence[Tuple[float, float]], stroke: str) -> None:
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        self.parts.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="2"/>')

    def circle(self, x: float, y: float, r: float, fill: str) -> None:
        self.parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" fill="{fill}"/>')

    def text(self, x: float, y: float, content: str, size: int = 12, anchor: str = "start", rotate: bool = False) -> None:
        transform = f' transform="rotate(-90 {_fmt(x)} {_fmt(y)})"' if rotate else ""
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="{FONT}" font-size="{size}" '
            f'text-anchor="{anchor}"{transform}>{escape(content)}</text>'
        )

    def render(self) -> str:
        header = (
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">'
        )
        background = f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="#ffffff"/>'
        return "\n".join([header, background, *self.parts, "</svg>"]) + "\n"


def render_power_curve(curve: PowerCurve) -> str:
    """Line plot of power against c, one series per method, with the nominal level dashed."""
    width, height = 640, 420
    left, right, top, bottom = 70, 30, 40, 60
    plot_w, plot_h = width - left - right, height - top - bottom
    x_min = min(0.0, curve.c_grid[0])
    x_max = curve.c_grid[-1] if curve.c_grid[-1] > x_min else x_min + 1.0

    def sx(c: float) -> float:
        return left + (c - x_min) / (x_max - x_min) * plot_w

    def sy(p: float) -> float:
        return top + (1.0 - p) * plot_h

    svg = SvgCanvas(width, height)
    svg.text(width / 2, 24, f"Power at level {curve.level:g} ({curve.replications} replications)", size=14, anchor="middle")
    svg.line(left, top + plot_h, left + plot_w, top + plot_h)
    svg.line(left, top, left, top + plot_h)
    for k in range(6):
        c = x_min + (x_max - x_min) * k / 5
        svg.line(sx(c), top + plot_h, sx(c), top + plot_h + 5)
        svg.text(sx(c), top + plot_h + 20, f"{c:.2f}", size=11, anchor="middle")
        p = k / 5
        svg.line(left - 5, sy(p), left, sy(p))
        svg.text(left - 8, sy(p) + 4, f"{p:.1f}", size=11, anchor="end")
    svg.text(left + plot_w / 2, height - 15, "c", size=13, anchor="middle")
    svg.text(20, top + plot_h / 2, "Power", size=13, anchor="middle", rotate=True)
    svg.line(left, sy(curve.level), left + plot_w, sy(curve.level), stroke="#888888", dash="4,4")

    for row, method in enumerate(sorted(curve.powers, key=lambda m: m.value, reverse=True)):
        colour = SERIES_COLOURS.get(method, "#333333")
        points = [(sx(c), sy(p)) for c, p in zip(curve.c_grid, curve.powers[method])]
        svg.polyline(points, colour)
        for x, y in points:
            svg.circle(x, y, 3, colour)
        ly = top + 15 + 20 * row
        svg.line(left + 15, ly, left + 40, ly, stroke=colour)
        svg.text(left + 46, ly + 4, method.value.upper(), size=12)
    return svg.render()


def _heat_panel(
    svg: SvgCanvas, x0: float, y0: float, cell: float, title: str, heatmap: PowerHeatmap,
    layer: List[List[float]], colour, legend: Tuple[float, float],
) -> None:
    n1, n2 = len(heatmap.shape1), len(heatmap.shape2)
    svg.text(x0 + n1 * cell / 2, y0 - 10, title, size=13, anchor="middle")
    for i in range(n1):
        for j in range(n2):
            # shape1 runs left to right, shape2 bottom to top
            svg.rect(x0 + i * cell, y0 + (n2 - 1 - j) * cell, cell, cell, colour(layer[i][j]))
    svg.rect(x0, y0, n1 * cell, n2 * cell, "none", stroke="#000000")
    for i in (0, n1 - 1):
        svg.text(x0 + (i + 0.5) * cell, y0 + n2 * cell + 14, f"{heatmap.shape1[i]:.1f}", size=10, anchor="middle")
    for j in (0, n2 - 1):
        svg.text(x0 - 4, y0 + (n2 - 1 - j + 0.5) * cell + 4, f"{heatmap.shape2[j]:.1f}", size=10, anchor="end")
    svg.text(x0 + n1 * cell / 2, y0 + n2 * cell + 30, "shape 1", size=11, anchor="middle")
    svg.text(x0 - 28, y0 + n2 * cell / 2, "shape 2", size=11, anchor="middle", rotate=True)

    # Colour legend below the axis label
    low, high = legend
    steps = 10
    ly = y0 + n2 * cell + 42
    step_w = n1 * cell / steps
    for k in range(steps):
        v = low + (high - low) * (k + 0.5) / steps
        svg.rect(x0 + k * step_w, ly, step_w, 10, colour(v))
    svg.text(x0, ly + 24, f"{low:.1f}", size=10, anchor="start")
    svg.text(x0 + n1 * cell, ly + 24, f"{high:.1f}", size=10, anchor="end")


def render_heatmap(heatmap: PowerHeatmap) -> str:
    """Three panels side by side: TCCT power, CCT power, and the power gain."""
    cell = 14.0
    n1, n2 = len(heatmap.shape1), len(heatmap.shape2)
    panel_w, panel_h = n1 * cell, n2 * cell
    margin, gap = 60.0, 70.0
    width = int(2 * margin + 3 * panel_w + 2 * gap)
    height = int(panel_h + 150)
    svg = SvgCanvas(width, height)
    svg.text(
        width / 2, 22, f"Power over Beta shapes at level {heatmap.level:g} ({heatmap.replications} replications)",
        size=14, anchor="middle",
    )
    panels = [
        ("TCCT power", heatmap.tcct, power_colour, (0.0, 1.0)),
        ("CCT power", heatmap.cct, power_colour, (0.0, 1.0)),
        ("Power gain (TCCT - CCT)", heatmap.gain, gain_colour, (-1.0, 1.0)),
    ]
    for k, (title, layer, colour, legend) in enumerate(panels):
        _heat_panel(svg, margin + k * (panel_w + gap), 55.0, cell, title, heatmap, layer, colour, legend)
    return svg.render()


def save_svg(content: str, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8", newline="\n")
    logger.info(f"Wrote figure to {path}")
