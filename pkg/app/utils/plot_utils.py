"""
Standalone SVG plots of T2 against EJ/Ec.
"""
import math
import xml.etree.ElementTree as ET
from typing import List, Optional, Sequence, Tuple

from app.models.errors import EmptySeries
from app.models.noise import ChannelKind
from app.models.sweep import SweepRow
from app.utils.data_utils import Destination, write_text

WIDTH, HEIGHT = 640, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 20, 40, 60

CHANNEL_LABELS = {
    ChannelKind.CHARGE: "charge noise",
    ChannelKind.FLUX: "flux noise",
    ChannelKind.CRITICAL_CURRENT: "critical-current noise",
}

Series = List[Tuple[float, float]]


def _series(rows: Sequence[SweepRow], channel: ChannelKind, asymptotic: bool) -> Series:
    points = []
    for row in rows:
        columns = row.channels.get(channel)
        if columns is None:
            continue
        value = columns.t2_asymptotic if asymptotic else columns.t2_seconds
        # Unbounded and missing values leave a gap
        if value is not None and math.isfinite(value) and value > 0:
            points.append((row.ratio, value))
    return points


def _fmt(value: float) -> str:
    return f"{value:.2f}"


class _Axes:
    """Linear x, log10 y, mapped onto the plot rectangle."""

    def __init__(self, xs: List[float], ys: List[float]):
        self.x_min, self.x_max = min(xs), max(xs)
        if self.x_max == self.x_min:
            self.x_min, self.x_max = self.x_min - 1.0, self.x_max + 1.0
        self.decade_min = math.floor(math.log10(min(ys)))
        self.decade_max = math.ceil(math.log10(max(ys)))
        if self.decade_max == self.decade_min:
            self.decade_max += 1

    def x(self, value: float) -> float:
        span = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        return MARGIN_LEFT + span * (value - self.x_min) / (self.x_max - self.x_min)

    def y(self, value: float) -> float:
        span = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        fraction = (math.log10(value) - self.decade_min) / (self.decade_max - self.decade_min)
        return HEIGHT - MARGIN_BOTTOM - span * fraction

    def points(self, series: Series) -> str:
        return " ".join(f"{_fmt(self.x(x))},{_fmt(self.y(y))}" for x, y in series)


def _text(parent: ET.Element, x: float, y: float, content: str, **attrs) -> None:
    element = ET.SubElement(parent, "text", {"x": _fmt(x), "y": _fmt(y), **attrs})
    element.text = content


def _line(parent: ET.Element, x1: float, y1: float, x2: float, y2: float, **attrs) -> None:
    ET.SubElement(
        parent,
        "line",
        {"x1": _fmt(x1), "y1": _fmt(y1), "x2": _fmt(x2), "y2": _fmt(y2), "stroke": "black", **attrs},
    )


def render_plot(rows: Sequence[SweepRow], channel: ChannelKind) -> str:
    """SVG document: numeric T2 as a solid polyline, the calibrated law dashed."""
    numeric = _series(rows, channel, asymptotic=False)
    if not numeric:
        raise EmptySeries(f"no finite {channel.value} T2 values to plot")
    overlay = _series(rows, channel, asymptotic=True)

    axes = _Axes(
        [x for x, _ in numeric + overlay],
        [y for _, y in numeric + overlay],
    )
    label = CHANNEL_LABELS[channel]

    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": str(WIDTH),
            "height": str(HEIGHT),
            "viewBox": f"0 0 {WIDTH} {HEIGHT}",
            "font-family": "sans-serif",
            "font-size": "12",
        },
    )
    ET.SubElement(svg, "title").text = f"Dephasing time due to {label}"
    ET.SubElement(svg, "rect", {"x": "0", "y": "0", "width": str(WIDTH), "height": str(HEIGHT), "fill": "white"})

    # Axes
    bottom, left = HEIGHT - MARGIN_BOTTOM, MARGIN_LEFT
    _line(svg, left, bottom, WIDTH - MARGIN_RIGHT, bottom)
    _line(svg, left, MARGIN_TOP, left, bottom)

    for decade in range(axes.decade_min, axes.decade_max + 1):
        y = axes.y(10.0 ** decade)
        _line(svg, left - 5, y, left, y)
        _text(svg, left - 8, y + 4, f"1e{decade}", **{"text-anchor": "end"})

    for i in range(5):
        value = axes.x_min + (axes.x_max - axes.x_min) * i / 4
        x = axes.x(value)
        _line(svg, x, bottom, x, bottom + 5)
        _text(svg, x, bottom + 18, f"{value:.4g}", **{"text-anchor": "middle"})

    _text(svg, (left + WIDTH - MARGIN_RIGHT) / 2, HEIGHT - 15, "EJ/Ec", **{"text-anchor": "middle"})
    _text(
        svg,
        20,
        (MARGIN_TOP + bottom) / 2,
        f"T2 ({label}) [s]",
        **{"text-anchor": "middle", "transform": f"rotate(-90 20 {_fmt((MARGIN_TOP + bottom) / 2)})"},
    )
    _text(svg, WIDTH / 2, 24, f"Dephasing time due to {label}", **{"text-anchor": "middle"})

    ET.SubElement(
        svg,
        "polyline",
        {"class": "numeric", "points": axes.points(numeric), "fill": "none", "stroke": "#1f77b4", "stroke-width": "2"},
    )
    if overlay:
        ET.SubElement(
            svg,
            "polyline",
            {
                "class": "asymptotic",
                "points": axes.points(overlay),
                "fill": "none",
                "stroke": "#d62728",
                "stroke-width": "1.5",
                "stroke-dasharray": "6,4",
            },
        )

    return ET.tostring(svg, encoding="unicode") + "\n"


def emit_plot(
    rows: Sequence[SweepRow],
    channel: ChannelKind,
    destination: Optional[Destination] = None,
) -> str:
    """Render the channel's plot and write it to destination (stdout when None)."""
    document = render_plot(rows, channel)
    write_text(document, destination)
    return document
