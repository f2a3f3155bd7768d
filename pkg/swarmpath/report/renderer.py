"""SVG figure rendering with Jinja2."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from jinja2 import Environment, FileSystemLoader

from swarmpath.planning.workspace import Workspace

logger = logging.getLogger(__name__)

WIDTH = 640
HEIGHT = 480
MARGIN = 56
TICKS = 5
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


@dataclass(frozen=True)
class Frame:
    """Maps data coordinates onto the plot area (y axis pointing up)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    left: float
    top: float
    right: float
    bottom: float

    @classmethod
    def fit(
        cls,
        x_range: tuple[float, float],
        y_range: tuple[float, float],
        width: int = WIDTH,
        height: int = HEIGHT,
        margin: int = MARGIN,
        aspect: Optional[float] = None,
    ) -> "Frame":
        """Frame filling the canvas minus margins, letterboxed to ``aspect`` if given."""
        left, top, right, bottom = margin, margin / 2, width - margin / 2, height - margin
        if aspect is not None:
            plot_w, plot_h = right - left, bottom - top
            if plot_w / plot_h > aspect:
                excess = plot_w - aspect * plot_h
                left += excess / 2
                right -= excess / 2
            else:
                excess = plot_h - plot_w / aspect
                top += excess / 2
                bottom -= excess / 2
        x_lo, x_hi = _padded(*x_range)
        y_lo, y_hi = _padded(*y_range)
        return cls(x_lo, x_hi, y_lo, y_hi, left, top, right, bottom)

    def px(self, x: float) -> float:
        return self.left + (x - self.x_min) / (self.x_max - self.x_min) * (self.right - self.left)

    def py(self, y: float) -> float:
        return self.bottom - (y - self.y_min) / (self.y_max - self.y_min) * (self.bottom - self.top)

    def scale(self, length: float) -> float:
        return length / (self.x_max - self.x_min) * (self.right - self.left)

    def polyline(self, xs: Sequence[float], ys: Sequence[float]) -> str:
        return " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in zip(xs, ys))

    def x_ticks(self) -> list[dict]:
        return [{"pos": self.px(v), "label": _label(v)} for v in _ticks(self.x_min, self.x_max)]

    def y_ticks(self) -> list[dict]:
        return [{"pos": self.py(v), "label": _label(v)} for v in _ticks(self.y_min, self.y_max)]


def _padded(lo: float, hi: float) -> tuple[float, float]:
    if hi > lo:
        return float(lo), float(hi)
    pad = abs(lo) * 0.05 or 1.0
    return float(lo) - pad, float(hi) + pad


def _ticks(lo: float, hi: float) -> np.ndarray:
    return np.linspace(lo, hi, TICKS)


def _label(value: float) -> str:
    return f"{value:.3g}"


@lru_cache(maxsize=1)
def _environment() -> Environment:
    template_dir = Path(__file__).parent / "templates"
    env = Environment(loader=FileSystemLoader(str(template_dir)), autoescape=True)
    env.filters["num"] = lambda value: f"{value:.2f}"
    return env


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------


def render_workspace_svg(
    ws: Workspace,
    path: Optional[np.ndarray] = None,
    control_points: Optional[np.ndarray] = None,
    trajectory: Optional[np.ndarray] = None,
    title: Optional[str] = None,
) -> str:
    """Workspace bounds, obstacles, start/target markers and optional curves.

    Args:
        ws: Workspace to draw.
        path: Planned path points, shape (N, 2).
        control_points: Control polygon including the endpoints, shape (m, 2).
        trajectory: Driven positions, shape (n, 2).
        title: Figure title; defaults to the workspace name.

    Returns:
        SVG document.
    """
    aspect = (ws.x_max - ws.x_min) / (ws.y_max - ws.y_min)
    frame = Frame.fit((ws.x_min, ws.x_max), (ws.y_min, ws.y_max), aspect=aspect)
    obstacles = [
        {"cx": frame.px(o.center_x), "cy": frame.py(o.center_y), "r": frame.scale(o.radius)}
        for o in ws.obstacles
    ]
    polygon = None
    if control_points is not None:
        polygon = {
            "line": frame.polyline(control_points[:, 0], control_points[:, 1]),
            "points": [{"x": frame.px(x), "y": frame.py(y)} for x, y in control_points],
        }
    svg = _environment().get_template("workspace.svg.j2").render(
        width=WIDTH,
        height=HEIGHT,
        title=title or ws.name or "workspace",
        frame=frame,
        bounds={
            "x": frame.px(ws.x_min),
            "y": frame.py(ws.y_max),
            "w": frame.px(ws.x_max) - frame.px(ws.x_min),
            "h": frame.py(ws.y_min) - frame.py(ws.y_max),
        },
        obstacles=obstacles,
        start={"x": frame.px(ws.start[0]), "y": frame.py(ws.start[1])},
        target={"x": frame.px(ws.target[0]), "y": frame.py(ws.target[1])},
        path=frame.polyline(path[:, 0], path[:, 1]) if path is not None else None,
        polygon=polygon,
        trajectory=(
            frame.polyline(trajectory[:, 0], trajectory[:, 1]) if trajectory is not None else None
        ),
    )
    logger.debug("Workspace SVG rendered (%d chars)", len(svg))
    return svg


def render_series_svg(
    title: str,
    x: np.ndarray,
    series: dict[str, np.ndarray],
    x_label: str = "",
    y_label: str = "",
) -> str:
    """Line chart of one or more series sharing the x axis."""
    if not series:
        raise ValueError("series must not be empty")
    x = np.asarray(x, dtype=float)
    values = np.concatenate([np.asarray(v, dtype=float) for v in series.values()])
    frame = Frame.fit((float(x.min()), float(x.max())), (float(values.min()), float(values.max())))
    lines = [
        {"name": name, "color": PALETTE[i % len(PALETTE)], "points": frame.polyline(x, ys)}
        for i, (name, ys) in enumerate(series.items())
    ]
    return (
        _environment()
        .get_template("series.svg.j2")
        .render(
            width=WIDTH,
            height=HEIGHT,
            title=title,
            frame=frame,
            lines=lines,
            x_label=x_label,
            y_label=y_label,
        )
    )


def render_bars_svg(
    title: str,
    labels: Sequence[str],
    values: Sequence[Optional[float]],
    y_label: str = "",
) -> str:
    """Bar chart; ``None`` values are drawn as empty slots labelled n/a."""
    if len(labels) != len(values):
        raise ValueError("labels and values must have the same length")
    present = [v for v in values if v is not None]
    top = max(present + [0.0])
    frame = Frame.fit((0.0, float(max(len(labels), 1))), (0.0, top if top > 0 else 1.0))
    slot = frame.scale(1.0)
    bars = []
    for i, (label, value) in enumerate(zip(labels, values)):
        x = frame.px(float(i)) + slot * 0.15
        bar = {"label": label, "x": x, "w": slot * 0.7, "center": x + slot * 0.35}
        if value is None:
            bar.update(y=frame.py(0.0), h=0.0, text="n/a")
        else:
            bar.update(y=frame.py(value), h=frame.py(0.0) - frame.py(value), text=_label(value))
        bars.append(bar)
    return (
        _environment()
        .get_template("bars.svg.j2")
        .render(
            width=WIDTH,
            height=HEIGHT,
            title=title,
            frame=frame,
            bars=bars,
            y_label=y_label,
            color=PALETTE[0],
        )
    )


def write_svg(path: Path, svg: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg, encoding="utf-8")
    logger.info("Wrote %s", path)
    return path
