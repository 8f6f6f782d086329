"""Scatter and QQ plots as standalone SVG documents.

Rendering is hand-rolled string assembly: no plotting dependency, and the
output bytes are a pure function of the input, which keeps golden-file tests
honest. Coordinates are formatted with fixed precision for the same reason.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptySeries
from .marginals import MarginalTable
from .metrics import quantiles
from .schema import NUMERICAL
from .table import TableData

SHARED = "shared"
REAL_ONLY = "real_only"
SYNTH_ONLY = "synth_only"

CLASS_COLORS = {
    SHARED: "#1f77b4",
    REAL_ONLY: "#d62728",
    SYNTH_ONLY: "#ff7f0e",
}
SERIES_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

# Rendering cap; metrics never subsample, plots do (seeded) above this.
MAX_RENDER_POINTS = 200_000
LOG_FLOOR = 1e-6

_W, _H = 640, 640
_ML, _MR, _MT, _MB = 80, 40, 50, 70
_PW = _W - _ML - _MR   # 520
_PH = _H - _MT - _MB   # 520


@dataclass(frozen=True)
class ScatterPoint:
    columns: tuple[str, ...]
    labels: tuple[str, ...]
    x: float                 # p_real
    y: float                 # p_synth
    cls: str                 # shared | real_only | synth_only

    def to_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "labels": list(self.labels),
            "x": self.x,
            "y": self.y,
            "class": self.cls,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ScatterPoint":
        return cls(
            tuple(doc["columns"]), tuple(doc["labels"]),
            float(doc["x"]), float(doc["y"]), doc["class"],
        )


def scatter_points(tables: list[MarginalTable], degree: int) -> list[ScatterPoint]:
    """One point per union-support cell across all tables of one degree."""
    points: list[ScatterPoint] = []
    for table in tables:
        if table.k != degree:
            raise ValueError(
                f"table over {table.names} has degree {table.k}, expected {degree}"
            )
        p = table.p_real()
        q = table.p_synth()
        for i in range(table.n_cells):
            real_seen = table.count_real[i] > 0
            synth_seen = table.count_synth[i] > 0
            cls = SHARED if (real_seen and synth_seen) else (
                REAL_ONLY if real_seen else SYNTH_ONLY
            )
            points.append(
                ScatterPoint(table.names, table.cell_labels(i), float(p[i]), float(q[i]), cls)
            )
    return points


@dataclass(frozen=True)
class QQSeries:
    """Quantile pairs for one variable, min-max normalized by the real range."""

    name: str
    real_q: tuple[float, ...]
    synth_q: tuple[float, ...]

    def __post_init__(self):
        if len(self.real_q) != len(self.synth_q):
            raise ValueError(f"series {self.name!r}: quantile lists differ in length")
        if any(b < a for a, b in zip(self.real_q, self.real_q[1:])):
            raise ValueError(f"series {self.name!r}: real quantiles must be nondecreasing")

    def to_dict(self) -> dict:
        return {
            "variable": self.name,
            "real_q": list(self.real_q),
            "synth_q": list(self.synth_q),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "QQSeries":
        return cls(doc["variable"], tuple(doc["real_q"]), tuple(doc["synth_q"]))


def qq_series(
    name: str, real_values, synth_values, n_points: int = 101
) -> QQSeries:
    """Build one QQ series; both sides are normalized by the real min/max."""
    r_q = quantiles(real_values, n_points)
    s_q = quantiles(synth_values, n_points)
    lo, hi = float(r_q[0]), float(r_q[-1])
    span = hi - lo
    if span == 0.0:
        # constant real column: collapse to the plot midline
        norm_r = np.full(r_q.shape, 0.5)
        norm_s = np.where(s_q == lo, 0.5, np.where(s_q > lo, 1.0, 0.0))
    else:
        norm_r = (r_q - lo) / span
        norm_s = (s_q - lo) / span
    return QQSeries(name, tuple(float(v) for v in norm_r), tuple(float(v) for v in norm_s))


def qq_series_for_pair(
    real: TableData, synth: TableData, n_points: int = 101
) -> list[QQSeries]:
    """One series per numeric column that has present values on both sides."""
    out = []
    for name in real.schema.names_of_kind(NUMERICAL):
        r = real.numeric(name).present()
        s = synth.numeric(name).present()
        if r.size and s.size:
            out.append(qq_series(name, r, s, n_points))
    return out


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _px(x: float) -> float:
    return _ML + x * _PW


def _py(y: float) -> float:
    return _MT + (1.0 - y) * _PH


def _log_pos(p: float) -> float:
    if p <= LOG_FLOOR:
        return 0.0
    return min(1.0, math.log10(p / LOG_FLOOR) / -math.log10(LOG_FLOOR))


def _svg_open(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="#ffffff"/>',
        f'<text x="{_W / 2:.1f}" y="28" font-size="16" text-anchor="middle">'
        f"{escape(title)}</text>",
        '<defs><clipPath id="plotarea">'
        f'<rect x="{_ML}" y="{_MT}" width="{_PW}" height="{_PH}"/>'
        "</clipPath></defs>",
    ]


def _frame_and_diagonal() -> list[str]:
    return [
        f'<rect x="{_ML}" y="{_MT}" width="{_PW}" height="{_PH}" '
        'fill="none" stroke="#333333" stroke-width="1"/>',
        f'<line x1="{_px(0):.1f}" y1="{_py(0):.1f}" x2="{_px(1):.1f}" y2="{_py(1):.1f}" '
        'stroke="#999999" stroke-width="1" stroke-dasharray="5,4"/>',
    ]


def _linear_ticks(axis_label_x: str, axis_label_y: str) -> list[str]:
    parts = []
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = _px(t)
        y = _py(t)
        parts.append(
            f'<line x1="{x:.1f}" y1="{_MT + _PH}" x2="{x:.1f}" y2="{_MT + _PH + 5}" '
            'stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{_MT + _PH + 20}" font-size="11" '
            f'text-anchor="middle">{t:g}</text>'
        )
        parts.append(
            f'<line x1="{_ML - 5}" y1="{y:.1f}" x2="{_ML}" y2="{y:.1f}" '
            'stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_ML - 9}" y="{y + 4:.1f}" font-size="11" '
            f'text-anchor="end">{t:g}</text>'
        )
    parts.append(
        f'<text x="{_ML + _PW / 2:.1f}" y="{_H - 18}" font-size="13" '
        f'text-anchor="middle">{escape(axis_label_x)}</text>'
    )
    parts.append(
        f'<text x="22" y="{_MT + _PH / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 22 {_MT + _PH / 2:.1f})">{escape(axis_label_y)}</text>'
    )
    return parts


def _log_ticks(axis_label_x: str, axis_label_y: str) -> list[str]:
    parts = []
    decades = range(int(math.log10(LOG_FLOOR)), 1, 2)  # -6, -4, -2, 0
    for d in decades:
        t = _log_pos(10.0 ** d)
        x = _px(t)
        y = _py(t)
        label = "1" if d == 0 else f"1e{d}"
        parts.append(
            f'<line x1="{x:.1f}" y1="{_MT + _PH}" x2="{x:.1f}" y2="{_MT + _PH + 5}" '
            'stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{_MT + _PH + 20}" font-size="11" '
            f'text-anchor="middle">{label}</text>'
        )
        parts.append(
            f'<line x1="{_ML - 5}" y1="{y:.1f}" x2="{_ML}" y2="{y:.1f}" '
            'stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_ML - 9}" y="{y + 4:.1f}" font-size="11" '
            f'text-anchor="end">{label}</text>'
        )
    parts.append(
        f'<text x="{_ML + _PW / 2:.1f}" y="{_H - 18}" font-size="13" '
        f'text-anchor="middle">{escape(axis_label_x)} (log)</text>'
    )
    parts.append(
        f'<text x="22" y="{_MT + _PH / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 22 {_MT + _PH / 2:.1f})">{escape(axis_label_y)} (log)</text>'
    )
    return parts


def _subsample(n: int, cap: int, seed: int) -> np.ndarray:
    idx = np.random.default_rng(seed).choice(n, size=cap, replace=False)
    idx.sort()
    return idx


def render_scatter(
    points: list[ScatterPoint],
    title: str,
    log_scale: bool = False,
    seed: int = 0,
) -> str:
    """Square probability-vs-probability scatter with the identity diagonal."""
    if len(points) > MAX_RENDER_POINTS:
        keep = _subsample(len(points), MAX_RENDER_POINTS, seed)
        points = [points[i] for i in keep]

    parts = _svg_open(title)
    parts.extend(
        _log_ticks("real probability", "synthetic probability") if log_scale
        else _linear_ticks("real probability", "synthetic probability")
    )
    if log_scale:
        # in log space the diagonal still maps to the corner-to-corner line
        parts.append(
            f'<rect x="{_ML}" y="{_MT}" width="{_PW}" height="{_PH}" '
            'fill="none" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<line x1="{_px(0):.1f}" y1="{_py(0):.1f}" x2="{_px(1):.1f}" y2="{_py(1):.1f}" '
            'stroke="#999999" stroke-width="1" stroke-dasharray="5,4"/>'
        )
    else:
        parts.extend(_frame_and_diagonal())

    parts.append('<g clip-path="url(#plotarea)">')
    for pt in points:
        px = _log_pos(pt.x) if log_scale else pt.x
        py = _log_pos(pt.y) if log_scale else pt.y
        parts.append(
            f'<circle cx="{_fmt(_px(px))}" cy="{_fmt(_py(py))}" r="2.5" '
            f'fill="{CLASS_COLORS[pt.cls]}" fill-opacity="0.6"/>'
        )
    parts.append("</g>")

    counts = {cls: 0 for cls in (SHARED, REAL_ONLY, SYNTH_ONLY)}
    for pt in points:
        counts[pt.cls] += 1
    ly = _MT + 14
    for cls in (SHARED, REAL_ONLY, SYNTH_ONLY):
        parts.append(
            f'<rect x="{_ML + _PW - 168}" y="{ly - 9}" width="10" height="10" '
            f'fill="{CLASS_COLORS[cls]}"/>'
        )
        parts.append(
            f'<text x="{_ML + _PW - 153}" y="{ly}" font-size="11">'
            f"{cls} ({counts[cls]})</text>"
        )
        ly += 16
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_qq(series: list[QQSeries], title: str) -> str:
    """All variables overlaid on one normalized QQ plot."""
    if not series:
        raise EmptySeries("no QQ series to render")
    parts = _svg_open(title)
    parts.extend(_linear_ticks("real quantiles (normalized)",
                               "synthetic quantiles (normalized)"))
    parts.extend(_frame_and_diagonal())
    parts.append('<g clip-path="url(#plotarea)">')
    for i, s in enumerate(series):
        color = SERIES_PALETTE[i % len(SERIES_PALETTE)]
        coords = " ".join(
            f"{_fmt(_px(x))},{_fmt(_py(y))}" for x, y in zip(s.real_q, s.synth_q)
        )
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            'stroke-width="1.5"/>'
        )
    parts.append("</g>")
    ly = _MT + 14
    for i, s in enumerate(series):
        color = SERIES_PALETTE[i % len(SERIES_PALETTE)]
        parts.append(
            f'<rect x="{_ML + _PW - 168}" y="{ly - 9}" width="10" height="10" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_ML + _PW - 153}" y="{ly}" font-size="11">'
            f"{escape(s.name)}</text>"
        )
        ly += 16
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
