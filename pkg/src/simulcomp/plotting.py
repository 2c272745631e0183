"""Simultaneous confidence interval charts as static SVG or plain text.

The SVG is written by hand rather than through a plotting library so the
same result always produces the same bytes.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .exceptions import ValidationError
from .inference import InferenceResult


def _finite_span(result: InferenceResult) -> tuple[float, float]:
    vals = [0.0]
    for r in result.rows:
        vals += [v for v in (r.ci_lower, r.ci_upper, r.estimate) if math.isfinite(v)]
    lo, hi = min(vals), max(vals)
    pad = 0.05 * (hi - lo or 1.0)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12:
        out.append(round(v, 12) + 0.0)
        v += step
    return out


def render_svg(result: InferenceResult, width: int = 640, row_height: int = 22,
               title: str | None = None) -> str:
    if not result.rows:
        raise ValidationError("nothing to plot: result has no rows")
    lo, hi = _finite_span(result)
    label_w, margin, top = 110, 20, 40
    plot_w = width - label_w - 2 * margin
    n = len(result.rows)
    height = top + n * row_height + 40

    def x(v):
        v = min(max(v, lo), hi)
        return label_w + margin + (v - lo) / (hi - lo) * plot_w

    level = round(100 * (1 - result.alpha), 6)
    title = title or f"{level:g}% simultaneous confidence intervals ({result.alternative})"
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:.2f}" y="20" font-family="sans-serif" font-size="13" '
        f'text-anchor="middle">{escape(title)}</text>',
    ]
    axis_y = top + n * row_height
    for t in _ticks(lo, hi):
        out.append(f'<line x1="{x(t):.2f}" y1="{top - 6}" x2="{x(t):.2f}" y2="{axis_y}" '
                   'stroke="#dddddd" stroke-width="1"/>')
        out.append(f'<text x="{x(t):.2f}" y="{axis_y + 16}" font-family="sans-serif" font-size="10" '
                   f'text-anchor="middle">{t:g}</text>')
    out.append(f'<line x1="{x(0):.2f}" y1="{top - 6}" x2="{x(0):.2f}" y2="{axis_y}" '
               'stroke="black" stroke-width="1" stroke-dasharray="4,3"/>')
    for i, r in enumerate(result.rows):
        y = top + i * row_height + row_height / 2
        colour = "#b2182b" if r.excludes_zero() else "#2166ac"
        out.append(f'<text x="{label_w:.2f}" y="{y + 4:.2f}" font-family="monospace" font-size="11" '
                   f'text-anchor="end">{escape(r.label)}</text>')
        out.append(f'<line x1="{x(r.ci_lower):.2f}" y1="{y:.2f}" x2="{x(r.ci_upper):.2f}" y2="{y:.2f}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        for end in (r.ci_lower, r.ci_upper):
            if math.isfinite(end):
                out.append(f'<line x1="{x(end):.2f}" y1="{y - 5:.2f}" x2="{x(end):.2f}" y2="{y + 5:.2f}" '
                           f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<circle cx="{x(r.estimate):.2f}" cy="{y:.2f}" r="3" fill="{colour}"/>')
    out.append(f'<text x="{label_w + margin + plot_w / 2:.2f}" y="{height - 6}" font-family="sans-serif" '
               'font-size="11" text-anchor="middle">difference to control</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_ascii(result: InferenceResult, width: int = 60) -> str:
    if not result.rows:
        raise ValidationError("nothing to plot: result has no rows")
    lo, hi = _finite_span(result)

    def col(v):
        v = min(max(v, lo), hi)
        return int(round((v - lo) / (hi - lo) * (width - 1)))

    lw = max(len(r.label) for r in result.rows)
    zero = col(0.0)
    lines = []
    for r in result.rows:
        row = [" "] * width
        row[zero] = "|"
        a, b = col(r.ci_lower), col(r.ci_upper)
        for c in range(a, b + 1):
            row[c] = "-" if c != zero else "+"
        row[a] = "[" if math.isfinite(r.ci_lower) else "<"
        row[b] = "]" if math.isfinite(r.ci_upper) else ">"
        row[col(r.estimate)] = "o"
        flag = " *" if r.excludes_zero() else ""
        lines.append(f"{r.label.ljust(lw)} {''.join(row)}{flag}")
    lines.append(f"{'':{lw}} {lo:<{width // 2}.3g}{hi:>{width - width // 2}.3g}")
    return "\n".join(lines) + "\n"


def render_ci_plot(result: InferenceResult, format: str = "svg") -> str:
    """Horizontal interval chart, one row per contrast, with a zero reference line."""
    if format == "svg":
        return render_svg(result)
    if format == "ascii":
        return render_ascii(result)
    raise ValidationError(f"unknown plot format {format!r}")
