"""Static SVG charts and the index page that links them.

Three self-contained SVG files are produced per dataset report:

* ``composition.svg`` — dataset-average pie plus one stacked role bar per
  project;
* ``contribution.svg`` — per-project acceptance-rate and decision-latency
  bars with dataset averages;
* ``promotion.svg`` — boxplot of per-project promotion means with labeled
  outliers.

Rendering is a pure function of the report: coordinates use fixed
precision and nothing depends on the clock, so repeated runs emit
identical bytes.
"""

from __future__ import annotations

import html
import math
from pathlib import Path

from ..roles import ROLE_ORDER, Role
from ..stats import BoxplotSummary
from .builders import DatasetReport

FONT = "font-family=\"Helvetica, Arial, sans-serif\""

ROLE_COLORS = {
    Role.MEMBER: "#1f77b4",
    Role.COLLABORATOR: "#2ca02c",
    Role.EXTERNAL_CONTRIBUTOR: "#ff7f0e",
    Role.EXTERNAL_USER: "#9467bd",
}

TWO_PI = 2.0 * math.pi


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def _esc(text: str) -> str:
    return html.escape(text, quote=True)


def _svg_open(width: float, height: float) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}" {FONT}>'
    )


def _text(x: float, y: float, content: str, *, size: int = 12, anchor: str = "start", fill: str = "#333") -> str:
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" '
        f'text-anchor="{anchor}" fill="{fill}">{_esc(content)}</text>'
    )


def _rect(x: float, y: float, w: float, h: float, fill: str, extra: str = "") -> str:
    return (
        f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'fill="{fill}"{extra}/>'
    )


def _line(x1: float, y1: float, x2: float, y2: float, stroke: str = "#333", width: float = 1.0, dash: str = "") -> str:
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
        f'stroke="{stroke}" stroke-width="{width}"{dash_attr}/>'
    )


def _pie_point(cx: float, cy: float, r: float, angle: float) -> tuple[float, float]:
    # angle measured clockwise from 12 o'clock
    return cx + r * math.sin(angle), cy - r * math.cos(angle)


def pie_sector_path(cx: float, cy: float, r: float, start: float, sweep: float) -> str:
    """Path data for one pie sector (angles in radians, clockwise from top)."""
    x0, y0 = _pie_point(cx, cy, r, start)
    x1, y1 = _pie_point(cx, cy, r, start + sweep)
    large = 1 if sweep > math.pi else 0
    return (
        f"M {_fmt(cx)} {_fmt(cy)} L {_fmt(x0)} {_fmt(y0)} "
        f"A {_fmt(r)} {_fmt(r)} 0 {large} 1 {_fmt(x1)} {_fmt(y1)} Z"
    )


def _pie(cx: float, cy: float, r: float, fractions: dict[Role, float]) -> list[str]:
    parts = []
    angle = 0.0
    for role in ROLE_ORDER:
        fraction = fractions[role]
        if fraction <= 0.0:
            continue
        color = ROLE_COLORS[role]
        if fraction >= 1.0 - 1e-9:
            parts.append(
                f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="{color}"/>'
            )
            angle += TWO_PI * fraction
            continue
        sweep = TWO_PI * fraction
        path = pie_sector_path(cx, cy, r, angle, sweep)
        parts.append(f'<path d="{path}" fill="{color}" stroke="#ffffff" stroke-width="1"/>')
        angle += sweep
    return parts


def render_composition_chart(report: DatasetReport) -> str:
    rows = [r for r in report.per_project if r.composition is not None]
    width = 900.0
    bar_area_top = 330.0
    row_height = 26.0
    height = bar_area_top + row_height * len(rows) + 40.0
    parts = [_svg_open(width, height)]
    parts.append(_rect(0, 0, width, height, "#ffffff"))
    parts.append(_text(20, 30, "Community composition", size=18, fill="#111"))

    cx, cy, r = 170.0, 180.0, 110.0
    if report.average_composition is not None:
        count = report.average_composition.project_count
        noun = "project" if count == 1 else "projects"
        parts.append(_text(20, 60, f"Average over {count} original {noun}", size=12))
        parts.extend(_pie(cx, cy, r, report.average_composition.percentages))
    elif rows:
        parts.append(_text(20, 60, "Single project", size=12))
        parts.extend(_pie(cx, cy, r, rows[0].composition.percentages))

    legend_x, legend_y = 330.0, 120.0
    for i, role in enumerate(ROLE_ORDER):
        y = legend_y + i * 26.0
        parts.append(_rect(legend_x, y - 12, 14, 14, ROLE_COLORS[role]))
        label = role.value
        if report.average_composition is not None:
            pct = report.average_composition.percentages[role] * 100.0
            label += f"  {pct:.2f}%"
        parts.append(_text(legend_x + 22, y, label, size=13))

    parts.append(_text(20, bar_area_top - 16, "Per-project composition", size=14, fill="#111"))
    bar_x, bar_w = 260.0, width - 260.0 - 40.0
    for i, project_report in enumerate(rows):
        y = bar_area_top + i * row_height
        comp = project_report.composition
        parts.append(_text(bar_x - 10, y + 14, project_report.project.full_name, size=12, anchor="end"))
        x = bar_x
        for role in ROLE_ORDER:
            fraction = comp.percentages[role]
            if fraction <= 0.0:
                continue
            seg = bar_w * fraction
            parts.append(_rect(x, y, seg, row_height - 8, ROLE_COLORS[role]))
            x += seg
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _bar_panel(
    x0: float,
    y0: float,
    panel_w: float,
    panel_h: float,
    title: str,
    entries: list[tuple[str, float]],
    *,
    maximum: float,
    color: str,
    unit: str,
) -> list[str]:
    parts = [_text(x0, y0 - 12, title, size=14, fill="#111")]
    parts.append(_line(x0, y0 + panel_h, x0 + panel_w, y0 + panel_h, "#888"))
    if not entries:
        parts.append(_text(x0 + 10, y0 + panel_h / 2, "no data", size=12, fill="#888"))
        return parts
    slot = panel_w / len(entries)
    bar_w = min(46.0, slot * 0.6)
    for i, (label, value) in enumerate(entries):
        scaled = 0.0 if maximum <= 0 else (value / maximum) * (panel_h - 24.0)
        x = x0 + slot * i + (slot - bar_w) / 2.0
        y = y0 + panel_h - scaled
        parts.append(_rect(x, y, bar_w, scaled, color))
        parts.append(_text(x + bar_w / 2.0, y - 4, f"{value:.2f}{unit}", size=10, anchor="middle"))
        parts.append(_text(x + bar_w / 2.0, y0 + panel_h + 14, label, size=10, anchor="middle"))
    return parts


def render_contribution_chart(report: DatasetReport) -> str:
    width, height = 960.0, 400.0
    parts = [_svg_open(width, height)]
    parts.append(_rect(0, 0, width, height, "#ffffff"))
    parts.append(_text(20, 30, "External contribution analysis", size=18, fill="#111"))

    rate_entries: list[tuple[str, float]] = []
    day_entries: list[tuple[str, float]] = []
    for project_report in report.per_project:
        stats = project_report.contribution
        if stats is None:
            continue
        name = project_report.project.full_name.split("/")[-1]
        if stats.acceptance_rate is not None:
            rate_entries.append((name, stats.acceptance_rate * 100.0))
        if stats.mean_decision_days is not None:
            day_entries.append((name, stats.mean_decision_days))
    aggregate = report.aggregate_contribution
    if aggregate is not None:
        rate_entries.append(("(average)", aggregate.mean_acceptance_rate * 100.0))
        if aggregate.mean_decision_days is not None:
            day_entries.append(("(average)", aggregate.mean_decision_days))

    day_max = max((v for _, v in day_entries), default=1.0)
    parts.extend(
        _bar_panel(50, 90, 400, 250, "Accepted external pull requests (%)", rate_entries, maximum=100.0, color="#2ca02c", unit="%")
    )
    parts.extend(
        _bar_panel(520, 90, 400, 250, "Mean decision time (days)", day_entries, maximum=day_max, color="#ff7f0e", unit="d")
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_promotion_chart(summary: BoxplotSummary | None) -> str:
    width, height = 560.0, 440.0
    parts = [_svg_open(width, height)]
    parts.append(_rect(0, 0, width, height, "#ffffff"))
    parts.append(_text(20, 30, "Time to become collaborator (days)", size=18, fill="#111"))
    if summary is None:
        parts.append(_text(width / 2, height / 2, "no promotion data", size=14, anchor="middle", fill="#888"))
        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    top, bottom = 70.0, height - 50.0
    scale_min = min(summary.min, summary.whisker_low)
    scale_max = max(summary.max, summary.whisker_high)
    span = scale_max - scale_min
    if span <= 0.0:
        span = max(abs(scale_max), 1.0)
        scale_min -= span / 2.0
        scale_max += span / 2.0
        span = scale_max - scale_min
    pad = span * 0.08
    scale_min -= pad
    scale_max += pad

    def y_of(value: float) -> float:
        return bottom - (value - scale_min) / (scale_max - scale_min) * (bottom - top)

    cx = 210.0
    box_w = 120.0
    half = box_w / 2.0
    # whiskers and caps
    parts.append(_line(cx, y_of(summary.whisker_low), cx, y_of(summary.q1), "#555"))
    parts.append(_line(cx, y_of(summary.q3), cx, y_of(summary.whisker_high), "#555"))
    parts.append(_line(cx - half * 0.6, y_of(summary.whisker_low), cx + half * 0.6, y_of(summary.whisker_low), "#555"))
    parts.append(_line(cx - half * 0.6, y_of(summary.whisker_high), cx + half * 0.6, y_of(summary.whisker_high), "#555"))
    # box and median
    box_top = y_of(summary.q3)
    parts.append(_rect(cx - half, box_top, box_w, y_of(summary.q1) - box_top, "#aec7e8", ' stroke="#1f77b4"'))
    parts.append(_line(cx - half, y_of(summary.median), cx + half, y_of(summary.median), "#1f77b4", 2.0))

    for label, value in zip(
        ("min", "q1", "median", "q3", "max"),
        (summary.min, summary.q1, summary.median, summary.q3, summary.max),
    ):
        parts.append(_text(cx - half - 16, y_of(value) + 4, f"{label} {value:.2f}", size=11, anchor="end"))

    for label, value in summary.outliers:
        y = y_of(value)
        parts.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(y)}" r="4" fill="#d62728"/>')
        parts.append(_text(cx + half + 14, y + 4, f"{label} ({value:.2f})", size=11, fill="#d62728"))
    labeled = {label for label, _ in summary.outliers}
    for label, value in summary.above_box:
        if label in labeled or value > summary.whisker_high:
            continue
        y = y_of(value)
        parts.append(_text(cx + half + 14, y + 4, f"{label} ({value:.2f}) above box", size=10, fill="#8c564b"))

    parts.append(_text(cx, bottom + 28, f"n = {summary.n} projects", size=12, anchor="middle"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_index(report: DatasetReport, chart_files: list[str]) -> str:
    items = "\n".join(
        f'    <section><h2>{_esc(Path(name).stem)}</h2>'
        f'<a href="{_esc(name)}"><img src="{_esc(name)}" alt="{_esc(Path(name).stem)}"/></a></section>'
        for name in chart_files
    )
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n'
        "  <head>\n"
        '    <meta charset="utf-8"/>\n'
        "    <title>Project openness report</title>\n"
        "    <style>body{font-family:Helvetica,Arial,sans-serif;margin:2rem;}img{max-width:100%;}</style>\n"
        "  </head>\n"
        "  <body>\n"
        "    <h1>Project openness report</h1>\n"
        f"    <p>{len(report.per_project)} original projects &middot; tool version {_esc(report.tool_version)}</p>\n"
        f"{items}\n"
        "  </body>\n"
        "</html>\n"
    )


def emit_charts(report: DatasetReport, out_dir: str | Path) -> list[Path]:
    """Write composition, contribution and promotion SVGs plus an index page."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {
        "composition.svg": render_composition_chart(report),
        "contribution.svg": render_contribution_chart(report),
        "promotion.svg": render_promotion_chart(report.promotion_boxplot),
    }
    written = []
    for name, content in files.items():
        path = out_dir / name
        path.write_text(content, encoding="utf-8")
        written.append(path)
    index = out_dir / "index.html"
    index.write_text(render_index(report, list(files)), encoding="utf-8")
    written.append(index)
    return written
