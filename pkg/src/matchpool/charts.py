"""Minimal deterministic SVG output for experiment results.

Hand-rolled rather than pulled from a plotting stack: the files are tiny,
byte-stable, and easy to assert on (one polyline per series, one rect
per region cell).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .analysis import RegionPoint

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class ChartSpec:
    kind: str  # "line" or "region"
    path: str
    title: str = ""
    x_label: str = ""
    y_label: str = ""


def emit_chart(data, spec: ChartSpec) -> Path:
    if spec.kind == "line":
        return emit_line_chart(data, spec.path, title=spec.title,
                               x_label=spec.x_label, y_label=spec.y_label)
    if spec.kind == "region":
        return emit_region_chart(data, spec.path, title=spec.title)
    raise ValueError(f"unknown chart kind {spec.kind!r}")


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def emit_line_chart(
    series: dict[str, list[tuple[float, float]]],
    path,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    width: int = 640,
    height: int = 420,
) -> Path:
    """Write a line/scatter chart; one polyline per named series."""
    if not series or all(not pts for pts in series.values()):
        raise ValueError("emit_line_chart requires a nonempty series")
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0
    ml, mr, mt, mb = 60, 20, 30, 45

    def sx(x: float) -> float:
        return ml + (x - x_lo) / x_span * (width - ml - mr)

    def sy(y: float) -> float:
        return height - mb - (y - y_lo) / y_span * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" '
        f'y2="{height - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.0f}" y="18" text-anchor="middle" '
            f'font-size="14">{title}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" '
            f'font-size="12">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" '
            f'font-size="12" transform="rotate(-90 14 {height / 2:.0f})">'
            f"{y_label}</text>"
        )
    for lo, hi, fixed, is_x in ((x_lo, x_hi, height - mb, True), (y_lo, y_hi, ml, False)):
        for frac in (0.0, 0.5, 1.0):
            val = lo + frac * (hi - lo)
            if is_x:
                parts.append(
                    f'<text x="{sx(val):.1f}" y="{fixed + 16}" text-anchor="middle" '
                    f'font-size="10">{_fmt(val)}</text>'
                )
            else:
                parts.append(
                    f'<text x="{fixed - 6}" y="{sy(val):.1f}" text-anchor="end" '
                    f'font-size="10">{_fmt(val)}</text>'
                )
    for i, (label, pts) in enumerate(sorted(series.items())):
        if not pts:
            continue
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in sorted(pts))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{coords}"/>'
        )
        for x, y in pts:
            parts.append(
                f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="2.5" fill="{color}"/>'
            )
        parts.append(
            f'<text x="{width - mr - 5}" y="{mt + 14 * (i + 1)}" text-anchor="end" '
            f'font-size="11" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return out


def emit_region_chart(
    points: list[RegionPoint], path, title: str = "", width: int = 640, height: int = 480
) -> Path:
    """Raster of a (c, rho) scan; satisfied cells are filled."""
    if not points:
        raise ValueError("emit_region_chart requires a nonempty scan")
    cs = sorted({p.c for p in points})
    rhos = sorted({p.rho for p in points})
    ml, mr, mt, mb = 60, 20, 30, 45
    cw = (width - ml - mr) / len(cs)
    ch = (height - mt - mb) / len(rhos)
    cpos = {c: i for i, c in enumerate(cs)}
    rpos = {r: i for i, r in enumerate(rhos)}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.0f}" y="18" text-anchor="middle" '
            f'font-size="14">{title}</text>'
        )
    for p in points:
        if not p.satisfied:
            continue
        x = ml + cpos[p.c] * cw
        y = height - mb - (rpos[p.rho] + 1) * ch
        parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{ch:.2f}" '
            f'fill="#1f77b4"/>'
        )
    parts.append(
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" '
        f'stroke="black"/>'
    )
    parts.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>')
    parts.append(
        f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" '
        f'font-size="12">c</text>'
    )
    parts.append(
        f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height / 2:.0f})">rho</text>'
    )
    for val, frac in ((cs[0], 0.0), (cs[-1], 1.0)):
        parts.append(
            f'<text x="{ml + frac * (width - ml - mr):.1f}" y="{height - mb + 16}" '
            f'text-anchor="middle" font-size="10">{_fmt(val)}</text>'
        )
    for val, frac in ((rhos[0], 0.0), (rhos[-1], 1.0)):
        parts.append(
            f'<text x="{ml - 6}" y="{height - mb - frac * (height - mt - mb):.1f}" '
            f'text-anchor="end" font-size="10">{_fmt(val)}</text>'
        )
    parts.append("</svg>")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return out
