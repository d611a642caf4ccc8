"""Static SVG chart of certificate success rate against degree."""

from __future__ import annotations

from xml.sax.saxutils import escape

WIDTH, HEIGHT = 800, 500
LEFT, RIGHT, TOP, BOTTOM = 70, 30, 30, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _num(v: float) -> str:
    return f"{v:.2f}"


class _Axes:
    def __init__(self, xmax: float):
        self.xmax = max(xmax, 1.0)

    def x(self, d: float) -> float:
        return LEFT + (WIDTH - LEFT - RIGHT) * d / self.xmax

    def y(self, rate: float) -> float:
        return HEIGHT - BOTTOM - (HEIGHT - TOP - BOTTOM) * rate


def emit_svg(cells) -> str:
    """One polyline per p (x = d, y = success rate) with threshold markers.

    The x axis spans degrees ``0..max p``.  Dashed verticals mark ``d_lower``
    and ``d_upper``, a dotted one marks ``p/2``; markers outside the axis are
    omitted.  A series with a single cell is drawn as a point marker.
    """
    cells = [c for c in cells if c.success_rate is not None]
    if not cells:
        raise ValueError("nothing to plot: no cells with a success rate")
    ps = sorted({c.p for c in cells})
    ax = _Axes(max(max(c.d for c in cells), max(ps)))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    x0, x1 = ax.x(0), ax.x(ax.xmax)
    y0, y1 = ax.y(0), ax.y(1)
    out.append(f'<g id="axes" stroke="black" stroke-width="1">'
               f'<line x1="{_num(x0)}" y1="{_num(y0)}" x2="{_num(x1)}" y2="{_num(y0)}"/>'
               f'<line x1="{_num(x0)}" y1="{_num(y0)}" x2="{_num(x0)}" y2="{_num(y1)}"/></g>')
    ticks = ['<g id="ticks" font-family="sans-serif" font-size="12" fill="black">']
    step = max(1, round(ax.xmax / 16))
    for d in range(0, int(ax.xmax) + 1, step):
        ticks.append(f'<text x="{_num(ax.x(d))}" y="{_num(y0 + 18)}" text-anchor="middle">{d}</text>')
    for r in (0.0, 0.25, 0.5, 0.75, 1.0):
        ticks.append(f'<text x="{_num(x0 - 8)}" y="{_num(ax.y(r) + 4)}" text-anchor="end">{r:g}</text>')
    ticks.append(f'<text x="{_num((x0 + x1) / 2)}" y="{HEIGHT - 15}" text-anchor="middle">degree d</text>')
    ticks.append(f'<text x="20" y="{_num((y0 + y1) / 2)}" text-anchor="middle" '
                 f'transform="rotate(-90 20 {_num((y0 + y1) / 2)})">certificate success rate</text>')
    ticks.append("</g>")
    out.extend(ticks)

    for i, p in enumerate(ps):
        color = PALETTE[i % len(PALETTE)]
        series = sorted((c for c in cells if c.p == p), key=lambda c: c.d)
        first = series[0]
        out.append(f'<g id="p{p}" stroke="{color}" fill="none">')
        for name, d, dash in (("d_lower", first.d_lower, "6 4"), ("d_upper", first.d_upper, "6 4"),
                              ("half", p / 2, "2 3")):
            if 0 <= d <= ax.xmax:
                out.append(f'<line class="{name}" x1="{_num(ax.x(d))}" y1="{_num(y0)}" '
                           f'x2="{_num(ax.x(d))}" y2="{_num(y1)}" stroke-dasharray="{dash}"/>')
        if len(series) == 1:
            out.append(f'<circle class="point" cx="{_num(ax.x(first.d))}" '
                       f'cy="{_num(ax.y(first.success_rate))}" r="4" fill="{color}"/>')
        else:
            pts = " ".join(f"{_num(ax.x(c.d))},{_num(ax.y(c.success_rate))}" for c in series)
            out.append(f'<polyline points="{pts}" stroke-width="2"/>')
        out.append("</g>")
        ly = TOP + 16 * i + 10
        out.append(f'<text x="{_num(x1 - 60)}" y="{ly}" font-family="sans-serif" font-size="12" '
                   f'fill="{color}">{escape(f"p = {p}")}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
