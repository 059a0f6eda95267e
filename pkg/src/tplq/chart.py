"""Self-contained SVG line chart of FPL/BPL/TPL per release."""
from __future__ import annotations

from pathlib import Path

from .leakage import LeakageLedger

SERIES = (("fpl", "FPL", "#1f77b4"), ("bpl", "BPL", "#d62728"), ("tpl", "TPL", "#2ca02c"))
WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 120, 30, 50


def _ticks(hi: float, n: int = 5) -> list:
    return [hi * k / n for k in range(n + 1)]


def render_svg(ledger: LeakageLedger) -> str:
    if not len(ledger):
        raise ValueError("cannot chart an empty ledger")
    releases = ledger.column("release")
    finite = [v for name, _, _ in SERIES for v in ledger.column(name) if v != float("inf")]
    y_hi = (max(finite) if finite else 1.0) * 1.1 or 1.0
    x_lo, x_hi = releases[0], releases[-1]
    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM

    def px(x):
        if x_hi == x_lo:
            return LEFT + plot_w / 2
        return LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return TOP + plot_h - min(y, y_hi) / y_hi * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{LEFT}" y1="{TOP + plot_h}" x2="{LEFT + plot_w}" y2="{TOP + plot_h}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + plot_h}" stroke="black"/>',
    ]
    for r in releases:
        out.append(f'<text x="{px(r):.2f}" y="{TOP + plot_h + 18}" text-anchor="middle">{r}</text>')
    for y in _ticks(y_hi):
        out.append(f'<text x="{LEFT - 6}" y="{py(y) + 4:.2f}" text-anchor="end">{y:.3g}</text>')
        out.append(f'<line x1="{LEFT - 3}" y1="{py(y):.2f}" x2="{LEFT}" y2="{py(y):.2f}" stroke="black"/>')
    out.append(f'<text x="{LEFT + plot_w / 2}" y="{HEIGHT - 10}" text-anchor="middle">release</text>')
    out.append(
        f'<text x="16" y="{TOP + plot_h / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + plot_h / 2})">privacy leakage</text>'
    )
    for k, (name, label, color) in enumerate(SERIES):
        pts = " ".join(f"{px(r):.2f},{py(v):.2f}" for r, v in zip(releases, ledger.column(name)))
        out.append(f'<polyline class="{name}" fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        for r, v in zip(releases, ledger.column(name)):
            out.append(f'<circle cx="{px(r):.2f}" cy="{py(v):.2f}" r="3" fill="{color}"/>')
        ly = TOP + 20 * k + 10
        out.append(f'<line x1="{WIDTH - RIGHT + 15}" y1="{ly}" x2="{WIDTH - RIGHT + 40}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - RIGHT + 46}" y="{ly + 4}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_dat(ledger: LeakageLedger) -> str:
    lines = ["# release fpl bpl tpl"]
    for rec in ledger:
        lines.append(f"{rec.release} {rec.fpl!r} {rec.bpl!r} {rec.tpl!r}")
    return "\n".join(lines) + "\n"


def emit_chart(ledger: LeakageLedger, path) -> Path:
    """Write ``path`` (SVG) and a sibling ``.dat`` file with the plotted columns."""
    path = Path(path)
    svg = render_svg(ledger)
    path.write_text(svg, encoding="utf-8")
    path.with_suffix(".dat").write_text(render_dat(ledger), encoding="utf-8")
    return path
