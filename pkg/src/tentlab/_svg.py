"""Minimal static SVG line plots on log-log axes."""

from __future__ import annotations

import math
from typing import Sequence

W, H, PAD = 560, 380, 60


def _ticks(lo: float, hi: float) -> list[int]:
    return list(range(math.floor(lo), math.ceil(hi) + 1))


def loglog_svg(x: Sequence[float], y: Sequence[float], title: str, xlabel: str = "1 - |z|",
               ylabel: str = "value") -> str:
    """Polyline of ``(x, y)`` with decade ticks; non-positive or non-finite points are dropped."""
    pts = [(math.log10(a), math.log10(b)) for a, b in zip(x, y)
           if a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)]
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">\n'
            f'<rect width="{W}" height="{H}" fill="white"/>\n'
            f'<text x="{W / 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{_esc(title)}</text>\n')
    if not pts:
        return head + f'<text x="{W / 2}" y="{H / 2}" text-anchor="middle" font-family="sans-serif">no positive data</text>\n</svg>\n'
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 - x0 < 1e-9:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(v):
        return PAD + (v - x0) / (x1 - x0) * (W - 2 * PAD)

    def sy(v):
        return H - PAD - (v - y0) / (y1 - y0) * (H - 2 * PAD)

    out = [head, f'<rect x="{PAD}" y="{PAD}" width="{W - 2 * PAD}" height="{H - 2 * PAD}" fill="none" stroke="black"/>\n']
    for k in _ticks(x0, x1):
        if x0 <= k <= x1:
            out.append(f'<line x1="{sx(k):.2f}" y1="{H - PAD}" x2="{sx(k):.2f}" y2="{H - PAD + 5}" stroke="black"/>'
                       f'<text x="{sx(k):.2f}" y="{H - PAD + 18}" text-anchor="middle" font-family="sans-serif" '
                       f'font-size="11">1e{k}</text>\n')
    for k in _ticks(y0, y1):
        if y0 <= k <= y1:
            out.append(f'<line x1="{PAD - 5}" y1="{sy(k):.2f}" x2="{PAD}" y2="{sy(k):.2f}" stroke="black"/>'
                       f'<text x="{PAD - 8}" y="{sy(k) + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                       f'font-size="11">1e{k}</text>\n')
    poly = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in pts)
    out.append(f'<polyline points="{poly}" fill="none" stroke="#1f5fa8" stroke-width="2"/>\n')
    for a, b in pts:
        out.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" fill="#1f5fa8"/>\n')
    out.append(f'<text x="{W / 2}" y="{H - 14}" text-anchor="middle" font-family="sans-serif" font-size="12">'
               f'{_esc(xlabel)}</text>\n')
    out.append(f'<text x="16" y="{H / 2}" text-anchor="middle" font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 16 {H / 2})">{_esc(ylabel)}</text>\n</svg>\n')
    return "".join(out)


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
