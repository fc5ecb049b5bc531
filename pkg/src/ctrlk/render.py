"""Deterministic SVG pictures of supports: x runs right, height t runs up."""

from __future__ import annotations

import math
from fractions import Fraction
from xml.sax.saxutils import escape

from .geo import GeoModule, GeoMorphism, Window, materialize, materialize_blocks
from .squeeze import SqueezedStack

WIDTH, HEIGHT, MARGIN = 720, 480, 48
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _fmt(v: float) -> str:
    return f"{v:.3f}"


class _Canvas:
    def __init__(self, w: Window):
        self.w = w
        self.items: list[str] = []
        span_x = w.x1 - w.x0 or Fraction(1)
        span_t = w.t1 - w.t0 or Fraction(1)
        self.sx = (WIDTH - 2 * MARGIN) / float(span_x)
        self.st = (HEIGHT - 2 * MARGIN) / float(span_t)

    def X(self, x) -> float:
        return MARGIN + float(x - self.w.x0) * self.sx

    def Y(self, t) -> float:
        return HEIGHT - MARGIN - float(t - self.w.t0) * self.st

    def add(self, s: str):
        self.items.append(s)

    def axes(self):
        w = self.w
        x0, x1, y0, y1 = self.X(w.x0), self.X(w.x1), self.Y(w.t0), self.Y(w.t1)
        self.add(f'<line class="axis" x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" '
                 f'y2="{_fmt(y0)}" stroke="#000"/>')
        self.add(f'<line class="axis" x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" '
                 f'y2="{_fmt(y1)}" stroke="#000"/>')
        for k in range(math.ceil(w.x0), math.floor(w.x1) + 1):
            x = self.X(k)
            self.add(f'<line class="tick" x1="{_fmt(x)}" y1="{_fmt(y0)}" x2="{_fmt(x)}" '
                     f'y2="{_fmt(y0 + 5)}" stroke="#000"/>')
            self.add(f'<text x="{_fmt(x)}" y="{_fmt(y0 + 18)}" font-size="11" '
                     f'text-anchor="middle">{k}</text>')
        for k in range(math.ceil(w.t0), math.floor(w.t1) + 1):
            y = self.Y(k)
            self.add(f'<line class="tick" x1="{_fmt(x0 - 5)}" y1="{_fmt(y)}" x2="{_fmt(x0)}" '
                     f'y2="{_fmt(y)}" stroke="#000"/>')
            self.add(f'<text x="{_fmt(x0 - 9)}" y="{_fmt(y + 4)}" font-size="11" '
                     f'text-anchor="end">{k}</text>')

    def mark(self, p, rank: int, color: str):
        cx, cy = self.X(p.x), self.Y(p.t)
        r = 2.5 + min(rank, 4)
        title = f"<title>{escape(str(p))} rank {rank}</title>"
        if p.copy:
            self.add(f'<rect class="mark copy1" x="{_fmt(cx - r)}" y="{_fmt(cy - r)}" '
                     f'width="{_fmt(2 * r)}" height="{_fmt(2 * r)}" fill="none" '
                     f'stroke="{color}">{title}</rect>')
        else:
            self.add(f'<circle class="mark" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
                     f'fill="{color}">{title}</circle>')

    def arrow(self, p, q, color: str):
        if p == q:
            self.add(f'<circle class="loop" cx="{_fmt(self.X(p.x))}" cy="{_fmt(self.Y(p.t) - 9)}" '
                     f'r="4" fill="none" stroke="{color}"/>')
            return
        self.add(f'<line class="arrow" x1="{_fmt(self.X(p.x))}" y1="{_fmt(self.Y(p.t))}" '
                 f'x2="{_fmt(self.X(q.x))}" y2="{_fmt(self.Y(q.t))}" stroke="{color}" '
                 f'stroke-width="1.2" marker-end="url(#head)"/>')

    def band(self, lo_x, hi_x, lo_t, hi_t, color: str, label: str = ""):
        x0, x1 = max(self.X(lo_x), MARGIN), min(self.X(hi_x), WIDTH - MARGIN)
        if x1 <= x0:
            return
        y_top, y_bot = self.Y(hi_t), self.Y(lo_t)
        self.add(f'<rect class="layer" x="{_fmt(x0)}" y="{_fmt(y_top)}" width="{_fmt(x1 - x0)}" '
                 f'height="{_fmt(y_bot - y_top)}" fill="{color}" fill-opacity="0.12" '
                 f'stroke="none"><title>{escape(label)}</title></rect>')

    def svg(self, title: str) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
                f'viewBox="0 0 {WIDTH} {HEIGHT}">')
        defs = ('<defs><marker id="head" markerWidth="8" markerHeight="8" refX="7" refY="4" '
                'orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="#444"/></marker></defs>')
        caption = (f'<text x="{WIDTH // 2}" y="20" font-size="13" text-anchor="middle">'
                   f'{escape(title)}</text>')
        return "\n".join([head, defs, caption, *self.items, "</svg>"]) + "\n"


def _draw_module(c: _Canvas, A: GeoModule, color: str):
    for p, r in materialize(A, c.w):
        c.mark(p, r, color)


def _draw_morphism(c: _Canvas, f: GeoMorphism, color: str):
    _draw_module(c, f.source, color)
    if f.target != f.source:
        _draw_module(c, f.target, color)
    for p, q, _ in materialize_blocks(f, c.w):
        if c.w.contains(q):
            c.arrow(p, q, color)


def render_svg(obj, w: Window, title: str = "") -> str:
    c = _Canvas(w)
    if isinstance(obj, SqueezedStack):
        I, sched = obj.interval, obj.schedule
        for n, layer in enumerate(obj.layers, 1):
            color = PALETTE[(n - 1) % len(PALETTE)]
            lo_t = sched.tau(n)
            hi_t = min(sched.tau(n + 1), w.t1)
            if lo_t > w.t1:
                continue
            half = Fraction(1, 2 * n)
            for k in range(math.floor(w.x0 - I.a) - 1, math.ceil(w.x1 - I.a) + 1):
                mid = I.a + k + Fraction(1, 2)
                c.band(mid - half, mid + half, lo_t, hi_t, color, f"layer {n}")
        c.axes()
        for n, layer in enumerate(obj.layers, 1):
            color = PALETTE[(n - 1) % len(PALETTE)]
            if isinstance(layer, GeoModule):
                _draw_module(c, layer, color)
            else:
                _draw_morphism(c, layer, color)
        return c.svg(title or f"squeezed stack, {obj.N} layers")
    c.axes()
    if isinstance(obj, GeoModule):
        _draw_module(c, obj, PALETTE[0])
        return c.svg(title or "module support")
    if isinstance(obj, GeoMorphism):
        _draw_morphism(c, obj, PALETTE[0])
        return c.svg(title or "morphism support")
    raise TypeError(f"cannot render {type(obj).__name__}")


__all__ = ["render_svg"]
