"""Spacetime diagrams of a scenario as plain SVG.

The lab frame S has orthogonal axes. A frame moving with ``beta`` gets its
``ct'`` axis along ``x = beta ct`` and its ``x'`` axis along ``ct = beta x``,
with unit ticks where those axes cross the hyperbolas ``x^2 - ct^2 = -1`` and
``x^2 - ct^2 = +1``. Photon worldlines run at 45 degrees and the
simultaneity line of every frame is drawn through the collapse event ``d``.

World point ``(x, ct)`` maps to pixel ``(margin + (x - xmin) * scale,
margin + (ctmax - ct) * scale)``; the root element carries these numbers as
``data-*`` attributes so the geometry can be read back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .kinematics import Boost, Event
from .scenario import ConfigError, Scenario, locate_events

MARGIN = 40.0
PAD = 0.5
MAX_TICKS = 20

_COLORS = ("#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf")


@dataclass(frozen=True)
class DiagramSpec:
    betas: tuple = ()
    events: tuple = ("d", "b", "a", "f")
    axis_range: Optional[tuple] = None  # (xmin, xmax, ctmin, ctmax)
    scale: float = 100.0
    output: Optional[Path] = None


def _fmt(v: float) -> str:
    # fixed precision keeps the output byte-stable and readable
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def labeled_events(sc: Scenario, spec: DiagramSpec) -> list[tuple[str, str, Event]]:
    """``(id, label, event)`` for every event the diagram marks."""
    betas = list(spec.betas)
    ev = locate_events(sc, betas=betas)
    out = []
    for name in spec.events:
        if name == "d":
            out.append(("event-d", "d", ev.d))
        elif name == "b":
            out.append(("event-b", "b", ev.b))
        elif name == "e":
            if ev.e is not None:
                out.append(("event-e", "e", ev.e))
        else:
            table = ev.a if name == "a" else ev.f
            for beta in betas:
                out.append((f"event-{name}-{beta!r}", f"{name} (β={beta:g})", table[beta]))
    return out


def _auto_range(points: Sequence[Event]) -> tuple[float, float, float, float]:
    xs = [p.x for p in points] + [0.0]
    cts = [p.ct for p in points] + [0.0]
    return (min(xs) - PAD, max(xs) + PAD, min(cts) - PAD, max(cts) + PAD)


def _clip_segment(p0, direction, rng) -> Optional[tuple[tuple[float, float], tuple[float, float]]]:
    """Part of the infinite line ``p0 + s * direction`` inside the box (Liang-Barsky)."""
    xmin, xmax, cmin, cmax = rng
    t0, t1 = -math.inf, math.inf
    for p, d, lo, hi in ((p0[0], direction[0], xmin, xmax), (p0[1], direction[1], cmin, cmax)):
        if d == 0:
            if not lo <= p <= hi:
                return None
            continue
        a, b = (lo - p) / d, (hi - p) / d
        t0, t1 = max(t0, min(a, b)), min(t1, max(a, b))
    if t0 >= t1:
        return None
    return ((p0[0] + t0 * direction[0], p0[1] + t0 * direction[1]), (p0[0] + t1 * direction[0], p0[1] + t1 * direction[1]))


def _ray(p0, direction, rng):
    """Like :func:`_clip_segment` but only for ``s >= 0``."""
    seg = _clip_segment(p0, direction, rng)
    if seg is None:
        return None
    (ax, ac), (bx, bc) = seg
    sa = (ax - p0[0]) * direction[0] + (ac - p0[1]) * direction[1]
    sb = (bx - p0[0]) * direction[0] + (bc - p0[1]) * direction[1]
    if sb <= 0:
        return None
    if sa < 0:
        seg = ((p0[0], p0[1]), (bx, bc))
    return seg


class _Canvas:
    def __init__(self, rng, scale):
        self.rng = rng
        self.scale = scale
        self.items: list[str] = []

    def px(self, x: float, ct: float) -> tuple[float, float]:
        xmin, _, _, cmax = self.rng
        return MARGIN + (x - xmin) * self.scale, MARGIN + (cmax - ct) * self.scale

    def line(self, seg, cls: str, color: str, extra: str = ""):
        if seg is None:
            return
        (x1, y1), (x2, y2) = self.px(*seg[0]), self.px(*seg[1])
        self.items.append(
            f'<line class="{cls}" x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" stroke="{color}"{extra}/>'
        )

    def polyline(self, points, cls: str, color: str):
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in (self.px(x, c) for x, c in points))
        self.items.append(f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{color}" stroke-dasharray="2,3"/>')

    def marker(self, ident: str, label: str, e: Event, color: str):
        cx, cy = self.px(e.x, e.ct)
        self.items.append(
            f'<circle id="{ident}" class="event" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="4" fill="{color}" '
            f'data-x="{e.x!r}" data-ct="{e.ct!r}"/>'
        )
        self.items.append(f'<text x="{_fmt(cx + 6)}" y="{_fmt(cy - 6)}" font-size="13">{label}</text>')


def _inside(e: Event, rng) -> bool:
    xmin, xmax, cmin, cmax = rng
    return xmin <= e.x <= xmax and cmin <= e.ct <= cmax


def render_svg(sc: Scenario, spec: DiagramSpec) -> str:
    events = labeled_events(sc, spec)
    if spec.axis_range is None:
        rng = _auto_range([e for _, _, e in events] + [sc.source])
    else:
        rng = tuple(float(v) for v in spec.axis_range)
        if not (rng[0] < rng[1] and rng[2] < rng[3]):
            raise ConfigError("diagram.range: need xmin < xmax and ctmin < ctmax")
        for ident, label, e in events:
            if not _inside(e, rng):
                raise ConfigError(f"diagram.range: event {label} at ({e.x:g}, {e.ct:g}) lies outside the axis range")
    xmin, xmax, cmin, cmax = rng
    cv = _Canvas(rng, spec.scale)
    width = 2 * MARGIN + (xmax - xmin) * spec.scale
    height = 2 * MARGIN + (cmax - cmin) * spec.scale

    # lab frame axes
    cv.items.append('<g id="axes-S">')
    cv.line(_clip_segment((0.0, 0.0), (1.0, 0.0), rng), "axis-x", "#000000")
    cv.line(_clip_segment((0.0, 0.0), (0.0, 1.0), rng), "axis-ct", "#000000")
    cv.items.append("</g>")

    # calibration hyperbolas x^2 - ct^2 = +/-1
    u = np.linspace(-4.0, 4.0, 161)
    loose = (xmin - 1.0, xmax + 1.0, cmin - 1.0, cmax + 1.0)
    cv.items.append('<g id="calibration" clip-path="url(#plot)">')
    for sx, sc_ in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        if sx:
            pts = [(sx * math.cosh(v), math.sinh(v)) for v in u]
        else:
            pts = [(math.sinh(v), sc_ * math.cosh(v)) for v in u]
        pts = [p for p in pts if _inside(Event(*p), loose)]
        if len(pts) > 1:
            cv.polyline(pts, "hyperbola", "#999999")
    cv.items.append("</g>")

    # boosted frames
    d = locate_events(sc, betas=[]).d
    for i, beta in enumerate(spec.betas):
        color = _COLORS[i % len(_COLORS)]
        g = Boost(beta).gamma
        cv.items.append(f'<g id="frame-{beta!r}" data-beta="{beta!r}">')
        cv.line(_clip_segment((0.0, 0.0), (beta, 1.0), rng), "axis-ct-prime", color)
        cv.line(_clip_segment((0.0, 0.0), (1.0, beta), rng), "axis-x-prime", color)
        for k in range(-MAX_TICKS, MAX_TICKS + 1):
            if k == 0:
                continue
            for tick, cls in ((Event(k * g * beta, k * g), "tick-ct-prime"), (Event(k * g, k * g * beta), "tick-x-prime")):
                if _inside(tick, rng):
                    cx, cy = cv.px(tick.x, tick.ct)
                    cv.items.append(f'<circle class="{cls}" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="2" fill="{color}"/>')
        cv.line(_clip_segment((d.x, d.ct), (1.0, beta), rng), "simultaneity", color, ' stroke-dasharray="6,4"')
        cv.items.append("</g>")

    cv.items.append('<g id="simultaneity-S">')
    cv.line(_clip_segment((d.x, d.ct), (1.0, 0.0), rng), "simultaneity", "#000000", ' stroke-dasharray="6,4"')
    cv.items.append("</g>")

    src = (sc.source.x, sc.source.ct)
    cv.items.append('<g id="worldlines">')
    cv.line(_ray(src, (1.0, 1.0), rng), "photon-1", "#ff7f0e", ' stroke-width="2"')
    cv.line(_ray(src, (-1.0, 1.0), rng), "photon-2", "#1f77b4", ' stroke-width="2"')
    cv.line(_clip_segment((sc.detector_s.x, 0.0), (0.0, 1.0), rng), "detector-s", "#444444", ' stroke-width="3" opacity="0.4"')
    if sc.detector_sprime is not None:
        w = sc.detector_sprime.worldline()
        p0 = w.at(0.0)
        cv.line(_clip_segment((p0.x, p0.ct), (sc.detector_sprime.beta, 1.0), rng), "detector-sprime", "#444444", ' stroke-width="3" opacity="0.4"')
    cv.items.append("</g>")

    cv.items.append('<g id="events">')
    for ident, label, e in events:
        cv.marker(ident, label, e, "#000000")
    cv.items.append("</g>")

    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}" '
        f'data-xmin="{xmin!r}" data-ctmax="{cmax!r}" data-scale="{spec.scale!r}" data-margin="{MARGIN!r}">'
    )
    px0, py0 = cv.px(xmin, cmax)
    clip = (
        f'<defs><clipPath id="plot"><rect x="{_fmt(px0)}" y="{_fmt(py0)}" '
        f'width="{_fmt((xmax - xmin) * spec.scale)}" height="{_fmt((cmax - cmin) * spec.scale)}"/></clipPath></defs>'
    )
    body = "\n".join(cv.items)
    return f'<?xml version="1.0" encoding="UTF-8"?>\n{head}\n{clip}\n<rect width="100%" height="100%" fill="#ffffff"/>\n{body}\n</svg>\n'


def write_svg(sc: Scenario, spec: DiagramSpec, path: Union[str, Path]) -> Path:
    path = Path(path)
    text = render_svg(sc, spec)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write diagram to {path}: {exc.strerror}") from exc
    return path
