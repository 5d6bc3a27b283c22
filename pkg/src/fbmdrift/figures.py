"""Deterministic SVG figures built from rectangles and polylines only."""

from __future__ import annotations

import numpy as np

from .carpet import DEFAULT_CELL_BUDGET, _as_system, generation_arrays
from .fbm import sample_perturbed_graph

SIZE = 1000
_FILLS = ("#1f1f1f", "#8c8c8c", "#4a6fa5", "#a55a4a", "#5a8c5a", "#8c7a3a")


def _num(x: float) -> str:
    # fixed precision keeps the output byte-identical across platforms
    return format(round(float(x), 3), ".3f").rstrip("0").rstrip(".")


def _svg(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" '
            f'width="{SIZE}" height="{SIZE}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _rect(x, y, w, h, fill, cls="cell", stroke=None) -> str:
    extra = f' stroke="{stroke}" stroke-width="1"' if stroke else ""
    return (f'<rect class="{cls}" x="{_num(x)}" y="{_num(y)}" width="{_num(w)}" '
            f'height="{_num(h)}" fill="{fill}"{extra}/>')


def patterns_svg(s) -> str:
    """One grid per label, stacked vertically; cells shaded by child label."""
    s = _as_system(s)
    labels = s.labels
    shade = {lab: _FILLS[i % len(_FILLS)] for i, lab in enumerate(labels)}
    pad = 40.0
    panel_h = (SIZE - pad * (len(labels) + 1)) / len(labels)
    cw = min((SIZE - 2 * pad) / s.n, panel_h / s.m)
    body = []
    for i, lab in enumerate(labels):
        y0 = pad + i * (panel_h + pad)
        for a in range(s.n):
            for b in range(s.m):
                body.append(_rect(pad + a * cw, y0 + (s.m - 1 - b) * cw, cw, cw, "#ffffff",
                                  cls="grid", stroke="#000000"))
        for a, b, c in s.cells(lab):
            body.append(_rect(pad + a * cw, y0 + (s.m - 1 - b) * cw, cw, cw, shade[c]))
    return _svg(body)


def carpet_svg(s, k: int, budget: int = DEFAULT_CELL_BUDGET) -> str:
    """Generation-``k`` rectangles on the unit square (y axis pointing up)."""
    s = _as_system(s)
    P, Q, _ = generation_arrays(s, k, budget)
    w, h = SIZE / s.n**k, SIZE / s.m**k
    body = [_rect(p * w, SIZE - (q + 1) * h, w, h, _FILLS[0])
            for p, q in zip(P.tolist(), Q.tolist())]
    return _svg(body)


def _polyline(t, y, lo, hi, colour, cls) -> str:
    span = hi - lo if hi > lo else 1.0
    xs = np.asarray(t) * SIZE
    ys = SIZE - (np.asarray(y) - lo) / span * SIZE
    pts = " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(xs, ys))
    return (f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{colour}" '
            f'stroke-width="1"/>')


def path_svg(s, H: float, N: int, seed: int, depth: int | None = None) -> str:
    """Sampled ``B`` and ``B + f`` on a shared vertical scale."""
    t, x, f = sample_perturbed_graph(s, H, N, seed, depth)
    y = x + f
    lo, hi = float(min(x.min(), y.min())), float(max(x.max(), y.max()))
    return _svg([_polyline(t, x, lo, hi, "#4a6fa5", "noise"),
                 _polyline(t, y, lo, hi, "#2e8b57", "perturbed")])
