"""Covering counts, canonical parabolic covers, mass bounds and slope fits.

Grid convention for point counting: cells are anchored at the origin and a
point lying on a cell boundary belongs to the cell with the smaller index
(lower-left), except that a coordinate equal to 0 belongs to cell 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import stats

from ._validation import (HypothesisError, check_hurst, check_points,
                          check_positive_int, check_scale)
from .carpet import (DEFAULT_CELL_BUDGET, LabeledSystem, Pattern, _as_system,
                     frostman_weights, generation_arrays, generation_count,
                     parabolic_dim_carpet)

__all__ = [
    "ScaleCounts",
    "DimReport",
    "CanonicalRect",
    "DimBracket",
    "box_count_points",
    "parabolic_box_count_points",
    "box_count_graph",
    "parabolic_box_count_graph",
    "count_scales",
    "label_ranges",
    "carpet_box_count_exact",
    "carpet_box_count_closed_form",
    "carpet_scale_counts",
    "fit_dimension",
    "canonical_x_digits",
    "canonical_delta",
    "canonical_rects",
    "parabolic_content_dp",
    "mass_ratio_bound",
    "mass_ratio_stable",
    "content_decay",
    "parabolic_dim_bracket",
    "empirical_dim_graph",
]

# relative slack for deciding that a coordinate sits on a grid line
BOUNDARY_RTOL = 1e-9
DEFAULT_STATE_BUDGET = 10**6


@dataclass(frozen=True)
class ScaleCounts:
    """``(delta, count)`` pairs sorted by decreasing ``delta``."""

    entries: tuple[tuple[float, int], ...]
    source: str = ""

    def __post_init__(self):
        entries = tuple(sorted(((float(d), int(c)) for d, c in self.entries),
                               key=lambda e: -e[0]))
        deltas = [d for d, _ in entries]
        if any(not 0 < d < 1 for d in deltas):
            raise ValueError("scales must lie in (0, 1)")
        if len(set(deltas)) != len(deltas):
            raise ValueError("scales must be distinct")
        if any(c < 1 for _, c in entries):
            raise ValueError("counts must be positive")
        if any(b[1] < a[1] for a, b in zip(entries, entries[1:])):
            raise ValueError("counts must be non-decreasing as delta decreases")
        object.__setattr__(self, "entries", entries)

    @property
    def deltas(self) -> np.ndarray:
        return np.array([d for d, _ in self.entries])

    @property
    def counts(self) -> np.ndarray:
        return np.array([c for _, c in self.entries], dtype=np.int64)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class DimReport:
    estimate: float
    stderr: float
    r_squared: float
    scales_used: ScaleCounts
    method: str
    intercept: float = 0.0
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "r2": self.r_squared,
            "method": self.method,
            "scales": [{"delta": d, "count": c} for d, c in self.scales_used.entries],
            "degenerate": self.degenerate,
        }


# --------------------------------------------------------------------------
# point counting


def _cell_index(v: np.ndarray, step: float) -> np.ndarray:
    q = v / step
    r = np.rint(q)
    on_line = np.abs(q - r) <= BOUNDARY_RTOL * np.maximum(1.0, np.abs(r))
    idx = np.where(on_line, r - 1, np.floor(q))
    idx = np.where(on_line & (r == 0), 0, idx)
    return idx.astype(np.int64)


def _count_cells(points: np.ndarray, wx: float, wy: float) -> int:
    ix = _cell_index(points[:, 0], wx)
    iy = _cell_index(points[:, 1], wy)
    iy = iy - iy.min()
    key = (ix - ix.min()) * (int(iy.max()) + 1) + iy
    return int(np.unique(key).size)


def box_count_points(points, delta: float) -> int:
    """Number of ``delta``-grid squares containing at least one point."""
    points = check_points(points)
    delta = check_scale(delta)
    return _count_cells(points, delta, delta)


def parabolic_box_count_points(points, delta: float, H: float) -> int:
    """Number of ``delta x delta^H`` grid rectangles containing at least one point."""
    points = check_points(points)
    delta = check_scale(delta)
    H = float(H)
    if not 0 < H <= 1:
        raise ValueError(f"H must lie in (0, 1], got {H}")
    return _count_cells(points, delta, delta**H)


def _merged_length(cols: np.ndarray, a: np.ndarray, e: np.ndarray) -> int:
    """Total length of the union of half-open integer intervals ``[a, e)`` per column."""
    off = a.min()
    a, e = a - off, e - off
    cols = cols - cols.min()
    order = np.lexsort((a, cols))
    cols, a, e = cols[order], a[order], e[order]
    width = int(e.max()) + 1
    run = np.maximum.accumulate(cols * width + e)
    prev = np.concatenate([[-1], run[:-1]])
    same_col = np.concatenate([[False], cols[1:] == cols[:-1]])
    prev_end = np.where(same_col, prev - cols * width, a)
    return int(np.clip(e - np.maximum(a, prev_end), 0, None).sum())


def _count_graph_cells(points: np.ndarray, wx: float, wy: float) -> int:
    order = np.argsort(points[:, 0], kind="stable")
    t, y = points[order, 0], points[order, 1]
    if t.size < 2:
        return _count_cells(points, wx, wy)
    ix = _cell_index(t, wx)
    i0, i1 = ix[:-1], ix[1:]
    if np.any(i1 - i0 > 1):
        raise ValueError("scale is finer than the sample spacing; use point counting")
    y0, y1 = y[:-1], y[1:]
    same = i1 == i0
    cross = ~same
    # split segments that cross a column line at the interpolated crossing value
    edge = (i0[cross] + 1) * wx
    t0, t1 = t[:-1][cross], t[1:][cross]
    yb = y0[cross] + (y1[cross] - y0[cross]) * (edge - t0) / (t1 - t0)
    cols = np.concatenate([i0[same], i0[cross], i1[cross]])
    pairs = [(y0[same], y1[same]), (y0[cross], yb), (yb, y1[cross])]
    lo = np.concatenate([np.minimum(u, v) for u, v in pairs])
    hi = np.concatenate([np.maximum(u, v) for u, v in pairs])
    end = _cell_index(hi, wy) + 1
    # a range starting on a grid line lies in the cell above it
    start = np.minimum(np.floor(lo / wy + BOUNDARY_RTOL).astype(np.int64), end - 1)
    return _merged_length(cols, start, end)


def box_count_graph(points, delta: float) -> int:
    """Grid squares met by the piecewise-linear interpolant of graph samples.

    ``points`` are ``(t, y)`` samples of a function; ``delta`` must be no
    finer than the largest gap between consecutive times.
    """
    points = check_points(points)
    delta = check_scale(delta)
    return _count_graph_cells(points, delta, delta)


def parabolic_box_count_graph(points, delta: float, H: float) -> int:
    """Parabolic analogue of :func:`box_count_graph` with ``delta x delta^H`` cells."""
    points = check_points(points)
    delta = check_scale(delta)
    H = float(H)
    if not 0 < H <= 1:
        raise ValueError(f"H must lie in (0, 1], got {H}")
    return _count_graph_cells(points, delta, delta**H)


def count_scales(points, scales: Sequence[float], H: float | None = None,
                 mode: str = "euclidean", connect: bool = False) -> ScaleCounts:
    """Counts at each scale; ``connect`` counts the interpolated graph instead of points."""
    points = check_points(points)
    if mode == "euclidean":
        fn = box_count_graph if connect else box_count_points
        counts = [fn(points, d) for d in scales]
    elif mode == "parabolic":
        if H is None:
            raise ValueError("parabolic mode needs H")
        fn = parabolic_box_count_graph if connect else parabolic_box_count_points
        counts = [fn(points, d, H) for d in scales]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    kind = "graph" if connect else "points"
    return ScaleCounts(tuple(zip(scales, counts)), source=f"{kind}:{mode}")


# --------------------------------------------------------------------------
# exact carpet counts


def _chain_value(start, choice, m):
    """Exact ``sum_i b_i m^-(i+1)`` along the label chain fixed by ``choice``."""
    seq, seen, lab = [], {}, start
    while lab not in seen:
        seen[lab] = len(seq)
        b, nxt = choice[lab]
        seq.append(b)
        lab = nxt
    P = seen[lab]
    T = len(seq) - P
    pre = sum(Fraction(b, m ** (i + 1)) for i, b in enumerate(seq[:P]))
    cyc = sum(Fraction(b, m ** (i + 1)) for i, b in enumerate(seq[P:]))
    return pre + Fraction(1, m**P) * cyc / (1 - Fraction(1, m**T))


def _extreme_values(s: LabeledSystem, pick):
    cells = {lab: [(b, c) for _, b, c in s.cells(lab)] for lab in s.labels}
    v = {lab: 0.0 for lab in s.labels}
    for _ in range(int(64 / math.log2(s.m)) + 4):
        v = {lab: pick((b + v[c]) / s.m for b, c in cells[lab]) for lab in s.labels}
    choice = {lab: pick(cells[lab], key=lambda bc: (bc[0] + v[bc[1]]) / s.m)
              for lab in s.labels}
    while True:  # exact policy iteration
        exact = {lab: _chain_value(lab, choice, s.m) for lab in s.labels}
        changed = False
        for lab in s.labels:
            best = pick(cells[lab], key=lambda bc: (bc[0] + exact[bc[1]]) / s.m)
            if (best[0] + exact[best[1]]) / s.m != exact[lab]:
                choice[lab] = best
                changed = True
        if not changed:
            return exact


def label_ranges(s) -> dict[str, tuple[Fraction, Fraction]]:
    """Exact ``(min, max)`` of the vertical coordinate over each label's limit set.

    Coordinates are relative to the unit square of that label.
    """
    s = _as_system(s)
    lo = _extreme_values(s, min)
    hi = _extreme_values(s, max)
    return {lab: (lo[lab], hi[lab]) for lab in s.labels}


def _floor_div(num, den):
    return num // den


def _ceil_div(num, den):
    return -((-num) // den)


def carpet_box_count_exact(s, j: int, budget: int = DEFAULT_CELL_BUDGET) -> int:
    """Exact number of ``n^-j`` grid squares needed to cover the carpet.

    Column by column, each generation-``j`` rectangle contributes the grid
    squares spanned by the vertical range of the limit set inside it (known
    exactly from :func:`label_ranges`); squares shared by rectangles of the
    same column are counted once.  For a continuous function graph this is
    the minimal number of column squares covering the graph.
    """
    s = _as_system(s)
    j = check_positive_int(j, "j", minimum=0)
    n, m = s.n, s.m
    P, Q, L = generation_arrays(s, j, budget)
    ranges = label_ranges(s)
    labels = s.labels
    den = math.lcm(*(r[0].denominator for r in ranges.values()),
                   *(r[1].denominator for r in ranges.values()))
    lo_num = np.array([int(ranges[lab][0] * den) for lab in labels], dtype=object)
    hi_num = np.array([int(ranges[lab][1] * den) for lab in labels], dtype=object)
    scale_num, scale_den = n**j, den * m**j
    big = (m**j + 1) * den * n**j
    dtype = np.int64 if big < 2**62 else object
    Qd = Q.astype(dtype) * den
    lo = (Qd + lo_num[L].astype(dtype)) * scale_num
    hi = (Qd + hi_num[L].astype(dtype)) * scale_num
    start = _floor_div(lo, scale_den)
    end = _ceil_div(hi, scale_den)
    # a range that collapses onto a grid line occupies the cell below it
    flat = end <= start
    start = np.where(flat & (start > 0), start - 1, start)
    end = np.where(flat, start + 1, end)
    start = np.asarray(start, dtype=np.int64)
    end = np.asarray(end, dtype=np.int64)
    return _merged_length(P, start, end)


def carpet_box_count_closed_form(s, j: int) -> int:
    """``(#generation-j rectangles) * (n/m)^j`` for full-height systems.

    Applies when ``m`` divides ``n`` and every label's limit set spans the full
    height of its square (vertical range ``[0, 1]``); otherwise raises
    :class:`HypothesisError`.
    """
    s = _as_system(s)
    if s.n % s.m:
        raise HypothesisError("closed form needs m to divide n", "m | n")
    if any(r != (0, 1) for r in label_ranges(s).values()):
        raise HypothesisError("closed form needs every label to span the full height",
                              "full-height labels")
    return generation_count(s, j) * (s.n // s.m) ** j


def carpet_scale_counts(s, levels: Sequence[int], budget: int = DEFAULT_CELL_BUDGET) -> ScaleCounts:
    s = _as_system(s)
    entries = [(float(s.n) ** (-j), carpet_box_count_exact(s, j, budget)) for j in levels]
    return ScaleCounts(tuple(entries), source="carpet:exact")


# --------------------------------------------------------------------------
# fitting


def fit_dimension(sc: ScaleCounts, method: str = "ols") -> DimReport:
    """Least-squares slope of ``log count`` against ``log(1/delta)``."""
    if len(sc) < 3:
        raise ValueError(f"need at least 3 scales to fit a dimension, got {len(sc)}")
    x = -np.log(sc.deltas)
    y = np.log(sc.counts.astype(float))
    if np.all(sc.counts == sc.counts[0]):
        return DimReport(0.0, 0.0, 1.0, sc, method, float(y[0]), degenerate=True)
    res = stats.linregress(x, y)
    return DimReport(float(res.slope), float(res.stderr),
                     float(min(1.0, res.rvalue**2)), sc, method, float(res.intercept))


def empirical_dim_graph(points, scales: Sequence[float], H: float | None = None,
                        mode: str = "euclidean", connect: bool = True) -> DimReport:
    """Box-counting slope of a sampled graph in the euclidean or parabolic grid.

    Parameters
    ----------
    points : array_like, shape (N, 2)
        ``(t, y)`` samples of the graph.
    scales : sequence of float
        Cell widths ``delta``; at least three.
    H : float, optional
        Hurst index; required for ``mode="parabolic"`` (cell height ``delta^H``).
    mode : {"euclidean", "parabolic"}
    connect : bool, default True
        Count cells met by the piecewise-linear interpolant.  Counting bare
        sample points saturates once a column holds fewer samples than the
        graph's vertical extent in cells, which flattens the slope.

    Returns
    -------
    DimReport
    """
    sc = count_scales(points, scales, H, mode, connect)
    kind = "graph" if connect else "points"
    return fit_dimension(sc, method=f"box-count:{mode}:{kind}")


# --------------------------------------------------------------------------
# canonical parabolic rectangles


def canonical_x_digits(n: int, m: int, H: float, k: int) -> int:
    """``floor(theta k / H)`` with ``theta = log_n m``."""
    x = math.log(m) / math.log(n) * k / H
    return int(math.floor(x + 1e-9))


def canonical_delta(m: int, H: float, k: int) -> float:
    """``m^(-k/H)``; the rectangle height ``m^-k`` equals ``delta^H``."""
    return float(m) ** (-k / H)


@dataclass(frozen=True)
class CanonicalRect:
    """Rectangle fixing ``q_k`` base-``n`` digits of x and ``k`` base-``m`` digits of y."""

    k: int
    x_prefix: tuple[int, ...]
    y_prefix: tuple[int, ...]
    delta: float
    n: int = field(default=2, repr=False)
    m: int = field(default=2, repr=False)

    @property
    def width(self) -> float:
        return float(self.n) ** (-len(self.x_prefix))

    @property
    def height(self) -> float:
        return float(self.m) ** (-self.k)


def canonical_rects(s, H: float, k: int, budget: int = DEFAULT_CELL_BUDGET) -> list[CanonicalRect]:
    """All level-``k`` canonical rectangles that meet the carpet."""
    s = _as_system(s)
    H = check_hurst(H)
    qk = canonical_x_digits(s.n, s.m, H, k)
    P, Q, _ = generation_arrays(s, k, budget)
    keys = np.unique(np.stack([P // s.n ** (k - qk), Q], axis=1), axis=0)
    out = []
    for X, Y in keys.tolist():
        xd = tuple(int(d) for d in np.base_repr(X, s.n).zfill(qk)[-qk:]) if qk else ()
        yd = tuple(int(d) for d in np.base_repr(Y, s.m).zfill(k)[-k:]) if k else ()
        out.append(CanonicalRect(k, xd, yd, canonical_delta(s.m, H, k), s.n, s.m))
    return out


class _Symbolic:
    """Memoised digit-path queries on a labelled system."""

    def __init__(self, s: LabeledSystem):
        self.s = s
        self.by_row = {lab: {b: [] for b in range(s.m)} for lab in s.labels}
        self.cell = {lab: {} for lab in s.labels}
        for lab in s.labels:
            for a, b, c in s.cells(lab):
                self.by_row[lab][b].append((a, c))
                self.cell[lab][(a, b)] = c
        self.admissible = lru_cache(maxsize=None)(self._admissible)

    def _admissible(self, lab: str, suffix: tuple[int, ...]) -> bool:
        """Some x-digit extension from ``lab`` produces the row digits ``suffix``."""
        if not suffix:
            return True
        return any(self.admissible(c, suffix[1:]) for _, c in self.by_row[lab][suffix[0]])

    def children(self, lab, suffix, advance: bool):
        """Admissible child states one level down.

        ``advance`` is True when the next level fixes one more x-digit, which
        consumes the oldest residual row digit.
        """
        m = self.s.m
        for b in range(m):
            s2 = suffix + (b,)
            if not advance:
                if self.admissible(lab, s2):
                    yield lab, s2
                continue
            for _, c in self.by_row[lab][s2[0]]:
                if self.admissible(c, s2[1:]):
                    yield c, s2[1:]


def _state_space(s: LabeledSystem, H: float, K: int) -> int:
    worst = max(k - canonical_x_digits(s.n, s.m, H, k) for k in range(K + 1))
    return len(s.labels) * s.m**worst


def _content_symbolic(s, H, beta, K):
    sym = _Symbolic(s)
    q = [canonical_x_digits(s.n, s.m, H, k) for k in range(K + 2)]
    cost_of = [canonical_delta(s.m, H, k) ** beta for k in range(K + 1)]

    @lru_cache(maxsize=None)
    def cost(k, lab, suffix, leaf):
        if k == leaf:
            return cost_of[k]
        below = math.fsum(cost(k + 1, c, s2, leaf)
                          for c, s2 in sym.children(lab, suffix, q[k + 1] > q[k]))
        return min(cost_of[k], below)

    return np.array([cost(0, s.root, (), leaf) for leaf in range(1, K + 1)])


def _content_geometric(s, H, beta, K, budget):
    out = []
    for leaf in range(1, K + 1):
        P, Q, _ = generation_arrays(s, leaf, budget)
        best = None
        keys = None
        for k in range(leaf, -1, -1):
            qk = canonical_x_digits(s.n, s.m, H, k)
            X = P // s.n ** (leaf - qk)
            Y = Q // s.m ** (leaf - k)
            uniq, inv = np.unique(X * s.m**k + Y, return_inverse=True)
            inv = inv.ravel()
            own = canonical_delta(s.m, H, k) ** beta
            if best is None:
                best = np.full(len(uniq), own)
            else:
                # children were deduplicated at level k+1; map each child to its parent
                parent_of_child = np.empty(len(keys), dtype=np.int64)
                parent_of_child[child_inv] = inv
                summed = np.bincount(parent_of_child, weights=best, minlength=len(uniq))
                best = np.minimum(own, summed)
            keys, child_inv = uniq, inv
        out.append(float(best[0]))
    return np.array(out)


def parabolic_content_dp(s, H: float, beta: float, K: int,
                         budget: int = DEFAULT_STATE_BUDGET) -> np.ndarray:
    """Minimal canonical-cover sums ``sum delta^beta`` for leaf levels ``1..K``.

    Entry ``k - 1`` is the optimum over antichains of admissible canonical
    rectangles (levels ``0..k``, level 0 being the unit square) that cover
    every admissible level-``k`` rectangle, via
    ``cost(R) = min(delta_R^beta, sum over children cost(child))``.
    States are memoised on ``(level, label, residual row digits)``; when that
    state space exceeds ``budget`` the tree is built from generation cells.
    """
    s = _as_system(s)
    H = check_hurst(H)
    K = check_positive_int(K, "K")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if math.log(s.m) / math.log(s.n) >= H:
        raise HypothesisError("canonical covers need log_n(m) < H", "log_n(m) < H")
    if _state_space(s, H, K) <= budget:
        return _content_symbolic(s, H, beta, K)
    return _content_geometric(s, H, beta, K, DEFAULT_CELL_BUDGET)


def _label_weights(s: LabeledSystem, H: float) -> dict[str, dict[tuple[int, int], float]]:
    return {lab: frostman_weights(s.pattern(lab), H) for lab in s.labels}


def mass_ratio_bound(s, H: float, beta: float, K: int,
                     budget: int = DEFAULT_STATE_BUDGET) -> np.ndarray:
    """Per level ``k = 1..K``, the exact max of ``mu(R) / delta_k^beta``.

    ``mu`` picks cells independently with the row-dependent weights of
    :func:`~fbmdrift.carpet.frostman_weights` (each label using its own
    pattern).  The first ``q_k`` steps of a canonical rectangle fix whole
    cells; the remaining rows are summed over all admissible x-digits.
    """
    s = _as_system(s)
    H = check_hurst(H)
    K = check_positive_int(K, "K")
    if _state_space(s, H, K) > budget:
        raise MemoryError("residual-digit state space exceeds budget")
    w = _label_weights(s, H)
    sym = _Symbolic(s)

    @lru_cache(maxsize=None)
    def mass(lab, suffix):
        if not suffix:
            return 1.0
        pat = w[lab]
        return math.fsum(pat[(a, suffix[0])] * mass(c, suffix[1:])
                         for a, c in sym.by_row[lab][suffix[0]])

    ratios = []
    prefix = {lab: 0.0 for lab in s.labels}
    prefix[s.root] = 1.0
    done = 0
    for k in range(1, K + 1):
        qk = canonical_x_digits(s.n, s.m, H, k)
        while done < qk:
            nxt = {lab: 0.0 for lab in s.labels}
            for lab, v in prefix.items():
                if v == 0.0:
                    continue
                for a, b, c in s.cells(lab):
                    nxt[c] = max(nxt[c], v * w[lab][(a, b)])
            prefix = nxt
            done += 1
        best = 0.0
        for lab, v in prefix.items():
            if v == 0.0:
                continue
            for suffix in itertools.product(range(s.m), repeat=k - qk):
                best = max(best, v * mass(lab, suffix))
        ratios.append(best / canonical_delta(s.m, H, k) ** beta)
    return np.array(ratios)


def mass_ratio_stable(ratios: Sequence[float], factor: float = 2.0) -> bool:
    """True when the ratios over the later half of the levels grow by at most ``factor``.

    Compares ``max`` over levels ``k > K//2`` with ``max`` over ``k <= K//2``.
    """
    ratios = np.asarray(ratios, dtype=float)
    h = max(1, len(ratios) // 2)
    return bool(ratios[h:].max(initial=0.0) <= factor * ratios[:h].max())


def content_decay(contents: Sequence[float], k_from: int, k_to: int) -> float:
    """``content_{k_from} / content_{k_to}`` for a vector indexed from level 1."""
    return float(contents[k_from - 1] / contents[k_to - 1])


@dataclass(frozen=True)
class DimBracket:
    beta_lo: float | None
    beta_hi: float | None
    formula: float | None
    step: float
    K: int

    @property
    def width(self) -> float | None:
        if self.beta_lo is None or self.beta_hi is None:
            return None
        return self.beta_hi - self.beta_lo

    @property
    def inverted(self) -> bool:
        return self.width is not None and self.width < 0

    @property
    def contains_formula(self) -> bool:
        if self.formula is None or self.width is None:
            return False
        return self.beta_lo - self.step <= self.formula <= self.beta_hi + self.step

    def as_dict(self) -> dict:
        return {"beta_lo": self.beta_lo, "beta_hi": self.beta_hi, "width": self.width,
                "formula": self.formula, "step": self.step, "K": self.K,
                "inverted": self.inverted, "contains_formula": self.contains_formula}


def parabolic_dim_bracket(s, H: float, K: int, step: float = 0.025,
                          beta_max: float | None = None) -> DimBracket:
    """Bracket the parabolic dimension from canonical covers and mass bounds.

    On the grid ``beta = i * step``: ``beta_hi`` is the smallest value whose
    content at leaf level ``K`` is at most half the content at ``K // 2``;
    ``beta_lo`` is the largest value whose mass ratios pass
    :func:`mass_ratio_stable`.  Either end is ``None`` when no grid value
    qualifies.
    """
    s = _as_system(s)
    H = check_hurst(H)
    K = check_positive_int(K, "K", minimum=2)
    if beta_max is None:
        beta_max = 2.0
    grid = [round(i * step, 12) for i in range(int(math.floor(beta_max / step + 1e-9)) + 1)]
    half = K // 2
    beta_hi = None
    for beta in grid:
        c = parabolic_content_dp(s, H, beta, K)
        if c[K - 1] <= c[half - 1] / 2:
            beta_hi = beta
            break
    beta_lo = None
    for beta in grid:
        if mass_ratio_stable(mass_ratio_bound(s, H, beta, K)):
            beta_lo = beta
    try:
        formula = parabolic_dim_carpet(s, H)
    except HypothesisError:
        formula = None
    return DimBracket(beta_lo, beta_hi, formula, step, K)
