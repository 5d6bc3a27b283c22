"""The drift function ``f`` whose graph is a labelled self-affine carpet.

For a function-graph system every column of every pattern holds exactly one
cell, so the base-``n`` digits of ``x`` select one cell per generation and
the rows of those cells are the base-``m`` digits of ``f(x)``.  Points with
two base-``n`` expansions use the terminating one (trailing zeros); ``x = 1``
has only the expansion with every digit ``n - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import NamedTuple, Sequence

import numpy as np

from ._validation import check_positive_int
from .carpet import LabeledSystem, Pattern, PatternError

__all__ = [
    "ab_system",
    "as_fraction",
    "base_n_digits",
    "Bracket",
    "DigitTrace",
    "digit_trace",
    "eval_f",
    "eval_f_digits",
    "DriftGrid",
    "sample_drift_grid",
    "tail_values",
    "HolderReport",
    "holder_check",
    "WellDefinedReport",
    "well_defined_check",
]


def ab_system() -> LabeledSystem:
    """The two-label 6x2 system whose limit set is the graph of a function.

    Pattern A keeps row 0 in columns 0-4 and row 1 in column 5, with child
    labels A, B, A, B, A, A.  Pattern B keeps row 1 in column 0 and row 0 in
    columns 1-5, with child labels B, B, A, B, A, B.
    """
    rows_a = [0, 0, 0, 0, 0, 1]
    kids_a = ["A", "B", "A", "B", "A", "A"]
    rows_b = [1, 0, 0, 0, 0, 0]
    kids_b = ["B", "B", "A", "B", "A", "B"]
    return LabeledSystem(6, 2, "A", {
        "A": [(a, b, c) for a, (b, c) in enumerate(zip(rows_a, kids_a))],
        "B": [(a, b, c) for a, (b, c) in enumerate(zip(rows_b, kids_b))],
    })


def _system(s) -> LabeledSystem:
    if isinstance(s, Pattern):
        s = LabeledSystem.from_pattern(s)
    if not s.is_function_graph:
        raise PatternError("drift evaluation needs a function-graph system "
                           "(exactly one cell per column)", "one cell per column")
    return s


def as_fraction(x) -> Fraction:
    """Exact rational value of ``x`` (int, Fraction, float or ``"p/q"`` text)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot parse {x!r} as a rational or decimal number") from None
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, Real):
        if not math.isfinite(float(x)):
            raise ValueError(f"x must be finite, got {x}")
        return Fraction(float(x))
    raise TypeError(f"unsupported type for x: {type(x).__name__}")


def base_n_digits(x, n: int, k: int) -> list[int]:
    """First ``k`` base-``n`` digits of ``x`` in ``[0, 1]``.

    The terminating expansion is used for ``n``-adic rationals; ``x = 1``
    yields ``[n - 1] * k``.
    """
    x = as_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 1:
        return [n - 1] * k
    num, den = x.numerator, x.denominator
    digits = []
    for _ in range(k):
        num *= n
        d, num = divmod(num, den)
        digits.append(d)
    return digits


class Bracket(NamedTuple):
    """Closed interval ``[lo, hi]`` known to contain ``f(x)``."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    def __contains__(self, y) -> bool:
        return self.lo <= y <= self.hi


@dataclass(frozen=True)
class DigitTrace:
    x_digits: tuple[int, ...]
    y_digits: tuple[int, ...]
    labels: tuple[str, ...]


def _trace_digits(s: LabeledSystem, digits: Sequence[int]) -> DigitTrace:
    lookup = {lab: {a: (b, c) for a, b, c in s.cells(lab)} for lab in s.labels}
    label = s.root
    ys, labels = [], [label]
    for a in digits:
        if not 0 <= a < s.n:
            raise ValueError(f"digit {a} out of range for base {s.n}")
        b, label = lookup[label][a]
        ys.append(b)
        labels.append(label)
    return DigitTrace(tuple(digits), tuple(ys), tuple(labels))


def digit_trace(s, x, k: int) -> DigitTrace:
    """Digits of ``x``, the induced digits of ``f(x)`` and the label path."""
    s = _system(s)
    k = check_positive_int(k, "k", minimum=0)
    return _trace_digits(s, base_n_digits(x, s.n, k))


def eval_f_digits(s, digits: Sequence[int]) -> Bracket:
    """Bracket for ``f`` at the point whose base-``n`` expansion starts with ``digits``."""
    s = _system(s)
    trace = _trace_digits(s, list(digits))
    lo = Fraction(0)
    for i, b in enumerate(trace.y_digits, start=1):
        lo += Fraction(b, s.m**i)
    return Bracket(lo, lo + Fraction(1, s.m ** len(trace.y_digits)))


def eval_f(s, x, k: int) -> Bracket:
    """Exact bracket ``[S_k, S_k + m^-k]`` with ``S_k = sum_{i<=k} y_i m^-i``.

    Examples
    --------
    >>> eval_f(ab_system(), Fraction(1, 6), 10).lo
    Fraction(511, 1024)
    """
    s = _system(s)
    k = check_positive_int(k, "k", minimum=0)
    return eval_f_digits(s, base_n_digits(x, s.n, k))


def tail_values(s, digit: int) -> np.ndarray:
    """Value of ``sum_i y_i m^-i`` when every remaining x-digit equals ``digit``.

    Indexed by label (order of ``s.labels``).  Used for grid points, whose
    expansions end in a constant digit.
    """
    s = _system(s)
    rows, child = s.transition_tables()
    g = np.zeros(len(s.labels))
    for _ in range(int(math.ceil(64 / math.log2(s.m))) + 2):
        g = (rows[:, digit] + g[child[:, digit]]) / s.m
    return g


def _run(rows, child, m, digit_columns, start_labels, start_acc=None):
    """Advance the label automaton over a sequence of digit arrays."""
    L = np.array(start_labels, dtype=np.int64, copy=True)
    acc = np.zeros(L.shape, dtype=np.int64) if start_acc is None else start_acc.copy()
    for d in digit_columns:
        acc = acc * m + rows[L, d]
        L = child[L, d]
    return acc, L


def _digit_columns(idx: np.ndarray, n: int, k: int):
    """Most-significant-first base-``n`` digits of integer array ``idx`` (``k`` digits)."""
    for i in range(k - 1, -1, -1):
        yield (idx // n**i) % n


class DriftGrid(NamedTuple):
    t: np.ndarray
    f: np.ndarray
    width: float


def sample_drift_grid(s, N: int, depth: int | None = None) -> DriftGrid:
    """``f`` at ``t_i = i / N`` for ``i = 0..N`` (midpoints of depth-``depth`` brackets).

    ``depth`` defaults to the smallest value with ``m^-depth <= 2^-60``.
    """
    s = _system(s)
    N = check_positive_int(N, "N", minimum=2)
    if depth is None:
        depth = int(math.ceil(60 / math.log2(s.m)))
    depth = check_positive_int(depth, "depth", minimum=0)
    rows, child = s.transition_tables()
    n, m = s.n, s.m
    i = np.arange(N + 1, dtype=np.int64)
    at_one = i == N
    rem = np.where(at_one, 0, i)
    L = np.zeros(N + 1, dtype=np.int64)
    lo = np.zeros(N + 1)
    scale = 1.0
    for _ in range(depth):
        rem = rem * n
        d = rem // N
        rem = rem % N
        d = np.where(at_one, n - 1, d)
        scale /= m
        lo += rows[L, d] * scale
        L = child[L, d]
    width = float(m) ** (-depth)
    return DriftGrid(i / N, lo + width / 2, width)


# --------------------------------------------------------------------------
# Hölder and dual-representation checks


@dataclass(frozen=True)
class HolderReport:
    exponent: float
    max_ratio: float
    witness: tuple[Fraction, Fraction]
    level_max: tuple[float, ...]


def holder_check(s, K: int, exponent: float | None = None) -> HolderReport:
    """Largest ``|f(x) - f(x')| / |x - x'|^exponent`` over adjacent grid pairs.

    Pairs are ``(l n^-j, (l+1) n^-j)`` for every level ``0 <= j <= K``;
    ``f`` is evaluated exactly at grid points (their expansions end in zeros).
    ``exponent`` defaults to ``log_n m``.  ``level_max[j]`` is the maximum at
    level ``j``.
    """
    s = _system(s)
    K = check_positive_int(K, "K", minimum=0)
    n, m = s.n, s.m
    theta = s.theta if exponent is None else float(exponent)
    rows, child = s.transition_tables()
    g0 = tail_values(s, 0)
    f_one = tail_values(s, n - 1)[0]

    c = max(0, K - 6)
    S = n ** (K - c)
    # level-c grid: F_c[b] = f(b n^-c)
    b = np.arange(n**c, dtype=np.int64)
    acc_c, L_c = _run(rows, child, m, _digit_columns(b, n, c), np.zeros(b.size))
    F_c = np.append((acc_c + g0[L_c]) / float(m) ** c, f_one)

    level_max = [0.0] * (K + 1)
    witness = [None] * (K + 1)

    def record(j, ratios, left_idx, denom_level):
        if ratios.size == 0:
            return
        at = int(np.argmax(ratios))
        if ratios[at] > level_max[j] or witness[j] is None:
            level_max[j] = float(ratios[at])
            x = Fraction(int(left_idx[at]), n**denom_level)
            witness[j] = (x, x + Fraction(1, n**j))

    for j in range(0, c + 1):
        st = n ** (c - j)
        diffs = np.abs(np.diff(F_c[::st]))
        record(j, diffs / float(n) ** (-j * theta), np.arange(diffs.size) * st, c)

    if K > c:
        local = np.arange(S, dtype=np.int64)
        G = {}
        for lab in np.unique(L_c).tolist():
            acc, L = _run(rows, child, m, _digit_columns(local, n, K - c),
                          np.full(S, lab))
            G[lab] = (acc + g0[L]) / float(m) ** (K - c)
        first_chunk = {lab: int(np.flatnonzero(L_c == lab)[0]) for lab in G}
        for j in range(c + 1, K + 1):
            st = n ** (K - j)
            denom = float(n) ** (-j * theta)
            for lab, Gl in G.items():
                diffs = np.abs(np.diff(Gl[::st])) / float(m) ** c
                base = first_chunk[lab] * S
                record(j, diffs / denom, base + np.arange(diffs.size) * st, K)
            # pairs straddling a chunk's right edge
            last = np.array([G[lab][S - st] for lab in L_c.tolist()])
            left = (acc_c + last) / float(m) ** c
            diffs = np.abs(F_c[1:] - left)
            record(j, diffs / denom, (b + 1) * S - st, K)

    best = int(np.argmax(level_max))
    return HolderReport(theta, level_max[best], witness[best], tuple(level_max))


@dataclass(frozen=True)
class WellDefinedReport:
    passed: bool
    worst_gap: Fraction
    worst_x: Fraction | None
    n_points: int
    tolerance: Fraction


def well_defined_check(s, K: int) -> WellDefinedReport:
    """Compare both base-``n`` expansions of every dividing point ``l n^-j``, ``j <= K``.

    Each expansion is evaluated to depth ``K``; the check passes when every
    gap between the two lower bracket ends is at most ``2 m^-K``.
    """
    if isinstance(s, Pattern):
        s = LabeledSystem.from_pattern(s)
    if not s.is_function_graph:
        raise PatternError("well-definedness needs a function-graph system",
                           "one cell per column")
    K = check_positive_int(K, "K", minimum=1)
    n, m = s.n, s.m
    if m**K >= 2**62:
        raise ValueError(f"depth {K} too large for exact integer brackets in base {m}")
    rows, child = s.transition_tables()
    worst_gap, worst_x, count = 0, None, 0
    chunk = 1 << 18
    for j in range(1, K + 1):
        for start in range(1, n**j, chunk):
            ell = np.arange(start, min(start + chunk, n**j), dtype=np.int64)
            ell = ell[ell % n != 0]
            if ell.size == 0:
                continue
            count += ell.size
            zeros = [np.zeros_like(ell)] * (K - j)
            nines = [np.full_like(ell, n - 1)] * (K - j)
            acc1, _ = _run(rows, child, m,
                           [*_digit_columns(ell, n, j), *zeros], np.zeros(ell.size))
            acc2, _ = _run(rows, child, m,
                           [*_digit_columns(ell - 1, n, j), *nines], np.zeros(ell.size))
            gaps = np.abs(acc1 - acc2)
            at = int(np.argmax(gaps))
            if gaps[at] > worst_gap:
                worst_gap = int(gaps[at])
                worst_x = Fraction(int(ell[at]), n**j)
    tol = Fraction(2, m**K)
    gap = Fraction(worst_gap, m**K)
    return WellDefinedReport(gap <= tol, gap, worst_x, count, tol)


def drift_grid_csv(grid: DriftGrid, out=None) -> str:
    """Write a drift grid as CSV with header ``t,f``."""
    from .io import write_csv

    return write_csv(["t", "f"], [grid.t, grid.f], out)
