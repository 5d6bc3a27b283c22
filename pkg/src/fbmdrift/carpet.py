"""Digit patterns, labelled pattern systems and closed-form carpet dimensions.

Cells are ``(column, row)`` pairs: the column is the base-``n`` digit of the
horizontal coordinate (0 leftmost) and the row is the base-``m`` digit of the
vertical coordinate (0 at the bottom).  A carpet ``K(D)`` is the set of points
``sum_k (a_k n^-k, b_k m^-k)`` with every ``(a_k, b_k)`` in ``D``.

All ``sum_j r(j)^s`` expressions use the convention ``0^s = 0``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from ._validation import HypothesisError, check_hurst, check_positive_int

__all__ = [
    "PatternError",
    "HypothesisError",
    "Pattern",
    "PatternReport",
    "LabeledSystem",
    "GenRect",
    "DimensionComparison",
    "DEFAULT_CELL_BUDGET",
    "validate_pattern",
    "row_counts",
    "hausdorff_dim_carpet",
    "minkowski_dim_carpet",
    "parabolic_dim_carpet",
    "frostman_weights",
    "graph_dim_from_alpha",
    "image_dim_from_alpha",
    "perturbed_graph_dim_carpet",
    "minkowski_dim_perturbed",
    "dimension_comparison",
    "generation_count",
    "generation_arrays",
    "generation_cells",
]

DEFAULT_CELL_BUDGET = 10**8

# Comparisons between closed-form dimensions that agree analytically can
# differ in the last ulp; strict inequalities must clear this margin.
STRICT_MARGIN = 1e-12


class PatternError(ValueError):
    """Raised when a pattern or labelled system violates a structural invariant."""

    def __init__(self, message: str, invariant: str):
        super().__init__(message)
        self.invariant = invariant


def _check_cells(n, m, cells) -> tuple[tuple[int, int], ...]:
    n = check_positive_int(n, "n")
    m = check_positive_int(m, "m")
    if m < 2:
        raise PatternError(f"m must be >= 2, got {m}", "m >= 2")
    if n <= m:
        raise PatternError(f"n must exceed m, got n={n}, m={m}", "n > m")
    out = []
    for cell in cells:
        if len(cell) != 2:
            raise PatternError(f"cell {cell!r} is not an (column, row) pair", "cell shape")
        a, b = int(cell[0]), int(cell[1])
        if not (0 <= a < n and 0 <= b < m):
            raise PatternError(f"cell out of bounds: {(a, b)} for n={n}, m={m}",
                               "cell out of bounds")
        out.append((a, b))
    if not out:
        raise PatternError("pattern has no cells", "cells nonempty")
    dupes = [c for c, k in Counter(out).items() if k > 1]
    if dupes:
        raise PatternError(f"duplicate cell {dupes[0]}", "no duplicate cells")
    return tuple(sorted(out))


@dataclass(frozen=True)
class Pattern:
    """A set of chosen cells in the ``n x m`` grid.

    Examples
    --------
    >>> p = Pattern(6, 2, [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (5, 1)])
    >>> p.row_counts
    (5, 1)
    """

    n: int
    m: int
    cells: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "cells", _check_cells(self.n, self.m, self.cells))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    @classmethod
    def full(cls, n: int, m: int) -> "Pattern":
        return cls(n, m, [(a, b) for a in range(n) for b in range(m)])

    @classmethod
    def from_columns(cls, n: int, m: int, rows: Sequence[int]) -> "Pattern":
        """Function-graph pattern with ``rows[a]`` the chosen row of column ``a``."""
        if len(rows) != n:
            raise PatternError(f"need one row per column ({n}), got {len(rows)}",
                               "one cell per column")
        return cls(n, m, [(a, b) for a, b in enumerate(rows)])

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def row_counts(self) -> tuple[int, ...]:
        counts = [0] * self.m
        for _, b in self.cells:
            counts[b] += 1
        return tuple(counts)

    @property
    def column_counts(self) -> tuple[int, ...]:
        counts = [0] * self.n
        for a, _ in self.cells:
            counts[a] += 1
        return tuple(counts)

    @property
    def is_function_graph(self) -> bool:
        return all(c == 1 for c in self.column_counts)

    @property
    def theta(self) -> float:
        """``log_n m``, the Hölder exponent scale of the carpet."""
        return math.log(self.m) / math.log(self.n)


class PatternReport(NamedTuple):
    n: int
    m: int
    size: int
    row_counts: tuple[int, ...]
    is_function_graph: bool
    rows_nonempty: bool


def validate_pattern(p) -> PatternReport:
    """Check pattern invariants and report graph / row-occupancy status.

    ``p`` may be a :class:`Pattern` or an ``(n, m, cells)`` triple; the latter
    is how invalid input reaches this function, since a ``Pattern`` cannot be
    constructed in an invalid state.  Violations raise :class:`PatternError`.
    """
    if not isinstance(p, Pattern):
        n, m, cells = p
        p = Pattern(n, m, cells)
    r = p.row_counts
    if sum(r) != p.size:  # pragma: no cover - guarded by construction
        raise PatternError("row counts do not sum to |D|", "row_counts sum")
    return PatternReport(p.n, p.m, p.size, r, p.is_function_graph, min(r) >= 1)


def row_counts(p) -> tuple[int, ...]:
    """``r(j)``: the number of chosen cells in row ``j``."""
    return _profile(p)[2]


@dataclass(frozen=True)
class LabeledSystem:
    """Patterns indexed by label, each cell carrying the label of its child.

    ``rules`` maps a label to a sequence of ``(column, row, child_label)``
    triples.  Generation ``k+1`` is obtained by subdividing every kept
    rectangle according to the pattern of its label and assigning each kept
    child the label listed on its cell.
    """

    n: int
    m: int
    root: str
    rules: Mapping[str, tuple[tuple[int, int, str], ...]]
    patterns: Mapping[str, Pattern] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rules = {}
        patterns = {}
        for label, cells in self.rules.items():
            triples = [(int(a), int(b), str(c)) for a, b, c in cells]
            pat = Pattern(self.n, self.m, [(a, b) for a, b, _ in triples])
            patterns[str(label)] = pat
            rules[str(label)] = tuple(sorted(triples))
        if not rules:
            raise PatternError("system has no patterns", "labels nonempty")
        for label, triples in rules.items():
            for a, b, child in triples:
                if child not in rules:
                    raise PatternError(f"cell {(a, b)} of {label!r} points to unknown "
                                       f"label {child!r}", "child label known")
        if self.root not in rules:
            raise PatternError(f"root label {self.root!r} has no pattern", "root known")
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "patterns", patterns)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    @classmethod
    def from_pattern(cls, p: Pattern, label: str = "P") -> "LabeledSystem":
        """One-label system: every cell points back to the same pattern."""
        return cls(p.n, p.m, label, {label: [(a, b, label) for a, b in p.cells]})

    @property
    def labels(self) -> tuple[str, ...]:
        # root first keeps label index 0 meaningful for vectorised code
        rest = sorted(lab for lab in self.rules if lab != self.root)
        return (self.root, *rest)

    @property
    def is_function_graph(self) -> bool:
        return all(p.is_function_graph for p in self.patterns.values())

    @property
    def theta(self) -> float:
        return math.log(self.m) / math.log(self.n)

    def pattern(self, label: str) -> Pattern:
        return self.patterns[label]

    def cells(self, label: str) -> tuple[tuple[int, int, str], ...]:
        return self.rules[label]

    def transition_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays ``row[L, a]`` and ``child[L, a]`` for a function-graph system.

        Label indices follow :attr:`labels`.
        """
        if not self.is_function_graph:
            raise PatternError("system is not a function graph", "one cell per column")
        index = {lab: i for i, lab in enumerate(self.labels)}
        rows = np.empty((len(index), self.n), dtype=np.int64)
        child = np.empty((len(index), self.n), dtype=np.int64)
        for lab, i in index.items():
            for a, b, c in self.rules[lab]:
                rows[i, a] = b
                child[i, a] = index[c]
        return rows, child

    def count_matrix(self) -> np.ndarray:
        """``M[i, j]`` = number of cells of label ``i`` whose child is label ``j``."""
        index = {lab: i for i, lab in enumerate(self.labels)}
        M = np.zeros((len(index), len(index)), dtype=object)
        for lab, i in index.items():
            for _, _, c in self.rules[lab]:
                M[i, index[c]] += 1
        return M


def _profile(obj) -> tuple[int, int, tuple[int, ...]]:
    """``(n, m, r)`` for a pattern, or a system whose row counts agree."""
    if isinstance(obj, Pattern):
        return obj.n, obj.m, obj.row_counts
    if isinstance(obj, LabeledSystem):
        profiles = {lab: p.row_counts for lab, p in obj.patterns.items()}
        ref = profiles[obj.root]
        for lab, r in profiles.items():
            if sorted(r) != sorted(ref):
                raise HypothesisError(
                    f"patterns {obj.root!r} and {lab!r} have different row-count "
                    f"multisets {ref} vs {r}; closed-form dimensions do not apply",
                    "equal row-count multisets")
        return obj.n, obj.m, ref
    raise TypeError(f"expected Pattern or LabeledSystem, got {type(obj).__name__}")


def _power_sum(r: Sequence[int], s: float) -> float:
    return math.fsum(float(x) ** s for x in r if x > 0)


def _is_function_graph(obj) -> bool:
    return obj.is_function_graph


def _require_parabolic(n: int, m: int, H: float) -> None:
    theta = math.log(m) / math.log(n)
    if not theta < H:
        raise HypothesisError(
            f"hypothesis log_n(m) < H violated: log_{n}({m}) = {theta:.6g} >= H = {H:.6g}",
            "log_n(m) < H")


def hausdorff_dim_carpet(p) -> float:
    """McMullen's formula ``log_m sum_j r(j)^(log_n m)``."""
    n, m, r = _profile(p)
    total = _power_sum(r, math.log(m) / math.log(n))
    return math.log(total) / math.log(m)


def minkowski_dim_carpet(p) -> float:
    """``1 + log_n(|D| / m)``; requires every row to be occupied."""
    n, m, r = _profile(p)
    if min(r) < 1:
        raise HypothesisError("Minkowski formula needs r(j) >= 1 for every row",
                              "all rows nonempty")
    return 1.0 + math.log(sum(r) / m) / math.log(n)


def parabolic_dim_carpet(p, H: float) -> float:
    """H-parabolic Hausdorff dimension ``H log_m sum_j r(j)^(log_n(m)/H)``.

    Valid when ``log_n m < H``; otherwise :class:`HypothesisError`.
    """
    H = check_hurst(H)
    n, m, r = _profile(p)
    _require_parabolic(n, m, H)
    s = math.log(m) / math.log(n) / H
    return H * math.log(_power_sum(r, s)) / math.log(m)


def frostman_weights(p: Pattern, H: float) -> dict[tuple[int, int], float]:
    """Row-dependent cell weights ``r(j)^(theta/H - 1) / Z``.

    ``Z = sum_j r(j)^(theta/H)`` so the weights form a probability vector.
    This is the product-measure weight that maximises the parabolic
    mass-scaling exponent.
    """
    H = check_hurst(H)
    if not isinstance(p, Pattern):
        raise TypeError("frostman_weights expects a Pattern")
    _require_parabolic(p.n, p.m, H)
    r = p.row_counts
    s = p.theta / H
    Z = _power_sum(r, s)
    return {(a, b): r[b] ** (s - 1.0) / Z for a, b in p.cells}


def graph_dim_from_alpha(alpha: float, H: float, d: int = 1) -> float:
    """``min(alpha / H, alpha + d (1 - H))``: graph dimension of X + f."""
    H = check_hurst(H)
    d = check_positive_int(d, "d")
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return min(alpha / H, alpha + d * (1.0 - H))


def image_dim_from_alpha(alpha: float, H: float, d: int = 1) -> float:
    """``min(alpha / H, d)``: image dimension of X + f."""
    H = check_hurst(H)
    d = check_positive_int(d, "d")
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return min(alpha / H, float(d))


def perturbed_graph_dim_carpet(p, H: float) -> float:
    """Graph dimension of ``X + f`` when ``gr(f)`` is the carpet of ``p``.

    ``1 - H + H log_m sum_j r(j)^(log_n(m)/H)``.  Requires a function-graph
    pattern (one cell per column) and ``log_n m < H``.
    """
    if not _is_function_graph(p):
        raise HypothesisError("pattern is not a function graph (need exactly one "
                              "cell per column)", "function graph")
    alpha = parabolic_dim_carpet(p, H)
    return 1.0 - H + alpha


def minkowski_dim_perturbed(p) -> float:
    """Box dimension ``1 + log_n(n/m)`` of ``gr(B + f)`` and ``gr(f)``.

    Hypotheses (each reported by name): ``n > m^2``, every row occupied,
    exactly one cell per column.
    """
    n, m, r = _profile(p)
    if not n > m * m:
        raise HypothesisError(f"requires n > m^2, got n={n}, m={m}", "n > m^2")
    if min(r) < 1:
        raise HypothesisError("requires r(j) >= 1 for every row", "all rows nonempty")
    if not _is_function_graph(p):
        raise HypothesisError("requires exactly one cell per column", "function graph")
    return 1.0 + math.log(n / m) / math.log(n)


@dataclass(frozen=True)
class DimensionComparison:
    """Closed-form dimensions around ``gr(B + f)`` for a self-affine graph.

    ``strict_lower`` is ``max(dim gr B, dim gr f) < dim gr(B+f)`` and
    ``strict_upper`` is ``dim gr(B+f) < dim_M gr(B+f)``, both with a
    ``1e-12`` margin.  ``cs_gap = m sum r^s - (sum r^(s/2))^2`` and
    ``jensen_gap = mean(r)^s - mean(r^s)`` with ``s = theta/H``; both vanish
    exactly when all rows hold the same number of cells.
    """

    H: float
    dim_gr_f: float
    dim_gr_B: float
    dim_gr_Bf: float
    dimM_gr_f: float
    dimM_gr_Bf: float
    strict_lower: bool
    strict_upper: bool
    rows_equal: bool
    cs_gap: float
    jensen_gap: float

    @property
    def strict_flags(self) -> tuple[bool, bool]:
        return self.strict_lower, self.strict_upper

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def dimension_comparison(p, H: float = 0.5) -> DimensionComparison:
    n, m, r = _profile(p)
    dimM_f = minkowski_dim_perturbed(p)
    H = check_hurst(H)
    dim_f = hausdorff_dim_carpet(p)
    dim_B = 2.0 - H
    dim_Bf = perturbed_graph_dim_carpet(p, H)
    dimM_Bf = max(dimM_f, dim_B)
    s = math.log(m) / math.log(n) / H
    cs_gap = m * _power_sum(r, s) - _power_sum(r, s / 2.0) ** 2
    jensen_gap = (sum(r) / m) ** s - _power_sum(r, s) / m
    return DimensionComparison(
        H=H,
        dim_gr_f=dim_f,
        dim_gr_B=dim_B,
        dim_gr_Bf=dim_Bf,
        dimM_gr_f=dimM_f,
        dimM_gr_Bf=dimM_Bf,
        strict_lower=max(dim_B, dim_f) < dim_Bf - STRICT_MARGIN,
        strict_upper=dim_Bf < dimM_Bf - STRICT_MARGIN,
        rows_equal=len(set(r)) == 1,
        cs_gap=cs_gap,
        jensen_gap=jensen_gap,
    )


# --------------------------------------------------------------------------
# generation-k geometry


class GenRect(NamedTuple):
    """Kept rectangle ``[p n^-k, (p+1) n^-k] x [q m^-k, (q+1) m^-k]``."""

    k: int
    p: int
    q: int
    label: str
    n: int
    m: int

    @property
    def exact_bounds(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        w = Fraction(1, self.n**self.k)
        h = Fraction(1, self.m**self.k)
        return self.p * w, (self.p + 1) * w, self.q * h, (self.q + 1) * h

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return tuple(float(v) for v in self.exact_bounds)


def _as_system(s) -> LabeledSystem:
    if isinstance(s, Pattern):
        return LabeledSystem.from_pattern(s)
    if isinstance(s, LabeledSystem):
        return s
    raise TypeError(f"expected Pattern or LabeledSystem, got {type(s).__name__}")


def generation_count(s, k: int) -> int:
    """Exact number of generation-``k`` rectangles."""
    s = _as_system(s)
    k = check_positive_int(k, "k", minimum=0)
    M = s.count_matrix()
    vec = np.zeros(len(s.labels), dtype=object)
    vec[0] = 1
    for _ in range(k):
        vec = vec.dot(M)
    return int(sum(vec))


def generation_arrays(s, k: int, budget: int = DEFAULT_CELL_BUDGET):
    """Generation-``k`` rectangles as arrays ``(p, q, label_index)``.

    Rows are sorted column-major (by ``p``, then ``q``); label indices refer
    to ``s.labels``.  Raises ``MemoryError`` if the rectangle count exceeds
    ``budget``.
    """
    s = _as_system(s)
    k = check_positive_int(k, "k", minimum=0)
    count = generation_count(s, k)
    if count > budget:
        raise MemoryError(f"generation {k} has {count} rectangles, over the cell "
                          f"budget of {budget}")
    if s.n**k >= 2**62:
        raise MemoryError(f"column indices n^k = {s.n}^{k} overflow int64")
    labels = s.labels
    index = {lab: i for i, lab in enumerate(labels)}
    cell_a = [np.array([c[0] for c in s.rules[lab]], dtype=np.int64) for lab in labels]
    cell_b = [np.array([c[1] for c in s.rules[lab]], dtype=np.int64) for lab in labels]
    cell_c = [np.array([index[c[2]] for c in s.rules[lab]], dtype=np.int64) for lab in labels]

    P = np.zeros(1, dtype=np.int64)
    Q = np.zeros(1, dtype=np.int64)
    L = np.zeros(1, dtype=np.int64)
    for _ in range(k):
        parts_p, parts_q, parts_l = [], [], []
        for i in range(len(labels)):
            sel = L == i
            if not sel.any():
                continue
            pp, qq = P[sel], Q[sel]
            parts_p.append((pp[:, None] * s.n + cell_a[i][None, :]).ravel())
            parts_q.append((qq[:, None] * s.m + cell_b[i][None, :]).ravel())
            parts_l.append(np.broadcast_to(cell_c[i], (pp.size, cell_c[i].size)).ravel())
        P = np.concatenate(parts_p)
        Q = np.concatenate(parts_q)
        L = np.concatenate(parts_l)
    order = np.lexsort((Q, P))
    return P[order], Q[order], L[order]


def generation_cells(s, k: int, budget: int = DEFAULT_CELL_BUDGET) -> Iterator[GenRect]:
    """Stream the generation-``k`` rectangles of a system in column-major order."""
    s = _as_system(s)
    P, Q, L = generation_arrays(s, k, budget)
    labels = s.labels
    for p, q, lab in zip(P.tolist(), Q.tolist(), L.tolist()):
        yield GenRect(k, p, q, labels[lab], s.n, s.m)
