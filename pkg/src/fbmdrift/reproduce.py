"""Named reproduction targets: computed value, expected value, tolerance, verdict."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .carpet import (Pattern, dimension_comparison, hausdorff_dim_carpet,
                     minkowski_dim_perturbed, perturbed_graph_dim_carpet)
from .dimest import carpet_scale_counts, fit_dimension
from .driftfn import ab_system
from .fbm import kernel_regime_check

TOLERANCES_VERSION = 1
DEFAULT_TOLERANCES = {
    "printed_digits": 4,      # decimals shown in the printed values
    "internal": 1e-12,        # closed forms evaluated two ways
    "slope": 1e-6,            # exact-count regression slope
    "kernel_refine": 0.10,    # relative growth of the regime maxima on a 2x grid
    "runtime_cor15": 1.0,     # seconds
}

TARGETS = ("cor15", "remark16", "strict-chain", "kernel-regimes")

# printed decimals, truncated
PRINTED = {"dim_gr_Bf": 1.5807, "dimM": 1.6131}
KERNEL_CASES = ((0.5, 1, 1.3), (0.5, 1, 0.7), (0.7, 1, 1.5))


@dataclass
class Check:
    name: str
    computed: object
    expected: object
    tolerance: object
    passed: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _truncate(x: float, digits: int) -> float:
    return math.floor(x * 10**digits) / 10**digits


def _ab_closed_forms() -> dict[str, float]:
    theta = math.log(2) / math.log(6)
    return {
        "dim_gr_f": math.log2(5**theta + 1),
        "dim_gr_Bf": (1 + math.log2(5 ** (2 * theta) + 1)) / 2,
        "dimM": 1 + math.log(3) / math.log(6),
    }


def _target_cor15(tol) -> list[Check]:
    t0 = time.perf_counter()
    s = ab_system()
    closed = _ab_closed_forms()
    lib = {
        "dim_gr_f": hausdorff_dim_carpet(s),
        "dim_gr_Bf": perturbed_graph_dim_carpet(s, 0.5),
        "dimM": minkowski_dim_perturbed(s),
    }
    d = tol["printed_digits"]
    checks = [Check(f"{k} closed form", lib[k], closed[k], tol["internal"],
                    abs(lib[k] - closed[k]) <= tol["internal"]) for k in closed]
    for k, printed in PRINTED.items():
        checks.append(Check(f"{k} printed digits", _truncate(lib[k], d), printed,
                            10.0**-d, _truncate(lib[k], d) == printed))
    lower = max(lib["dim_gr_f"], 1.5)
    checks.append(Check("dim gr(B+f) > max(dim gr f, 3/2)", lib["dim_gr_Bf"], lower,
                        None, lib["dim_gr_Bf"] > lower))
    checks.append(Check("dim gr(B+f) < dim_M", lib["dim_gr_Bf"], lib["dimM"], None,
                        lib["dim_gr_Bf"] < lib["dimM"]))
    elapsed = time.perf_counter() - t0
    checks.append(Check("runtime seconds", elapsed, tol["runtime_cor15"], None,
                        elapsed < tol["runtime_cor15"]))
    return checks


def _target_remark16(tol) -> list[Check]:
    s = ab_system()
    dimM = minkowski_dim_perturbed(s)
    dim_Bf = perturbed_graph_dim_carpet(s, 0.5)
    report = fit_dimension(carpet_scale_counts(s, range(1, 7)))
    expected = math.log(18) / math.log(6)
    return [
        Check("dim_M gr(f) > dim gr(B+f)", dimM, dim_Bf, None, dimM > dim_Bf),
        Check("exact-count slope", report.estimate, expected, tol["slope"],
              abs(report.estimate - expected) <= tol["slope"]),
        Check("slope equals dim_M", report.estimate, dimM, tol["slope"],
              abs(report.estimate - dimM) <= tol["slope"]),
    ]


def _target_strict_chain(tol) -> list[Check]:
    ab = dimension_comparison(ab_system(), 0.5)
    # one cell per column, three in each row: every inequality collapses
    equal = Pattern.from_columns(6, 2, [0, 1, 0, 1, 0, 1])
    eq = dimension_comparison(equal, 0.5)
    spread = max(eq.dim_gr_f, eq.dim_gr_Bf, eq.dimM_gr_Bf) - min(eq.dim_gr_f, eq.dim_gr_Bf,
                                                                  eq.dimM_gr_Bf)
    return [
        Check("unequal rows: strict lower", ab.strict_lower, True, None, ab.strict_lower),
        Check("unequal rows: strict upper", ab.strict_upper, True, None, ab.strict_upper),
        Check("unequal rows: cs_gap > 0", ab.cs_gap, 0.0, None, ab.cs_gap > 0),
        Check("equal rows: collapse", list(eq.strict_flags), [False, False], None,
              eq.strict_flags == (False, False)),
        Check("equal rows: dimensions coincide", spread, 0.0, tol["internal"],
              spread <= tol["internal"]),
    ]


def kernel_grids(n_t: int, n_u: int):
    """Log grid in ``t`` on ``[e^-8, e^-1]`` and linear grid in ``u`` on ``[0, 2]``."""
    return np.exp(np.linspace(-8.0, -1.0, n_t)), np.linspace(0.0, 2.0, n_u)


def kernel_refinement(H, d, gamma, n_t=15, n_u=11):
    coarse = kernel_regime_check(H, d, gamma, *kernel_grids(n_t, n_u))
    fine = kernel_regime_check(H, d, gamma, *kernel_grids(2 * n_t - 1, 2 * n_u - 1))
    growth = {k: fine.max_ratio[k] / coarse.max_ratio[k] - 1.0 for k in coarse.max_ratio}
    return coarse, fine, growth


def _target_kernel(tol) -> list[Check]:
    checks = []
    for H, d, gamma in KERNEL_CASES:
        coarse, fine, growth = kernel_refinement(H, d, gamma)
        for regime, g in growth.items():
            finite = all(math.isfinite(r.max_ratio[regime]) for r in (coarse, fine))
            checks.append(Check(f"H={H} d={d} gamma={gamma} {regime}",
                                {"coarse": coarse.max_ratio[regime],
                                 "fine": fine.max_ratio[regime], "growth": g},
                                f"growth < {tol['kernel_refine']}", tol["kernel_refine"],
                                finite and g < tol["kernel_refine"]))
    return checks


_RUNNERS: dict[str, Callable] = {
    "cor15": _target_cor15,
    "remark16": _target_remark16,
    "strict-chain": _target_strict_chain,
    "kernel-regimes": _target_kernel,
}


def run_target(target: str, tolerances: dict | None = None) -> list[Check]:
    if target not in _RUNNERS:
        raise ValueError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    return _RUNNERS[target](tol)


def format_table(target: str, checks: list[Check]) -> str:
    lines = [f"target {target} (tolerances v{TOLERANCES_VERSION})"]
    for c in checks:
        verdict = "PASS" if c.passed else "FAIL"
        tol = "" if c.tolerance is None else f"  tol={c.tolerance}"
        lines.append(f"  {verdict}  {c.name}: computed={c.computed} expected={c.expected}{tol}")
    return "\n".join(lines)
