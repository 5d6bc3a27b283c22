"""Acceptance gate: one pass/fail line per criterion, at the stated tolerances."""

import math
import random
import time

import numpy as np

from fbmdrift.carpet import (LabeledSystem, Pattern, dimension_comparison, graph_dim_from_alpha,
                             hausdorff_dim_carpet, minkowski_dim_carpet, parabolic_dim_carpet)
from fbmdrift.dimest import (carpet_box_count_closed_form, carpet_box_count_exact,
                             carpet_scale_counts, content_decay, empirical_dim_graph,
                             fit_dimension, mass_ratio_bound, parabolic_content_dp,
                             parabolic_dim_bracket)
from fbmdrift.driftfn import ab_system, holder_check, well_defined_check
from fbmdrift.fbm import fbm_cov, sample_fbm_paths, sample_perturbed_graph
from fbmdrift.reproduce import KERNEL_CASES, kernel_refinement, run_target

from oracles import brute_force_box_count, canonical_tree, cover_count, exhaustive_content

AB = ab_system()
SEEDS = (0, 1, 2)
LOG18_6 = math.log(18) / math.log(6)
PARABOLIC_AB = 1.0808
COV_PAIRS = [(8, 8), (8, 64), (32, 200), (64, 64), (100, 256), (128, 129), (200, 250), (256, 256)]


def _perturbed(seed):
    t, x, f = sample_perturbed_graph(AB, 0.5, 2**18, seed, depth=18)
    return t, x, f


def test_criterion_1_formula_reproduction(record):
    t0 = time.perf_counter()
    checks = run_target("cor15")
    elapsed = time.perf_counter() - t0
    ok = all(c.passed for c in checks) and elapsed < 1.0
    failed = [c.name for c in checks if not c.passed]
    record(1, "formula reproduction", ok, f"{len(checks)} checks, failed={failed}, {elapsed:.3f}s")
    assert ok


def test_criterion_2_exact_covering_counts(record):
    t0 = time.perf_counter()
    exact = [carpet_box_count_exact(AB, j) for j in range(1, 9)]
    oracle = [brute_force_box_count(AB, j) for j in range(1, 5)]
    closed = [carpet_box_count_closed_form(AB, j) for j in range(5, 9)]
    rep = fit_dimension(carpet_scale_counts(AB, range(1, 9)))
    elapsed = time.perf_counter() - t0
    ok = (exact[:4] == oracle and exact[4:] == closed
          and abs(rep.estimate - LOG18_6) <= 1e-6 and rep.r_squared == 1.0 and elapsed < 10)
    record(2, "exact covering counts", ok,
           f"slope={rep.estimate:.10f} r2={rep.r_squared} {elapsed:.2f}s")
    assert ok


def test_criterion_3_parabolic_bracket(record):
    t0 = time.perf_counter()
    br = parabolic_dim_bracket(AB, 0.5, 9, step=0.025)
    ratios = mass_ratio_bound(AB, 0.5, 0.98, 9)
    spread = float(ratios.max() / ratios.min())
    contents = parabolic_content_dp(AB, 0.5, 1.18, 9)
    decay = content_decay(contents, 5, 9)
    elapsed = time.perf_counter() - t0
    width_ok = br.width is not None and 0 <= br.width <= 0.15
    contains = br.beta_lo is not None and br.beta_lo <= PARABOLIC_AB <= br.beta_hi
    ok = width_ok and contains and spread <= 2 and decay >= 4 and elapsed < 60
    record(3, "parabolic bracket", ok,
           f"[{br.beta_lo}, {br.beta_hi}] width={br.width} contains={contains} "
           f"mass spread@0.98={spread:.2f} decay@1.18={decay:.2f} {elapsed:.1f}s")
    assert ok


def _suite(count=20, seed=20):
    rnd = random.Random(seed)
    out = []
    while len(out) < count:
        n = rnd.randint(3, 6)
        m = 2
        size = rnd.randint(2, min(12, n * m))
        cells = rnd.sample([(a, b) for a in range(n) for b in range(m)], size)
        s = LabeledSystem.from_pattern(Pattern(n, m, cells))
        H = rnd.uniform(0.65, 0.9)
        K = rnd.randint(2, 3)
        # at least one nontrivial antichain; cap keeps the enumeration within budget
        if not 3 <= cover_count(*canonical_tree(s, H, K)) <= 2 * 10**5:
            continue
        out.append((s, H, K, rnd.uniform(0.2, 2.0)))
    return out


def test_criterion_4_dp_oracle_equivalence(record):
    t0 = time.perf_counter()
    bad = 0
    suite = _suite()
    for s, H, K, beta in suite:
        dp = parabolic_content_dp(s, H, beta, K)[K - 1]
        if not math.isclose(dp, exhaustive_content(s, H, beta, K), rel_tol=1e-12):
            bad += 1
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 30
    record(4, "DP oracle equivalence", ok, f"{len(suite)} patterns, mismatches={bad}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_fbm_covariance(record):
    t0 = time.perf_counter()
    N, fails = 256, 0
    for k, H in enumerate((0.2, 0.5, 0.8)):
        v, _ = sample_fbm_paths(H, N, 10**4, seed=100 + k)
        for i, j in COV_PAIRS:
            prod = v[:, i] * v[:, j]
            se = prod.std(ddof=1) / math.sqrt(prod.size)
            fails += abs(prod.mean() - fbm_cov(i / N, j / N, H)) > 3 * se
    elapsed = time.perf_counter() - t0
    ok = fails <= 2 and elapsed < 120
    record(5, "fBm covariance", ok, f"failures={fails}/24 {elapsed:.1f}s")
    assert ok


def test_criterion_6_perturbed_box_dimension(record):
    t0 = time.perf_counter()
    scales = [2.0**-k for k in range(5, 13)]
    slopes = []
    for seed in SEEDS:
        t, x, f = _perturbed(seed)
        slopes.append(empirical_dim_graph(np.column_stack([t, x + f]), scales).estimate)
    elapsed = time.perf_counter() - t0
    hits = sum(1.53 <= v <= 1.70 for v in slopes)
    ok = hits >= 2 and elapsed < 120
    record(6, "perturbed graph box dimension", ok,
           f"slopes={[round(v, 4) for v in slopes]} in-range={hits}/3 {elapsed:.1f}s")
    assert ok


def test_criterion_7_parabolic_invariance(record):
    t0 = time.perf_counter()
    scales = [4.0**-k for k in range(2, 9)]
    t, x, f = _perturbed(SEEDS[0])
    ref = empirical_dim_graph(np.column_stack([t, f]), scales, 0.5, "parabolic").estimate
    diffs = []
    for seed in SEEDS:
        t, x, f = _perturbed(seed)
        bf = empirical_dim_graph(np.column_stack([t, x + f]), scales, 0.5, "parabolic").estimate
        diffs.append(abs(bf - ref))
    elapsed = time.perf_counter() - t0
    hits = sum(d <= 0.08 for d in diffs)
    ok = hits >= 2 and elapsed < 120
    record(7, "parabolic dimension invariance", ok,
           f"gr(f)={ref:.4f} diffs={[round(d, 4) for d in diffs]} within={hits}/3 {elapsed:.1f}s")
    assert ok


def test_criterion_8_kernel_regimes(record):
    t0 = time.perf_counter()
    worst, finite = -math.inf, True
    for H, d, gamma in KERNEL_CASES:
        coarse, fine, growth = kernel_refinement(H, d, gamma)
        for regime, g in growth.items():
            finite &= math.isfinite(coarse.max_ratio[regime]) and math.isfinite(fine.max_ratio[regime])
            worst = max(worst, g)
    elapsed = time.perf_counter() - t0
    ok = finite and worst < 0.10 and elapsed < 60
    record(8, "kernel regimes", ok, f"max growth={worst:.4f} finite={finite} {elapsed:.1f}s")
    assert ok


def test_criterion_9_property_suites(record):
    t0 = time.perf_counter()
    wd = well_defined_check(AB, 8)
    hol = holder_check(AB, 10)
    rnd = random.Random(9)
    branch_bad = order_bad = 0
    for _ in range(1000):
        m = rnd.randint(2, 4)
        n = rnd.randint(m + 1, 12)
        rows = list(range(m)) + [rnd.randrange(m) for _ in range(n - m)]
        rnd.shuffle(rows)
        p = Pattern.from_columns(n, m, rows)
        H = rnd.uniform(p.theta, 1.0)
        if not p.theta < H < 1:
            continue
        alpha = parabolic_dim_carpet(p, H)
        # second branch alpha + d(1 - H) must be the minimum
        if not (alpha + 1 - H <= alpha / H + 1e-12 and
                math.isclose(graph_dim_from_alpha(alpha, H), alpha + 1 - H, abs_tol=1e-12)):
            branch_bad += 1
        h, mk = hausdorff_dim_carpet(p), minkowski_dim_carpet(p)
        equal = len(set(p.row_counts)) == 1
        if h > mk + 1e-12 or (abs(h - mk) <= 1e-12) != equal:
            order_bad += 1
    elapsed = time.perf_counter() - t0
    ok = (wd.passed and hol.max_ratio <= 2 and hol.max_ratio >= 1
          and branch_bad == 0 and order_bad == 0 and elapsed < 60)
    record(9, "property suites", ok,
           f"dual-rep gap={float(wd.worst_gap):.3g} over {wd.n_points} points, "
           f"holder max={hol.max_ratio:.4f}, min-branch failures={branch_bad}, "
           f"dim order failures={order_bad}, {elapsed:.1f}s")
    assert ok
