import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from fbmdrift.carpet import LabeledSystem, Pattern
from fbmdrift.driftfn import ab_system, sample_drift_grid
from fbmdrift.fbm import (KernelQuery, fbm_cov, kernel_I, kernel_regime_check,
                          sample_fbm, sample_fbm_paths, sample_perturbed_graph,
                          standard_normals)

PAIRS = [(8, 8), (8, 64), (32, 200), (64, 64), (100, 256), (128, 129), (200, 250), (256, 256)]


def cov_failures(values, N, H):
    """Number of grid pairs whose empirical covariance is off by more than 3 SE."""
    fails = 0
    for i, j in PAIRS:
        prod = values[:, i] * values[:, j]
        se = prod.std(ddof=1) / math.sqrt(prod.size)
        if abs(prod.mean() - fbm_cov(i / N, j / N, H)) > 3 * se:
            fails += 1
    return fails


def test_fbm_cov_examples():
    assert fbm_cov(1, 1, 0.5) == pytest.approx(1.0)
    assert fbm_cov(0.25, 0.75, 0.5) == pytest.approx(0.25)
    for H in (0.2, 0.7):
        assert fbm_cov(0.3, 0.3, H) == pytest.approx(0.3 ** (2 * H))


def test_single_step_is_standard_normal():
    v, _ = sample_fbm_paths(0.5, 1, 10**4, seed=3)
    assert v.shape == (10**4, 2)
    x = v[:, 1]
    assert abs(x.var(ddof=1) - 1) < 3 * math.sqrt(2 / x.size)


def test_increment_variance_brownian():
    N = 64
    v, _ = sample_fbm_paths(0.5, N, 10**4, seed=11)
    inc = np.diff(v, axis=1)
    var = inc.var(axis=0, ddof=1)
    se = math.sqrt(2 / inc.shape[0]) / N
    assert np.mean(np.abs(var - 1 / N) <= 3 * se) > 0.95


@pytest.mark.parametrize("H", [0.2, 0.9])
def test_covariance_matrix(H):
    v, _ = sample_fbm_paths(H, 256, 10**4, seed=5)
    assert cov_failures(v, 256, H) <= 1


def test_dense_method_covariance():
    v, flags = sample_fbm_paths(0.7, 256, 4000, seed=2, method="dense")
    assert "dense" in flags
    assert cov_failures(v, 256, 0.7) <= 1


def test_path_contract_and_determinism():
    a = sample_fbm(0.3, 128, seed=42)
    b = sample_fbm(0.3, 128, seed=42)
    assert a.values[0] == 0 and len(a.values) == len(a.times) == 129
    assert np.array_equal(a.values, b.values)
    assert a.method == "circulant"
    assert not np.array_equal(a.values, sample_fbm(0.3, 128, seed=43).values)
    assert sample_fbm(0.3, 100, seed=1).method == "dense"


def test_chunked_normals_are_reproducible():
    a = standard_normals(9, 1000, chunk=3)
    assert np.array_equal(a, standard_normals(9, 1000, chunk=3))
    assert not np.array_equal(a, standard_normals(9, 1000, chunk=4))


def test_dense_cap_suggests_circulant():
    with pytest.raises(ValueError, match="circulant"):
        sample_fbm(0.5, 2**20, seed=1, method="dense")


def test_self_similarity_ks():
    H = 0.7
    a, _ = sample_fbm_paths(H, 64, 3000, seed=1)
    b, _ = sample_fbm_paths(H, 256, 3000, seed=2)
    c, _ = sample_fbm_paths(H, 256, 3000, seed=3)
    # X_1 marginals across grid sizes, and X_{1/4} rescaled by 4^H
    p1 = stats.ks_2samp(a[:, -1], b[:, -1]).pvalue
    p2 = stats.ks_2samp(c[:, 64] * 4**H, a[:, -1]).pvalue
    assert min(p1, p2) > 0.05 / 2


def test_holder_diagnostic_does_not_explode():
    H, zeta = 0.5, 0.05
    ratios = []
    for k in range(10, 17, 2):
        N = 2**k
        x = sample_fbm(H, N, seed=7).values
        ratios.append(np.abs(np.diff(x)).max() / (1 / N) ** (H - zeta))
    assert max(ratios) <= 2 * ratios[0]


def test_perturbed_graph_components():
    zero = LabeledSystem.from_pattern(Pattern.from_columns(6, 2, [0] * 6))
    t, x, f = sample_perturbed_graph(zero, 0.5, 256, seed=4)
    assert np.array_equal(x, sample_fbm(0.5, 256, seed=4).values)
    assert np.all(f < 1e-15)
    t, x, f = sample_perturbed_graph(ab_system(), 0.5, 256, seed=4, include_noise=False)
    assert np.all(x == 0) and np.array_equal(f, sample_drift_grid(ab_system(), 256).f)


def test_kernel_trivial():
    assert kernel_I(KernelQuery(0.2, 0.0, 0.0, 0.5)) == pytest.approx(1.0, abs=1e-10)


def test_kernel_far_limit():
    t, u, gamma = math.exp(-8), 2.0, 1.3
    val = kernel_I(KernelQuery(t, u, gamma, 0.5))
    assert val * u**gamma == pytest.approx(1.0, rel=1e-2)


def test_kernel_quadrature_vs_monte_carlo():
    q = KernelQuery(math.exp(-1), 0.0, 1.3, 0.5)
    quad = kernel_I(q)
    mc = kernel_I(q, "monte-carlo", samples=10**6, seed=0)
    assert quad.error < 1e-9
    assert abs(quad - mc) <= 3 * mc.error


def test_kernel_validation():
    with pytest.raises(ValueError):
        KernelQuery(0.5, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        KernelQuery(0.1, 3.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        kernel_I(KernelQuery(0.1, 0.0, 1.0, 0.5, d=2))
    assert kernel_I(KernelQuery(0.1, 0.0, 1.0, 0.5, d=2), "monte-carlo", samples=1000) > 0


@settings(max_examples=40, deadline=None)
@given(st.floats(math.exp(-8), math.exp(-1)), st.floats(0.0, 2.0), st.floats(0.3, 1.9),
       st.sampled_from([0.3, 0.5, 0.8]))
def test_kernel_monotone_in_offset(t, u, gamma, H):
    at_zero = kernel_I(KernelQuery(t, 0.0, gamma, H))
    assert kernel_I(KernelQuery(t, u, gamma, H)) <= at_zero * (1 + 1e-9)


def test_regime_check_low_gamma():
    t = np.exp(np.linspace(-8, -1, 8))
    u = np.linspace(0, 2, 6)
    rep = kernel_regime_check(0.5, 1, 0.7, t, u)
    assert set(rep.max_ratio) == {"far", "near-low"}
    assert rep.cells["near-low"] > 0
    doubled = kernel_regime_check(0.5, 1, 0.7, t, u, C=2 * rep.C)
    assert all(math.isfinite(v) for v in doubled.max_ratio.values())
    with pytest.raises(ValueError):
        kernel_regime_check(0.5, 1, 1.0, t, u)
