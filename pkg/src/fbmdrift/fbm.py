"""Exact fractional Brownian motion sampling and the graph-energy kernel.

Gaussians are produced by inverse-CDF transforms of uniforms drawn from a
counter-based Philox stream, so a path is a pure function of its seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy import integrate, linalg, special

from ._validation import check_hurst, check_positive_int
from .driftfn import sample_drift_grid

__all__ = [
    "DENSE_CAP",
    "EMBEDDING_TOL",
    "FbmPath",
    "EmbeddingWarning",
    "fbm_cov",
    "fgn_autocov",
    "standard_normals",
    "sample_fbm",
    "sample_fbm_paths",
    "sample_perturbed_graph",
    "KernelQuery",
    "KernelValue",
    "kernel_I",
    "default_boundary_constant",
    "KernelRegimeReport",
    "kernel_regime_check",
]

DENSE_CAP = 2**13
EMBEDDING_TOL = 1e-8

Method = Literal["dense", "circulant"]


class EmbeddingWarning(RuntimeWarning):
    pass


def fbm_cov(s, t, H: float):
    """``Cov(X_s, X_t) = (s^2H + t^2H - |t - s|^2H) / 2``."""
    H = check_hurst(H)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise ValueError("times must be non-negative")
    out = 0.5 * (s ** (2 * H) + t ** (2 * H) - np.abs(t - s) ** (2 * H))
    return out.item() if out.ndim == 0 else out


def fgn_autocov(H: float, N: int) -> np.ndarray:
    """Autocovariance of unit-step fractional Gaussian noise at lags ``0..N-1``."""
    k = np.arange(N, dtype=float)
    return 0.5 * ((k + 1) ** (2 * H) - 2 * k ** (2 * H) + np.abs(k - 1) ** (2 * H))


def _rng(seed, chunk: int | None = None) -> np.random.Generator:
    key = () if chunk is None else (int(chunk),)
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def standard_normals(seed: int, size, chunk: int | None = None) -> np.ndarray:
    """Standard normals via ``ndtri`` of uniforms on the open interval (0, 1).

    ``chunk`` derives an independent sub-stream ``(seed, chunk)``.
    """
    rng = _rng(seed, chunk)
    u = (rng.integers(0, 2**53, size=size, dtype=np.int64) + 0.5) * 2.0**-53
    return special.ndtri(u)


@dataclass(frozen=True)
class FbmPath:
    H: float
    times: np.ndarray
    values: np.ndarray
    seed: int
    method: str
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")


def _circulant_eigs(H: float, N: int) -> tuple[np.ndarray, tuple[str, ...]]:
    gamma = fgn_autocov(H, N + 1)
    row = np.concatenate([gamma[: N + 1], gamma[N - 1 : 0 : -1]])
    lam = np.fft.fft(row).real
    flags = ()
    if lam.min() < -EMBEDDING_TOL:
        raise linalg.LinAlgError(f"circulant embedding not PSD (min eigenvalue {lam.min():.3g})")
    if lam.min() < 0:
        lam = np.clip(lam, 0.0, None)
        flags = ("clamped-eigenvalues",)
    return lam, flags


def _fgn_circulant(H, N, Z1, Z2, lam):
    # Z1, Z2: (..., 2N) standard normals; real part of the FFT has the target law
    w = np.sqrt(lam / (2 * N)) * (Z1 + 1j * Z2)
    return np.fft.fft(w, axis=-1).real[..., :N]


def _dense_factor(H, N):
    gamma = fgn_autocov(H, N)
    return linalg.cholesky(linalg.toeplitz(gamma), lower=True)


def _resolve_method(method, N):
    if method is None:
        return "circulant" if N & (N - 1) == 0 else "dense"
    if method not in ("dense", "circulant"):
        raise ValueError(f"unknown method {method!r}; use 'dense' or 'circulant'")
    return method


def sample_fbm_paths(H: float, N: int, n_paths: int, seed: int,
                     method: Method | None = None, dense_cap: int = DENSE_CAP,
                     chunk: int | None = None):
    """``n_paths`` independent fBm paths on ``i / N``, ``i = 0..N``.

    Returns ``(values, flags)`` with ``values`` of shape ``(n_paths, N + 1)``.
    """
    H = check_hurst(H)
    N = check_positive_int(N, "N", minimum=1)
    n_paths = check_positive_int(n_paths, "n_paths")
    method = _resolve_method(method, N)
    flags: tuple[str, ...] = ()
    if method == "circulant":
        if N & (N - 1):
            raise ValueError(f"circulant method needs N a power of two, got {N}")
        try:
            lam, flags = _circulant_eigs(H, N)
        except linalg.LinAlgError as exc:
            warnings.warn(f"{exc}; falling back to dense factorisation", EmbeddingWarning)
            method, flags = "dense", ("embedding-fallback",)
    if method == "dense" and N > dense_cap:
        raise ValueError(f"N = {N} exceeds the dense-method cap {dense_cap}; "
                         "use the circulant method with N a power of two")
    if method == "circulant":
        Z = standard_normals(seed, (n_paths, 4 * N), chunk)
        incr = _fgn_circulant(H, N, Z[:, : 2 * N], Z[:, 2 * N :], lam)
    else:
        Z = standard_normals(seed, (n_paths, N), chunk)
        incr = Z @ _dense_factor(H, N).T
    incr *= float(N) ** (-H)
    values = np.zeros((n_paths, N + 1))
    np.cumsum(incr, axis=1, out=values[:, 1:])
    return values, flags + (method,)


def sample_fbm(H: float, N: int, seed: int, method: Method | None = None,
               dense_cap: int = DENSE_CAP) -> FbmPath:
    """One exact fBm path on the uniform grid ``i / N`` (``N + 1`` points).

    ``method`` is ``"circulant"`` (``N`` a power of two) or ``"dense"``
    (Cholesky of the increment covariance, ``N <= dense_cap``); by default
    the circulant embedding is used whenever it applies.
    """
    values, flags = sample_fbm_paths(H, N, 1, seed, method, dense_cap)
    return FbmPath(float(H), np.arange(N + 1) / N, values[0], int(seed),
                   flags[-1], flags[:-1])


def sample_perturbed_graph(s, H: float, N: int, seed: int, depth: int | None = None,
                           method: Method | None = None, include_noise: bool = True):
    """Points ``(t_i, X_{t_i} + f(t_i))`` on ``t_i = i / N``.

    Returns ``(t, x, f)``; the graph values are ``x + f``.  With
    ``include_noise=False`` the fBm part is identically zero.
    """
    grid = sample_drift_grid(s, N, depth)
    if include_noise:
        x = sample_fbm(H, N, seed, method).values
    else:
        x = np.zeros_like(grid.f)
    return grid.t, x, grid.f


# --------------------------------------------------------------------------
# energy kernel


@dataclass(frozen=True)
class KernelQuery:
    """Arguments of ``I(t, u) = E[(|t^H Z + u|^2 + t^2)^(-gamma/2)]``.

    ``Z`` is standard Gaussian in ``R^d``; ``u`` is given by its norm.
    """

    t: float
    u: float
    gamma: float
    H: float
    d: int = 1
    M: float = 2.0

    def __post_init__(self):
        check_hurst(self.H)
        check_positive_int(self.d, "d")
        if not 0.0 < self.t <= math.exp(-1.0) + 1e-15:
            raise ValueError(f"t must lie in (0, 1/e], got {self.t}")
        if abs(self.u) > self.M:
            raise ValueError(f"|u| = {abs(self.u)} exceeds the offset bound M = {self.M}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")
        if not self.gamma < self.d + 2:
            raise ValueError(f"gamma must be < d + 2 = {self.d + 2}, got {self.gamma}")


class KernelValue(float):
    """A float carrying its numerical error estimate in ``.error``."""

    error: float
    method: str

    def __new__(cls, value, error, method):
        obj = super().__new__(cls, value)
        obj.error = float(error)
        obj.method = method
        return obj


def _kernel_quad(q: KernelQuery, tol: float) -> KernelValue:
    sigma = q.t**q.H
    u = abs(q.u)

    def integrand(z):
        return ((sigma * z + u) ** 2 + q.t**2) ** (-q.gamma / 2) * math.exp(-0.5 * z * z) \
            / math.sqrt(2 * math.pi)

    # the first factor peaks at z0 with width t^(1-H) in z units
    z0 = -u / sigma
    w = q.t / sigma
    zmax = 39.0
    pts = {-zmax, zmax, 0.0}
    for s in (0.0, 1.0, 10.0, 100.0, 1000.0):
        pts.update((z0 - s * w, z0 + s * w))
    pts = sorted(p for p in pts if -zmax <= p <= zmax)
    total, err = 0.0, 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 0:
            continue
        val, e = integrate.quad(integrand, a, b, epsabs=tol / len(pts), epsrel=1e-12,
                                limit=200)
        total += val
        err += e
    return KernelValue(total, err, "quadrature")


def _kernel_mc(q: KernelQuery, samples: int, seed: int, chunks: int) -> KernelValue:
    vals = []
    per = -(-samples // chunks)
    for c in range(chunks):
        Z = standard_normals(seed, (per, q.d), chunk=c)
        Z[:, 0] = Z[:, 0] * q.t**q.H + abs(q.u)
        if q.d > 1:
            Z[:, 1:] *= q.t**q.H
        vals.append((np.sum(Z * Z, axis=1) + q.t**2) ** (-q.gamma / 2))
    v = np.concatenate(vals)[:samples]
    return KernelValue(v.mean(), v.std(ddof=1) / math.sqrt(v.size), "monte-carlo")


def kernel_I(q: KernelQuery, method: str = "quadrature", samples: int = 10**6,
             seed: int = 0, tol: float = 1e-10, chunks: int = 1) -> KernelValue:
    """Numerical value of the kernel with an error estimate.

    ``quadrature`` (``d = 1`` only) integrates against the Gaussian density
    with absolute tolerance ``tol``; ``monte-carlo`` averages ``samples``
    draws and reports the standard error.  Monte Carlo chunks use derived
    sub-seeds ``(seed, chunk)``, so a fixed chunk count reproduces exactly.
    """
    if method == "quadrature":
        if q.d != 1:
            raise ValueError("quadrature is implemented for d = 1 only; use monte-carlo")
        return _kernel_quad(q, tol)
    if method in ("monte-carlo", "mc"):
        return _kernel_mc(q, samples, seed, chunks)
    raise ValueError(f"unknown method {method!r}")


def default_boundary_constant(gamma: float) -> float:
    """``C = sqrt(8 gamma)``: the Gaussian-tail factor ``t^(C^2/8)`` then beats ``t^-gamma``."""
    return math.sqrt(8.0 * gamma)


@dataclass
class KernelRegimeReport:
    H: float
    d: int
    gamma: float
    C: float
    t_grid: list
    u_grid: list
    max_ratio: dict
    cells: dict
    argmax: dict

    def as_dict(self) -> dict:
        return {
            "H": self.H, "d": self.d, "gamma": self.gamma, "C": self.C,
            "grid": {"t": self.t_grid, "u": self.u_grid,
                     "n_t": len(self.t_grid), "n_u": len(self.u_grid)},
            "max_ratio": self.max_ratio, "cells": self.cells, "argmax": self.argmax,
        }


def kernel_regime_check(H: float, d: int, gamma: float, t_grid: Sequence[float],
                        u_grid: Sequence[float], C: float | None = None,
                        tol: float = 1e-10) -> KernelRegimeReport:
    """Ratios of the kernel to its three regime bounds over a ``(t, u)`` grid.

    Regimes: ``far`` (``|u| > C t^H sqrt|log t|``, bound ``|u|^-gamma``);
    otherwise ``near-high`` (``d < gamma``, bound ``t^(d(1-H)-gamma)``) or
    ``near-low`` (``d > gamma``, bound ``t^(-gamma H)``).
    """
    H = check_hurst(H)
    if gamma == d:
        raise ValueError("gamma = d is the boundary case between the two near regimes")
    if C is None:
        C = default_boundary_constant(gamma)
    near = "near-high" if d < gamma else "near-low"
    max_ratio = {"far": None, near: None}
    cells = {"far": 0, near: 0}
    argmax = {"far": None, near: None}
    for t in t_grid:
        edge = C * t**H * math.sqrt(abs(math.log(t)))
        for u in u_grid:
            val = kernel_I(KernelQuery(t, u, gamma, H, d, M=max(2.0, abs(u))),
                           "quadrature" if d == 1 else "monte-carlo", tol=tol)
            if abs(u) > edge:
                regime, bound = "far", abs(u) ** (-gamma)
            elif d < gamma:
                regime, bound = near, t ** (d * (1 - H) - gamma)
            else:
                regime, bound = near, t ** (-gamma * H)
            ratio = float(float(val) / bound)
            cells[regime] += 1
            if max_ratio[regime] is None or ratio > max_ratio[regime]:
                max_ratio[regime] = ratio
                argmax[regime] = [float(t), float(u)]
    return KernelRegimeReport(H, d, gamma, C, list(map(float, t_grid)),
                              list(map(float, u_grid)), max_ratio, cells, argmax)
