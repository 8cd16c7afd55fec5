"""Gaussian sharp-time fields on a periodic line and their Wick monomials.

The field has covariance ``(1/2) (-Laplacian + 1)^{-1/2}``, realised with the
discrete Fourier transform on ``G`` points of a period ``P``.  Pairings are
``<f, xi> = h sum f xi`` and transforms are scaled so Parseval holds:
``fhat = sqrt(h / G) fft(f)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, PreconditionError
from .stats import loglog_slope, run_chunks

MAX_HERMITE = 30
CHUNK = 2048


@dataclass(frozen=True)
class SpectralGrid:
    period: float = 32.0
    points: int = 1024

    def __post_init__(self):
        g = self.points
        if self.period <= 0:
            raise PreconditionError(f"period must be positive, got {self.period}")
        if g < 2 or g & (g - 1):
            raise PreconditionError(f"mode count must be a power of two, got {g}")

    @property
    def h(self) -> float:
        return self.period / self.points

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.period + self.h * np.arange(self.points)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.h)

    @property
    def omega(self) -> np.ndarray:
        return np.sqrt(1.0 + self.k**2)

    def transform(self, f) -> np.ndarray:
        return math.sqrt(self.h / self.points) * np.fft.fft(np.asarray(f, dtype=float), axis=-1)

    def pair(self, f, xi):
        """``<f, xi>``; ``xi`` may carry leading sample axes."""
        return self.h * (np.asarray(xi) @ np.asarray(f, dtype=float))

    def norm(self, f) -> float:
        return math.sqrt(self.h * float(np.sum(np.asarray(f, dtype=float) ** 2)))

    def spectral_norm(self, f) -> float:
        return math.sqrt(float(np.sum(np.abs(self.transform(f)) ** 2)))

    def apply_multiplier(self, mult, f) -> np.ndarray:
        return np.fft.ifft(mult * np.fft.fft(f, axis=-1), axis=-1).real


def c_of_f(f, grid: SpectralGrid) -> float:
    """``sqrt( (1/2) sum |fhat_k|^2 / omega_k )``, the standard deviation of ``<f, xi>``."""
    fh = grid.transform(f)
    return math.sqrt(0.5 * float(np.sum(np.abs(fh) ** 2 / grid.omega)))


def ou_covariance(f, g, s: float, t: float, grid: SpectralGrid) -> float:
    """``Cov(<f, X_s>, <g, X_t>) = (1/2) sum fhat conj(ghat) exp(-|t-s| omega) / omega``."""
    w = grid.omega
    val = 0.5 * np.sum(grid.transform(f) * np.conj(grid.transform(g)) * np.exp(-abs(t - s) * w) / w)
    return float(val.real)


def hermite_monic(n: int, x):
    """Probabilists' Hermite polynomial with leading coefficient one."""
    if not 0 <= n <= MAX_HERMITE or int(n) != n:
        raise PreconditionError(f"degree must be an integer in 0..{MAX_HERMITE}, got {n}")
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), x.copy()
    if n == 0:
        return prev if prev.ndim else float(prev)
    for j in range(1, n):
        prev, cur = cur, x * cur - j * prev
    return cur if cur.ndim else float(cur)


def _white(seed: int, stream0: int, n: int, count: int) -> np.ndarray:
    return _kernels.normals(seed, stream0, n, count)


def sample_sharp_time(grid: SpectralGrid, seed: int, stream: int = 0) -> np.ndarray:
    """One field configuration; stream ``stream`` supplies its white noise."""
    return sample_fields(grid, 1, seed, stream)[0]


def sample_fields(grid: SpectralGrid, n: int, seed: int, stream0: int = 0) -> np.ndarray:
    """``n`` independent configurations, shape ``(n, G)``."""
    w = _white(seed, stream0, n, grid.points)
    return grid.apply_multiplier((2.0 * grid.omega) ** -0.5, w) / math.sqrt(grid.h)


def sample_pairings(fs, grid: SpectralGrid, n: int, seed: int, stream0: int = 0, threads: int = 1) -> np.ndarray:
    """``<f_j, xi_i>`` for ``n`` configurations, shape ``(n, len(fs))``.

    Equal to pairing the output of :func:`sample_fields` but moves the
    covariance filter onto the test functions, so no per-sample transform.
    """
    F = np.atleast_2d(np.asarray(fs, dtype=float))
    dual = grid.apply_multiplier((2.0 * grid.omega) ** -0.5, F) * math.sqrt(grid.h)

    # work units are fixed blocks of CHUNK samples so rounding does not depend on threads
    def blocks(a, b):
        out = []
        for blk in range(a, b):
            s, e = blk * CHUNK, min(n, (blk + 1) * CHUNK)
            out.append(_white(seed, stream0 + s, e - s, grid.points) @ dual.T)
        return out

    parts = [x for group in run_chunks(blocks, -(-n // CHUNK), threads) for x in group]
    return np.concatenate(parts) if parts else np.zeros((0, F.shape[0]))


def ou_sample_trajectory(grid: SpectralGrid, times, seed: int, stream: int = 0) -> list[np.ndarray]:
    """Stationary trajectory at increasing ``times`` by exact mode-wise transitions."""
    return [x[0] for x in ou_sample_trajectories(grid, times, 1, seed, stream)]


def ou_sample_trajectories(grid: SpectralGrid, times, n: int, seed: int, stream0: int = 0) -> list[np.ndarray]:
    """``n`` trajectories; returns one ``(n, G)`` array per time."""
    times = [float(s) for s in times]
    if any(b < a for a, b in zip(times, times[1:])):
        raise PreconditionError(f"times must be increasing, got {times}")
    G = grid.points
    w = _white(seed, stream0, n, G * max(len(times), 1)).reshape(n, max(len(times), 1), G)
    om = grid.omega
    scale = 1.0 / math.sqrt(grid.h)
    x = grid.apply_multiplier((2.0 * om) ** -0.5, w[:, 0]) * scale
    out = [x]
    for j in range(1, len(times)):
        rho = np.exp(-(times[j] - times[j - 1]) * om)
        x = grid.apply_multiplier(rho, x) + grid.apply_multiplier(
            np.sqrt((1.0 - rho**2) / (2.0 * om)), w[:, j]) * scale
        out.append(x)
    return out


def wick_from_pairing(pairing, c: float, n: int):
    """``c^n H_n(pairing / c)``."""
    if c <= 0:
        raise DomainError("Wick monomial needs c(f) > 0")
    return c**n * hermite_monic(n, np.asarray(pairing, dtype=float) / c)


def wick_eval(f, xi, n: int, grid: SpectralGrid):
    return wick_from_pairing(grid.pair(f, xi), c_of_f(f, grid), n)


def default_test_function(grid: SpectralGrid) -> np.ndarray:
    return np.exp(-grid.x**2)


def wick_moments(grid: SpectralGrid, n_samples: int, seed: int, n_max: int = 4, f=None, threads: int = 1):
    """Rows ``(m, n, empirical, exact, stderr, z_score)`` of ``E[Xi^m Xi^n]`` for ``m, n <= n_max``."""
    f = default_test_function(grid) if f is None else np.asarray(f, dtype=float)
    c = c_of_f(f, grid)
    p = sample_pairings([f], grid, n_samples, seed, threads=threads)[:, 0]
    xs = [wick_from_pairing(p, c, k) for k in range(n_max + 1)]
    rows = []
    for m in range(n_max + 1):
        for n in range(m, n_max + 1):
            prod = xs[m] * xs[n]
            emp = float(prod.mean())
            exact = float(math.factorial(n) * c ** (2 * n)) if m == n else 0.0
            err = float(prod.std(ddof=1) / math.sqrt(n_samples))
            rows.append((m, n, emp, exact, err, (emp - exact) / err if err > 0 else 0.0))
    return rows, c


def unit_box(grid: SpectralGrid, width: float, center: float = 0.0) -> np.ndarray:
    """Unit-mass box ``1/width`` on ``[center - width/2, center + width/2)`` with exact cell overlaps."""
    lo, hi = center - 0.5 * width, center + 0.5 * width
    h = grid.h
    left = grid.x - 0.5 * h
    overlap = np.clip(np.minimum(left + h, hi) - np.maximum(left, lo), 0.0, None)
    return overlap / (h * width)


def delta_divergence_scan(widths, grid: SpectralGrid, center: float = 0.0):
    """Variance of ``<f_w, xi>`` for unit-mass boxes; returns ``(rows, slope)``."""
    widths = [float(w) for w in widths]
    if any(b >= a for a, b in zip(widths, widths[1:])):
        raise PreconditionError(f"widths must be decreasing, got {widths}")
    for w in widths:
        if w < 4.0 * grid.h:
            raise PreconditionError(f"width {w} spans fewer than 4 mesh cells (h = {grid.h})")
        if w >= grid.period / 2:
            raise PreconditionError(f"width {w} is not small against the period {grid.period}")
    rows = [(w, c_of_f(unit_box(grid, w, center), grid) ** 2) for w in widths]
    slope = loglog_slope([r[0] for r in rows], [r[1] for r in rows]) if len(rows) > 1 else float("nan")
    return rows, slope
