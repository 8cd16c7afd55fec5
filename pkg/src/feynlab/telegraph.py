"""Poisson-switching representation of the damped wave equation.

For a Poisson clock ``N`` of intensity ``a``, ``tau_t = int_0^t (-1)^{N_s} ds``
and ``E f_wave(x, tau_t)`` solves ``u_tt + 2a u_t = v^2 u_xx`` with ``u(0) = f``
and zero initial velocity, where ``f_wave`` is the undamped d'Alembert solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import PreconditionError
from .rng import CounterStream
from .stats import run_chunks
from .timeslice import Grid1D

CFL_MAX = 0.9


@dataclass(frozen=True)
class KacParams:
    a: float = 1.0
    v: float = 1.0
    t: float = 1.0

    def __post_init__(self):
        if self.a < 0 or self.v <= 0 or self.t <= 0:
            raise PreconditionError(f"need a >= 0, v > 0, t > 0; got {self.a}, {self.v}, {self.t}")


def switch_times(params: KacParams, seed: int, stream: int = 0) -> list[float]:
    """Poisson event times in ``[0, t)`` for one stream."""
    if params.a == 0:
        return []
    rng = CounterStream(seed, stream)
    out, now = [], 0.0
    while True:
        now += rng.exponential(params.a)
        if now >= params.t:
            return out
        out.append(now)


def tau_from_events(events, t: float) -> float:
    """Integral of the +-1 slope that flips at each event."""
    tau, prev, sign = 0.0, 0.0, 1.0
    for s in events:
        tau += sign * (s - prev)
        prev, sign = s, -sign
    return tau + sign * (t - prev)


def sample_tau(params: KacParams, seed: int, stream: int = 0) -> float:
    return tau_from_events(switch_times(params, seed, stream), params.t)


def sample_taus(params: KacParams, n: int, seed: int, sign_times=(), threads: int = 1):
    """``n`` independent draws; returns ``(tau, signs, counts)``.

    ``signs[i, j]`` is ``(-1)^{N(sign_times[j])}`` on path ``i``.
    """
    st = np.asarray(sign_times, dtype=float)

    def chunk(a, b):
        return _kernels.telegraph(float(params.a), float(params.t), seed, a, b - a, st)

    parts = run_chunks(chunk, n, threads)
    return (np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]),
            np.concatenate([p[2] for p in parts]))


def dalembert(f, x, s, v: float):
    """Undamped wave solution with zero initial velocity."""
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    return 0.5 * (f(x + v * s) + f(x - v * s))


def kac_expectation(f, x, params: KacParams, n_paths: int, seed: int, threads: int = 1):
    """Monte-Carlo mean and standard error of ``dalembert(f, x, tau_t, v)``.

    ``x`` may be an array; all points share the same paths.
    """
    if n_paths < 100:
        raise PreconditionError(f"need at least 100 paths, got {n_paths}")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if params.a == 0:
        # no switching: tau_t = t on every path
        mean = dalembert(f, xs, params.t, params.v).astype(float)
        err = np.zeros_like(mean)
        return (float(mean[0]), 0.0) if np.ndim(x) == 0 else (mean, err)
    tau, _, _ = sample_taus(params, n_paths, seed, threads=threads)
    vals = dalembert(f, xs[None, :], tau[:, None], params.v)
    mean = vals.mean(axis=0)
    err = vals.std(axis=0, ddof=1) / math.sqrt(n_paths)
    if np.ndim(x) == 0:
        return float(mean[0]), float(err[0])
    return mean, err


def default_grid() -> Grid1D:
    return Grid1D(-8.0, 8.0, 1024)


def damped_wave_fd(f, params: KacParams, grid: Grid1D | None = None, steps: int | None = None) -> np.ndarray:
    """Centred leapfrog solution at time ``t`` on a periodic grid.

    ``steps`` defaults to the smallest count with Courant number <= 0.5.
    """
    grid = grid or default_grid()
    h = grid.h
    if steps is None:
        steps = max(2, math.ceil(params.v * params.t / (0.5 * h)))
    dt = params.t / steps
    ratio = params.v * dt / h
    if ratio > CFL_MAX:
        raise PreconditionError(f"CFL ratio {ratio:.4f} exceeds {CFL_MAX}")
    c2 = (params.v * dt / h) ** 2
    ad = params.a * dt

    def lap(u):
        return np.roll(u, 1) - 2.0 * u + np.roll(u, -1)

    u0 = np.asarray(f(grid.x), dtype=float)
    u1 = u0 + 0.5 * c2 * lap(u0)
    for _ in range(steps - 1):
        u0, u1 = u1, (2.0 * u1 - (1.0 - ad) * u0 + c2 * lap(u1)) / (1.0 + ad)
    return u1


def gaussian_bump(x):
    return np.exp(-np.asarray(x, dtype=float) ** 2)


def telegraph_table(params: KacParams, n_paths: int, seed: int, checkpoints=None, f=gaussian_bump,
                    grid: Grid1D | None = None, threads: int = 1):
    """Rows ``(x, mc_mean, mc_stderr, fd_value, abs_diff)``."""
    grid = grid or default_grid()
    xs = np.linspace(-2.0, 2.0, 9) if checkpoints is None else np.asarray(checkpoints, dtype=float)
    mean, err = kac_expectation(f, xs, params, n_paths, seed, threads)
    fd = np.interp(xs, grid.x, damped_wave_fd(f, params, grid))
    return [(float(x), float(m), float(e), float(d), float(abs(m - d)))
            for x, m, e, d in zip(xs, mean, err, fd)]
