"""Pure-Python/numpy implementations of the hot kernels.

Signatures and stream consumption match :mod:`feynlab._core` exactly.  The
eigensolver uses the round-robin (parallel) ordering of cyclic Jacobi so each
round of disjoint rotations is a handful of vectorised array operations; the
samplers advance all paths in lockstep.
"""
from __future__ import annotations

import numpy as np

from .rng import stream_keys_np, uniforms_np

BACKEND = "python"


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _rotation(app, aqq, apq):
    r = np.abs(apq)
    active = (r > 1e-18 * (np.abs(app) + np.abs(aqq))) & (r >= 1e-290)
    safe_r = np.where(active, r, 1.0)
    phase = np.where(active, np.conj(apq) / safe_r, 1.0)  # e^{-i phi}
    phase = phase / np.abs(phase)
    tau = (aqq - app) / (2.0 * safe_r)
    sgn = np.where(tau >= 0.0, 1.0, -1.0)
    t = sgn / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    return c, s, phase, active


def jacobi_eigh(a, tol=-1.0, max_sweeps=60):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Real symmetric input is diagonalised in real arithmetic.  Returns
    ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues unsorted and
    eigenvectors as columns.
    """
    a = np.asarray(a)
    real = not np.iscomplexobj(a) or not np.any(a.imag)
    dtype = np.float64 if real else np.complex128
    A = np.array(a.real if real else a, dtype=dtype, copy=True)
    n = A.shape[0]
    V = np.eye(n, dtype=dtype)
    if tol < 0.0:
        tol = 4.0 * max(n, 1) * np.finfo(float).eps
    if n < 2:
        return A.diagonal().real.copy(), V, 0
    rounds = _round_robin(n)
    scale = np.linalg.norm(A)
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps):
        if np.sqrt(2.0) * np.linalg.norm(A[iu]) <= tol * scale:
            return A.diagonal().real.copy(), V, sweep
        rotated = 0
        for P, Q in rounds:
            app, aqq, apq = A[P, P].real, A[Q, Q].real, A[P, Q]
            c, s, ph, act = _rotation(app, aqq, apq)
            if real:
                ph = ph.real
            rotated += int(act.sum())
            gpp, gpq, gqp, gqq = c, s, -s * ph, c * ph
            Ap, Aq = A[:, P], A[:, Q]
            A[:, P] = Ap * gpp + Aq * gqp
            A[:, Q] = Ap * gpq + Aq * gqq
            Ap, Aq = A[P, :], A[Q, :]
            A[P, :] = np.conj(gpp)[:, None] * Ap + np.conj(gqp)[:, None] * Aq
            A[Q, :] = np.conj(gpq)[:, None] * Ap + np.conj(gqq)[:, None] * Aq
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            Vp, Vq = V[:, P], V[:, Q]
            V[:, P] = Vp * gpp + Vq * gqp
            V[:, Q] = Vp * gpq + Vq * gqq
        if rotated == 0:
            return A.diagonal().real.copy(), V, sweep + 1
    return A.diagonal().real.copy(), V, max_sweeps


def normals(seed, stream0, n_streams, count):
    """Standard normals, shape ``(n_streams, count)``; stream ``stream0 + i`` fills row ``i``."""
    pairs = (count + 1) // 2
    keys = stream_keys_np(seed, np.arange(stream0, stream0 + n_streams, dtype=np.uint64))
    ctr = np.arange(2 * pairs, dtype=np.uint64)
    u = uniforms_np(keys[:, None], ctr[None, :])
    u1, u2 = u[:, 0::2], u[:, 1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty((n_streams, 2 * pairs))
    out[:, 0::2] = r * np.cos(theta)
    out[:, 1::2] = r * np.sin(theta)
    return out[:, :count]


def markov_paths(cum, exit_rate, x0, t, seed, stream0, n_paths, query_times):
    """Sample jump paths of a (sub-)Markov chain and report states at ``query_times``.

    ``cum[j]`` is the cumulative jump distribution out of state ``j`` over targets
    ``0..n-1`` followed by the cemetery ``n``.  Returns ``(states, jumps, zeta)``;
    a killed path reports state ``-1`` from its killing time on and ``zeta`` is
    ``inf`` for paths alive at the horizon.
    """
    cum = np.asarray(cum, dtype=np.float64)
    exit_rate = np.asarray(exit_rate, dtype=np.float64)
    query_times = np.asarray(query_times, dtype=np.float64)
    n = cum.shape[0]
    nq = query_times.shape[0]
    keys = stream_keys_np(seed, np.arange(stream0, stream0 + n_paths, dtype=np.uint64))
    state = np.full(n_paths, x0, dtype=np.int64)
    time = np.zeros(n_paths)
    ctr = np.zeros(n_paths, dtype=np.uint64)
    jumps = np.zeros(n_paths, dtype=np.int64)
    zeta = np.full(n_paths, np.inf)
    states = np.full((n_paths, nq), -2, dtype=np.int64)
    qi = np.zeros(n_paths, dtype=np.int64)
    active = np.ones(n_paths, dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        st = state[idx]
        rate = exit_rate[st]
        u = uniforms_np(keys[idx], 2 * ctr[idx])
        with np.errstate(divide="ignore"):
            hold = np.where(rate > 0.0, -np.log(u) / np.where(rate > 0.0, rate, 1.0), np.inf)
        nxt = time[idx] + hold
        for _ in range(nq):
            q = qi[idx]
            hit = q < nq
            hit[hit] = query_times[q[hit]] < nxt[hit]
            if not hit.any():
                break
            states[idx[hit], q[hit]] = st[hit]
            qi[idx[hit]] += 1
        done = nxt > t
        active[idx[done]] = False
        go = ~done
        if not go.any():
            break
        idx, st, nxt = idx[go], st[go], nxt[go]
        u2 = uniforms_np(keys[idx], 2 * ctr[idx] + np.uint64(1))
        target = (cum[st] < u2[:, None]).sum(axis=1)
        jumps[idx] += 1
        killed = target == n
        zeta[idx[killed]] = nxt[killed]
        active[idx[killed]] = False
        alive = ~killed
        state[idx[alive]] = target[alive]
        time[idx[alive]] = nxt[alive]
        ctr[idx[alive]] += np.uint64(1)
    unset = states == -2
    if unset.any():
        fill = np.where(np.isfinite(zeta), -1, state)
        states = np.where(unset, fill[:, None], states)
    return states, jumps, zeta


def telegraph(a, t, seed, stream0, n, sign_times):
    """Sample ``tau_t = int_0^t (-1)^{N_s} ds`` for a Poisson clock of intensity ``a``.

    Returns ``(tau, signs, counts)`` where ``signs[i, j] = (-1)^{N_{s_j}}``.
    """
    sign_times = np.asarray(sign_times, dtype=np.float64)
    ns = sign_times.shape[0]
    tau = np.zeros(n)
    counts = np.zeros(n, dtype=np.int64)
    signs = np.ones((n, ns), dtype=np.int8)
    if a <= 0.0:
        tau[:] = t
        return tau, signs, counts
    keys = stream_keys_np(seed, np.arange(stream0, stream0 + n, dtype=np.uint64))
    pos = np.zeros(n)
    sgn = np.ones(n)
    ctr = np.zeros(n, dtype=np.uint64)
    active = np.ones(n, dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        gap = -np.log(uniforms_np(keys[idx], ctr[idx])) / a
        nxt = pos[idx] + gap
        end = nxt >= t
        e = idx[end]
        tau[e] += sgn[e] * (t - pos[e])
        active[e] = False
        m = idx[~end]
        nm = nxt[~end]
        tau[m] += sgn[m] * (nm - pos[m])
        flip = sign_times[None, :] >= nm[:, None]
        signs[m] = np.where(flip, -signs[m], signs[m])
        sgn[m] = -sgn[m]
        pos[m] = nm
        counts[m] += 1
        ctr[m] += np.uint64(1)
    return tau, signs, counts
