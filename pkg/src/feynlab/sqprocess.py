"""Finite-state evolution processes: semigroup plus coordinate projections.

States are ``0..n-1``.  Generators act on column vectors, so for a Markov
generator ``H`` the matrix ``-H`` has nonnegative off-diagonal rates
``j -> i`` in entry ``(i, j)`` and columns summing to zero (or to a negative
killing rate for sub-Markov chains).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import PreconditionError, StructureError
from .linops import eig_hermitian, expm_general, expm_spectral, hermitian_defect
from .rng import CounterStream
from .stats import binomial_stderr, run_chunks

QUANTUM = "quantum"
DISSIPATIVE = "dissipative"
DEFICIENCY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EvolutionSpec:
    generator: np.ndarray
    mode: str = QUANTUM

    def __post_init__(self):
        A = np.asarray(self.generator)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise PreconditionError(f"generator must be a nonempty square matrix, got {A.shape}")
        if self.mode not in (QUANTUM, DISSIPATIVE):
            raise PreconditionError(f"unknown mode {self.mode!r}")
        if self.mode == QUANTUM and hermitian_defect(A) > 1e-12:
            raise PreconditionError(
                f"quantum mode needs a Hermitian generator (asymmetry {hermitian_defect(A):.3e})"
            )
        object.__setattr__(self, "generator", A)

    @property
    def n(self) -> int:
        return self.generator.shape[0]

    @cached_property
    def _hermitian(self) -> bool:
        return hermitian_defect(self.generator) <= 1e-12

    @cached_property
    def _decomposition(self):
        return eig_hermitian(self.generator)

    def semigroup(self, t: float) -> np.ndarray:
        """``exp(-i t H)`` in quantum mode, ``exp(-t H)`` in dissipative mode."""
        if t < 0:
            raise PreconditionError(f"time must be nonnegative, got {t}")
        if t == 0:
            return np.eye(self.n, dtype=np.complex128 if self.mode == QUANTUM else self.generator.dtype)
        if self.mode == QUANTUM:
            return expm_spectral(self._decomposition, -1j * t)
        if self._hermitian:
            out = expm_spectral(self._decomposition, -t)
            return out.real if not np.iscomplexobj(self.generator) else out
        return expm_general(-self.generator, t)


def spectral_Q(B, n: int) -> np.ndarray:
    """Diagonal projection onto the states in ``B`` (``None`` means all states)."""
    if B is None:
        return np.eye(n)
    idx = np.array(sorted(set(int(b) for b in B)), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise PreconditionError(f"state index out of range 0..{n - 1}: {sorted(idx.tolist())}")
    q = np.zeros(n)
    q[idx] = 1.0
    return np.diag(q)


@dataclass(frozen=True)
class CylinderEvent:
    """``X(times[j]) in subsets[j]`` for each ``j``; a subset of ``None`` is unrestricted."""

    times: tuple = ()
    subsets: tuple = ()

    def __post_init__(self):
        times = tuple(float(s) for s in self.times)
        if len(times) != len(self.subsets):
            raise PreconditionError(f"{len(self.subsets)} subsets for {len(times)} times")
        if any(b < a for a, b in zip(times, times[1:])):
            raise PreconditionError(f"event times must be increasing, got {times}")
        if times and times[0] < 0:
            raise PreconditionError("event times must be nonnegative")
        subs = tuple(None if s is None else frozenset(int(v) for v in s) for s in self.subsets)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "subsets", subs)

    def check_horizon(self, t: float):
        if self.times and self.times[-1] > t:
            raise PreconditionError(f"event time {self.times[-1]} exceeds horizon {t}")

    def contains(self, states_at_times: np.ndarray, n: int) -> np.ndarray:
        """Membership for rows of states observed at ``times`` (``-1`` means killed)."""
        s = np.asarray(states_at_times)
        ok = np.ones(s.shape[0], dtype=bool)
        for j, B in enumerate(self.subsets):
            if B is None:
                ok &= s[:, j] >= 0
            else:
                ok &= np.isin(s[:, j], np.fromiter(B, dtype=np.int64, count=len(B)))
        return ok


def sq_measure(E: CylinderEvent, spec: EvolutionSpec, t: float) -> np.ndarray:
    """``S(t - t_k) Q(B_k) ... Q(B_1) S(t_1)``."""
    E.check_horizon(t)
    n = spec.n
    M = spec.semigroup(E.times[0] if E.times else t)
    prev = E.times[0] if E.times else t
    for j, (s, B) in enumerate(zip(E.times, E.subsets)):
        if j:
            M = spec.semigroup(s - prev) @ M
            prev = s
        if B is not None:
            M = spectral_Q(B, n) @ M
    if E.times:
        M = spec.semigroup(t - prev) @ M
    return M


def kneser_bipartite(n: int, k: int):
    """Bipartite graph between k-subsets and (n-k)-subsets ordered by inclusion.

    Returns ``(adjacency, labels)``; labels are sorted tuples of ``1..n``, k-subsets first.
    """
    if not (1 <= k and 2 * k < n):
        raise PreconditionError(f"need 1 <= k < n/2, got n={n}, k={k}")
    small = list(itertools.combinations(range(1, n + 1), k))
    large = list(itertools.combinations(range(1, n + 1), n - k))
    labels = small + large
    A = np.zeros((len(labels), len(labels)))
    off = len(small)
    for i, a in enumerate(small):
        sa = set(a)
        for j, b in enumerate(large):
            if sa.issubset(b):
                A[i, off + j] = A[off + j, i] = 1.0
    return A, labels


def graph_hamiltonian(adjacency, degree: int) -> np.ndarray:
    """``degree * I - A`` for a regular graph."""
    A = np.asarray(adjacency, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError(f"adjacency must be square, got {A.shape}")
    if not np.array_equal(A, A.T):
        raise StructureError("adjacency matrix is not symmetric")
    deg = A.sum(axis=1)
    bad = np.flatnonzero(deg != degree)
    if bad.size:
        v = int(bad[0])
        raise StructureError(f"graph is not {degree}-regular: vertex {v} has degree {deg[v]:g}")
    return degree * np.eye(A.shape[0]) - A


def load_edge_list(path) -> np.ndarray:
    """Adjacency matrix from a text file of 0-indexed ``u v`` pairs."""
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                u, v = (int(p) for p in parts)
            except ValueError:
                raise PreconditionError(f"{path}:{lineno}: expected 'u v', got {line!r}") from None
            if u < 0 or v < 0 or u == v:
                raise PreconditionError(f"{path}:{lineno}: invalid edge ({u}, {v})")
            edges.append((u, v))
    if not edges:
        raise PreconditionError(f"{path}: no edges")
    n = 1 + max(max(e) for e in edges)
    A = np.zeros((n, n))
    for u, v in edges:
        A[u, v] = A[v, u] = 1.0
    return A


def wick_rotate(spec: EvolutionSpec) -> EvolutionSpec:
    """Replace ``exp(-i t H)`` by ``exp(-t H)`` with the same generator."""
    if spec.mode != QUANTUM:
        raise PreconditionError("wick rotation expects a quantum-mode evolution")
    return EvolutionSpec(spec.generator, DISSIPATIVE)


@dataclass(frozen=True)
class JumpStructure:
    """Per-state exit rates and cumulative jump tables (last column is the cemetery)."""

    exit_rate: np.ndarray
    cumulative: np.ndarray
    killing_rate: np.ndarray

    @property
    def sub_markov(self) -> bool:
        return bool(np.any(self.killing_rate > 0))


def jump_structure(spec: EvolutionSpec) -> JumpStructure:
    if spec.mode != DISSIPATIVE:
        raise PreconditionError("path sampling needs a dissipative-mode evolution")
    H = spec.generator
    if np.iscomplexobj(H):
        if np.abs(H.imag).max() > 1e-12 * max(1.0, np.abs(H).max()):
            raise StructureError("Markov generator must be real")
        H = H.real
    H = np.asarray(H, dtype=float)
    n = H.shape[0]
    rates = -H.copy()
    np.fill_diagonal(rates, 0.0)
    scale = max(1.0, float(np.abs(H).max()))
    neg = np.argwhere(rates < -DEFICIENCY_TOL * scale)
    if neg.size:
        i, j = neg[0]
        raise StructureError(f"negative jump rate {rates[i, j]:.3e} from state {j} to state {i}")
    rates = np.clip(rates, 0.0, None)
    exit_rate = np.diag(H).copy()
    killing = exit_rate - rates.sum(axis=0)
    bad = np.flatnonzero(killing < -DEFICIENCY_TOL * scale)
    if bad.size:
        j = int(bad[0])
        raise StructureError(f"column {j} of the rate matrix sums to {-killing[j]:.3e} > 0")
    killing = np.where(np.abs(killing) <= DEFICIENCY_TOL * scale, 0.0, killing)
    probs = np.zeros((n, n + 1))
    live = exit_rate > 0
    probs[live, :n] = rates.T[live] / exit_rate[live, None]
    probs[live, n] = killing[live] / exit_rate[live]
    cum = np.cumsum(probs, axis=1)
    cum[:, n] = 1.0
    return JumpStructure(np.where(live, exit_rate, 0.0), np.ascontiguousarray(cum), killing)


@dataclass(frozen=True)
class JumpPath:
    """Right-continuous path: ``states[i]`` holds on ``[jump_times[i], jump_times[i+1])``."""

    jump_times: tuple
    states: tuple
    killing_time: float = math.inf

    def state_at(self, s: float) -> int:
        """State at time ``s``; ``-1`` once the path has been killed."""
        if s >= self.killing_time:
            return -1
        i = int(np.searchsorted(self.jump_times, s, side="right")) - 1
        return self.states[max(i, 0)]

    @property
    def jumps(self) -> int:
        return len(self.states) - 1 + (1 if math.isfinite(self.killing_time) else 0)


def sample_jump_path(spec: EvolutionSpec, x0: int, t: float, seed: int, stream: int = 0) -> JumpPath:
    """One path on ``[0, t]``; consumes the same stream as path ``stream`` of :func:`sample_states`."""
    js = jump_structure(spec)
    n = spec.n
    if not 0 <= x0 < n:
        raise PreconditionError(f"start state {x0} out of range")
    rng = CounterStream(seed, stream)
    times, states = [0.0], [int(x0)]
    now, state, c = 0.0, int(x0), 0
    while True:
        rng.counter = 2 * c
        nxt = now + rng.exponential(float(js.exit_rate[state]))
        if nxt > t:
            return JumpPath(tuple(times), tuple(states))
        rng.counter = 2 * c + 1
        target = int(np.searchsorted(js.cumulative[state], rng.uniform(), side="left"))
        if target == n:
            return JumpPath(tuple(times), tuple(states), nxt)
        now, state, c = nxt, target, c + 1
        times.append(now)
        states.append(state)


def sample_states(spec: EvolutionSpec, x0: int, t: float, query_times, n_paths: int, seed: int,
                  stream0: int = 0, threads: int = 1):
    """States of ``n_paths`` independent paths at ``query_times``.

    Returns ``(states, jumps, killing_times)``; killed paths report ``-1``.
    """
    js = jump_structure(spec)
    if not 0 <= x0 < spec.n:
        raise PreconditionError(f"start state {x0} out of range")
    q = np.asarray(query_times, dtype=float)
    if np.any(np.diff(q) < 0) or (q.size and (q[0] < 0 or q[-1] > t)):
        raise PreconditionError("query times must be increasing within [0, t]")

    def chunk(a, b):
        return _kernels.markov_paths(js.cumulative, js.exit_rate, int(x0), float(t), seed,
                                     stream0 + a, b - a, q)

    parts = run_chunks(chunk, n_paths, threads)
    states = np.concatenate([p[0] for p in parts])
    jumps = np.concatenate([p[1] for p in parts])
    zeta = np.concatenate([p[2] for p in parts])
    return states, jumps, zeta


@dataclass(frozen=True)
class Comparison:
    empirical: np.ndarray
    exact: np.ndarray
    stderr: np.ndarray
    n_paths: int = field(default=0)

    @property
    def tv_distance(self) -> float:
        return 0.5 * float(np.abs(self.empirical - self.exact).sum())

    @property
    def z_scores(self) -> np.ndarray:
        diff = self.empirical - self.exact
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(self.stderr > 0, diff / np.where(self.stderr > 0, self.stderr, 1.0), 0.0)
        return np.where((self.stderr == 0) & (diff != 0), np.inf, z)


def empirical_vs_exact(spec: EvolutionSpec, E: CylinderEvent, x0: int, t: float, n_paths: int,
                       seed: int, threads: int = 1) -> Comparison:
    """Empirical ``P(E, X_t = j)`` over sampled paths vs ``(M^t(E) e_x0)_j``.

    Standard errors are binomial, evaluated at the exact probabilities.
    """
    if n_paths < 100:
        raise PreconditionError(f"need at least 100 paths, got {n_paths}")
    E.check_horizon(t)
    exact = np.real(sq_measure(E, spec, t)[:, x0])
    states, _, _ = sample_states(spec, x0, t, [*E.times, t], n_paths, seed, threads=threads)
    inside = E.contains(states[:, :-1], spec.n)
    final = states[inside, -1]
    counts = np.bincount(final[final >= 0], minlength=spec.n)[: spec.n]
    emp = counts / n_paths
    return Comparison(emp, exact, binomial_stderr(np.clip(exact, 0.0, 1.0), n_paths), n_paths)


def desargues_spec() -> EvolutionSpec:
    A, _ = kneser_bipartite(5, 2)
    return EvolutionSpec(graph_hamiltonian(A, 3), QUANTUM)


def consistency_checks(spec: EvolutionSpec, t: float) -> dict:
    """Max-entry deviations of the product identities on a fixed family of events.

    ``omega``: unrestricted constraints reproduce ``S(t)``; ``insertion``: adding
    an unrestricted time changes nothing; ``additivity``: splitting a subset
    into two disjoint parts splits the product.
    """
    n = spec.n
    lo = frozenset(range(0, n, 2))
    hi = frozenset(range(n // 2, n))
    a = frozenset(s for s in lo if s < n // 2)
    b = lo - a
    times = (0.3 * t, 0.7 * t)
    S = spec.semigroup(t)
    full = sq_measure(CylinderEvent((t / 3, 2 * t / 3), (None, None)), spec, t)
    base = sq_measure(CylinderEvent(times, (lo, hi)), spec, t)
    inserted = sq_measure(CylinderEvent((0.3 * t, 0.5 * t, 0.7 * t), (lo, None, hi)), spec, t)
    split = (sq_measure(CylinderEvent(times, (a, hi)), spec, t)
             + sq_measure(CylinderEvent(times, (b, hi)), spec, t))
    return {
        "omega": float(np.abs(sq_measure(CylinderEvent(), spec, t) - S).max()),
        "omega_three_factors": float(np.abs(full - S).max()),
        "insertion": float(np.abs(inserted - base).max()),
        "additivity": float(np.abs(split - base).max()),
    }
