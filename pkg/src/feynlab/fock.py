"""Truncated Bargmann-Fock coefficient spaces on one or two modes.

A state is the coefficient vector of a polynomial in the monomial basis
``z^m`` with total degree ``<= cutoff``.  Annihilation is ``d/dz_j`` and
creation is multiplication by ``z_j`` (dropped beyond the cutoff).  For
probabilistic states ``psi_m`` is the probability of the population ``m``.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import PreconditionError, TruncationError
from .linops import expm_general

MAX_NORM_CUTOFF = 150
BOUNDARY_WARN = 1e-6
TAIL_MAX = 1e-12


@dataclass(frozen=True)
class TruncatedFock:
    modes: int
    cutoff: int

    def __post_init__(self):
        if self.modes not in (1, 2):
            raise PreconditionError(f"modes must be 1 or 2, got {self.modes}")
        if self.cutoff < 1:
            raise PreconditionError(f"cutoff must be >= 1, got {self.cutoff}")

    @cached_property
    def indices(self) -> list[tuple[int, ...]]:
        """Multi-indices ordered by total degree, then lexicographically descending."""
        out = []
        for deg in range(self.cutoff + 1):
            for m in itertools.product(range(deg, -1, -1), repeat=self.modes):
                if sum(m) == deg:
                    out.append(m)
        return out

    @cached_property
    def position(self) -> dict:
        return {m: i for i, m in enumerate(self.indices)}

    @property
    def dim(self) -> int:
        return len(self.indices)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([sum(m) for m in self.indices])

    def basis(self, m) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.position[tuple(m)]] = 1.0
        return v


def ladder_matrices(space: TruncatedFock, mode: int):
    """``(annihilation, creation)`` matrices for coordinate ``mode``."""
    if not 0 <= mode < space.modes:
        raise PreconditionError(f"mode {mode} out of range for {space.modes} modes")
    n = space.dim
    A = np.zeros((n, n))
    C = np.zeros((n, n))
    pos = space.position
    for i, m in enumerate(space.indices):
        if m[mode] > 0:
            lower = list(m)
            lower[mode] -= 1
            A[pos[tuple(lower)], i] = m[mode]
        upper = list(m)
        upper[mode] += 1
        j = pos.get(tuple(upper))
        if j is not None:
            C[j, i] = 1.0
    return A, C


def monomial_norms(space: TruncatedFock) -> np.ndarray:
    """Hilbert norm ``sqrt(m_1! ... m_k!)`` of each basis monomial."""
    if space.cutoff > MAX_NORM_CUTOFF:
        raise PreconditionError(f"factorials overflow beyond cutoff {MAX_NORM_CUTOFF}")
    return np.array([math.sqrt(math.prod(math.factorial(k) for k in m)) for m in space.indices])


@dataclass(frozen=True)
class FockCoefficients:
    space: TruncatedFock
    values: np.ndarray
    boundary_mass: float = 0.0

    @property
    def total(self) -> float:
        return float(np.real(self.values).sum())

    def as_dict(self) -> dict:
        return {m: complex(v) if np.iscomplexobj(self.values) else float(v)
                for m, v in zip(self.space.indices, self.values)}

    def marginal(self, mode: int) -> np.ndarray:
        out = np.zeros(self.space.cutoff + 1)
        for m, v in zip(self.space.indices, np.real(self.values)):
            out[m[mode]] += v
        return out


def poisson_tail(t: float, cutoff: int) -> float:
    """``exp(-t) sum_{k > cutoff} t^k / k!``."""
    if t == 0:
        return 0.0
    total = 0.0
    k = cutoff + 1
    while True:
        term = math.exp(-t + k * math.log(t) - math.lgamma(k + 1))
        total += term
        if k > t and term <= 1e-30 * total:
            return total
        k += 1


def poisson_pmf(t: float, cutoff: int) -> np.ndarray:
    k = np.arange(cutoff + 1)
    if t == 0:
        return (k == 0).astype(float)
    from math import lgamma

    return np.exp(-t + k * math.log(t) - np.array([lgamma(j + 1) for j in k]))


def amoeba_generator(space: TruncatedFock) -> np.ndarray:
    """Multiplication by ``z - 1``: creation minus identity."""
    if space.modes != 1:
        raise PreconditionError("the division model lives on one mode")
    _, C = ladder_matrices(space, 0)
    return C - np.eye(space.dim)


def amoeba_evolution(t: float, space: TruncatedFock) -> FockCoefficients:
    """Evolve the single-amoeba state ``1`` for time ``t``."""
    if t < 0:
        raise PreconditionError(f"time must be nonnegative, got {t}")
    tail = poisson_tail(t, space.cutoff)
    if tail > TAIL_MAX:
        raise TruncationError(f"tail mass {tail:.3e} beyond cutoff {space.cutoff}; increase the cutoff")
    psi = expm_general(amoeba_generator(space), t) @ space.basis((0,))
    return FockCoefficients(space, psi, float(abs(psi[-1])))


@dataclass(frozen=True)
class RateTriple:
    birth: float = 0.0  # prey reproduction
    predation: float = 0.0
    death: float = 0.0  # predator death

    def __post_init__(self):
        if min(self.birth, self.predation, self.death) < 0:
            raise PreconditionError("rates must be nonnegative")


def predator_prey_generator(rates: RateTriple, space: TruncatedFock) -> np.ndarray:
    """Mode 0 counts prey, mode 1 predators."""
    if space.modes != 2:
        raise PreconditionError("the predator-prey model lives on two modes")
    A1, C1 = ladder_matrices(space, 0)
    A2, C2 = ladder_matrices(space, 1)
    births = C1 @ C1 @ A1 - C1 @ A1
    eats = C2 @ C2 @ A1 @ A2 - C1 @ C2 @ A1 @ A2
    deaths = A2 - C2 @ A2
    return rates.birth * births + rates.predation * eats + rates.death * deaths


def boundary_mass(space: TruncatedFock, values) -> float:
    """Absolute coefficient mass on the top-degree shell."""
    return float(np.abs(np.asarray(values)[space.degrees == space.cutoff]).sum())


def evolve_coefficients(gen, psi0: FockCoefficients, t: float, strict: bool = False) -> FockCoefficients:
    """``exp(t gen) psi0`` with the top-shell mass recorded.

    Top-shell mass above ``1e-6`` warns, or raises in strict mode.
    """
    if t < 0:
        raise PreconditionError(f"time must be nonnegative, got {t}")
    gen = np.asarray(gen)
    if gen.shape != (psi0.space.dim, psi0.space.dim):
        raise PreconditionError(f"generator shape {gen.shape} does not match space dimension {psi0.space.dim}")
    out = expm_general(gen, t) @ psi0.values
    bm = boundary_mass(psi0.space, out)
    if bm > BOUNDARY_WARN:
        msg = f"truncation-boundary mass {bm:.3e} exceeds {BOUNDARY_WARN:g}"
        if strict:
            raise TruncationError(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return FockCoefficients(psi0.space, out, bm)


def predator_prey_run(rates: RateTriple = RateTriple(0.3, 0.3, 0.3), cutoff: int = 8, t: float = 0.5,
                      start=(1, 1), strict: bool = False) -> FockCoefficients:
    space = TruncatedFock(2, cutoff)
    psi0 = FockCoefficients(space, space.basis(start))
    with warnings.catch_warnings():
        if not strict:
            warnings.simplefilter("ignore", RuntimeWarning)
        return evolve_coefficients(predator_prey_generator(rates, space), psi0, t, strict)
