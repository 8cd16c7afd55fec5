"""Set functions on cylinder sets of paths and their total variation.

For a mass scale ``lam`` with ``Re lam > 0`` the amplitude of a cylinder set is
a chain of Gaussian kernels interleaved with indicator masks, evaluated on the
grid with mesh-weighted sums.  On the imaginary axis the chain is evaluated
with exact spectral free evolution instead.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError, PreconditionError
from .timeslice import Grid1D, GridWavefunction, check_mass_scale, free_evolve

DEFAULT_CELL_BUDGET = 1_000_000
MAX_TIMES = 3


@dataclass(frozen=True)
class IntervalUnion:
    """Finite union of half-open intervals ``[lo, hi)``; ``None`` means the whole line."""

    intervals: tuple | None = None

    def __post_init__(self):
        if self.intervals is None:
            return
        ivs = sorted((float(lo), float(hi)) for lo, hi in self.intervals)
        for lo, hi in ivs:
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
                raise PreconditionError(f"bad interval ({lo}, {hi})")
        for (_, h1), (l2, _) in zip(ivs, ivs[1:]):
            if l2 < h1:
                raise PreconditionError(f"intervals overlap near {l2}")
        object.__setattr__(self, "intervals", tuple(ivs))

    @classmethod
    def everything(cls) -> "IntervalUnion":
        return cls(None)

    @property
    def is_all(self) -> bool:
        return self.intervals is None

    @property
    def is_empty(self) -> bool:
        return self.intervals is not None and len(self.intervals) == 0

    def mask(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.is_all:
            return np.ones(x.shape)
        m = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.intervals:
            m |= (x >= lo) & (x < hi)
        return m.astype(float)

    def to_json(self):
        return "all" if self.is_all else [list(iv) for iv in self.intervals]


ALL = IntervalUnion.everything()


@dataclass(frozen=True)
class CylinderSet:
    """Constraints ``X(times[j]) in sets[j]`` plus sets at the initial and final times."""

    times: tuple = ()
    sets: tuple = ()
    initial: IntervalUnion = ALL
    final: IntervalUnion = ALL

    def __post_init__(self):
        times = tuple(float(s) for s in self.times)
        if len(times) != len(self.sets):
            raise PreconditionError(f"{len(self.sets)} sets for {len(times)} times")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise PreconditionError(f"times must be strictly increasing, got {times}")
        if times and times[0] <= 0:
            raise PreconditionError("intermediate times must be positive")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "sets", tuple(self.sets))

    @classmethod
    def unrestricted(cls, times=()) -> "CylinderSet":
        return cls(tuple(times), tuple(ALL for _ in times))

    def check_horizon(self, t: float):
        if self.times and self.times[-1] >= t:
            raise PreconditionError(f"intermediate times must lie in (0, {t})")

    def to_json(self) -> dict:
        return {
            "times": list(self.times),
            "sets": [s.to_json() for s in self.sets],
            "initial": self.initial.to_json(),
            "final": self.final.to_json(),
        }


def _pair(phi: GridWavefunction, psi: GridWavefunction) -> Grid1D:
    if phi.grid != psi.grid:
        raise PreconditionError("phi and psi must share a grid")
    return phi.grid


def prefactor(lam: complex, t: float, times) -> complex:
    """``C_{n+1} lam^{(n+1)/2}`` with the principal branch of the power."""
    edges = [0.0, *times, t]
    gaps = np.diff(edges)
    c = float(np.prod((2.0 * np.pi * gaps) ** -0.5))
    return c * cmath.exp(0.5 * len(gaps) * cmath.log(lam))


def _gauss(lam: complex, s: float, x) -> np.ndarray:
    return np.exp(-lam * (x[:, None] - x[None, :]) ** 2 / (2.0 * s))


def cylinder_amplitude(lam: complex, t: float, E: CylinderSet, phi: GridWavefunction,
                       psi: GridWavefunction) -> complex:
    lam = check_mass_scale(lam)
    if not t > 0:
        raise DomainError(f"horizon must be positive, got {t}")
    E.check_horizon(t)
    g = _pair(phi, psi)
    sets = [E.initial, *E.sets, E.final]
    if any(s.is_empty for s in sets):
        return 0j
    x = g.x
    edges = [0.0, *E.times, t]
    u = E.initial.mask(x) * phi.values
    if lam.real == 0.0:
        for k in range(1, len(edges)):
            u = free_evolve(u, g, lam, edges[k] - edges[k - 1]) * sets[k].mask(x)
        return g.inner(psi.values, u)
    for k in range(1, len(edges)):
        u = g.h * (_gauss(lam, edges[k] - edges[k - 1], x) @ u) * sets[k].mask(x)
    return prefactor(lam, t, E.times) * g.inner(psi.values, u)


def variation_prefactor(lam: complex, n_times: int, d: int = 1) -> float:
    """``(|lam| / Re lam)^{d(n+1)/2}``; infinite on the imaginary axis."""
    lam = check_mass_scale(lam)
    if lam.real == 0.0:
        return math.inf
    return (abs(lam) / lam.real) ** (d * (n_times + 1) / 2.0)


def variation_closed_form(lam: complex, t: float, n_times: int, phi: GridWavefunction,
                          psi: GridWavefunction) -> float:
    """Total variation over the cylinder algebra at ``n_times`` intermediate times."""
    lam = check_mass_scale(lam)
    if n_times < 1:
        raise PreconditionError(f"need at least one intermediate time, got {n_times}")
    g = _pair(phi, psi)
    a, b = np.abs(phi.values), np.abs(psi.values)
    if not a.any() or not b.any():
        return 0.0
    if lam.real == 0.0:
        return math.inf
    re = lam.real
    overlap = g.h * g.h * (b @ np.exp(-re * (g.x[:, None] - g.x[None, :]) ** 2 / (2.0 * t)) @ a)
    return variation_prefactor(lam, n_times) * math.sqrt(re / (2.0 * math.pi * t)) * float(overlap)


def _cell_index(x, m: int, half_width: float) -> np.ndarray:
    idx = np.floor((x + half_width) / (2.0 * half_width / m)).astype(np.int64)
    return np.where((x >= -half_width) & (x < half_width), np.clip(idx, 0, m - 1), -1)


def variation_bruteforce(lam: complex, t: float, times, phi: GridWavefunction, psi: GridWavefunction,
                         m: int, half_width: float, budget: int = DEFAULT_CELL_BUDGET) -> float:
    """Sum of ``|amplitude|`` over the ``m^(n+2)`` product cells of the box ``[-L, L)``.

    Partial amplitudes are swept left to right: after coordinate ``k`` the state
    carries one column per combination of cells already fixed.
    """
    lam = check_mass_scale(lam)
    if lam.real == 0.0:
        raise DomainError("brute-force variation needs Re lam > 0")
    if m < 1 or half_width <= 0:
        raise PreconditionError(f"need m >= 1 and L > 0, got {m}, {half_width}")
    times = tuple(float(s) for s in times)
    if len(times) > MAX_TIMES:
        raise PreconditionError(f"at most {MAX_TIMES} intermediate times supported")
    E = CylinderSet.unrestricted(times)
    E.check_horizon(t)
    cells = m ** (len(times) + 2)
    if cells > budget:
        raise BudgetError(f"{cells} cells exceed the budget of {budget}")
    g = _pair(phi, psi)
    x = g.x
    cid = _cell_index(x, m, half_width)
    members = [np.flatnonzero(cid == c) for c in range(m)]
    edges = [0.0, *times, t]
    # columns indexed by cells of coordinates 0..k-1
    state = np.zeros((g.points, m), dtype=np.complex128)
    for c, pts in enumerate(members):
        state[pts, c] = phi.values[pts]
    for k in range(1, len(edges)):
        K = g.h * _gauss(lam, edges[k] - edges[k - 1], x)
        if k < len(edges) - 1:
            nxt = np.zeros((g.points, state.shape[1] * m), dtype=np.complex128)
            for c, pts in enumerate(members):
                nxt[:, c::m] = K[:, pts] @ state[pts, :]
            state = nxt
        else:
            state = np.stack([K[:, pts] @ state[pts, :] for pts in members], axis=1)
            state = state.reshape(g.points, -1)
    weights = g.h * np.conj(psi.values)
    total = 0.0
    for c, pts in enumerate(members):
        total += float(np.abs(weights[pts] @ state[pts, :]).sum())
    return abs(prefactor(lam, t, times)) * total


def analyticity_residual(E: CylinderSet, phi: GridWavefunction, psi: GridWavefunction, t: float,
                         center: complex, radius: float, nodes: int = 64) -> float:
    """Trapezoid contour integral of the amplitude in ``lam``, over ``max |amplitude|``."""
    center = complex(center)
    if nodes < 16:
        raise PreconditionError(f"need at least 16 contour nodes, got {nodes}")
    if radius <= 0 or center.real - radius <= 0:
        raise DomainError(f"contour |lam - {center}| = {radius} must stay in Re lam > 0")
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    pts = center + radius * np.exp(1j * theta)
    vals = np.array([cylinder_amplitude(z, t, E, phi, psi) for z in pts])
    peak = np.abs(vals).max()
    if peak == 0.0:
        return 0.0
    integral = np.sum(vals * 1j * (pts - center)) * (2.0 * np.pi / nodes)
    return float(abs(integral) / peak)


def blowup_table(lam: complex = 1 + 1j, ms=(8, 16, 32, 64), t: float = 1.0, half_width: float = 6.0,
                 points: int = 512, width: float = 1.0):
    """Rows ``(m, bruteforce, closed_form, ratio)`` for one intermediate time at ``t/2``."""
    from .timeslice import gaussian_state

    g = Grid1D(-half_width, half_width, points)
    phi = gaussian_state(g, 0.0, width)
    closed = variation_closed_form(lam, t, 1, phi, phi)
    rows = []
    for m in ms:
        b = variation_bruteforce(lam, t, (t / 2,), phi, phi, int(m), half_width)
        rows.append((int(m), b, closed, b / closed))
    return rows
