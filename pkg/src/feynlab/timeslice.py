"""One-dimensional propagators on a uniform periodic grid.

Conventions: a mass scale ``lam`` with ``Re lam >= 0`` defines the semigroup
``exp(t Laplacian / (2 lam))``; the quantum case is ``lam = -i m / hbar``.
Inner products and norms carry the mesh weight ``h``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericError, PreconditionError
from .linops import SpectralDecomposition, eig_hermitian

IMAGE_SHELLS = 2


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise PreconditionError(f"grid needs x_min < x_max, got {self.x_min}, {self.x_max}")
        g = self.points
        if g < 2 or g & (g - 1):
            raise PreconditionError(f"grid size must be a power of two, got {g}")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def h(self) -> float:
        return self.length / self.points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.points)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.h)

    def inner(self, a, b) -> complex:
        """``<a, b>`` antilinear in the first slot."""
        return complex(self.h * np.vdot(a, b))

    def norm(self, a) -> float:
        return float(np.sqrt(self.h * np.sum(np.abs(a) ** 2)))


@dataclass(frozen=True)
class GridWavefunction:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.points,):
            raise PreconditionError(f"expected {self.grid.points} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise PreconditionError("wavefunction has non-finite samples")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: Grid1D, fn, normalize: bool = False) -> "GridWavefunction":
        psi = cls(grid, fn(grid.x))
        return psi.normalized() if normalize else psi

    def norm(self) -> float:
        return self.grid.norm(self.values)

    def normalized(self) -> "GridWavefunction":
        nrm = self.norm()
        if nrm == 0.0:
            raise PreconditionError("cannot normalise the zero state")
        return GridWavefunction(self.grid, self.values / nrm)


def gaussian_state(grid: Grid1D, center: float = 0.0, width: float = 1.0) -> GridWavefunction:
    return GridWavefunction.from_function(
        grid, lambda x: np.exp(-((x - center) ** 2) / (2.0 * width**2)), normalize=True
    )


@dataclass(frozen=True)
class SliceParams:
    mass: float = 1.0
    hbar: float = 1.0
    t: float = 1.0
    n: int = 1
    lam: complex | None = None  # None selects the quantum value -i m / hbar
    scale: complex = field(init=False)

    def __post_init__(self):
        if self.mass <= 0 or self.hbar <= 0:
            raise DomainError(f"mass and hbar must be positive, got {self.mass}, {self.hbar}")
        if self.t < 0:
            raise DomainError(f"time must be nonnegative, got {self.t}")
        if int(self.n) != self.n or self.n < 1:
            raise PreconditionError(f"slice count must be an integer >= 1, got {self.n}")
        lam = complex(-1j * self.mass / self.hbar) if self.lam is None else complex(self.lam)
        check_mass_scale(lam)
        object.__setattr__(self, "scale", lam)

    @property
    def dt(self) -> float:
        return self.t / self.n

    @property
    def quantum(self) -> bool:
        return self.scale.real == 0.0


def check_mass_scale(lam: complex) -> complex:
    lam = complex(lam)
    if lam == 0 or lam.real < 0 or not np.isfinite(lam):
        raise DomainError(f"mass scale must satisfy Re lam >= 0 and lam != 0, got {lam}")
    return lam


def free_kernel(lam: complex, t: float, x, y, d: int = 1):
    """Heat/Schroedinger kernel ``(lam/(2 pi t))^{d/2} exp(-lam |x-y|^2 / (2t))``.

    ``x`` and ``y`` broadcast; for ``d > 1`` the last axis holds coordinates.
    """
    lam = check_mass_scale(lam)
    if not t > 0:
        raise DomainError(f"kernel time must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = (x - y) ** 2 if d == 1 else np.sum((x - y) ** 2, axis=-1)
    pref = (lam / (2.0 * np.pi * t)) ** (d / 2.0)
    out = pref * np.exp(-lam * r2 / (2.0 * t))
    return out if np.ndim(out) else complex(out)


def kernel_matrix(lam: complex, s: float, grid: Grid1D, periodic: bool | None = None) -> np.ndarray:
    """Samples ``K[i, j] = kernel(x_i, x_j)`` for the kernel over time ``s``.

    With ``periodic`` (default when ``Re lam > 0``) the kernel is summed over
    nearby periodic images so it matches the periodic free evolution.
    """
    lam = check_mass_scale(lam)
    if periodic is None:
        periodic = lam.real > 0
    x = grid.x
    diff = x[:, None] - x[None, :]
    if not periodic:
        return free_kernel(lam, s, diff, 0.0)
    L = grid.length
    diff = (diff + L / 2) % L - L / 2
    out = np.zeros_like(diff, dtype=np.complex128)
    for j in range(-IMAGE_SHELLS, IMAGE_SHELLS + 1):
        out += free_kernel(lam, s, diff + j * grid.length, 0.0)
    return out


def potential_phase(V, p: SliceParams) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    if not np.all(np.isfinite(V)):
        raise PreconditionError("potential has non-finite values")
    return np.exp(-1j * p.dt * V / p.hbar)


def _check_diagnostic_size(p: SliceParams, g: Grid1D):
    if p.quantum and g.points > 128:
        raise PreconditionError(
            f"oscillatory kernel quadrature is limited to grids of <= 128 points, got {g.points}"
        )


def timeslice_matrix(V, p: SliceParams, g: Grid1D) -> np.ndarray:
    """Kernel of the n-slice product: ``K_n = K P (h K P)^{n-1}``.

    ``K`` holds free-kernel samples over one slice and ``P`` the potential
    phases at the slice start points.  Applying ``K_n`` to a state is
    ``h * K_n @ psi``.
    """
    _check_diagnostic_size(p, g)
    K = kernel_matrix(p.scale, p.dt, g)
    P = potential_phase(V, p)
    KP = K * P[None, :]
    step = g.h * KP
    acc = None
    power = step
    e = p.n - 1
    done = 1
    while e:
        if e & 1:
            acc = power if acc is None else acc @ power
        e >>= 1
        if e:
            power = power @ power
            done *= 2
            if not np.all(np.isfinite(power)):
                raise NumericError(f"non-finite kernel product after {done} slices")
    out = KP if acc is None else KP @ acc
    if not np.all(np.isfinite(out)):
        raise NumericError(f"non-finite kernel product at slice {p.n}")
    return out


def timeslice_apply(psi: GridWavefunction, V, p: SliceParams) -> GridWavefunction:
    """``K_n psi`` slice by slice, without forming the product kernel."""
    g = psi.grid
    _check_diagnostic_size(p, g)
    K = g.h * kernel_matrix(p.scale, p.dt, g)
    P = potential_phase(V, p)
    u = psi.values
    for j in range(p.n):
        u = K @ (P * u)
        if not np.all(np.isfinite(u)):
            raise NumericError(f"non-finite values at slice {j + 1}")
    return GridWavefunction(g, u)


def free_multiplier(grid: Grid1D, lam: complex, s: float) -> np.ndarray:
    """Fourier multiplier of the free evolution over time ``s``."""
    return np.exp(-s * grid.k**2 / (2.0 * complex(lam)))


def free_evolve(values: np.ndarray, grid: Grid1D, lam: complex, s: float) -> np.ndarray:
    if s == 0:
        return np.array(values, dtype=np.complex128)
    return np.fft.ifft(free_multiplier(grid, lam, s) * np.fft.fft(values, axis=0), axis=0)


def split_step_evolve(psi: GridWavefunction, V, p: SliceParams) -> GridWavefunction:
    """n Trotter steps: free evolution over ``t/n`` followed by the potential phase."""
    if not p.quantum:
        raise PreconditionError("split-step evolution needs a purely imaginary mass scale")
    g = psi.grid
    if p.t == 0:
        return psi
    kin = free_multiplier(g, p.scale, p.dt)
    pot = potential_phase(V, p)
    u = psi.values
    for _ in range(p.n):
        u = pot * np.fft.ifft(kin * np.fft.fft(u))
    return GridWavefunction(g, u)


def _check_times(times, t):
    times = [float(s) for s in times]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise PreconditionError(f"times must be strictly increasing, got {times}")
    if times and (times[0] < 0 or times[-1] > t):
        raise PreconditionError(f"times must lie in [0, {t}], got {times}")
    return times


def cylinder_function_apply(fs, times, p: SliceParams, psi: GridWavefunction) -> GridWavefunction:
    """Free evolutions interleaved with multiplications by ``fs[j]`` at ``times[j]``."""
    times = _check_times(times, p.t)
    if len(fs) != len(times):
        raise PreconditionError(f"{len(fs)} functions for {len(times)} times")
    g = psi.grid
    u = psi.values
    prev = 0.0
    for f, s in zip(fs, times):
        u = free_evolve(u, g, p.scale, s - prev) * np.asarray(f)
        prev = s
    return GridWavefunction(g, free_evolve(u, g, p.scale, p.t - prev))


def cylinder_function_integral(fs, times, p: SliceParams, g: Grid1D) -> np.ndarray:
    """Matrix of :func:`cylinder_function_apply` on the grid basis."""
    times = _check_times(times, p.t)
    if len(fs) != len(times):
        raise PreconditionError(f"{len(fs)} functions for {len(times)} times")
    M = np.eye(g.points, dtype=np.complex128)
    prev = 0.0
    for f, s in zip(fs, times):
        M = np.asarray(f)[:, None] * free_evolve(M, g, p.scale, s - prev)
        prev = s
    return free_evolve(M, g, p.scale, p.t - prev)


def grid_hamiltonian(V, grid: Grid1D, mass: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """Spectral kinetic term plus diagonal potential, as a real symmetric matrix."""
    G = grid.points
    kin = hbar**2 * grid.k**2 / (2.0 * mass)
    T = np.fft.ifft(kin[:, None] * np.fft.fft(np.eye(G), axis=0), axis=0).real
    T = 0.5 * (T + T.T)
    return T + np.diag(np.asarray(V, dtype=float))


def spectral_reference(psi: GridWavefunction, V, p: SliceParams,
                       decomposition: SpectralDecomposition | None = None) -> GridWavefunction:
    """``exp(-i t H / hbar) psi`` through the eigendecomposition of the grid Hamiltonian."""
    g = psi.grid
    dec = decomposition or eig_hermitian(grid_hamiltonian(V, g, p.mass, p.hbar))
    U = dec.eigenvectors
    coeff = U.conj().T @ psi.values
    return GridWavefunction(g, U @ (np.exp(-1j * p.t * dec.eigenvalues / p.hbar) * coeff))


def trotter_convergence(ns=(8, 16, 32, 64, 128, 256), t: float = 1.0, x_range=(-10.0, 10.0),
                        points: int = 512, center: float = 1.0, mass: float = 1.0, hbar: float = 1.0):
    """l2 error of split-step evolution against the spectral reference for the harmonic well.

    Returns ``(rows, slope)`` with rows of ``(n, error_l2)``.
    """
    from .stats import loglog_slope

    g = Grid1D(x_range[0], x_range[1], points)
    V = 0.5 * g.x**2
    psi = gaussian_state(g, center=center)
    ref = spectral_reference(psi, V, SliceParams(mass, hbar, t, 1))
    rows = []
    for n in ns:
        out = split_step_evolve(psi, V, SliceParams(mass, hbar, t, n))
        rows.append((int(n), g.norm(out.values - ref.values)))
    return rows, loglog_slope([r[0] for r in rows], [r[1] for r in rows])
