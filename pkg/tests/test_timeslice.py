import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm as scipy_expm

from feynlab.errors import DomainError, PreconditionError
from feynlab.linops import expm_general
from feynlab.stats import loglog_slope
from feynlab.timeslice import (
    Grid1D, GridWavefunction, SliceParams, cylinder_function_apply, cylinder_function_integral,
    free_evolve, free_kernel, gaussian_state, grid_hamiltonian, kernel_matrix, spectral_reference,
    split_step_evolve, timeslice_apply, timeslice_matrix,
)


def test_free_kernel_values():
    assert free_kernel(1, 1.0, 0.0, 0.0) == pytest.approx(0.3989422804014327, abs=1e-15)
    assert free_kernel(1, 1.0, np.zeros(2), np.zeros(2), d=2) == pytest.approx(1 / (2 * math.pi), abs=1e-15)
    # principal branch of the square root of -i
    k = free_kernel(-1j, 2.0, 0.0, 0.0)
    assert k == pytest.approx(np.exp(-1j * math.pi / 4) / math.sqrt(4 * math.pi), abs=1e-15)


@given(st.floats(0.01, 10), st.floats(-5, 5), st.floats(-5, 5))
def test_imaginary_scale_has_constant_modulus(t, x, y):
    assert abs(free_kernel(1j, t, x, y)) == pytest.approx((2 * math.pi * t) ** -0.5, rel=1e-12)


@pytest.mark.parametrize("lam,t", [(0, 1.0), (-1 + 1j, 1.0), (1, 0.0), (1, -1.0)])
def test_free_kernel_domain(lam, t):
    with pytest.raises(DomainError):
        free_kernel(lam, t, 0.0, 0.0)


def test_grid_validation():
    with pytest.raises(PreconditionError):
        Grid1D(-1, 1, 100)
    with pytest.raises(PreconditionError):
        Grid1D(1, -1, 64)
    g = Grid1D(-1, 1, 64)
    assert g.h == pytest.approx(2 / 64) and g.x[0] == -1 and len(g.k) == 64


def test_slice_count_independence_heat_kernel():
    g = Grid1D(-10, 10, 256)
    V = np.zeros(g.points)
    K1 = timeslice_matrix(V, SliceParams(t=1, n=1, lam=1), g)
    for n in (2, 4, 8):
        Kn = timeslice_matrix(V, SliceParams(t=1, n=n, lam=1), g)
        assert np.linalg.norm(Kn - K1) / np.linalg.norm(K1) < 1e-8


def test_single_quantum_slice_is_bare_kernel():
    g = Grid1D(-6, 6, 64)
    K = timeslice_matrix(np.zeros(64), SliceParams(t=0.7, n=1), g)
    assert np.allclose(K, free_kernel(-1j, 0.7, g.x[:, None], g.x[None, :]), atol=1e-15)


def test_quantum_kernel_quadrature_limited_to_small_grids():
    with pytest.raises(PreconditionError):
        timeslice_matrix(np.zeros(256), SliceParams(n=2), Grid1D(-5, 5, 256))


def test_matrix_and_slice_application_agree():
    g = Grid1D(-8, 8, 128)
    V = 0.5 * g.x**2
    p = SliceParams(t=0.8, n=5, lam=1.0)
    psi = gaussian_state(g, 0.5)
    via_matrix = g.h * timeslice_matrix(V, p, g) @ psi.values
    assert np.allclose(via_matrix, timeslice_apply(psi, V, p).values, atol=1e-13)


def test_periodized_kernel_matches_spectral_heat_flow():
    g = Grid1D(-10, 10, 256)
    u = gaussian_state(g, 2.0, 0.7).values
    for s in (0.1, 0.5, 2.0):
        assert np.allclose(g.h * kernel_matrix(1.0, s, g) @ u, free_evolve(u, g, 1.0, s), atol=1e-12)


def test_heat_semigroup_on_grid():
    g = Grid1D(-10, 10, 256)
    Ks, Kt, Kst = (g.h * kernel_matrix(1.0, s, g) for s in (0.3, 0.5, 0.8))
    interior = np.abs(g.x) < 5
    assert np.abs((Ks @ Kt - Kst)[np.ix_(interior, interior)]).max() < 1e-10


def test_oscillator_slicing_error_decreases():
    # Real mass scale with the oscillatory potential phase: reference is the
    # exponential of the spectral generator Laplacian/2 - iV.
    g = Grid1D(-10, 10, 512)
    V = 0.5 * g.x**2
    psi = gaussian_state(g, 1.0)
    gen = -grid_hamiltonian(np.zeros(g.points), g) - 1j * np.diag(V)
    ref = expm_general(gen, 1.0) @ psi.values
    errs = [g.norm(timeslice_apply(psi, V, SliceParams(t=1, n=n, lam=1)).values - ref)
            for n in (8, 16, 32, 64, 128, 256)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert loglog_slope([8, 16, 32, 64, 128, 256], errs) < -0.9


def test_free_split_step_independent_of_n():
    g = Grid1D(-10, 10, 512)
    psi = gaussian_state(g, 0.5, 0.6)
    V = np.zeros(g.points)
    u1 = split_step_evolve(psi, V, SliceParams(t=1, n=1)).values
    for n in (2, 4, 8, 33):
        un = split_step_evolve(psi, V, SliceParams(t=1, n=n)).values
        assert g.norm(un - u1) < 1e-12


def test_zero_time_is_identity():
    g = Grid1D(-5, 5, 64)
    psi = gaussian_state(g, 0.2)
    out = split_step_evolve(psi, 0.5 * g.x**2, SliceParams(t=0.0, n=3))
    assert np.array_equal(out.values, psi.values)


def test_split_step_rejects_real_scale():
    g = Grid1D(-5, 5, 64)
    with pytest.raises(PreconditionError):
        split_step_evolve(gaussian_state(g), np.zeros(64), SliceParams(lam=1.0))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 64), st.floats(0.0, 3.0), st.integers(0, 2**32 - 1), st.floats(0.1, 3.0))
def test_split_step_preserves_norm(n, t, seed, mass):
    g = Grid1D(-8, 8, 128)
    r = np.random.default_rng(seed)
    psi = GridWavefunction(g, r.normal(size=128) + 1j * r.normal(size=128))
    V = r.uniform(-5, 5, size=128)
    out = split_step_evolve(psi, V, SliceParams(mass=mass, t=t, n=n))
    assert abs(out.norm() - psi.norm()) < 1e-12 * psi.norm()


def test_spectral_reference_matches_scipy():
    g = Grid1D(-6, 6, 64)
    V = 0.5 * g.x**2
    psi = gaussian_state(g, 1.0)
    H = grid_hamiltonian(V, g)
    want = scipy_expm(-1j * 0.7 * H) @ psi.values
    got = spectral_reference(psi, V, SliceParams(t=0.7)).values
    assert np.allclose(got, want, atol=1e-12)


def test_split_step_first_order_convergence():
    g = Grid1D(-10, 10, 256)
    V = 0.5 * g.x**2
    psi = gaussian_state(g, 1.0)
    ref = spectral_reference(psi, V, SliceParams(t=1)).values
    ns = [8, 16, 32, 64]
    errs = [g.norm(split_step_evolve(psi, V, SliceParams(t=1, n=n)).values - ref) for n in ns]
    assert loglog_slope(ns, errs) <= -0.9


def test_cylinder_functions_constant_one_is_free_propagator():
    g = Grid1D(-8, 8, 64)
    p = SliceParams(t=1.0)
    M = cylinder_function_integral([np.ones(64)] * 3, [0.2, 0.5, 0.9], p, g)
    U = free_evolve(np.eye(64), g, p.scale, 1.0)
    assert np.allclose(M, U, atol=1e-13)


def test_cylinder_function_mask_at_time_zero():
    g = Grid1D(-8, 8, 64)
    p = SliceParams(t=0.6)
    mask = (np.abs(g.x) < 2).astype(float)
    M = cylinder_function_integral([mask], [0.0], p, g)
    assert np.allclose(M, free_evolve(np.diag(mask).astype(complex), g, p.scale, 0.6), atol=1e-13)


def test_cylinder_functions_reproduce_split_step():
    g = Grid1D(-10, 10, 256)
    V = 0.5 * g.x**2
    n, t = 16, 1.0
    p = SliceParams(t=t, n=n)
    psi = gaussian_state(g, 1.0)
    phase = np.exp(-1j * (t / n) * V)
    times = [t * (j + 1) / n for j in range(n)]
    a = cylinder_function_apply([phase] * n, times, SliceParams(t=t), psi).values
    b = split_step_evolve(psi, V, p).values
    assert g.norm(a - b) < 1e-12


def test_cylinder_function_times_validated():
    g = Grid1D(-8, 8, 64)
    with pytest.raises(PreconditionError):
        cylinder_function_integral([np.ones(64)] * 2, [0.5, 0.2], SliceParams(t=1.0), g)
    with pytest.raises(PreconditionError):
        cylinder_function_integral([np.ones(64)], [1.5], SliceParams(t=1.0), g)
