import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import hermite_e
from scipy import integrate, special, stats

from feynlab.errors import DomainError, PreconditionError
from feynlab.wick import (
    SpectralGrid, c_of_f, default_test_function, delta_divergence_scan, hermite_monic,
    ou_covariance, ou_sample_trajectories, sample_fields, sample_pairings, unit_box,
    wick_eval, wick_from_pairing, wick_moments,
)

GRID = SpectralGrid(32.0, 256)


def test_c_of_zero():
    assert c_of_f(np.zeros(GRID.points), GRID) == 0.0


@pytest.mark.parametrize("j", [0, 1, 5, 40])
def test_single_cosine_mode(j):
    k = 2 * math.pi * j / GRID.period
    f = np.cos(k * GRID.x)
    omega = math.sqrt(1 + k * k)
    # a constant puts all of |f|^2 = P on k = 0; a cosine splits P/2 across +-k
    expect = GRID.period / 2 if j == 0 else GRID.period / (4 * omega)
    assert c_of_f(f, GRID) ** 2 == pytest.approx(expect, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_parseval(seed):
    f = np.random.default_rng(seed).normal(size=GRID.points)
    assert GRID.spectral_norm(f) == pytest.approx(GRID.norm(f), rel=1e-12)
    # omega >= 1 gives c <= |f| / sqrt(2)
    assert c_of_f(f, GRID) <= GRID.norm(f) / math.sqrt(2) * (1 + 1e-12)


def test_hermite_low_degrees():
    x = np.linspace(-3, 3, 7)
    assert np.array_equal(hermite_monic(0, x), np.ones(7))
    assert np.array_equal(hermite_monic(1, x), x)
    assert np.allclose(hermite_monic(2, x), x**2 - 1, atol=0)
    assert hermite_monic(3, 2.0) == 2.0
    assert hermite_monic(4, 1.0) == -2.0


@pytest.mark.parametrize("n", range(11))
def test_hermite_matches_polynomial_basis(n):
    x = np.arange(-4, 5, dtype=float)
    ref = hermite_e.hermeval(x, [0] * n + [1])
    assert np.allclose(hermite_monic(n, x), ref, rtol=1e-12, atol=1e-9)


def test_hermite_orthogonality():
    nodes, weights = hermite_e.hermegauss(200)
    weights = weights / math.sqrt(2 * math.pi)
    for n in range(7):
        for m in range(7):
            val = np.sum(weights * hermite_monic(n, nodes) * hermite_monic(m, nodes))
            assert abs(val - (math.factorial(n) if n == m else 0.0)) < 1e-10


def test_hermite_degree_bounds():
    with pytest.raises(PreconditionError):
        hermite_monic(31, 0.0)
    with pytest.raises(PreconditionError):
        hermite_monic(-1, 0.0)


def test_pairing_variance_and_mean():
    f = default_test_function(GRID)
    c = c_of_f(f, GRID)
    p = sample_pairings([f], GRID, 40000, seed=3)[:, 0]
    se_mean = c / math.sqrt(p.size)
    assert abs(p.mean()) < 4 * se_mean
    se_var = c * c * math.sqrt(2 / (p.size - 1))
    assert abs(p.var(ddof=1) - c * c) < 4 * se_var


def test_orthogonal_modes_uncorrelated():
    k1, k2 = 2 * math.pi * 3 / GRID.period, 2 * math.pi * 7 / GRID.period
    fs = [np.cos(k1 * GRID.x), np.sin(k2 * GRID.x)]
    p = sample_pairings(fs, GRID, 40000, seed=5)
    r = np.corrcoef(p.T)[0, 1]
    assert abs(r) < 4 / math.sqrt(p.shape[0])


def test_pairing_shortcut_equals_explicit_fields():
    fs = [default_test_function(GRID), np.sin(GRID.x) * np.exp(-0.1 * GRID.x**2)]
    xi = sample_fields(GRID, 300, seed=9, stream0=11)
    direct = np.stack([GRID.pair(f, xi) for f in fs], axis=1)
    fast = sample_pairings(fs, GRID, 300, seed=9, stream0=11)
    assert np.allclose(direct, fast, rtol=1e-10, atol=1e-12)


def test_pairings_thread_independent():
    f = default_test_function(GRID)
    a = sample_pairings([f], GRID, 5000, seed=1, threads=1)
    b = sample_pairings([f], GRID, 5000, seed=1, threads=4)
    assert np.array_equal(a, b)


def test_ou_single_time_is_sharp_time_law():
    f = default_test_function(GRID)
    c = c_of_f(f, GRID)
    ou = ou_sample_trajectories(GRID, [0.0, 0.7], 10000, seed=2)
    sharp = sample_pairings([f], GRID, 10000, seed=78)[:, 0]
    assert stats.ks_2samp(GRID.pair(f, ou[0]), sharp).pvalue > 0.01
    for x in ou:
        assert stats.kstest(GRID.pair(f, x), "norm", args=(0.0, c)).pvalue > 0.01


def test_ou_stationary_across_times():
    f = default_test_function(GRID)
    c2 = c_of_f(f, GRID) ** 2
    n = 20000
    for x in ou_sample_trajectories(GRID, [0.0, 0.4, 1.3, 5.0], n, seed=6):
        p = GRID.pair(f, x)
        assert abs(p.mean()) < 4 * math.sqrt(c2 / n)
        assert abs(p.var(ddof=1) - c2) < 4 * c2 * math.sqrt(2 / (n - 1))


def test_ou_zero_step_repeats():
    a, b = ou_sample_trajectories(GRID, [0.3, 0.3], 50, seed=4)
    assert np.allclose(a, b, rtol=0, atol=1e-13)


def test_ou_decreasing_times_rejected():
    with pytest.raises(PreconditionError):
        ou_sample_trajectories(GRID, [1.0, 0.5], 2, seed=0)


@pytest.mark.parametrize("s,t", [(0.0, 0.5), (0.0, 1.5), (0.2, 0.2)])
def test_ou_covariance_empirical(s, t):
    f = default_test_function(GRID)
    g = np.exp(-((GRID.x - 1) ** 2))
    xs, xt = ou_sample_trajectories(GRID, [s, t], 20000, seed=8)
    a, b = GRID.pair(f, xs), GRID.pair(g, xt)
    prod = a * b
    se = prod.std(ddof=1) / math.sqrt(prod.size)
    assert abs(prod.mean() - ou_covariance(f, g, s, t, GRID)) < 4 * se


def test_ou_covariance_structure():
    f = default_test_function(GRID)
    assert ou_covariance(f, f, 1.0, 1.0, GRID) == pytest.approx(c_of_f(f, GRID) ** 2, rel=1e-12)
    vals = [ou_covariance(f, f, 0.0, t, GRID) for t in (0.0, 0.3, 1.0, 3.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert ou_covariance(f, f, 2.0, 0.5, GRID) == ou_covariance(f, f, 0.5, 2.0, GRID)
    k = 2 * math.pi * 4 / GRID.period
    cosk = np.cos(k * GRID.x)
    om = math.sqrt(1 + k * k)
    assert ou_covariance(cosk, cosk, 0.0, 0.8, GRID) == pytest.approx(
        GRID.period / (4 * om) * math.exp(-0.8 * om), rel=1e-12)


def test_wick_low_orders():
    p = np.array([-1.0, 0.5, 2.0])
    c = 0.7
    assert np.allclose(wick_from_pairing(p, c, 1), p)
    assert np.allclose(wick_from_pairing(p, c, 2), p**2 - c**2)
    assert np.allclose(wick_from_pairing(p, c, 3), p**3 - 3 * c**2 * p)
    with pytest.raises(DomainError):
        wick_from_pairing(p, 0.0, 2)
    with pytest.raises(DomainError):
        wick_eval(np.zeros(GRID.points), np.zeros(GRID.points), 2, GRID)


def test_wick_second_moments():
    rows, c = wick_moments(GRID, 100000, seed=12, n_max=4)
    for m, n, emp, exact, se, z in rows:
        if m == n:
            assert exact == pytest.approx(math.factorial(n) * c ** (2 * n), rel=1e-12)
        assert abs(z) < 4.5


def test_unit_box_mass_and_translation():
    g = SpectralGrid(32.0, 2048)
    for w in (0.5, 0.3333, 1.7):
        assert g.h * unit_box(g, w).sum() == pytest.approx(1.0, abs=1e-12)
    a = delta_divergence_scan([0.5, 0.25], g, center=0.0)[0]
    b = delta_divergence_scan([0.5, 0.25], g, center=32 * g.h)[0]
    for (_, va), (_, vb) in zip(a, b):
        assert va == pytest.approx(vb, rel=1e-12)


def test_scan_resolution_convergence():
    widths = [0.8, 0.4, 0.2]
    coarse = delta_divergence_scan(widths, SpectralGrid(32.0, 2048))[0]
    fine = delta_divergence_scan(widths, SpectralGrid(32.0, 4096))[0]
    for (_, a), (_, b) in zip(coarse, fine):
        assert abs(a / b - 1) < 0.02


def test_scan_rejects_bad_widths():
    g = SpectralGrid(32.0, 256)
    with pytest.raises(PreconditionError):
        delta_divergence_scan([0.2, 0.1], g)
    with pytest.raises(PreconditionError):
        delta_divergence_scan([0.5, 1.0], g)


def _box_variance_continuum(w):
    # the 1-D kernel of (-Laplacian + 1)^{-1/2} is K0(|x|) / pi
    val = integrate.quad(lambda r: (w - r) * special.k0(r), 0, w, limit=200)[0]
    return val / (math.pi * w * w)


def test_box_variance_follows_bessel_kernel():
    g = SpectralGrid(32.0, 8192)
    widths = [0.8, 0.4, 0.2, 0.1, 0.05]
    rows, _ = delta_divergence_scan(widths, g)
    for w, var in rows:
        assert var == pytest.approx(_box_variance_continuum(w), rel=2e-3)
