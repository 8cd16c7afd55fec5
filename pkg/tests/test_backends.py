"""The compiled and numpy kernels consume identical streams and agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from feynlab import _kernels
from feynlab._pykernels import _round_robin

from .helpers import random_hermitian

py = _kernels.python
cc = _kernels.compiled
needs_compiled = pytest.mark.skipif(cc is None, reason="compiled kernels not built")


def test_round_robin_covers_every_pair_once():
    for n in (2, 5, 8):
        seen = set()
        for P, Q in _round_robin(n):
            assert len(set(P) | set(Q)) == 2 * len(P)
            seen.update(zip(P.tolist(), Q.tolist()))
        assert seen == {(p, q) for p in range(n) for q in range(p + 1, n)}


@pytest.mark.parametrize("backend", [py, cc], ids=["python", "compiled"])
@pytest.mark.parametrize("complex_", [False, True])
def test_jacobi_against_numpy(backend, complex_, rng):
    if backend is None:
        pytest.skip("compiled kernels not built")
    for n in (1, 2, 7, 40):
        A = random_hermitian(rng, n, complex_)
        w, V, _ = backend.jacobi_eigh(A)
        assert np.allclose(np.sort(w), np.linalg.eigvalsh(A), atol=1e-11)
        assert np.allclose(V.conj().T @ V, np.eye(n), atol=1e-12)
        assert np.allclose((V * w) @ V.conj().T, A, atol=1e-11)


@pytest.mark.parametrize("backend", [py, cc], ids=["python", "compiled"])
def test_jacobi_degenerate_and_diagonal(backend):
    if backend is None:
        pytest.skip("compiled kernels not built")
    w, V, sweeps = backend.jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert sorted(w) == [1.0, 2.0, 3.0] and sweeps <= 1
    w, _, _ = backend.jacobi_eigh(np.ones((4, 4)))
    assert np.allclose(np.sort(w), [0, 0, 0, 4], atol=1e-13)


@needs_compiled
def test_normals_agree():
    a = py.normals(11, 3, 5, 101)
    b = cc.normals(11, 3, 5, 101)
    assert a.shape == b.shape == (5, 101)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-13)


@needs_compiled
def test_markov_paths_identical():
    n = 4
    cum = np.array([[0.0, 0.5, 0.9, 1.0, 1.0], [0.3, 0.3, 0.8, 1.0, 1.0],
                    [0.2, 0.6, 0.6, 0.95, 1.0], [0.25, 0.5, 0.75, 0.75, 1.0]])
    rate = np.array([1.0, 2.0, 0.5, 3.0])
    q = np.array([0.0, 0.3, 1.0, 2.0])
    a = py.markov_paths(cum, rate, 1, 2.0, 99, 5, 2000, q)
    b = cc.markov_paths(cum, rate, 1, 2.0, 99, 5, 2000, q)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert np.allclose(a[2], b[2], rtol=1e-14)
    assert n == cum.shape[0]


@needs_compiled
def test_telegraph_identical():
    st = np.array([0.1, 0.5, 1.0])
    a = py.telegraph(1.3, 1.0, 5, 0, 3000, st)
    b = cc.telegraph(1.3, 1.0, 5, 0, 3000, st)
    assert np.allclose(a[0], b[0], rtol=0, atol=1e-14)
    assert np.array_equal(a[1], b[1]) and np.array_equal(a[2], b[2])


def test_fallback_selected_by_environment():
    env = dict(os.environ, FEYNLAB_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "import feynlab; print(feynlab.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
