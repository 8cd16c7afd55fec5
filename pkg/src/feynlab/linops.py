"""Dense complex linear algebra shared by the other modules.

Hermitian matrices are diagonalised by cyclic Jacobi rotations (compiled
kernel when available) and exponentiated through the spectral calculus;
general square matrices use Taylor scaling and squaring.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NumericError, PreconditionError


@dataclass(frozen=True)
class SpectralDecomposition:
    """``A = U diag(eigenvalues) U*`` with ascending eigenvalues."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def apply_function(self, values: np.ndarray) -> np.ndarray:
        """``U diag(values) U*`` for values of a scalar function at the eigenvalues."""
        U = self.eigenvectors
        return (U * values) @ U.conj().T


def hermitian_defect(A: np.ndarray) -> float:
    """Largest entry of ``|A - A*|`` relative to the largest entry of ``|A|``."""
    A = np.asarray(A)
    scale = np.abs(A).max() if A.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.abs(A - A.conj().T).max() / scale)


def check_hermitian(A: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise PreconditionError("matrix has non-finite entries")
    defect = hermitian_defect(A)
    if defect > rtol:
        raise PreconditionError(f"matrix is not Hermitian: max relative asymmetry {defect:.3e}")
    return A


def eig_hermitian(A: np.ndarray) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix, eigenvalues ascending."""
    A = check_hermitian(A)
    H = 0.5 * (A + A.conj().T)
    w, V, sweeps = _kernels.jacobi_eigh(H)
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], np.ascontiguousarray(V[:, order]), sweeps)


def expm_spectral(A, z: complex) -> np.ndarray:
    """``exp(z A)`` for Hermitian ``A`` (or a precomputed decomposition of it)."""
    dec = A if isinstance(A, SpectralDecomposition) else eig_hermitian(A)
    if not np.isfinite(z):
        raise PreconditionError(f"exponent factor must be finite, got {z}")
    return dec.apply_function(np.exp(complex(z) * dec.eigenvalues))


def expm_general(A: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(t A)`` for a square matrix by Taylor scaling and squaring."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    B = np.asarray(t * A, dtype=np.complex128 if np.iscomplexobj(A) or np.iscomplexobj(t) else np.float64)
    norm = float(np.abs(B).sum(axis=0).max()) if n else 0.0
    if not math.isfinite(norm):
        raise NumericError(f"matrix exponential: non-finite norm estimate {norm}")
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    if squarings > 1000:
        raise NumericError(f"matrix exponential: norm estimate {norm:.3e} overflows scaling")
    B = B / (2.0**squarings)
    result = np.eye(n, dtype=B.dtype)
    term = np.eye(n, dtype=B.dtype)
    for k in range(1, 60):
        term = term @ B / k
        result = result + term
        if np.abs(term).max() <= 1e-18 * np.abs(result).max():
            break
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            result = result @ result
    if not np.all(np.isfinite(result)):
        raise NumericError(f"matrix exponential overflowed (norm estimate {norm:.3e})")
    return result
