"""Numerical laboratory for time-sliced propagators, cylinder-set measures,
finite-state jump processes, Poisson-switching wave solutions, truncated Fock
generators and Wick monomials of Gaussian fields."""
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
