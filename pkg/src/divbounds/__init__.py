"""Exact evaluation and exhaustive verification of lower bounds on phi, psi, sigma."""

from .arith import Factorization, Fn, FunctionBundle, big_omega, bundle, evaluate, factorize, is_prime
from .catalog import gap, registry
from .sieve import RangeTable, sieve_range

__version__ = "0.1.0"

__all__ = [
    "Factorization",
    "Fn",
    "FunctionBundle",
    "RangeTable",
    "big_omega",
    "bundle",
    "evaluate",
    "factorize",
    "gap",
    "is_prime",
    "registry",
    "sieve_range",
]
