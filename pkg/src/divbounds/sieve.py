"""Segmented sieve evaluation of the arithmetic functions over a range.

Each segment starts from ``residual = n`` and divides out every base prime
``p <= sqrt(hi)``, multiplying the local factor of each function into the
running products. Whatever is left above 1 is a single large prime.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

import numpy as np

from .arith import FunctionBundle

__all__ = [
    "DEFAULT_SEGMENT_LEN",
    "DEFAULT_BUDGET",
    "INT64_LIMIT",
    "ResourceError",
    "RangeTable",
    "base_primes",
    "sieve_range",
    "prime_mask",
    "prime_power_mask",
]

DEFAULT_SEGMENT_LEN = 1 << 20
DEFAULT_BUDGET = 1 << 24

# Above this hi the columns are kept as Python ints (object arrays).
# For n < 2**50 every column stays below 2**53, so int64 and float64 are exact.
INT64_LIMIT = 1 << 50

COLUMNS = ("n", "phi", "psi", "sigma", "phi_star", "sigma_star", "big_omega")


class ResourceError(RuntimeError):
    """A requested range exceeds the configured segment budget."""


@lru_cache(maxsize=8)
def _base_primes_cached(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    mark = np.ones(limit + 1, dtype=bool)
    mark[:2] = False
    for i in range(2, isqrt(limit) + 1):
        if mark[i]:
            mark[i * i :: i] = False
    out = np.flatnonzero(mark).astype(np.int64)
    out.flags.writeable = False
    return out


def base_primes(limit: int) -> np.ndarray:
    """All primes <= ``limit`` (plain Eratosthenes)."""
    # round up so nearby ranges share the cache entry
    table = _base_primes_cached((limit | 0xFFFF) + 1)
    return table[: int(np.searchsorted(table, limit, side="right"))]


@dataclass(frozen=True, eq=False)
class RangeTable:
    """Column-wise bundles for ``n = lo..hi``.

    Indexing and iteration yield :class:`FunctionBundle` rows; the numpy
    columns are there for vectorised consumers.
    """

    lo: int
    hi: int
    n: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    sigma: np.ndarray
    phi_star: np.ndarray
    sigma_star: np.ndarray
    big_omega: np.ndarray

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __getitem__(self, k: int) -> FunctionBundle:
        if k < 0:
            k += len(self)
        if not 0 <= k < len(self):
            raise IndexError(k)
        return FunctionBundle(*(int(getattr(self, c)[k]) for c in COLUMNS))

    def __iter__(self):
        cols = [getattr(self, c).tolist() for c in COLUMNS]
        for row in zip(*cols):
            yield FunctionBundle(*(int(v) for v in row))

    @property
    def rows(self) -> list[FunctionBundle]:
        return list(self)

    @property
    def exact_int64(self) -> bool:
        return self.n.dtype == np.int64

    def row_for(self, n: int) -> FunctionBundle:
        return self[n - self.lo]


def _sieve_segment(lo: int, hi: int, primes: np.ndarray, dtype) -> dict[str, np.ndarray]:
    size = hi - lo + 1
    if dtype is object:
        n = np.array(range(lo, hi + 1), dtype=object)
        one = lambda: np.full(size, 1, dtype=object)  # noqa: E731
    else:
        n = np.arange(lo, hi + 1, dtype=np.int64)
        one = lambda: np.ones(size, dtype=np.int64)  # noqa: E731
    residual = n.copy()
    phi, psi, sigma, phi_star, sigma_star = one(), one(), one(), one(), one()
    omega = np.zeros(size, dtype=np.int64)

    for p in primes.tolist():
        if p * p > hi:
            break
        start = (-lo) % p
        if start >= size:
            continue
        idx = np.arange(start, size, p)
        r = residual[idx] // p
        pa = np.full(idx.size, p, dtype=residual.dtype)
        s = np.full(idx.size, p + 1, dtype=residual.dtype)
        e = np.ones(idx.size, dtype=np.int64)
        # rows still divisible by p, as positions into idx
        live = np.flatnonzero(r % p == 0)
        while live.size:
            r[live] //= p
            pa[live] *= p
            s[live] = s[live] * p + 1
            e[live] += 1
            live = live[r[live] % p == 0]
        pa_over_p = pa // p
        phi[idx] *= pa_over_p * (p - 1)
        psi[idx] *= pa_over_p * (p + 1)
        sigma[idx] *= s
        phi_star[idx] *= pa - 1
        sigma_star[idx] *= pa + 1
        omega[idx] += e
        residual[idx] = r

    big = np.flatnonzero(residual > 1)
    if big.size:
        q = residual[big]
        phi[big] *= q - 1
        psi[big] *= q + 1
        sigma[big] *= q + 1
        phi_star[big] *= q - 1
        sigma_star[big] *= q + 1
        omega[big] += 1
    return dict(
        n=n, phi=phi, psi=psi, sigma=sigma, phi_star=phi_star, sigma_star=sigma_star, big_omega=omega
    )


def sieve_range(
    lo: int,
    hi: int,
    *,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    budget: int = DEFAULT_BUDGET,
) -> RangeTable:
    """Evaluate every function for ``n = lo..hi`` with a segmented sieve."""
    if lo < 1:
        raise ValueError(f"sieve_range needs lo >= 1, got {lo}")
    if lo > hi:
        raise ValueError(f"empty range: lo={lo} > hi={hi}")
    if hi - lo + 1 > budget:
        raise ResourceError(f"range of {hi - lo + 1} values exceeds segment budget {budget}")
    if segment_len < 1:
        raise ValueError("segment_len must be positive")
    dtype = np.int64 if hi < INT64_LIMIT else object
    primes = base_primes(isqrt(hi))
    parts = [
        _sieve_segment(a, min(a + segment_len - 1, hi), primes, dtype)
        for a in range(lo, hi + 1, segment_len)
    ]
    if len(parts) == 1:
        cols = parts[0]
    else:
        cols = {c: np.concatenate([part[c] for part in parts]) for c in COLUMNS}
    return RangeTable(lo=lo, hi=hi, **cols)


def prime_mask(lo: int, hi: int) -> np.ndarray:
    """Boolean mask of primes in ``lo..hi`` by segmented Eratosthenes."""
    size = hi - lo + 1
    mark = np.ones(size, dtype=bool)
    if lo <= 1:
        mark[: 2 - lo] = False
    for p in base_primes(isqrt(hi)).tolist():
        start = max(p * p, (lo + p - 1) // p * p)
        if start > hi:
            continue
        mark[start - lo :: p] = False
    return mark


def prime_power_mask(lo: int, hi: int) -> np.ndarray:
    """Boolean mask of ``p**a`` (a >= 1) in ``lo..hi``."""
    mark = prime_mask(lo, hi)
    for p in base_primes(isqrt(hi)).tolist():
        q = p * p
        while q <= hi:
            if q >= lo:
                mark[q - lo] = True
            q *= p
    return mark
