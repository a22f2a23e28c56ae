"""Exact single-value evaluation of phi, psi, sigma and their unitary analogues.

Every value is a Python ``int``; nothing here ever rounds or wraps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from math import gcd, isqrt

__all__ = [
    "Fn",
    "Factorization",
    "FunctionBundle",
    "is_prime",
    "primality_is_proven",
    "factorize",
    "big_omega",
    "evaluate",
    "bundle",
]

TRIAL_LIMIT = 1000
_TRIAL_PRIMES = [p for p in range(2, TRIAL_LIMIT) if all(p % d for d in range(2, isqrt(p) + 1))]

# Bases 2..41 make Miller-Rabin deterministic below this bound (Sorenson & Webster).
DETERMINISTIC_MR_BOUND = 3_317_044_064_679_887_385_961_981
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

# Rounds of strong-probable-prime testing above the deterministic bound.
# Error probability per composite is at most 4**-PROBABLE_PRIME_ROUNDS.
PROBABLE_PRIME_ROUNDS = 40


class Fn(str, Enum):
    PHI = "PHI"
    PSI = "PSI"
    SIGMA = "SIGMA"
    PHI_STAR = "PHI_STAR"
    SIGMA_STAR = "SIGMA_STAR"


def _strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Primality of ``n``.

    Exact below ``DETERMINISTIC_MR_BOUND`` (fixed witness set). Larger inputs
    get ``PROBABLE_PRIME_ROUNDS`` strong-probable-prime rounds with bases drawn
    from an RNG seeded by ``n``, so the answer is reproducible; see
    :func:`primality_is_proven`.
    """
    if n < 2:
        return False
    for p in _TRIAL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < TRIAL_LIMIT * TRIAL_LIMIT:
        return True
    if n < DETERMINISTIC_MR_BOUND:
        return all(_strong_probable_prime(n, a) for a in _DETERMINISTIC_BASES)
    rng = random.Random(n)
    return all(
        _strong_probable_prime(n, rng.randrange(2, n - 1)) for _ in range(PROBABLE_PRIME_ROUNDS)
    )


def primality_is_proven(n: int) -> bool:
    """False when :func:`is_prime` on ``n`` is only a probable-prime verdict."""
    return n < DETERMINISTIC_MR_BOUND


def _brent_rho(n: int) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    rng = random.Random(n)
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _brent_rho(n)
    _split(d, out)
    _split(n // d, out)


@dataclass(frozen=True)
class Factorization:
    """Canonical prime-power decomposition; ``factors`` is sorted by prime."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"factorization needs n >= 1, got {self.n}")
        prod = 1
        last = 1
        for p, a in self.factors:
            if a < 1 or p <= last:
                raise ValueError(f"non-canonical factor list {self.factors!r}")
            last = p
            prod *= p**a
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")

    @property
    def probabilistic(self) -> bool:
        """True if some prime factor is only a strong probable prime."""
        return any(not primality_is_proven(p) for p, _ in self.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{a}" if a > 1 else str(p) for p, a in self.factors)


def factorize(n: int) -> Factorization:
    """Trial division below ``TRIAL_LIMIT``, then Brent's rho on the cofactor."""
    if n < 1:
        raise ValueError(f"cannot factorize {n}: n must be >= 1")
    found: dict[int, int] = {}
    m = n
    for p in _TRIAL_PRIMES:
        if p * p > m:
            break
        while m % p == 0:
            m //= p
            found[p] = found.get(p, 0) + 1
    if m > 1:
        _split(m, found)
    return Factorization(n, tuple(sorted(found.items())))


def big_omega(f: Factorization) -> int:
    return sum(a for _, a in f.factors)


def _local(fn: Fn, p: int, a: int) -> int:
    pa = p**a
    if fn is Fn.PHI:
        return pa // p * (p - 1)
    if fn is Fn.PSI:
        return pa // p * (p + 1)
    if fn is Fn.SIGMA:
        return (pa * p - 1) // (p - 1)
    if fn is Fn.PHI_STAR:
        return pa - 1
    if fn is Fn.SIGMA_STAR:
        return pa + 1
    raise ValueError(f"unknown function {fn!r}")


def evaluate(fn: Fn | str, f: Factorization) -> int:
    """Product of the prime-power local factors of ``fn``; 1 on n = 1."""
    fn = Fn(fn)
    out = 1
    for p, a in f.factors:
        out *= _local(fn, p, a)
    return out


@dataclass(frozen=True)
class FunctionBundle:
    n: int
    phi: int
    psi: int
    sigma: int
    phi_star: int
    sigma_star: int
    big_omega: int


def bundle(n: int) -> FunctionBundle:
    if n < 1:
        raise ValueError(f"bundle needs n >= 1, got {n}")
    f = factorize(n)
    return FunctionBundle(
        n=n,
        phi=evaluate(Fn.PHI, f),
        psi=evaluate(Fn.PSI, f),
        sigma=evaluate(Fn.SIGMA, f),
        phi_star=evaluate(Fn.PHI_STAR, f),
        sigma_star=evaluate(Fn.SIGMA_STAR, f),
        big_omega=big_omega(f),
    )
