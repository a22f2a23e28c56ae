"""Slow, independent reference implementations used only by the tests.

Nothing here imports from divbounds.
"""

from math import gcd, isqrt


def trial_is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, isqrt(n) + 1))


def trial_factor(n):
    out = []
    d = 2
    while d * d <= n:
        a = 0
        while n % d == 0:
            n //= d
            a += 1
        if a:
            out.append((d, a))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def divisors(n):
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def sigma_enum(n):
    return sum(divisors(n))


def phi_enum(n):
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def psi_enum(n):
    # n * prod(1 + 1/p) over distinct prime divisors p, primes found by trial
    num, den = n, 1
    for p in [d for d in divisors(n) if trial_is_prime(d)]:
        num *= p + 1
        den *= p
    assert num % den == 0
    return num // den


def unitary_divisors(n):
    return [d for d in divisors(n) if gcd(d, n // d) == 1]


def sigma_star_enum(n):
    return sum(unitary_divisors(n))


def phi_star_enum(n):
    # sum over unitary divisors d of (-1)^omega(d) * n/d
    total = 0
    for d in unitary_divisors(n):
        omega = sum(1 for p in divisors(d) if trial_is_prime(p))
        total += (-1) ** omega * (n // d)
    return total


def big_omega_trial(n):
    return sum(a for _, a in trial_factor(n))


def is_squarefree(n):
    return all(a == 1 for _, a in trial_factor(n))


def is_prime_power(n):
    return len(trial_factor(n)) == 1


def lucas_lehmer(p):
    """Primality of the Mersenne number 2**p - 1 for odd prime p."""
    m = (1 << p) - 1
    s = 4
    for _ in range(p - 2):
        s = (s * s - 2) % m
    return s == 0


def bundle_oracle(n):
    """(n, phi, psi, sigma, phi*, sigma*, omega) by enumeration."""
    return (
        n,
        phi_enum(n),
        psi_enum(n),
        sigma_enum(n),
        phi_star_enum(n),
        sigma_star_enum(n),
        big_omega_trial(n),
    )


def bundle_fast_oracle(n):
    """Same tuple from trial-division factorisation and divisor enumeration for sigma.

    Cheap enough to sweep 10**5 values; phi, psi and the unitary pair come
    from the factor list, sigma from summing divisors.
    """
    fac = trial_factor(n)
    phi = psi = phs = sgs = 1
    omega = 0
    for p, a in fac:
        pa = p**a
        phi *= pa - pa // p
        psi *= pa + pa // p
        phs *= pa - 1
        sgs *= pa + 1
        omega += a
    return (n, phi, psi, sigma_enum(n), phs, sgs, omega)
