"""Registry of the twelve lower bounds and exact gap evaluation.

Each inequality is ``lhs >= rhs`` where both sides are integer polynomials in
the symbols ``PHI, PSI, SIGMA, PHI_STAR, SIGMA_STAR, N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .arith import FunctionBundle

__all__ = [
    "SYMBOLS",
    "EqualityClass",
    "FormalExpression",
    "InequalityDescriptor",
    "GapValue",
    "DomainError",
    "registry",
    "get",
    "IDS",
    "eval_expression",
    "gap",
]

SYMBOLS = ("PHI", "PSI", "SIGMA", "PHI_STAR", "SIGMA_STAR", "N")
_FIELD = dict(
    PHI="phi", PSI="psi", SIGMA="sigma", PHI_STAR="phi_star", SIGMA_STAR="sigma_star", N="n"
)


class DomainError(ValueError):
    """An inequality was evaluated below its validity threshold."""


class EqualityClass(str, Enum):
    PRIMES = "PRIMES"
    PRIME_POWERS = "PRIME_POWERS"
    UNKNOWN = "UNKNOWN"


Monomial = tuple[int, int, int, int, int, int]


@dataclass(frozen=True)
class FormalExpression:
    """Sum of ``coef * prod(symbol**exp)``; exponents are ordered as ``SYMBOLS``."""

    terms: tuple[tuple[int, Monomial], ...]

    def __post_init__(self):
        seen = set()
        for coef, mono in self.terms:
            if coef == 0:
                raise ValueError("zero coefficient in expression")
            if len(mono) != len(SYMBOLS) or any(e < 0 for e in mono):
                raise ValueError(f"bad exponent vector {mono!r}")
            if mono in seen:
                raise ValueError(f"duplicate monomial {mono!r}")
            seen.add(mono)

    @classmethod
    def from_terms(cls, terms) -> FormalExpression:
        """Build from ``(coef, {symbol: exp})`` pairs, merging like monomials."""
        acc: dict[Monomial, int] = {}
        for coef, exps in terms:
            mono = tuple(exps.get(s, 0) for s in SYMBOLS)
            unknown = set(exps) - set(SYMBOLS)
            if unknown:
                raise ValueError(f"unknown symbols {sorted(unknown)}")
            acc[mono] = acc.get(mono, 0) + coef
        return cls(tuple((c, m) for m, c in acc.items() if c != 0))

    @classmethod
    def poly_in_n(cls, *coefs: int) -> FormalExpression:
        """``coefs`` from the highest power of N down to the constant."""
        d = len(coefs) - 1
        return cls.from_terms((c, {"N": d - i}) for i, c in enumerate(coefs) if c)

    def __add__(self, other: FormalExpression) -> FormalExpression:
        return FormalExpression.from_terms(
            [(c, dict(zip(SYMBOLS, m))) for c, m in self.terms + other.terms]
        )

    @property
    def degree(self) -> int:
        return max((sum(m) for _, m in self.terms), default=0)

    def n_coefficients(self) -> tuple[int, ...]:
        """Coefficients on ``N**d .. N**0`` for an expression in N alone."""
        d = self.degree
        out = [0] * (d + 1)
        for c, m in self.terms:
            if any(m[:-1]):
                raise ValueError("expression involves function symbols")
            out[d - m[-1]] = c
        return tuple(out)

    def __str__(self) -> str:
        names = dict(PHI="phi", PSI="psi", SIGMA="sigma", PHI_STAR="phi*", SIGMA_STAR="sigma*", N="n")
        parts = []
        for c, m in self.terms:
            factors = [
                names[s] + (f"^{e}" if e > 1 else "") for s, e in zip(SYMBOLS, m) if e
            ]
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


@dataclass(frozen=True)
class InequalityDescriptor:
    id: str
    lhs: FormalExpression
    rhs: FormalExpression
    min_n: int
    expected_equality_class: EqualityClass
    title: str = ""
    strictness: str = ">="

    def __post_init__(self):
        if self.min_n not in (1, 2):
            raise ValueError("min_n must be 1 or 2")

    @property
    def difference(self) -> FormalExpression:
        """``lhs - rhs`` as one expression."""
        neg = FormalExpression(tuple((-c, m) for c, m in self.rhs.terms))
        return self.lhs + neg

    def __str__(self) -> str:
        return f"{self.lhs} >= {self.rhs}"


@dataclass(frozen=True)
class GapValue:
    n: int
    gap: int


def _sym_sum_sq_times_others(power: int) -> FormalExpression:
    # sum over x in (phi, psi, sigma) of x**power * (sum of the other two)
    fs = ("PHI", "PSI", "SIGMA")
    terms = []
    for a in fs:
        for b in fs:
            if a != b:
                terms.append((1, {a: power, b: 1}))
    return FormalExpression.from_terms(terms)


@lru_cache(maxsize=None)
def registry() -> tuple[InequalityDescriptor, ...]:
    F = FormalExpression.from_terms
    P = FormalExpression.poly_in_n
    E = EqualityClass
    phi_psi_sigma = F([(1, {"PHI": 1, "PSI": 1, "SIGMA": 1})])
    unitary = F([(1, {"PHI_STAR": 1, "SIGMA_STAR": 2})])
    atanassov = P(1, 1, -1, -1)
    return (
        InequalityDescriptor(
            "L1", F([(1, {"PHI": 1}), (1, {"PSI": 1})]), P(2, 0), 2, E.PRIME_POWERS,
            "phi + psi >= 2n",
        ),
        InequalityDescriptor(
            "L2", F([(1, {"PHI": 1}), (1, {"SIGMA": 1})]), P(2, 0), 2, E.PRIMES,
            "phi + sigma >= 2n",
        ),
        InequalityDescriptor(
            "A13", phi_psi_sigma, atanassov, 2, E.PRIMES,
            "phi*psi*sigma >= n^3 + n^2 - n - 1",
        ),
        InequalityDescriptor(
            "S14a", phi_psi_sigma, unitary, 1, E.UNKNOWN,
            "phi*psi*sigma >= phi* (sigma*)^2",
        ),
        InequalityDescriptor(
            "S14b", unitary, atanassov, 1, E.PRIME_POWERS,
            "phi* (sigma*)^2 >= n^3 + n^2 - n - 1",
        ),
        InequalityDescriptor(
            "D24a", F([(1, {"PHI": 2}), (1, {"PSI": 2}), (1, {"SIGMA": 2})]), P(3, 2, 3), 2,
            E.PRIMES, "phi^2 + psi^2 + sigma^2 >= 3n^2 + 2n + 3",
        ),
        InequalityDescriptor(
            "D24b",
            F([(1, {"PHI": 1, "PSI": 1}), (1, {"PHI": 1, "SIGMA": 1}), (1, {"SIGMA": 1, "PSI": 1})]),
            P(3, 2, -1), 2, E.PRIMES, "phi*psi + phi*sigma + sigma*psi >= 3n^2 + 2n - 1",
        ),
        InequalityDescriptor(
            "T1", F([(1, {"PHI": 3}), (1, {"PSI": 3}), (1, {"SIGMA": 3})]), P(3, 3, 9, 1), 2,
            E.PRIMES, "phi^3 + psi^3 + sigma^3 >= 3n^3 + 3n^2 + 9n + 1",
        ),
        InequalityDescriptor(
            "T2", F([(1, {"PHI": 4}), (1, {"PSI": 4}), (1, {"SIGMA": 4})]), P(3, 4, 18, 4, 3), 2,
            E.PRIMES, "phi^4 + psi^4 + sigma^4 >= 3n^4 + 4n^3 + 18n^2 + 4n + 3",
        ),
        InequalityDescriptor(
            "T3",
            F([
                (1, {"PHI": 2, "PSI": 2}),
                (1, {"PHI": 2, "SIGMA": 2}),
                (1, {"SIGMA": 2, "PSI": 2}),
            ]),
            P(3, 4, 2, 4, 3), 2, E.PRIMES,
            "phi^2 psi^2 + phi^2 sigma^2 + sigma^2 psi^2 >= 3n^4 + 4n^3 + 2n^2 + 4n + 3",
        ),
        InequalityDescriptor(
            "T4", _sym_sum_sq_times_others(2), P(6, 6, 2, 2), 2, E.PRIMES,
            "phi^2(psi+sigma) + psi^2(phi+sigma) + sigma^2(phi+psi) >= 6n^3 + 6n^2 + 2n + 2",
        ),
        InequalityDescriptor(
            "T5", _sym_sum_sq_times_others(3), P(6, 8, 12, 8, -2), 2, E.PRIMES,
            "phi^3(psi+sigma) + psi^3(phi+sigma) + sigma^3(phi+psi) >= 6n^4 + 8n^3 + 12n^2 + 8n - 2",
        ),
    )


IDS = tuple(d.id for d in registry())


def get(ineq_id: str) -> InequalityDescriptor:
    for d in registry():
        if d.id == ineq_id:
            return d
    raise KeyError(f"unknown inequality id {ineq_id!r}; known: {', '.join(IDS)}")


def eval_expression(e: FormalExpression, b: FunctionBundle) -> int:
    values = [getattr(b, _FIELD[s]) for s in SYMBOLS]
    total = 0
    for coef, mono in e.terms:
        term = coef
        for v, k in zip(values, mono):
            if k:
                term *= v**k
        total += term
    return total


def gap(ineq: InequalityDescriptor | str, b: FunctionBundle) -> GapValue:
    """Exact ``lhs - rhs`` at ``b.n``."""
    if isinstance(ineq, str):
        ineq = get(ineq)
    if b.n < ineq.min_n:
        raise DomainError(f"{ineq.id} holds for n >= {ineq.min_n}; got n = {b.n}")
    return GapValue(b.n, eval_expression(ineq.lhs, b) - eval_expression(ineq.rhs, b))
