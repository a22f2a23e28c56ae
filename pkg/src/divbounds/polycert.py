"""Machine-checked polynomial steps behind the five induction proofs.

Each theorem ``lhs(phi, psi, sigma) >= rhs(n)`` (T1..T5 in the catalog) is
proved by induction on the number of prime factors. The algebra each step
rests on reduces to a polynomial claim, checked here:

``C1_PRIME``
    n prime: phi = n-1, psi = sigma = n+1 makes lhs - rhs vanish identically.
``C2_PQ``
    n = pq: lhs at phi = (p-1)(q-1), psi = sigma = (p+1)(q+1), minus rhs(pq),
    is positive for all p, q >= 2 (so in particular for distinct primes).
``C3_PSQ``
    n = p^2: phi = p(p-1), psi = p(p+1), sigma = p^2+p+1; lhs - rhs(p^2) > 0.
``STEP_A_SPLIT``
    p not dividing n: lhs at (phi(p-1), psi(p+1), sigma(p+1)) equals a
    nonnegative multiple of lhs(phi, psi, sigma) plus correction terms. This
    is the regrouping identity in the symbols phi, psi, sigma.
``STEP_A``
    The same case after the induction hypothesis lhs >= rhs(n) and the side
    bounds are applied: phi < n (T1, T2), psi, sigma >= n+1 (T3),
    psi, sigma >= n+1 with phi+psi, phi+sigma >= 2n (T4, T5). What remains
    minus rhs(np) must be positive for n, p >= 2.
``STEP_B``
    p dividing n: phi(np) = p phi(n), psi(np) = p psi(n), sigma(np) > p sigma(n)
    give lhs(np) > p^d lhs(n) >= p^d rhs(n); p^d rhs(n) - rhs(np) > 0.

Substituting the side bounds into the correction terms is the logical glue
of the proof and is recorded here, not machine-checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from . import catalog
from .catalog import FormalExpression
from .poly import Poly

__all__ = [
    "Case",
    "Required",
    "Outcome",
    "ProofObligation",
    "CertificateVerdict",
    "THEOREMS",
    "shift_certificate",
    "expression_to_poly",
    "obligations",
    "certify",
    "certify_all",
    "obligation_table",
]

THEOREMS = ("T1", "T2", "T3", "T4", "T5")
DEGREE = {"T1": 3, "T2": 4, "T3": 4, "T4": 3, "T5": 4}

n, p, q = Poly.var("n"), Poly.var("p"), Poly.var("q")
phi, psi, sigma = Poly.var("phi"), Poly.var("psi"), Poly.var("sigma")


class Case(str, Enum):
    C1_PRIME = "C1_PRIME"
    C2_PQ = "C2_PQ"
    C3_PSQ = "C3_PSQ"
    STEP_A_SPLIT = "STEP_A_SPLIT"
    STEP_A = "STEP_A"
    STEP_B = "STEP_B"


class Required(str, Enum):
    IDENTITY_ZERO = "IDENTITY_ZERO"
    NONNEGATIVE = "NONNEGATIVE"
    STRICTLY_POSITIVE = "STRICTLY_POSITIVE"


class Outcome(str, Enum):
    PROVED = "PROVED"
    IDENTITY_CONFIRMED = "IDENTITY_CONFIRMED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class ProofObligation:
    id: str
    theorem: str
    case: Case
    expression: Poly
    lower_bounds: dict = field(hash=False)
    verdict_required: Required
    note: str = ""


@dataclass(frozen=True)
class CertificateVerdict:
    obligation_id: str
    outcome: Outcome
    strength: Required | None  # what was proved; None unless PROVED
    shift: dict = field(hash=False)
    witness: dict = field(hash=False)

    @property
    def ok(self) -> bool:
        return self.outcome is not Outcome.INCONCLUSIVE


def shift_certificate(e: Poly, lower_bounds: dict[str, int], obligation_id: str = "") -> CertificateVerdict:
    """Sound, incomplete positivity check on the box ``v >= lower_bounds[v]``.

    Substitutes ``v -> v + L_v``; if every coefficient of the result is
    nonnegative then ``e >= 0`` on the box (and ``> 0`` when the constant
    term is positive too, since every other monomial is then >= 0).
    """
    if e.is_zero():
        return CertificateVerdict(
            obligation_id, Outcome.IDENTITY_CONFIRMED, Required.IDENTITY_ZERO, {}, {"terms": 0}
        )
    missing = set(e.variables) - set(lower_bounds)
    if missing:
        raise ValueError(f"no lower bound for {sorted(missing)}")
    shift = {v: lower_bounds[v] for v in e.variables}
    shifted = e.shift(shift)
    coefs = list(shifted.terms.values())
    raw = list(e.terms.values())
    witness = {
        "terms": len(coefs),
        "min_coefficient": min(coefs),
        "constant_term": shifted.constant_term(),
        "raw_negative_terms": sum(c < 0 for c in raw),
        "shifted_negative_terms": sum(c < 0 for c in coefs),
    }
    if min(coefs) < 0:
        return CertificateVerdict(obligation_id, Outcome.INCONCLUSIVE, None, shift, witness)
    strength = Required.STRICTLY_POSITIVE if shifted.constant_term() > 0 else Required.NONNEGATIVE
    return CertificateVerdict(obligation_id, Outcome.PROVED, strength, shift, witness)


def expression_to_poly(e: FormalExpression, values: dict[str, Poly]) -> Poly:
    """Evaluate a catalog expression with each symbol mapped to a polynomial."""
    out = Poly()
    for coef, mono in e.terms:
        t = Poly.const(coef)
        for s, k in zip(catalog.SYMBOLS, mono):
            if k:
                t = t * values[s] ** k
        out = out + t
    return out


def _lhs(tid: str, ph, ps, sg) -> Poly:
    return expression_to_poly(catalog.get(tid).lhs, {"PHI": ph, "PSI": ps, "SIGMA": sg})


def _rhs(tid: str, at: Poly) -> Poly:
    return expression_to_poly(catalog.get(tid).rhs, {"N": at})


def prime_substitution(tid: str) -> Poly:
    """lhs at a prime n, i.e. with phi = n - 1 and psi = sigma = n + 1."""
    if tid not in THEOREMS:
        raise KeyError(tid)
    return _lhs(tid, n - 1, n + 1, n + 1)


def _split_form(tid: str) -> Poly:
    """Regrouped lhs(np) for p not dividing n, in the symbols phi, psi, sigma."""
    L = _lhs(tid, phi, psi, sigma)
    if tid == "T1":
        return (p + 1) ** 3 * L - (6 * p**2 + 2) * phi**3
    if tid == "T2":
        return (p + 1) ** 4 * L - (8 * p**3 + 8 * p) * phi**4
    if tid == "T3":
        return (p**2 - 1) ** 2 * L + 4 * p * (p + 1) ** 2 * psi**2 * sigma**2
    if tid == "T4":
        return (
            (p - 1) ** 2 * (p + 1) * L
            + (2 * p**2 - 2) * (psi**2 * phi + sigma**2 * phi)
            + (4 * p**2 + 4 * p) * (psi**2 * sigma + sigma**2 * psi)
        )
    if tid == "T5":
        return (
            (p - 1) ** 3 * (p + 1) * L
            + (4 * p**3 - 4 * p) * (psi**3 * phi + sigma**3 * phi)
            + (6 * p**3 + 6 * p**2 + 2 * p + 2) * (psi**3 * sigma + sigma**3 * psi)
        )
    raise KeyError(tid)


def _step_a_bound(tid: str) -> Poly:
    """Lower bound for lhs(np), p not dividing n, after the side bounds."""
    R = _rhs(tid, n)
    if tid == "T1":
        # phi < n bounds the subtracted term
        return (p + 1) ** 3 * R - (6 * p**2 + 2) * n**3
    if tid == "T2":
        return (p + 1) ** 4 * R - (8 * p**3 + 8 * p) * n**4
    if tid == "T3":
        # psi^2 sigma^2 >= (n+1)^4
        return (p**2 - 1) ** 2 * R + 4 * p * (p + 1) ** 2 * (n + 1) ** 4
    if tid == "T4":
        # 4p^2+4p = (2p^2+4p+2) + (2p^2-2); psi^2 sigma + sigma^2 psi >= 2(n+1)^3;
        # psi^2(phi+sigma) + sigma^2(phi+psi) >= 4n(n+1)^2
        return (
            (p - 1) ** 2 * (p + 1) * R
            + (2 * p**2 + 4 * p + 2) * 2 * (n + 1) ** 3
            + (2 * p**2 - 2) * 4 * n * (n + 1) ** 2
        )
    if tid == "T5":
        # 6p^3+6p^2+2p+2 = (2p^3+6p^2+6p+2) + (4p^3-4p); psi^3 sigma + sigma^3 psi >= 2(n+1)^4;
        # psi^3(phi+sigma) + sigma^3(phi+psi) >= 4n(n+1)^3
        return (
            (p - 1) ** 3 * (p + 1) * R
            + (4 * p**3 - 4 * p) * 4 * n * (n + 1) ** 3
            + (2 * p**3 + 6 * p**2 + 6 * p + 2) * 2 * (n + 1) ** 4
        )
    raise KeyError(tid)


@lru_cache(maxsize=None)
def obligations() -> tuple[ProofObligation, ...]:
    out = []
    for tid in THEOREMS:
        R = Required
        out.append(ProofObligation(
            f"{tid}-C1", tid, Case.C1_PRIME,
            prime_substitution(tid) - _rhs(tid, n),
            {"n": 2}, R.IDENTITY_ZERO,
            "n prime: lhs(n-1, n+1, n+1) - rhs(n) is the zero polynomial",
        ))
        out.append(ProofObligation(
            f"{tid}-C2", tid, Case.C2_PQ,
            _lhs(tid, (p - 1) * (q - 1), (p + 1) * (q + 1), (p + 1) * (q + 1)) - _rhs(tid, p * q),
            {"p": 2, "q": 2}, R.STRICTLY_POSITIVE,
            "n = pq: positive for all p, q >= 2",
        ))
        out.append(ProofObligation(
            f"{tid}-C3", tid, Case.C3_PSQ,
            _lhs(tid, p * (p - 1), p * (p + 1), p**2 + p + 1) - _rhs(tid, p**2),
            {"p": 2}, R.STRICTLY_POSITIVE,
            "n = p^2: positive for p >= 2",
        ))
        out.append(ProofObligation(
            f"{tid}-SA0", tid, Case.STEP_A_SPLIT,
            _lhs(tid, phi * (p - 1), psi * (p + 1), sigma * (p + 1)) - _split_form(tid),
            {"p": 2, "phi": 1, "psi": 1, "sigma": 1}, R.IDENTITY_ZERO,
            "p does not divide n: regrouping of lhs(np) is an identity",
        ))
        out.append(ProofObligation(
            f"{tid}-SA", tid, Case.STEP_A,
            _step_a_bound(tid) - _rhs(tid, n * p),
            {"n": 2, "p": 2}, R.STRICTLY_POSITIVE,
            "p does not divide n: bound after hypothesis and side bounds exceeds rhs(np)",
        ))
        out.append(ProofObligation(
            f"{tid}-SB", tid, Case.STEP_B,
            p ** DEGREE[tid] * _rhs(tid, n) - _rhs(tid, n * p),
            {"n": 2, "p": 2}, R.STRICTLY_POSITIVE,
            f"p divides n: p^{DEGREE[tid]} rhs(n) exceeds rhs(np)",
        ))
    return tuple(out)


def _meets(v: CertificateVerdict, need: Required) -> bool:
    if need is Required.IDENTITY_ZERO:
        return v.outcome is Outcome.IDENTITY_CONFIRMED
    if v.outcome is not Outcome.PROVED:
        return False
    return need is Required.NONNEGATIVE or v.strength is Required.STRICTLY_POSITIVE


def certify(ob: ProofObligation) -> CertificateVerdict:
    v = shift_certificate(ob.expression, ob.lower_bounds, ob.id)
    if _meets(v, ob.verdict_required):
        return v
    return CertificateVerdict(ob.id, Outcome.INCONCLUSIVE, v.strength, v.shift, v.witness)


def certify_all(theorem: str | None = None) -> list[CertificateVerdict]:
    """Certify every obligation (or one theorem's), in registry order."""
    if theorem is not None and theorem not in THEOREMS:
        raise KeyError(f"unknown theorem {theorem!r}; known: {', '.join(THEOREMS)}")
    return [certify(ob) for ob in obligations() if theorem in (None, ob.theorem)]


def obligation_table(theorem: str | None = None) -> str:
    """Human-readable listing of the obligation registry."""
    lines = [f"{'id':<8} {'case':<13} {'required':<18} {'bounds':<28} expression"]
    for ob in obligations():
        if theorem not in (None, ob.theorem):
            continue
        bounds = ",".join(f"{k}>={v}" for k, v in ob.lower_bounds.items())
        lines.append(f"{ob.id:<8} {ob.case.value:<13} {ob.verdict_required.value:<18} {bounds:<28} {ob.expression}")
    return "\n".join(lines)
