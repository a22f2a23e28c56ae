"""Sparse multivariate polynomials with exact integer coefficients."""

from __future__ import annotations

from typing import Mapping

__all__ = ["Poly", "VAR_ORDER"]

# Canonical variable order; other names sort after these alphabetically.
VAR_ORDER = ("n", "p", "q")


def _var_key(v: str):
    return (VAR_ORDER.index(v), "") if v in VAR_ORDER else (len(VAR_ORDER), v)


class Poly:
    """Immutable polynomial ``{monomial: coefficient}``.

    A monomial is a tuple of ``(variable, exponent)`` pairs sorted in
    canonical variable order with positive exponents, so two equal
    polynomials always have equal term maps.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[tuple[str, int], ...], int] | None = None):
        clean: dict = {}
        for mono, c in (terms or {}).items():
            if c:
                mono = tuple(sorted(((v, e) for v, e in mono if e), key=lambda ve: _var_key(ve[0])))
                clean[mono] = clean.get(mono, 0) + c
        self._terms = {m: c for m, c in clean.items() if c}
        self._hash = None

    # construction
    @classmethod
    def var(cls, name: str) -> Poly:
        return cls({((name, 1),): 1})

    @classmethod
    def const(cls, c: int) -> Poly:
        return cls({(): c})

    @classmethod
    def promote(cls, x) -> Poly:
        if isinstance(x, Poly):
            return x
        if isinstance(x, int) and not isinstance(x, bool):
            return cls.const(x)
        raise TypeError(f"cannot use {type(x).__name__} as a polynomial")

    @classmethod
    def from_coefficients(cls, var: str, coefs) -> Poly:
        """Univariate from coefficients listed highest power first."""
        d = len(coefs) - 1
        x = cls.var(var)
        out = cls()
        for i, c in enumerate(coefs):
            out = out + c * x ** (d - i)
        return out

    # inspection
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def variables(self) -> tuple[str, ...]:
        names = {v for mono in self._terms for v, _ in mono}
        return tuple(sorted(names, key=_var_key))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self._terms), default=0)

    def degree_in(self, var: str) -> int:
        return max((dict(m).get(var, 0) for m in self._terms), default=0)

    def constant_term(self) -> int:
        return self._terms.get((), 0)

    def coefficients(self, var: str | None = None) -> tuple[int, ...]:
        """Univariate coefficient vector, highest power first."""
        vs = self.variables
        if len(vs) > 1 or (var is not None and vs and vs != (var,)):
            raise ValueError(f"not univariate in {var!r}: variables {vs}")
        d = self.degree
        out = [0] * (d + 1)
        for mono, c in self._terms.items():
            out[d - sum(e for _, e in mono)] = c
        return tuple(out)

    def sorted_terms(self) -> list[tuple[tuple[tuple[str, int], ...], int]]:
        """Terms in graded order: total degree descending, then lexicographic."""
        def key(item):
            mono = item[0]
            exps = dict(mono)
            return (-sum(exps.values()), [-exps.get(v, 0) for v in self.variables])

        return sorted(self._terms.items(), key=key)

    # arithmetic
    def __eq__(self, other) -> bool:
        try:
            other = Poly.promote(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other) -> Poly:
        other = Poly.promote(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> Poly:
        return self + (-Poly.promote(other))

    def __rsub__(self, other) -> Poly:
        return Poly.promote(other) - self

    def __mul__(self, other) -> Poly:
        if isinstance(other, int) and not isinstance(other, bool):
            return Poly({m: c * other for m, c in self._terms.items()})
        other = Poly.promote(other)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"polynomial power needs a natural exponent, got {k!r}")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # evaluation and composition
    def __call__(self, **values: int) -> int:
        return self.evaluate(values)

    def evaluate(self, values: Mapping[str, int]) -> int:
        total = 0
        for mono, c in self._terms.items():
            t = c
            for v, e in mono:
                t *= values[v] ** e
            total += t
        return total

    def substitute(self, var: str, replacement) -> Poly:
        """Replace ``var`` by ``replacement`` everywhere."""
        return self.compose({var: replacement})

    def compose(self, mapping: Mapping[str, Poly | int]) -> Poly:
        """Simultaneous substitution of several variables."""
        repl = {v: Poly.promote(r) for v, r in mapping.items()}
        powers: dict[tuple[str, int], Poly] = {}

        def power(v: str, e: int) -> Poly:
            key = (v, e)
            if key not in powers:
                powers[key] = repl[v] ** e
            return powers[key]

        out = Poly()
        for mono, c in self._terms.items():
            kept = tuple((v, e) for v, e in mono if v not in repl)
            t = Poly({kept: c})
            for v, e in mono:
                if v in repl:
                    t = t * power(v, e)
            out = out + t
        return out

    def shift(self, offsets: Mapping[str, int]) -> Poly:
        """``self`` with each variable ``v`` replaced by ``v + offsets[v]``."""
        return self.compose({v: Poly.var(v) + k for v, k in offsets.items() if k})

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            body = "*".join(f"{v}^{e}" if e > 1 else v for v, e in mono)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items(), key=lambda ve: _var_key(ve[0])))
